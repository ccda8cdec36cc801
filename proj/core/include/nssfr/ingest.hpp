#pragma once

#include "nssfr/image.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nssfr {

/// Files matched for a run, in lexicographic id order. Decoding is deferred
/// to load() so workers can decode concurrently while memory stays bounded.
class Dataset {
public:
    struct Entry {
        std::string id; ///< path relative to the dataset root, '/' separated
        std::filesystem::path path;
    };

    Dataset(std::filesystem::path root, std::vector<Entry> entries);

    const std::filesystem::path& root() const { return root_; }
    std::size_t size() const { return entries_.size(); }
    const Entry& entry(std::size_t i) const { return entries_[i]; }
    const std::vector<Entry>& entries() const { return entries_; }

    /// Decodes entry i. Returns nullopt and fills `why` when the file cannot
    /// be used (unsupported container, decode failure, too small).
    std::optional<Frame> load(std::size_t i, std::string* why = nullptr) const;

private:
    std::filesystem::path root_;
    std::vector<Entry> entries_;
};

/// Enumerates files under `root` (recursively) whose file name matches the
/// shell glob `pattern`. Throws ConfigError if root is not a directory and
/// EmptyInputError if nothing matched.
Dataset load_dataset(const std::filesystem::path& root, const std::string& pattern, std::size_t limit = 0);

/// Decodes a single PNG or JPEG file into a Frame with the given id.
std::optional<Frame> decode_image(const std::filesystem::path& path, const std::string& id, std::string* why = nullptr);

/// BT.601 luma of interleaved samples, scaled to [0,1] by 2^bit_depth - 1.
/// `channels` is 1 (gray, passed through scaled) or 3 (R,G,B order).
LuminanceImage to_luminance(std::span<const std::uint16_t> samples, int width, int height, int channels, int bit_depth);

/// Single-pixel form of to_luminance for RGB input.
double luma(std::uint16_t r, std::uint16_t g, std::uint16_t b, int bit_depth);

/// Writes luminance as a grayscale PNG with the given bit depth (8 or 16).
void write_png(const std::filesystem::path& path, const LuminanceImage& lum, int bit_depth = 16);

/// Encodes luminance as PNG bytes (8-bit), optionally downscaled by an integer factor.
std::vector<std::uint8_t> encode_png(const LuminanceImage& lum, int downscale = 1);

} // namespace nssfr
