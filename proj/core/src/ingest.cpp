#include "nssfr/ingest.hpp"

#include "nssfr/error.hpp"
#include "nssfr/log.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fnmatch.h>
#include <fstream>

namespace fs = std::filesystem;

namespace nssfr {
namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool supported_container(const fs::path& p) {
    const std::string ext = lower(p.extension().string());
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

void set_why(std::string* why, std::string text) {
    if (why) *why = std::move(text);
}

} // namespace

Dataset::Dataset(fs::path root, std::vector<Entry> entries) : root_(std::move(root)), entries_(std::move(entries)) {}

std::optional<Frame> Dataset::load(std::size_t i, std::string* why) const {
    const Entry& e = entries_.at(i);
    if (!supported_container(e.path)) {
        set_why(why, "unsupported container (PNG and JPEG only)");
        return std::nullopt;
    }
    return decode_image(e.path, e.id, why);
}

Dataset load_dataset(const fs::path& root, const std::string& pattern, std::size_t limit) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw ConfigError("input is not a directory: " + root.string());
    }
    std::vector<Dataset::Entry> entries;
    for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (!it->is_regular_file(ec)) continue;
        const std::string name = it->path().filename().string();
        if (fnmatch(pattern.c_str(), name.c_str(), 0) != 0) continue;
        entries.push_back({fs::relative(it->path(), root).generic_string(), it->path()});
    }
    if (entries.empty()) {
        throw EmptyInputError("no images matched pattern '" + pattern + "' under " + root.string());
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    if (limit > 0 && entries.size() > limit) entries.resize(limit);
    return Dataset(root, std::move(entries));
}

double luma(std::uint16_t r, std::uint16_t g, std::uint16_t b, int bit_depth) {
    const double full_scale = std::ldexp(1.0, bit_depth) - 1.0;
    return (0.299 * r + 0.587 * g + 0.114 * b) / full_scale;
}

LuminanceImage to_luminance(std::span<const std::uint16_t> samples, int width, int height, int channels,
                            int bit_depth) {
    if (channels != 1 && channels != 3) throw Error("to_luminance: expected 1 or 3 channels");
    if (samples.size() != static_cast<std::size_t>(width) * height * channels) {
        throw Error("to_luminance: sample count does not match dimensions");
    }
    const double full_scale = std::ldexp(1.0, bit_depth) - 1.0;
    LuminanceImage out(width, height);
    auto& dst = out.data();
    if (channels == 1) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = samples[i] / full_scale;
    } else {
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = luma(samples[3 * i], samples[3 * i + 1], samples[3 * i + 2], bit_depth);
        }
    }
    for (double& v : dst) v = std::clamp(v, 0.0, 1.0);
    return out;
}

std::optional<Frame> decode_image(const fs::path& path, const std::string& id, std::string* why) {
    cv::Mat img;
    try {
        img = cv::imread(path.string(), cv::IMREAD_ANYDEPTH | cv::IMREAD_ANYCOLOR);
    } catch (const cv::Exception& e) {
        set_why(why, std::string("decode failed: ") + e.what());
        return std::nullopt;
    }
    if (img.empty()) {
        set_why(why, "decode failed");
        return std::nullopt;
    }
    if (img.cols < kMinFrameSide || img.rows < kMinFrameSide) {
        set_why(why, "image smaller than 64x64");
        return std::nullopt;
    }
    int bit_depth = 8;
    if (img.depth() == CV_16U) {
        bit_depth = 16;
    } else if (img.depth() != CV_8U) {
        set_why(why, "unsupported sample depth");
        return std::nullopt;
    }
    cv::Mat wide;
    img.convertTo(wide, CV_MAKETYPE(CV_16U, img.channels()));
    if (!wide.isContinuous()) wide = wide.clone();
    const int src_channels = wide.channels();
    if (src_channels != 1 && src_channels != 3 && src_channels != 4) {
        set_why(why, "unsupported channel count");
        return std::nullopt;
    }
    const int channels = src_channels == 1 ? 1 : 3;
    const std::size_t n_pixels = wide.total();
    const auto* src = wide.ptr<std::uint16_t>();
    std::vector<std::uint16_t> samples(n_pixels * channels);
    for (std::size_t i = 0; i < n_pixels; ++i) {
        if (channels == 1) {
            samples[i] = src[i];
        } else {
            // OpenCV delivers BGR(A)
            const std::uint16_t* px = src + i * src_channels;
            samples[3 * i] = px[2];
            samples[3 * i + 1] = px[1];
            samples[3 * i + 2] = px[0];
        }
    }

    Frame f;
    f.id = id;
    f.bit_depth = bit_depth;
    f.luminance = to_luminance(samples, wide.cols, wide.rows, channels, bit_depth);
    return f;
}

namespace {

cv::Mat to_mat(const LuminanceImage& lum, int bit_depth, int downscale) {
    downscale = std::max(1, downscale);
    const int w = std::max(1, lum.width() / downscale);
    const int h = std::max(1, lum.height() / downscale);
    const double full_scale = std::ldexp(1.0, bit_depth) - 1.0;
    cv::Mat m(h, w, bit_depth == 16 ? CV_16UC1 : CV_8UC1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = 0; dy < downscale; ++dy) {
                for (int dx = 0; dx < downscale; ++dx) acc += lum(x * downscale + dx, y * downscale + dy);
            }
            const double v = std::lround(std::clamp(acc / (downscale * downscale), 0.0, 1.0) * full_scale);
            if (bit_depth == 16) {
                m.at<std::uint16_t>(y, x) = static_cast<std::uint16_t>(v);
            } else {
                m.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(v);
            }
        }
    }
    return m;
}

} // namespace

void write_png(const fs::path& path, const LuminanceImage& lum, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw ConfigError("PNG bit depth must be 8 or 16");
    std::vector<std::uint8_t> bytes;
    if (!cv::imencode(".png", to_mat(lum, bit_depth, 1), bytes)) throw Error("PNG encoding failed");
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write " + path.string());
}

std::vector<std::uint8_t> encode_png(const LuminanceImage& lum, int downscale) {
    std::vector<std::uint8_t> bytes;
    if (!cv::imencode(".png", to_mat(lum, 8, downscale), bytes)) throw Error("PNG encoding failed");
    return bytes;
}

} // namespace nssfr
