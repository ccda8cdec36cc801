#pragma once

#include "nssfr/image.hpp"
#include "nssfr/mask.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nssfr {

/// A rendered slanted edge with analytically known MTF.
///
/// The edge passes through the patch centre; `angle_deg` is the direction
/// of the dark-to-light normal in image coordinates (x right, y down).
struct SynthEdgeSpec {
    int width = 128;
    int height = 128;
    double angle_deg = 5.0;
    double contrast = 0.5;
    double mean_level = 0.5;
    double blur_sigma = 1.0;   ///< Gaussian PSF sigma, px
    double noise_sigma = 0.0;  ///< additive Gaussian noise, luminance units
    double sharpen_gain = 0.0; ///< unsharp-mask gain
    double sharpen_sigma = 1.5;
    int supersampling = 8;     ///< area samples per pixel side
    std::uint64_t seed = 1;

    void validate() const;
};

/// exp(-2 pi^2 sigma^2 f^2) * |sinc(f)|: blur times pixel aperture.
double analytic_mtf(double blur_sigma, double frequency);

/// Root of analytic_mtf(sigma, f) = 0.5, found by bisection.
double analytic_mtf50(double blur_sigma);

Frame make_slanted_edge(const SynthEdgeSpec& spec, const std::string& id = "synthetic");

struct PlacedEdge {
    Point2d center; ///< patch centre in scene coordinates
    SynthEdgeSpec spec;
};

struct SceneSpec {
    int width = 512;
    int height = 512;
    double background = 0.5;
    double outside_mask = 0.02; ///< luminance painted outside the mask (vignetting)
    int min_separation = 10;    ///< px between patch rectangles
    std::vector<PlacedEdge> edges;
    std::optional<RegionMask> mask;
};

/// Composites edge patches onto a flat background and darkens everything
/// outside the mask. Throws ConfigError for overlapping or out-of-frame patches.
Frame make_scene(const SceneSpec& scene, const std::string& id = "scene");

/// One frame requested by a synth job file: either a single edge or a scene.
struct SynthRequest {
    std::string id;
    std::optional<SynthEdgeSpec> edge;
    std::optional<SceneSpec> scene;
};

struct SynthJob {
    int bit_depth = 16;
    std::vector<SynthRequest> frames;
};

/// Job file format:
///   { "bit_depth": 16,
///     "frames": [ { "id": "a", "edge": { "angle_deg": 5, "blur_sigma": 1.0, ... } },
///                 { "id": "b", "repeat": 4, "scene": { "width": 640, "height": 480,
///                   "mask": { ...mask file... },
///                   "edges": [ { "center": [x, y], "blur_sigma": 1.2, ... } ] } } ] }
/// "repeat" expands to ids "<id>_000", "<id>_001", ... with every seed
/// advanced by the copy index. Throws ConfigError on malformed input.
SynthJob parse_synth_json(const std::string& text);

Frame render(const SynthRequest& request);

} // namespace nssfr
