#include "nssfr/synth.hpp"

#include "nssfr/error.hpp"
#include "nssfr/sfr.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>
#include <cstdio>

namespace nssfr {

void SynthEdgeSpec::validate() const {
    if (width < kMinFrameSide / 2 || height < kMinFrameSide / 2) throw ConfigError("synthetic edge patch too small");
    if (!(contrast > 0.0 && contrast < 1.0)) throw ConfigError("synthetic edge contrast must be in (0,1)");
    if (mean_level - contrast / 2 < 0.0 || mean_level + contrast / 2 > 1.0) {
        throw ConfigError("synthetic edge levels leave [0,1]");
    }
    if (blur_sigma < 0.0 || noise_sigma < 0.0 || sharpen_gain < 0.0 || sharpen_sigma <= 0.0) {
        throw ConfigError("synthetic edge sigmas and gain must be non-negative");
    }
    if (supersampling < 1) throw ConfigError("supersampling must be >= 1");
}

double analytic_mtf(double blur_sigma, double f) {
    return std::exp(-2.0 * M_PI * M_PI * blur_sigma * blur_sigma * f * f) * std::abs(sinc(f));
}

double analytic_mtf50(double blur_sigma) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (analytic_mtf(blur_sigma, mid) > 0.5 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

LuminanceImage gaussian_blur(const LuminanceImage& in, double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) sum += k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    for (double& v : k) v /= sum;
    const int w = in.width(), h = in.height();
    LuminanceImage tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * in(std::clamp(x + i, 0, w - 1), y);
            tmp(x, y) = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp(x, std::clamp(y + i, 0, h - 1));
            out(x, y) = acc;
        }
    }
    return out;
}

} // namespace

Frame make_slanted_edge(const SynthEdgeSpec& spec, const std::string& id) {
    spec.validate();
    const double a = spec.angle_deg * M_PI / 180.0;
    const double nx = std::cos(a), ny = std::sin(a);
    const double cx = spec.width / 2.0, cy = spec.height / 2.0;
    const double lo = spec.mean_level - spec.contrast / 2;
    const int ss = spec.supersampling;
    const double inv_ss = 1.0 / ss;

    auto profile = [&](double d) {
        if (spec.blur_sigma == 0.0) return d > 0.0 ? 1.0 : (d < 0.0 ? 0.0 : 0.5);
        return 0.5 * std::erfc(-d / (spec.blur_sigma * M_SQRT2));
    };

    LuminanceImage img(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            double acc = 0.0;
            for (int j = 0; j < ss; ++j) {
                const double py = y + (j + 0.5) * inv_ss - cy;
                for (int i = 0; i < ss; ++i) {
                    const double px = x + (i + 0.5) * inv_ss - cx;
                    acc += profile(px * nx + py * ny);
                }
            }
            img(x, y) = lo + spec.contrast * acc / (ss * ss);
        }
    }

    if (spec.sharpen_gain > 0.0) {
        const LuminanceImage blurred = gaussian_blur(img, spec.sharpen_sigma);
        for (std::size_t i = 0; i < img.size(); ++i) {
            img.data()[i] += spec.sharpen_gain * (img.data()[i] - blurred.data()[i]);
        }
    }
    if (spec.noise_sigma > 0.0) {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (double& v : img.data()) v += noise(rng);
    }
    for (double& v : img.data()) v = std::clamp(v, 0.0, 1.0);

    Frame f;
    f.id = id;
    f.bit_depth = 16;
    f.luminance = std::move(img);
    return f;
}

Frame make_scene(const SceneSpec& scene, const std::string& id) {
    if (scene.width < kMinFrameSide || scene.height < kMinFrameSide) throw ConfigError("scene smaller than 64x64");
    std::vector<RectI> placed;
    LuminanceImage img(scene.width, scene.height, scene.background);
    for (const PlacedEdge& e : scene.edges) {
        const RectI r{static_cast<int>(std::lround(e.center.x - e.spec.width / 2.0)),
                      static_cast<int>(std::lround(e.center.y - e.spec.height / 2.0)), e.spec.width, e.spec.height};
        if (r.x < 0 || r.y < 0 || r.right() > scene.width || r.bottom() > scene.height) {
            throw ConfigError("edge patch outside the scene");
        }
        for (const RectI& p : placed) {
            const int gap_x = std::max(p.x - r.right(), r.x - p.right());
            const int gap_y = std::max(p.y - r.bottom(), r.y - p.bottom());
            if (std::max(gap_x, gap_y) < scene.min_separation) {
                throw ConfigError("edge patches overlap or are closer than the minimum separation");
            }
        }
        placed.push_back(r);
        const Frame patch = make_slanted_edge(e.spec);
        for (int y = 0; y < r.h; ++y) {
            for (int x = 0; x < r.w; ++x) img(r.x + x, r.y + y) = patch.luminance(x, y);
        }
    }
    if (scene.mask) {
        const ValidityMap vmap = rasterize(*scene.mask, scene.width, scene.height);
        for (int y = 0; y < scene.height; ++y) {
            for (int x = 0; x < scene.width; ++x) {
                if (!vmap.at(x, y)) img(x, y) = scene.outside_mask;
            }
        }
    }
    Frame f;
    f.id = id;
    f.bit_depth = 16;
    f.luminance = std::move(img);
    return f;
}

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& obj, const char* key, T& dst) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        dst = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("synth: wrong type for '") + key + "'");
    }
}

SynthEdgeSpec parse_edge(const json& obj, std::uint64_t seed_offset) {
    if (!obj.is_object()) throw ConfigError("synth: edge entry must be an object");
    static const char* known[] = {"width",        "height",        "angle_deg", "contrast", "mean_level",
                                  "blur_sigma",   "noise_sigma",   "sharpen_gain", "sharpen_sigma",
                                  "supersampling", "seed",         "center"};
    for (const auto& [key, v] : obj.items()) {
        (void)v;
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
            std::end(known)) {
            throw ConfigError("synth: unknown edge key '" + key + "'");
        }
    }
    SynthEdgeSpec spec;
    read_field(obj, "width", spec.width);
    read_field(obj, "height", spec.height);
    read_field(obj, "angle_deg", spec.angle_deg);
    read_field(obj, "contrast", spec.contrast);
    read_field(obj, "mean_level", spec.mean_level);
    read_field(obj, "blur_sigma", spec.blur_sigma);
    read_field(obj, "noise_sigma", spec.noise_sigma);
    read_field(obj, "sharpen_gain", spec.sharpen_gain);
    read_field(obj, "sharpen_sigma", spec.sharpen_sigma);
    read_field(obj, "supersampling", spec.supersampling);
    read_field(obj, "seed", spec.seed);
    spec.seed += seed_offset;
    spec.validate();
    return spec;
}

SceneSpec parse_scene(const json& obj, std::uint64_t seed_offset) {
    if (!obj.is_object()) throw ConfigError("synth: scene must be an object");
    SceneSpec scene;
    read_field(obj, "width", scene.width);
    read_field(obj, "height", scene.height);
    read_field(obj, "background", scene.background);
    read_field(obj, "outside_mask", scene.outside_mask);
    read_field(obj, "min_separation", scene.min_separation);
    if (const auto it = obj.find("mask"); it != obj.end() && !it->is_null()) scene.mask = parse_mask_json(it->dump());
    if (const auto it = obj.find("edges"); it != obj.end()) {
        if (!it->is_array()) throw ConfigError("synth: scene edges must be a list");
        for (const auto& e : *it) {
            PlacedEdge placed;
            const auto c = e.find("center");
            if (c == e.end() || !c->is_array() || c->size() != 2) {
                throw ConfigError("synth: every scene edge needs \"center\": [x, y]");
            }
            placed.center = {(*c)[0].get<double>(), (*c)[1].get<double>()};
            placed.spec = parse_edge(e, seed_offset);
            scene.edges.push_back(placed);
        }
    }
    return scene;
}

} // namespace

SynthJob parse_synth_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("synth: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("synth: top level must be an object");
    SynthJob job;
    read_field(doc, "bit_depth", job.bit_depth);
    if (job.bit_depth != 8 && job.bit_depth != 16) throw ConfigError("synth: bit_depth must be 8 or 16");
    const auto frames = doc.find("frames");
    if (frames == doc.end() || !frames->is_array() || frames->empty()) {
        throw ConfigError("synth: \"frames\" must be a non-empty list");
    }
    for (const auto& f : *frames) {
        std::string id;
        int repeat = 1;
        read_field(f, "id", id);
        read_field(f, "repeat", repeat);
        if (id.empty()) throw ConfigError("synth: every frame needs an id");
        if (repeat < 1) throw ConfigError("synth: repeat must be >= 1");
        const bool has_edge = f.contains("edge"), has_scene = f.contains("scene");
        if (has_edge == has_scene) throw ConfigError("synth: frame '" + id + "' needs exactly one of edge/scene");
        for (int k = 0; k < repeat; ++k) {
            SynthRequest req;
            if (repeat == 1) {
                req.id = id;
            } else {
                char suffix[16];
                std::snprintf(suffix, sizeof suffix, "_%03d", k);
                req.id = id + suffix;
            }
            if (has_edge) {
                req.edge = parse_edge(f["edge"], static_cast<std::uint64_t>(k));
            } else {
                req.scene = parse_scene(f["scene"], static_cast<std::uint64_t>(k));
            }
            job.frames.push_back(std::move(req));
        }
    }
    return job;
}

Frame render(const SynthRequest& request) {
    if (request.edge) return make_slanted_edge(*request.edge, request.id);
    if (request.scene) return make_scene(*request.scene, request.id);
    throw ConfigError("synth: empty request");
}

} // namespace nssfr
