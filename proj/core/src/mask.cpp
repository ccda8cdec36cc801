#include "nssfr/mask.hpp"

#include "nssfr/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nssfr {

using nlohmann::json;

double polygon_area(const Polygon& poly) {
    double twice = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        twice += poly[j].x * poly[i].y - poly[i].x * poly[j].y;
    }
    return 0.5 * twice;
}

void RegionMask::validate() const {
    if (reference_width <= 0 || reference_height <= 0) {
        throw ConfigError("mask reference_size must be positive");
    }
    if (polygons.empty()) throw ConfigError("mask has no polygons");
    for (std::size_t k = 0; k < polygons.size(); ++k) {
        const Polygon& poly = polygons[k];
        if (poly.size() < 3) {
            throw ConfigError("mask polygon " + std::to_string(k) + " has fewer than 3 vertices");
        }
        for (const Point2d& v : poly) {
            if (!(v.x >= 0.0 && v.x <= reference_width && v.y >= 0.0 && v.y <= reference_height)) {
                std::ostringstream os;
                os << "mask polygon " << k << " vertex (" << v.x << "," << v.y << ") outside reference frame";
                throw ConfigError(os.str());
            }
        }
        if (std::abs(polygon_area(poly)) < 1e-9) {
            throw ConfigError("mask polygon " + std::to_string(k) + " is degenerate (zero area)");
        }
    }
}

RegionMask parse_mask_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("mask JSON parse error: ") + e.what());
    }
    RegionMask mask;
    try {
        const auto& size = doc.at("reference_size");
        if (!size.is_array() || size.size() != 2) throw ConfigError("mask reference_size must be [w,h]");
        mask.reference_width = size.at(0).get<int>();
        mask.reference_height = size.at(1).get<int>();
        for (const auto& jp : doc.at("polygons")) {
            Polygon poly;
            for (const auto& jv : jp) {
                if (!jv.is_array() || jv.size() != 2) throw ConfigError("mask vertex must be [x,y]");
                poly.push_back({jv.at(0).get<double>(), jv.at(1).get<double>()});
            }
            mask.polygons.push_back(std::move(poly));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("mask JSON schema error: ") + e.what());
    }
    mask.validate();
    return mask;
}

RegionMask load_mask(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read mask file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_mask_json(ss.str());
}

std::string mask_to_json(const RegionMask& mask) {
    json doc;
    doc["reference_size"] = {mask.reference_width, mask.reference_height};
    json polys = json::array();
    for (const auto& poly : mask.polygons) {
        json jp = json::array();
        for (const auto& v : poly) jp.push_back({v.x, v.y});
        polys.push_back(std::move(jp));
    }
    doc["polygons"] = std::move(polys);
    return doc.dump(2);
}

std::size_t ValidityMap::count_valid() const {
    return static_cast<std::size_t>(std::count_if(valid.data().begin(), valid.data().end(), [](auto v) { return v != 0; }));
}

ValidityMap ValidityMap::all_valid(int width, int height) {
    return ValidityMap{Grid<std::uint8_t>(width, height, 1), 0};
}

std::vector<Polygon> scaled_polygons(const RegionMask& mask, int width, int height) {
    const double sx = static_cast<double>(width) / mask.reference_width;
    const double sy = static_cast<double>(height) / mask.reference_height;
    if (std::abs(sx - sy) > 0.01 * std::max(sx, sy)) {
        std::ostringstream os;
        os << "mask reference size " << mask.reference_width << "x" << mask.reference_height
           << " does not scale proportionally to " << width << "x" << height;
        throw ConfigError(os.str());
    }
    std::vector<Polygon> out = mask.polygons;
    if (sx == 1.0 && sy == 1.0) return out;
    for (auto& poly : out) {
        for (auto& v : poly) {
            v.x *= sx;
            v.y *= sy;
        }
    }
    return out;
}

ValidityMap rasterize(const RegionMask& mask, int width, int height) {
    mask.validate();
    const std::vector<Polygon> polys = scaled_polygons(mask, width, height);

    ValidityMap out{Grid<std::uint8_t>(width, height, 0), 0};
    std::vector<double> xs;
    for (int y = 0; y < height; ++y) {
        const double yc = y + 0.5;
        xs.clear();
        for (const Polygon& poly : polys) {
            const std::size_t n = poly.size();
            for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                const Point2d& a = poly[i];
                const Point2d& b = poly[j];
                if ((a.y > yc) != (b.y > yc)) {
                    xs.push_back((b.x - a.x) * (yc - a.y) / (b.y - a.y) + a.x);
                }
            }
        }
        if (xs.empty()) continue;
        std::sort(xs.begin(), xs.end());
        // A centre is inside when an odd number of crossings lie strictly to its right.
        std::size_t at_or_left = 0;
        std::uint8_t* row = out.valid.row(y);
        for (int x = 0; x < width; ++x) {
            const double xc = x + 0.5;
            while (at_or_left < xs.size() && xs[at_or_left] <= xc) ++at_or_left;
            row[x] = ((xs.size() - at_or_left) & 1u) ? 1 : 0;
        }
    }
    const double fraction = static_cast<double>(out.count_valid()) / (static_cast<double>(width) * height);
    if (fraction < 0.01) throw ConfigError("mask too small: interior covers less than 1% of the image");
    return out;
}

ValidityMap dilate_exclusion(const ValidityMap& vmap, int margin) {
    if (margin < 0) throw ConfigError("exclusion margin must be >= 0");
    ValidityMap out = vmap;
    out.margin = vmap.margin + margin;
    const int r = margin - 1;
    if (r < 1) return out;

    const int w = vmap.width();
    const int h = vmap.height();
    // Summed-area table of invalid pixels, (w+1) x (h+1).
    std::vector<int> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    auto S = [&](int x, int y) -> int& { return sat[static_cast<std::size_t>(y) * (w + 1) + x]; };
    for (int y = 0; y < h; ++y) {
        int run = 0;
        for (int x = 0; x < w; ++x) {
            run += vmap.valid(x, y) ? 0 : 1;
            S(x + 1, y + 1) = S(x + 1, y) + run;
        }
    }
    if (S(w, h) == 0) return out;
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - r);
        const int y1 = std::min(h, y + r + 1);
        for (int x = 0; x < w; ++x) {
            if (!vmap.valid(x, y)) continue;
            const int x0 = std::max(0, x - r);
            const int x1 = std::min(w, x + r + 1);
            const int invalid = S(x1, y1) - S(x0, y1) - S(x1, y0) + S(x0, y0);
            if (invalid > 0) out.valid(x, y) = 0;
        }
    }
    return out;
}

RectI valid_bounds(const ValidityMap& vmap) {
    int x0 = vmap.width(), y0 = vmap.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < vmap.height(); ++y) {
        const std::uint8_t* row = vmap.valid.row(y);
        for (int x = 0; x < vmap.width(); ++x) {
            if (!row[x]) continue;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) throw Error("validity map has no valid pixels");
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

ValidityMap crop_validity(const ValidityMap& vmap, const RectI& box) {
    return ValidityMap{vmap.valid.crop(box), vmap.margin};
}

CroppedFrame crop_to_mask(const Frame& frame, const ValidityMap& vmap) {
    if (frame.width() != vmap.width() || frame.height() != vmap.height()) {
        throw ConfigError("validity map size does not match frame size");
    }
    const RectI box = valid_bounds(vmap);
    CroppedFrame out;
    out.offset = {box.x, box.y};
    out.frame.id = frame.id;
    out.frame.bit_depth = frame.bit_depth;
    if (box == RectI{0, 0, frame.width(), frame.height()}) {
        out.frame.luminance = frame.luminance;
    } else {
        out.frame.luminance = frame.luminance.crop(box);
    }
    return out;
}

} // namespace nssfr
