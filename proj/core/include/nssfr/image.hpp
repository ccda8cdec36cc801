#pragma once

#include <cassert>
#include <cstddef>
#include <string>
#include <vector>

namespace nssfr {

struct Point2d {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2d&, const Point2d&) = default;
};

struct Point2i {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point2i&, const Point2i&) = default;
};

/// Axis-aligned integer rectangle, half-open: [x, x+w) x [y, y+h).
struct RectI {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }
    int bottom() const { return y + h; }
    bool empty() const { return w <= 0 || h <= 0; }
    bool contains(int px, int py) const { return px >= x && py >= y && px < right() && py < bottom(); }

    friend bool operator==(const RectI&, const RectI&) = default;
};

/// Dense row-major 2D array.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(int x, int y) {
        assert(x >= 0 && y >= 0 && x < width_ && y < height_);
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    const T& operator()(int x, int y) const {
        assert(x >= 0 && y >= 0 && x < width_ && y < height_);
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

    T* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }
    const T* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    Grid crop(const RectI& r) const {
        Grid out(r.w, r.h);
        for (int y = 0; y < r.h; ++y) {
            for (int x = 0; x < r.w; ++x) {
                out(x, y) = (*this)(r.x + x, r.y + y);
            }
        }
        return out;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using LuminanceImage = Grid<double>;

/// One decoded image of the dataset. Luminance is normalized to [0,1].
struct Frame {
    std::string id;
    int bit_depth = 8;
    LuminanceImage luminance;

    int width() const { return luminance.width(); }
    int height() const { return luminance.height(); }
};

inline constexpr int kMinFrameSide = 64;

} // namespace nssfr
