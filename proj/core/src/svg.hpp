#pragma once

#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace nssfr::svg {

std::string escape(std::string_view text);
std::string base64(std::span<const std::uint8_t> bytes);
std::string num(double v);

/// Minimal self-contained SVG builder. Coordinates are user units of the viewBox.
class Document {
public:
    Document(double width, double height, double display_width = 0.0);

    void rect(double x, double y, double w, double h, std::string_view stroke, std::string_view fill,
              double stroke_width = 1.0);
    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double stroke_width = 1.0,
              std::string_view dash = {});
    void circle(double cx, double cy, double r, std::string_view stroke, std::string_view fill,
                double stroke_width = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke, double stroke_width = 1.0,
                  std::string_view dash = {});
    void polygon(const std::vector<std::pair<double, double>>& pts, std::string_view stroke, std::string_view fill,
                 double stroke_width = 1.0);
    void cross(double x, double y, double size, std::string_view stroke, double stroke_width = 1.0);
    void text(double x, double y, std::string_view content, double size = 12.0, std::string_view fill = "black",
              std::string_view anchor = "start");
    void png_image(double x, double y, double w, double h, std::span<const std::uint8_t> png);

    std::string str() const;

private:
    double width_;
    double height_;
    double display_width_;
    std::ostringstream body_;
};

/// Linear mapping from data space into a rectangle of the document.
struct PlotArea {
    double left, top, width, height;
    double xmin, xmax, ymin, ymax;

    double px(double x) const { return left + (x - xmin) / (xmax - xmin) * width; }
    double py(double y) const { return top + height - (y - ymin) / (ymax - ymin) * height; }
};

/// Frame, ticks and axis labels.
void draw_axes(Document& doc, const PlotArea& area, double xtick, double ytick, std::string_view xlabel,
               std::string_view ylabel);

} // namespace nssfr::svg
