#include "svg.hpp"

#include <cmath>
#include <cstdio>

namespace nssfr::svg {

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string base64(std::span<const std::uint8_t> bytes) {
    static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
    }
    if (i < bytes.size()) {
        std::uint32_t v = bytes[i] << 16;
        if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

namespace {

std::string dash_attr(std::string_view dash) {
    return dash.empty() ? std::string() : " stroke-dasharray=\"" + std::string(dash) + "\"";
}

} // namespace

Document::Document(double width, double height, double display_width)
    : width_(width), height_(height), display_width_(display_width) {}

void Document::rect(double x, double y, double w, double h, std::string_view stroke, std::string_view fill,
                    double stroke_width) {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
          << "\" stroke=\"" << stroke << "\" fill=\"" << fill << "\" stroke-width=\"" << num(stroke_width) << "\"/>\n";
}

void Document::line(double x1, double y1, double x2, double y2, std::string_view stroke, double stroke_width,
                    std::string_view dash) {
    body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
          << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(stroke_width) << "\"" << dash_attr(dash)
          << "/>\n";
}

void Document::circle(double cx, double cy, double r, std::string_view stroke, std::string_view fill,
                      double stroke_width) {
    body_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r) << "\" stroke=\"" << stroke
          << "\" fill=\"" << fill << "\" stroke-width=\"" << num(stroke_width) << "\"/>\n";
}

void Document::polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke,
                        double stroke_width, std::string_view dash) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(stroke_width) << "\""
          << dash_attr(dash) << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        body_ << (i ? " " : "") << num(pts[i].first) << "," << num(pts[i].second);
    }
    body_ << "\"/>\n";
}

void Document::polygon(const std::vector<std::pair<double, double>>& pts, std::string_view stroke,
                       std::string_view fill, double stroke_width) {
    body_ << "<polygon stroke=\"" << stroke << "\" fill=\"" << fill << "\" stroke-width=\"" << num(stroke_width)
          << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        body_ << (i ? " " : "") << num(pts[i].first) << "," << num(pts[i].second);
    }
    body_ << "\"/>\n";
}

void Document::cross(double x, double y, double size, std::string_view stroke, double stroke_width) {
    line(x - size, y - size, x + size, y + size, stroke, stroke_width);
    line(x - size, y + size, x + size, y - size, stroke, stroke_width);
}

void Document::text(double x, double y, std::string_view content, double size, std::string_view fill,
                    std::string_view anchor) {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\""
          << num(size) << "\" fill=\"" << fill << "\" text-anchor=\"" << anchor << "\">" << escape(content)
          << "</text>\n";
}

void Document::png_image(double x, double y, double w, double h, std::span<const std::uint8_t> png) {
    body_ << "<image x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
          << "\" preserveAspectRatio=\"none\" href=\"data:image/png;base64," << base64(png) << "\"/>\n";
}

std::string Document::str() const {
    std::ostringstream os;
    const double display = display_width_ > 0 ? display_width_ : width_;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(display) << "\" height=\""
       << num(display * height_ / width_) << "\" viewBox=\"0 0 " << num(width_) << " " << num(height_) << "\">\n"
       << body_.str() << "</svg>\n";
    return os.str();
}

void draw_axes(Document& doc, const PlotArea& a, double xtick, double ytick, std::string_view xlabel,
               std::string_view ylabel) {
    doc.rect(a.left, a.top, a.width, a.height, "black", "none", 1.0);
    for (double x = a.xmin; x <= a.xmax + 1e-9; x += xtick) {
        const double px = a.px(x);
        doc.line(px, a.top + a.height, px, a.top + a.height + 5, "black");
        doc.line(px, a.top, px, a.top + a.height, "#dddddd", 0.5);
        doc.text(px, a.top + a.height + 18, num(x), 11, "black", "middle");
    }
    for (double y = a.ymin; y <= a.ymax + 1e-9; y += ytick) {
        const double py = a.py(y);
        doc.line(a.left - 5, py, a.left, py, "black");
        doc.line(a.left, py, a.left + a.width, py, "#dddddd", 0.5);
        doc.text(a.left - 8, py + 4, num(y), 11, "black", "end");
    }
    doc.text(a.left + a.width / 2, a.top + a.height + 36, xlabel, 13, "black", "middle");
    doc.text(a.left - 42, a.top + a.height / 2, ylabel, 13, "black", "middle");
}

} // namespace nssfr::svg
