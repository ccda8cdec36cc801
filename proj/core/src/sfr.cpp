#include "nssfr/sfr.hpp"

#include "nssfr/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

namespace nssfr {

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

double EdgeFit::position(double line) const {
    const double t = (line - center) / scale;
    double acc = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 0;) acc = acc * t + coefficients[k];
    return acc;
}

double EdgeFit::slope(double line) const {
    const double t = (line - center) / scale;
    double acc = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 1;) acc = acc * t + static_cast<double>(k) * coefficients[k];
    return acc / scale;
}

namespace {

// Scan-line access: vertical-class edges are crossed by rows, horizontal-class
// edges by columns.
struct LineView {
    const RoiPatch& patch;
    bool by_rows;

    int lines() const { return by_rows ? patch.lum.height() : patch.lum.width(); }
    int length() const { return by_rows ? patch.lum.width() : patch.lum.height(); }
    double value(int line, int pos) const { return by_rows ? patch.lum(pos, line) : patch.lum(line, pos); }
    bool in_support(int line, int pos) const {
        return by_rows ? patch.in_support(pos, line) : patch.in_support(line, pos);
    }
};

struct Crossing {
    double line;
    double position;
};

constexpr int kMinSupportPerLine = 8;
constexpr double kFullLineFraction = 0.9;

/// Derivative centroid per line. With a prior, the derivative is weighted by
/// a Hamming window centred on the prior position.
std::vector<Crossing> line_crossings(const LineView& view, const EdgeFit* prior, double window_half) {
    std::vector<Crossing> out;
    const int len = view.length();
    std::vector<int> counts(view.lines(), 0);
    for (int line = 0; line < view.lines(); ++line) {
        for (int p = 0; p < len; ++p) counts[line] += view.in_support(line, p) ? 1 : 0;
    }
    // Lines that clip the end of the band see a one-sided profile; skip them.
    const int full = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    const int min_count = std::max(kMinSupportPerLine, static_cast<int>(std::ceil(kFullLineFraction * full)));
    for (int line = 0; line < view.lines(); ++line) {
        if (counts[line] < min_count) continue;

        double step_total = 0.0;
        for (int p = 0; p + 1 < len; ++p) {
            if (view.in_support(line, p) && view.in_support(line, p + 1)) {
                step_total += view.value(line, p + 1) - view.value(line, p);
            }
        }
        if (std::abs(step_total) < 1e-6) continue;
        const double sign = step_total > 0 ? 1.0 : -1.0;
        const double centre = prior ? prior->position(line) : 0.0;

        double sw = 0.0, swx = 0.0;
        for (int p = 0; p + 1 < len; ++p) {
            if (!view.in_support(line, p) || !view.in_support(line, p + 1)) continue;
            const double x = p + 0.5;
            double w = sign * (view.value(line, p + 1) - view.value(line, p));
            if (prior) {
                const double u = (x - centre) / window_half;
                if (std::abs(u) > 1.0) continue;
                w *= 0.54 + 0.46 * std::cos(M_PI * u);
            }
            sw += w;
            swx += w * x;
        }
        if (sw <= 1e-9) continue;
        out.push_back({static_cast<double>(line), swx / sw});
    }
    return out;
}

EdgeFit polyfit(const std::vector<Crossing>& pts, int order, Orientation orientation) {
    const int n = static_cast<int>(pts.size());
    if (n < std::max(order + 2, kMinSupportPerLine)) {
        throw MeasurementError(MeasurementError::Kind::EdgeIncoherent, "edge not coherent: too few scan lines");
    }
    double lo = pts.front().line, hi = pts.front().line;
    for (const auto& c : pts) {
        lo = std::min(lo, c.line);
        hi = std::max(hi, c.line);
    }
    EdgeFit fit;
    fit.orientation = orientation;
    fit.center = 0.5 * (lo + hi);
    fit.scale = std::max(1.0, 0.5 * (hi - lo));

    Eigen::MatrixXd A(n, order + 1);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        const double t = (pts[i].line - fit.center) / fit.scale;
        double tk = 1.0;
        for (int k = 0; k <= order; ++k) {
            A(i, k) = tk;
            tk *= t;
        }
        b(i) = pts[i].position;
    }
    const Eigen::VectorXd coef = A.householderQr().solve(b);
    fit.coefficients.assign(coef.data(), coef.data() + coef.size());

    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = fit.position(pts[i].line) - pts[i].position;
        ss += r * r;
    }
    fit.rmse = std::sqrt(ss / n);
    fit.mean_angle_deg = std::atan(fit.slope(fit.center)) * 180.0 / M_PI;
    return fit;
}

} // namespace

EdgeFit fit_edge(const RoiPatch& patch, Orientation orientation, int order) {
    if (order < 1) throw Error("edge fit order must be >= 1");
    const LineView view{patch, orientation == Orientation::Vertical};

    const auto coarse_pts = line_crossings(view, nullptr, 0.0);
    const EdgeFit coarse = polyfit(coarse_pts, 1, orientation);

    // Window half-width: half the typical support length of a line.
    const double window_half = std::max(4.0, 0.5 * view.length());
    double support_len = 0.0;
    int lines_with_support = 0;
    for (int line = 0; line < view.lines(); ++line) {
        int count = 0;
        for (int p = 0; p < view.length(); ++p) count += view.in_support(line, p) ? 1 : 0;
        if (count >= kMinSupportPerLine) {
            support_len += count;
            ++lines_with_support;
        }
    }
    const double half = lines_with_support ? std::max(4.0, 0.5 * support_len / lines_with_support) : window_half;

    const auto pts = line_crossings(view, &coarse, half);
    EdgeFit fit = polyfit(pts, order, orientation);
    if (fit.rmse > kMaxFitRmsePx) {
        throw MeasurementError(MeasurementError::Kind::EdgeIncoherent, "edge not coherent: fit rmse above 0.5 px");
    }
    return fit;
}

Esf project_esf(const RoiPatch& patch, const EdgeFit& fit, double half_width_px) {
    const LineView view{patch, fit.orientation == Orientation::Vertical};
    const int nbins = static_cast<int>(std::lround(2.0 * half_width_px / kEsfBinPx));
    std::vector<double> sum(nbins, 0.0);
    std::vector<int> count(nbins, 0);

    for (int line = 0; line < view.lines(); ++line) {
        const double e = fit.position(line);
        const double cosine = 1.0 / std::sqrt(1.0 + fit.slope(line) * fit.slope(line));
        for (int p = 0; p < view.length(); ++p) {
            if (!view.in_support(line, p)) continue;
            const double d = (p - e) * cosine;
            const int k = static_cast<int>(std::floor((d + half_width_px) / kEsfBinPx));
            if (k < 0 || k >= nbins) continue;
            sum[k] += view.value(line, p);
            ++count[k];
        }
    }

    const int c0 = nbins / 10;
    const int c1 = nbins - nbins / 10;
    int empty_central = 0;
    for (int k = c0; k < c1; ++k) empty_central += count[k] == 0 ? 1 : 0;
    if (empty_central > 0.05 * (c1 - c0)) {
        throw MeasurementError(MeasurementError::Kind::PhaseCoverage, "insufficient phase coverage");
    }

    Esf esf;
    esf.half_width_px = half_width_px;
    esf.values.assign(nbins, 0.0);
    std::vector<int> filled;
    for (int k = 0; k < nbins; ++k) {
        if (count[k]) {
            esf.values[k] = sum[k] / count[k];
            filled.push_back(k);
        }
    }
    if (filled.size() < 2) {
        throw MeasurementError(MeasurementError::Kind::PhaseCoverage, "insufficient phase coverage");
    }
    for (int k = 0; k < nbins; ++k) {
        if (count[k]) continue;
        ++esf.filled_bins;
        const auto hi = std::lower_bound(filled.begin(), filled.end(), k);
        if (hi == filled.begin()) {
            esf.values[k] = esf.values[*hi];
        } else if (hi == filled.end()) {
            esf.values[k] = esf.values[filled.back()];
        } else {
            const int k1 = *hi, k0 = *(hi - 1);
            const double t = static_cast<double>(k - k0) / (k1 - k0);
            esf.values[k] = std::lerp(esf.values[k0], esf.values[k1], t);
        }
    }

    // Orient dark to light.
    const int q = std::max(1, nbins / 4);
    double head = 0.0, tail = 0.0;
    for (int k = 0; k < q; ++k) {
        head += esf.values[k];
        tail += esf.values[nbins - 1 - k];
    }
    if (head > tail) std::reverse(esf.values.begin(), esf.values.end());
    return esf;
}

std::vector<double> frequency_grid(double step, double max_frequency) {
    const int n = static_cast<int>(std::lround(max_frequency / step));
    std::vector<double> f(n + 1);
    for (int i = 0; i <= n; ++i) f[i] = i * step;
    return f;
}

SfrCurve compute_sfr(const Esf& esf, double window_half_width_px, double step) {
    const auto& v = esf.values;
    const int n = static_cast<int>(v.size());
    if (n < 64) throw Error("compute_sfr: ESF shorter than 64 supersampled bins");

    std::vector<double> lsf(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) lsf[i] = 0.5 * (v[i + 1] - v[i - 1]);

    double s0 = 0.0, s1 = 0.0;
    for (int i = 0; i < n; ++i) {
        s0 += lsf[i];
        s1 += lsf[i] * i;
    }
    if (std::abs(s0) < 1e-6) throw MeasurementError(MeasurementError::Kind::NoEdgeEnergy, "no edge energy");
    const double centroid = s1 / s0;

    const double half_bins = window_half_width_px / kEsfBinPx;
    for (int i = 0; i < n; ++i) {
        const double u = (i - centroid) / half_bins;
        lsf[i] *= std::abs(u) <= 1.0 ? 0.54 + 0.46 * std::cos(M_PI * u) : 0.0;
    }
    double dc = 0.0;
    for (double x : lsf) dc += x;
    if (std::abs(dc) < 1e-6) throw MeasurementError(MeasurementError::Kind::NoEdgeEnergy, "no edge energy");

    SfrCurve curve;
    curve.frequencies = frequency_grid(step);
    curve.values.resize(curve.frequencies.size());
    for (std::size_t k = 0; k < curve.frequencies.size(); ++k) {
        const double f = curve.frequencies[k];
        if (k == 0) {
            curve.values[k] = 1.0;
            continue;
        }
        std::complex<double> acc{0.0, 0.0};
        const double omega = -2.0 * M_PI * f * kEsfBinPx;
        for (int i = 0; i < n; ++i) {
            if (lsf[i] == 0.0) continue;
            acc += lsf[i] * std::polar(1.0, omega * (i - centroid));
        }
        // Central difference spans two bins; binning averages over one.
        const double correction = sinc(2.0 * kEsfBinPx * f) * sinc(kEsfBinPx * f);
        curve.values[k] = std::abs(acc) / std::abs(dc) / correction;
    }
    curve.mtf50 = mtf50(curve);
    return curve;
}

std::optional<double> mtf50(const SfrCurve& curve) {
    const auto& f = curve.frequencies;
    const auto& v = curve.values;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i - 1] > 0.5 && v[i] <= 0.5) {
            const double t = (v[i - 1] - 0.5) / (v[i - 1] - v[i]);
            return std::lerp(f[i - 1], f[i], t);
        }
    }
    return std::nullopt;
}

SfrMeasurement measure_roi(const RoiPatch& patch, Orientation orientation, int edge_fit_order, double half_width_px) {
    SfrMeasurement m;
    m.fit = fit_edge(patch, orientation, edge_fit_order);
    m.esf = project_esf(patch, m.fit, half_width_px);
    m.curve = compute_sfr(m.esf, half_width_px);
    return m;
}

} // namespace nssfr
