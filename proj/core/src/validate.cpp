#include "nssfr/validate.hpp"

#include <algorithm>

namespace nssfr {

const char* to_string(VerdictReason r) {
    switch (r) {
    case VerdictReason::None: return "none";
    case VerdictReason::Overshoot: return "overshoot";
    case VerdictReason::NoiseFloor: return "noise_floor";
    case VerdictReason::EdgeIncoherent: return "edge_incoherent";
    case VerdictReason::PhaseCoverage: return "phase_coverage";
    }
    return "unknown";
}

std::vector<Extremum> local_extrema(const SfrCurve& curve) {
    const auto& v = curve.values;
    const int n = static_cast<int>(v.size());
    std::vector<Extremum> out;
    int i = 1;
    while (i < n - 1) {
        int j = i;
        while (j + 1 < n && v[j + 1] == v[i]) ++j;
        // Plateau [i, j]; needs a neighbour on both sides.
        if (j < n - 1) {
            const double before = v[i - 1];
            const double after = v[j + 1];
            const int mid = (i + j) / 2;
            if (v[i] > before && v[i] > after) {
                out.push_back({mid, curve.frequencies[mid], v[i], ExtremumKind::Maximum});
            } else if (v[i] < before && v[i] < after) {
                out.push_back({mid, curve.frequencies[mid], v[i], ExtremumKind::Minimum});
            }
        }
        i = j + 1;
    }
    return out;
}

Verdict classify(const SfrCurve& curve, const ValidityLimits& limits) {
    Verdict v;
    v.peak_value = curve.values.empty() ? 1.0 : *std::max_element(curve.values.begin(), curve.values.end());
    bool overshoot = false;
    bool noisy = false;
    for (const Extremum& e : local_extrema(curve)) {
        if (e.kind == ExtremumKind::Maximum) {
            if (e.value >= limits.overshoot_limit) overshoot = true;
        } else if (e.frequency >= limits.noise_band_start) {
            if (!v.worst_minimum || e.value > *v.worst_minimum) v.worst_minimum = e.value;
            if (e.value > limits.noise_min_limit) noisy = true;
        }
    }
    if (overshoot) {
        v.valid = false;
        v.reason = VerdictReason::Overshoot;
    } else if (noisy) {
        v.valid = false;
        v.reason = VerdictReason::NoiseFloor;
    }
    return v;
}

Verdict failed_verdict(VerdictReason reason) {
    Verdict v;
    v.valid = false;
    v.reason = reason;
    return v;
}

} // namespace nssfr
