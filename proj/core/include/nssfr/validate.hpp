#pragma once

#include "nssfr/sfr.hpp"

#include <optional>
#include <vector>

namespace nssfr {

enum class VerdictReason { None, Overshoot, NoiseFloor, EdgeIncoherent, PhaseCoverage };

const char* to_string(VerdictReason r);

struct Verdict {
    bool valid = true;
    VerdictReason reason = VerdictReason::None;
    double peak_value = 1.0;
    std::optional<double> worst_minimum;
};

struct ValidityLimits {
    double overshoot_limit = 1.4;
    double noise_min_limit = 0.4;
    double noise_band_start = 0.25; ///< cy/px; minima below this are ignored
};

enum class ExtremumKind { Maximum, Minimum };

struct Extremum {
    int index = 0; ///< grid index; midpoint for plateaus
    double frequency = 0.0;
    double value = 0.0;
    ExtremumKind kind = ExtremumKind::Maximum;
};

/// Interior local extrema with strict neighbour comparison. A run of equal
/// values counts once, at its midpoint. Runs touching either end are skipped.
std::vector<Extremum> local_extrema(const SfrCurve& curve);

/// Overshoot: any local maximum >= overshoot_limit.
/// Noise floor: any local minimum at f >= noise_band_start above noise_min_limit.
Verdict classify(const SfrCurve& curve, const ValidityLimits& limits = {});

/// Verdict for a candidate whose SFR could not be computed.
Verdict failed_verdict(VerdictReason reason);

} // namespace nssfr
