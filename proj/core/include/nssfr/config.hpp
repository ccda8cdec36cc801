#pragma once

#include "nssfr/roi_detect.hpp"
#include "nssfr/validate.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nssfr {

/// Everything that controls an `analyze` run.
struct AnalyzeConfig {
    std::filesystem::path input;
    std::string glob = "*";
    std::size_t limit = 0; ///< 0 = all frames
    std::optional<std::filesystem::path> mask_path;

    NsSfrParams params;
    ValidityLimits limits;
    OrientationFilter orientation = OrientationFilter::Horizontal;
    int segments = 3;
    std::vector<double> segment_ratios; ///< empty = equal proportional parts
    std::optional<int> exclusion_margin; ///< default 2 * esfw

    unsigned threads = 1;
    std::filesystem::path out = "nssfr_out";
    bool figures = true;

    int effective_margin() const { return exclusion_margin.value_or(2 * params.esfw); }
    std::vector<Orientation> orientations() const;

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

OrientationFilter parse_orientation_filter(const std::string& s);
const char* to_string(OrientationFilter f);

/// Applies keys of a JSON config document onto `config`. Keys use the long
/// flag names with dashes replaced by underscores ("edge_fit_order", ...).
void apply_config_json(AnalyzeConfig& config, const std::string& text);

} // namespace nssfr
