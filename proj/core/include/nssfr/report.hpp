#pragma once

#include "nssfr/aggregate.hpp"
#include "nssfr/config.hpp"
#include "nssfr/pipeline.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nssfr {

inline constexpr const char* kCsvHeader =
    "frame_id,roi_index,x,y,w,h,centroid_x,centroid_y,edge_angle_deg,orientation,contrast,segment,status,reason,mtf50";

/// One row per candidate, sorted by (frame_id, roi_index), decimals with 6
/// significant digits.
std::string measurements_csv(const std::vector<Measurement>& measurements);
void write_csv(const std::filesystem::path& path, const std::vector<Measurement>& measurements);

std::string summary_json(const AnalyzeConfig& config, const AnalysisResult& result);
void write_summary(const std::filesystem::path& path, const AnalyzeConfig& config, const AnalysisResult& result);

/// Sample image with valid ROIs boxed green and invalid ones red.
std::string overlay_svg(const Frame& frame, const std::vector<Measurement>& frame_measurements);

/// Centroids of valid edges with the segmentation circles and mask outline.
std::string scatter_svg(const AnalysisResult& result);

/// Mean SFR per segment with MTF50 markers and local extrema markers.
std::string mean_mtf_svg(const AnalysisResult& result);

/// Frames picked for overlays: the first 5 plus the 5 with most valid ROIs.
std::vector<std::string> overlay_sample(const std::vector<FrameSummary>& frames);

/// Writes figures/*.svg. Frames for overlays are re-decoded from the dataset.
void render_figures(const std::filesystem::path& dir, const AnalyzeConfig& config, const AnalysisResult& result);

/// Writes `text` to `path`, throwing Error when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace nssfr
