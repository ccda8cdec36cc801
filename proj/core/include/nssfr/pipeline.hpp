#pragma once

#include "nssfr/aggregate.hpp"
#include "nssfr/config.hpp"
#include "nssfr/mask.hpp"
#include "nssfr/radial.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nssfr {

struct SkippedFile {
    std::string id;
    std::string reason;
};

struct FrameSummary {
    std::string id;
    int candidates = 0;
    int valid = 0;
};

struct AnalysisResult {
    std::size_t frames_matched = 0;
    std::vector<FrameSummary> frames; ///< processed frames in id order
    std::vector<SkippedFile> skipped;
    int frame_width = 0;
    int frame_height = 0;
    std::optional<RegionMask> mask;
    RadialSegmentation segmentation;
    std::vector<Measurement> measurements; ///< sorted by (frame id, roi index)
    std::vector<SegmentStats> stats;
    std::vector<std::string> warnings;

    int valid_count() const;
};

/// Shared, read-only per-camera state built once per run.
struct CameraSetup {
    int width = 0;
    int height = 0;
    ValidityMap region;    ///< rasterized mask (or all valid)
    ValidityMap exclusion; ///< region after the exclusion dilation
    RectI crop;            ///< bounding box of `exclusion`
    ValidityMap cropped_exclusion;
    RadialSegmentation segmentation;
};

CameraSetup prepare_camera(int width, int height, const std::optional<RegionMask>& mask, const AnalyzeConfig& config);

/// Part 1 for one frame: crop, edge detection, candidate extraction,
/// SFR measurement, validity triage and radial classification.
std::vector<Measurement> measure_frame(const Frame& frame, const CameraSetup& camera, const AnalyzeConfig& config);

/// Runs the full pipeline over the dataset without writing files.
AnalysisResult run_analysis(const AnalyzeConfig& config);

/// Writes measurements.csv, summary.json and figures/ under config.out.
void write_outputs(const AnalyzeConfig& config, const AnalysisResult& result);

/// One-screen per-segment table.
std::string summary_table(const AnalysisResult& result);

struct MaskCheckResult {
    RadialSegmentation segmentation;
    std::string svg;
};

/// Renders the mask outline and segmentation circles over a sample image.
MaskCheckResult mask_check(const RegionMask& mask, const Frame& sample, int segments = 3,
                           const std::vector<double>& ratios = {});

} // namespace nssfr
