#include "nssfr/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nssfr {

std::vector<SegmentStats> accumulate(const std::vector<Measurement>& measurements, const RadialSegmentation& seg,
                                     const std::vector<Orientation>& orientations) {
    std::vector<const Measurement*> sorted;
    sorted.reserve(measurements.size());
    for (const auto& m : measurements) sorted.push_back(&m);
    std::sort(sorted.begin(), sorted.end(), [](const Measurement* a, const Measurement* b) {
        if (a->candidate.frame_id != b->candidate.frame_id) return a->candidate.frame_id < b->candidate.frame_id;
        return a->candidate.roi_index < b->candidate.roi_index;
    });

    const std::vector<double> grid = frequency_grid();
    std::vector<SegmentStats> out;
    for (int s = 0; s < seg.n_segments(); ++s) {
        for (Orientation o : orientations) {
            SegmentStats st;
            st.segment_index = s;
            st.orientation = o;
            st.frequencies = grid;
            std::vector<double> sum(grid.size(), 0.0);
            std::vector<double> mtfs;
            for (const Measurement* m : sorted) {
                if (m->segment != s || m->candidate.orientation != o) continue;
                if (!m->curve) {
                    ++st.count_failed;
                    continue;
                }
                if (!m->verdict.valid) {
                    ++st.count_invalid;
                    continue;
                }
                ++st.count_valid;
                const auto& vals = m->curve->values;
                for (std::size_t i = 0; i < sum.size() && i < vals.size(); ++i) sum[i] += vals[i];
                if (m->curve->mtf50) {
                    mtfs.push_back(*m->curve->mtf50);
                } else {
                    ++st.count_no_crossing;
                }
            }
            if (st.count_valid > 0) {
                st.mean_curve.resize(sum.size());
                for (std::size_t i = 0; i < sum.size(); ++i) st.mean_curve[i] = sum[i] / st.count_valid;
                SfrCurve mean{grid, st.mean_curve, std::nullopt};
                st.mean_curve_mtf50 = mtf50(mean);
                if (!mtfs.empty()) {
                    double acc = 0.0;
                    for (double v : mtfs) acc += v;
                    const double mean_value = acc / static_cast<double>(mtfs.size());
                    double var = 0.0;
                    for (double v : mtfs) var += (v - mean_value) * (v - mean_value);
                    st.mtf50_stddev = mtfs.size() > 1 ? std::sqrt(var / static_cast<double>(mtfs.size() - 1)) : 0.0;
                    st.min_mtf50 = *std::min_element(mtfs.begin(), mtfs.end());
                    st.max_mtf50 = *std::max_element(mtfs.begin(), mtfs.end());
                    if (st.mean_curve_mtf50) st.mean_mtf50 = std::clamp(mean_value, *st.min_mtf50, *st.max_mtf50);
                }
            }
            st.low_confidence = st.count_valid <= kSufficientValidEdges;
            out.push_back(std::move(st));
        }
    }
    return out;
}

std::optional<std::string> sufficiency_check(const SegmentStats& stats, int n_segments) {
    if (stats.count_valid > kSufficientValidEdges) return std::nullopt;
    std::ostringstream os;
    os << "segment " << stats.segment_index << " (" << segment_name(stats.segment_index, n_segments) << ", "
       << to_string(stats.orientation) << ") has only " << stats.count_valid
       << " valid edges; more than " << kSufficientValidEdges << " are needed for a confident mean";
    return os.str();
}

} // namespace nssfr
