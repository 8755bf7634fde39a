#include "recbench/timing.hpp"

#include "recbench/errors.hpp"
#include "recbench/io_stats.hpp"

#include <algorithm>
#include <memory>

namespace recbench {

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidInput("median of nothing");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TimingSummary time_methods(const std::vector<TimingSample>& samples, const MirrorModelParams& mirror,
                           const DecoderParams& decoder, const TimingOptions& options) {
    if (samples.empty()) throw InvalidInput("time_methods: no samples");
    if (options.repetitions < 1) throw InvalidInput("time_methods: repetitions must be >= 1");
    const auto completion =
        learned_completion(std::make_shared<const MirrorModelParams>(mirror), options.mirror_resolution);
    auto reconstruct_opts = options.reconstruct;
    reconstruct_opts.threads = 1;

    TimingSummary summary;
    const auto files_before = file_access_count();
    for (const auto& s : samples) {
        std::vector<double> mirror_runs, sdf_runs;
        for (int r = 0; r < options.repetitions; ++r) {
            mirror_runs.push_back(reconstruct_view_dependent(s.observed, s.cam, completion, Point3::Zero()).milliseconds);
            sdf_runs.push_back(reconstruct(decoder, s.code, options.grid_resolution, reconstruct_opts).milliseconds);
        }
        summary.mirror_ms.push_back(median(mirror_runs));
        summary.sdf_ms.push_back(median(sdf_runs));
    }
    summary.file_accesses = file_access_count() - files_before;
    summary.mirror_median_ms = median(summary.mirror_ms);
    summary.sdf_median_ms = median(summary.sdf_ms);
    summary.ratio = summary.sdf_median_ms / summary.mirror_median_ms;
    return summary;
}

}  // namespace recbench
