#pragma once

#include "recbench/decoder.hpp"
#include "recbench/mirror.hpp"

#include <cstdint>
#include <vector>

namespace recbench {

/// One object prepared for timing. The latent code is fixed beforehand, so
/// only grid reconstruction is measured for the SDF side.
struct TimingSample {
    DepthImage observed;
    CameraModel cam;
    LatentCode code;
};

struct TimingOptions {
    int repetitions = 5;
    int grid_resolution = 64;
    /// Width of the learned mirror network input.
    int mirror_resolution = 32;
    ReconstructOptions reconstruct;
};

struct TimingSummary {
    /// Per-object medians over repetitions, in sample order.
    std::vector<double> mirror_ms;
    std::vector<double> sdf_ms;
    double mirror_median_ms = 0.0;
    double sdf_median_ms = 0.0;
    double ratio = 0.0;  ///< sdf_median_ms / mirror_median_ms
    /// Files opened inside the measured regions; 0 by contract.
    std::uint64_t file_accesses = 0;
};

/// Single-threaded medians of (a) learned mirror completion + fusion and
/// (b) decoder grid reconstruction. Throws InvalidInput for no samples or
/// repetitions < 1.
TimingSummary time_methods(const std::vector<TimingSample>& samples, const MirrorModelParams& mirror,
                           const DecoderParams& decoder, const TimingOptions& options = {});

double median(std::vector<double> values);

}  // namespace recbench
