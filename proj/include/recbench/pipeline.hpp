#pragma once

#include "recbench/config.hpp"
#include "recbench/dataset.hpp"
#include "recbench/decoder.hpp"
#include "recbench/mirror.hpp"
#include "recbench/timing.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace recbench {

/// Independent stream per purpose ("sdf", "mirror", ...) from the global seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose);

/// Samples every training mesh and fits the auto-decoder (one code per
/// training instance, in manifest order).
AutodecoderResult train_sdf_on_dataset(const Dataset& dataset, const BenchConfig& cfg);

/// One pair per training view, rendered at the mirror resolution from the
/// view's pose.
std::vector<MirrorPair> mirror_pairs_from_dataset(const Dataset& dataset, const BenchConfig& cfg);

MirrorTrainResult train_mirror_on_pairs(const std::vector<MirrorPair>& pairs, const BenchConfig& cfg);

/// First view of up to cfg.timing_objects test instances, taken round-robin
/// over categories, with latent codes inferred beforehand.
std::vector<TimingSample> timing_samples(const Dataset& dataset, const DecoderParams& decoder,
                                         const BenchConfig& cfg);

}  // namespace recbench
