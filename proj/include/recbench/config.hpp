#pragma once

#include "recbench/dataset.hpp"
#include "recbench/evaluation.hpp"
#include "recbench/sdf.hpp"
#include "recbench/training.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace recbench {

/// Every tunable of the benchmark. Defaults are the desk-scale settings.
struct BenchConfig {
    std::uint64_t seed = 1;
    int threads = 1;

    DatasetConfig dataset;

    /// "desk" (latent 16, hidden 64x3) or "full" (latent 256, hidden 512x7,
    /// 5,000,000 samples per object).
    std::string preset = "desk";
    int latent_dim = 16;
    std::vector<int> hidden{64, 64, 64};
    SamplingConfig sampling;
    TrainConfig sdf;

    TrainConfig mirror = default_mirror_training();

    EvalConfig eval;

    int timing_objects = 5;
    int timing_repetitions = 5;

    static TrainConfig default_mirror_training();

    /// `eval` with the SDF training settings and thread count filled in.
    EvalConfig evaluation() const;

    /// Throws InvalidInput on any out-of-range field.
    void validate() const;
};

struct ConfigKey {
    std::string key;
    std::string description;
};

/// Every accepted key, in file order.
std::vector<ConfigKey> config_keys();

/// Sets one key. Throws ConfigurationError for an unknown key or a value that
/// does not parse.
void set_config_value(BenchConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const BenchConfig& cfg, const std::string& key);

/// Applies the preset first, then the other keys. Throws ConfigurationError on
/// syntax errors or repeated keys.
void apply_config_text(BenchConfig& cfg, const std::string& text);
/// Throws MissingArtifact when the file is absent.
BenchConfig load_config(const std::filesystem::path& path, BenchConfig base = {});

/// key=value lines for every key; load_config of this text reproduces `cfg`.
std::string dump_config(const BenchConfig& cfg);

}  // namespace recbench
