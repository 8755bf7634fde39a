#pragma once

#include "recbench/dataset.hpp"
#include "recbench/decoder.hpp"
#include "recbench/metrics.hpp"
#include "recbench/mirror.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace recbench {

enum class Method { mirror_oracle, mirror_learned, deepsdf };

std::string to_string(Method m);
/// Throws InvalidInput for an unknown name.
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();

struct EvalRecord {
    Method method = Method::mirror_oracle;
    Category category = Category::bottle;
    std::string instance;
    int view = 0;
    double d_c = 0.0;
    double d_h = 0.0;
    double inference_ms = 0.0;
    /// Reconstructed points after outlier filtering, before the metric downsampling.
    std::size_t point_count = 0;
};

struct EvalConfig {
    std::vector<Method> methods = all_methods();
    std::size_t ground_truth_samples = 10000;
    double metric_voxel = 0.02;
    /// Applied to both mirror outputs.
    VoxelFilterConfig outlier_filter{0.1, 3};
    /// Width at which the learned mirror network runs.
    int mirror_resolution = 32;
    int grid_resolution = 64;
    /// Inference schedule and clamp for the decoder (weights frozen).
    TrainConfig sdf;
    PartialViewConfig partial_view;
    ReconstructOptions reconstruct;
    int threads = 1;

    void validate() const;
};

/// Trained artifacts; a null pointer marks a method that cannot run.
struct Models {
    std::shared_ptr<const MirrorModelParams> mirror;
    std::shared_ptr<const DecoderParams> decoder;
};

/// Canonical artifact locations under an output directory.
std::filesystem::path mirror_model_path(const std::filesystem::path& out);
std::filesystem::path decoder_model_path(const std::filesystem::path& out);

/// Loads what `methods` need. Throws MissingArtifact naming the absent file.
Models load_models(const std::filesystem::path& out, const std::vector<Method>& methods);

/// One observed view of one object through one method. An empty prediction is
/// recorded with d_c = d_h = infinity.
EvalRecord evaluate_view(Method method, const Models& models, const View& view, const TriangleMesh& mesh,
                         const PointCloud& ground_truth, const EvalConfig& cfg);

/// Every test instance and view through every method, sorted by (method,
/// category, instance, view). Throws MissingArtifact if a method lacks its model.
std::vector<EvalRecord> run_evaluation(const Dataset& dataset, const Models& models, const EvalConfig& cfg);

/// Voxel-downsampled 10k-point (by default) surface sampling, seeded per instance.
PointCloud ground_truth_cloud(const TriangleMesh& mesh, std::uint64_t seed, const EvalConfig& cfg);

/// Header: method,category,instance,view,d_c,d_h,inference_ms,point_count.
/// Reals are written in shortest round-trip form.
void write_results_csv(const std::filesystem::path& path, const std::vector<EvalRecord>& records);
std::vector<EvalRecord> read_results_csv(const std::filesystem::path& path);

/// Shortest decimal that parses back to exactly `v` ("inf" for infinity).
std::string format_real(double v);
/// Inverse of format_real. Throws InvalidInput on junk.
double parse_real(const std::string& text);

}  // namespace recbench
