#pragma once

#include "recbench/depth.hpp"
#include "recbench/geometry.hpp"
#include "recbench/sdf.hpp"
#include "recbench/training.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace recbench {

/// Per-object latent vector.
using LatentCode = Eigen::VectorXd;

/// Fully-connected SDF regressor: [z; p] -> tanh hidden layers -> linear scalar.
/// weights[k] is (out x in), biases[k] has `out` entries.
struct DecoderParams {
    int latent_dim = 16;
    std::vector<int> hidden{64, 64, 64};
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    static DecoderParams zeros(int latent_dim = 16, std::vector<int> hidden = {64, 64, 64});
    /// Xavier-normal weights, zero biases.
    static DecoderParams random(std::uint64_t seed, int latent_dim = 16,
                                std::vector<int> hidden = {64, 64, 64});
    /// Preset matching the original 8 x 512 network (latent 256).
    static DecoderParams full_preset(std::uint64_t seed);

    int input_dim() const noexcept { return latent_dim + 3; }
    std::size_t layer_count() const noexcept { return weights.size(); }
    std::size_t parameter_count() const;

    /// Throws InvalidInput on inconsistent shapes or non-finite entries.
    void validate() const;

    /// Views over every weight and bias buffer, in layer order (W0, b0, W1, ...).
    std::vector<std::span<double>> tensors();
    std::vector<std::span<const double>> tensors() const;

    /// Product of the spectral norms of the weight matrices. tanh is
    /// 1-Lipschitz, so this bounds |f(x) - f(y)| / |x - y| over the full input.
    double lipschitz_bound() const;

    void set_zero();
};

/// Activations kept for the backward pass. activations[0] is the input.
struct DecoderCache {
    std::vector<Eigen::MatrixXd> activations;
};

/// Builds the (L+3) x n input matrix with column j = [code; points[j]].
Eigen::MatrixXd decoder_inputs(const LatentCode& code, std::span<const Point3> points);

/// Evaluates the network on each input column. Throws InvalidInput when the
/// row count differs from input_dim().
Eigen::RowVectorXd decoder_forward_batch(const DecoderParams& params, const Eigen::MatrixXd& inputs,
                                         DecoderCache* cache = nullptr);

/// Single-point evaluation. Throws InvalidInput on a code of the wrong length.
double decoder_forward(const DecoderParams& params, const LatentCode& z, const Point3& p);

/// Backpropagates dL/doutput (one entry per column). Adds parameter gradients
/// into *param_grad (if non-null; must have the shapes of `params`) and writes
/// dL/dinputs into *input_grad (if non-null).
void decoder_backward(const DecoderParams& params, const DecoderCache& cache,
                      const Eigen::RowVectorXd& upstream, DecoderParams* param_grad,
                      Eigen::MatrixXd* input_grad);

/// |clamp(f, ±delta) - clamp(s, ±delta)|.
double clamped_l1(double prediction, double target, double delta);

/// Full-data objective: mean over all samples of the clamped L1 error plus
/// lambda * |z_i|^2 of the sample's object.
double autodecoder_objective(const DecoderParams& params, std::span<const LatentCode> codes,
                             const std::vector<std::vector<SdfSample>>& samples_per_object,
                             const TrainConfig& cfg);

struct AutodecoderResult {
    DecoderParams params;
    std::vector<LatentCode> codes;
    /// Mean per-sample loss over each epoch's pass.
    std::vector<double> epoch_losses;
};

/// Joint optimization of network weights and one code per object, with
/// shuffled minibatches. Gradients are reduced over fixed 128-sample chunks in
/// chunk order, so results are bit-identical for any cfg.threads.
/// Throws InvalidInput for no objects or an object without samples.
AutodecoderResult train_autodecoder(const std::vector<std::vector<SdfSample>>& samples_per_object,
                                    const TrainConfig& cfg, int latent_dim = 16,
                                    std::vector<int> hidden = {64, 64, 64});

/// Same as above, starting from given weights and codes.
AutodecoderResult train_autodecoder(const std::vector<std::vector<SdfSample>>& samples_per_object,
                                    const TrainConfig& cfg, DecoderParams init,
                                    std::vector<LatentCode> init_codes);

struct LatentInference {
    LatentCode code;
    std::vector<double> losses;  ///< objective before each step
};

/// Optimizes a code for frozen weights from the zero vector, full batch,
/// cfg.inference_steps steps at cfg.inference_learning_rate.
/// Throws InvalidInput for an empty sample set.
LatentInference infer_latent(const DecoderParams& params, std::span<const SdfSample> partial,
                             const TrainConfig& cfg);

struct PartialViewConfig {
    double spacing = 0.05;
    /// Ray distance overstates the true distance on oblique rays, which biases
    /// the inferred surface inward; one step keeps that bias small.
    int free_space_steps = 1;
    /// Use every n-th valid pixel.
    int pixel_stride = 1;
};

/// SDF supervision from one depth image: each back-projected point with sdf 0,
/// plus points k * spacing back toward the camera (k = 1..free_space_steps) with
/// sdf min(k * spacing, clamp_delta). All coordinates are in the camera's world frame.
std::vector<SdfSample> partial_view_samples(const DepthImage& depth, const CameraModel& cam,
                                            double clamp_delta, const PartialViewConfig& cfg = {});

struct TimedCloud {
    PointCloud cloud;
    double milliseconds = 0.0;
};

struct ReconstructOptions {
    /// <= 0 selects one grid spacing.
    double iso_epsilon = 0.0;
    /// Points farther from the origin are dropped: the field is unsupervised
    /// outside the training-sample ball.
    double max_radius = 1.1;
    int threads = 1;
};

/// Grid extraction of the decoder's zero level set for one code, timed.
TimedCloud reconstruct(const DecoderParams& params, const LatentCode& z, int grid_resolution,
                       const ReconstructOptions& options = {});

/// "RBSD1" container: W*/b* tensors, a codes tensor (count x latent_dim) and
/// architecture metadata.
void save_decoder(const std::filesystem::path& path, const DecoderParams& params,
                  std::span<const LatentCode> codes);
struct DecoderArtifact {
    DecoderParams params;
    std::vector<LatentCode> codes;
};
DecoderArtifact load_decoder(const std::filesystem::path& path);

}  // namespace recbench
