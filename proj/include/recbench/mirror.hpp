#pragma once

#include "recbench/decoder.hpp"
#include "recbench/depth.hpp"
#include "recbench/geometry.hpp"
#include "recbench/raycast.hpp"
#include "recbench/training.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

namespace recbench {

/// Virtual camera on the far side of the object: position point-reflected
/// through `object_center`, looking at it with world up +z (fallback +y), same
/// intrinsics. Throws InvalidInput if the camera sits at the center.
CameraModel mirror_pose(const CameraModel& cam, const Point3& object_center);

/// Ideal completion: the true depth image from the virtual camera.
DepthImage complete_view_oracle(const TriangleMesh& mesh, const CameraModel& virtual_cam);

// --- network -------------------------------------------------------------------

/// Feature maps are (channels x height*width) with pixels in row-major order.
using FeatureMap = Eigen::MatrixXd;

/// 3x3 convolution with zero padding, stride 1. weight is
/// (out x in*9) with column (c*3 + ky)*3 + kx.
struct ConvLayer {
    int in_channels = 0;
    int out_channels = 0;
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;
};

/// Channel widths 2 -> 8 -> 8 -> 1, ReLU after the first two layers.
struct MirrorModelParams {
    std::vector<ConvLayer> layers;

    static MirrorModelParams zeros(const std::vector<int>& channels = {2, 8, 8, 1});
    /// He-normal weights, zero biases.
    static MirrorModelParams random(std::uint64_t seed, const std::vector<int>& channels = {2, 8, 8, 1});

    std::vector<int> channels() const;
    std::size_t parameter_count() const;
    /// Throws InvalidInput on inconsistent shapes or non-finite entries.
    void validate() const;

    std::vector<std::span<double>> tensors();
    std::vector<std::span<const double>> tensors() const;
};

/// Lowered convolution: im2col followed by one matrix product.
FeatureMap conv2d(const ConvLayer& layer, const FeatureMap& input, int height, int width);
/// Direct per-pixel loops; the oracle for conv2d.
FeatureMap conv2d_reference(const ConvLayer& layer, const FeatureMap& input, int height, int width);

struct MirrorCache {
    int height = 0;
    int width = 0;
    std::vector<Eigen::MatrixXd> columns;  ///< im2col of each layer's input
    std::vector<FeatureMap> pre;           ///< pre-activation of each layer
};

/// Network input: channel 0 is the splatted depth (0 where empty), channel 1 the
/// validity mask.
FeatureMap mirror_input(const DepthImage& splat);

/// Raw network output (1 x height*width).
Eigen::RowVectorXd mirror_forward(const MirrorModelParams& params, const FeatureMap& input,
                                  int height, int width, MirrorCache* cache = nullptr);
/// Accumulates parameter gradients for dL/doutput = upstream into *grad.
void mirror_backward(const MirrorModelParams& params, const MirrorCache& cache,
                     const Eigen::RowVectorXd& upstream, MirrorModelParams& grad);

/// One training example. `front` is kept for provenance; the network sees only
/// `splat` (the front cloud projected into the virtual camera).
struct MirrorPair {
    DepthImage front;
    DepthImage splat;
    DepthImage target;
};

/// Renders the front view, splats its back-projection into the mirrored
/// camera and renders the oracle target there.
MirrorPair make_mirror_pair(const TriangleBvh& bvh, const CameraModel& cam, const Point3& object_center);

/// Sum of |output - target| over target-valid pixels, and their count.
struct MaskedL1 {
    double sum = 0.0;
    std::size_t count = 0;
    double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};
MaskedL1 masked_l1(const Eigen::RowVectorXd& output, const DepthImage& target);

/// Mean masked L1 over all pairs (sum of errors / total valid target pixels).
double mirror_loss(const MirrorModelParams& params, const std::vector<MirrorPair>& pairs);

/// mirror_loss together with its gradient for every parameter. Pixels where the
/// error is exactly zero get a zero subgradient.
struct MirrorLossGradient {
    double loss = 0.0;
    MirrorModelParams grad;
};
MirrorLossGradient mirror_loss_gradient(const MirrorModelParams& params, const std::vector<MirrorPair>& pairs,
                                        int threads = 1);

struct MirrorTrainResult {
    MirrorModelParams params;
    std::vector<double> epoch_losses;
};

/// Minibatch training of the masked L1 loss, starting from
/// MirrorModelParams::random(cfg.seed). Uses cfg.learning_rate, epochs,
/// batch_size (images), optimizer and threads; results do not depend on threads.
/// Throws InvalidInput for an empty set or a pair whose images disagree in size.
MirrorTrainResult train_mirror_model(const std::vector<MirrorPair>& pairs, const TrainConfig& cfg);
MirrorTrainResult train_mirror_model(const std::vector<MirrorPair>& pairs, const TrainConfig& cfg,
                                     MirrorModelParams init);

/// Network output before post-processing, as an image sized like virtual_cam.
/// Throws InvalidInput if `observed` does not match `cam`.
DepthImage mirror_predict_raw(const MirrorModelParams& params, const DepthImage& observed,
                              const CameraModel& cam, const CameraModel& virtual_cam);

/// Learned completion: raw prediction with pixels invalidated where the
/// network emits <= 0 or where the (3x3-closed) splat mask is empty.
DepthImage complete_view_learned(const MirrorModelParams& params, const DepthImage& observed,
                                 const CameraModel& cam, const CameraModel& virtual_cam);

/// Mean |raw - target| over target-valid pixels (0 when none are valid).
double masked_mean_abs_error(const DepthImage& raw, const DepthImage& target);

/// 3x3 dilation followed by 3x3 erosion of a validity mask; closes one-pixel
/// holes left by splatting.
std::vector<bool> close_mask(const std::vector<bool>& mask, int width, int height);

// --- pipeline ----------------------------------------------------------------

/// Completion stage: (observed, cam, virtual_cam) -> depth at virtual_cam. The
/// result may have a different resolution than virtual_cam; it is then
/// interpreted with virtual_cam's intrinsics rescaled to that size.
using CompletionFn =
    std::function<DepthImage(const DepthImage&, const CameraModel&, const CameraModel&)>;

/// Oracle completion over a prebuilt hierarchy (shared, so it may outlive the caller's copy).
CompletionFn oracle_completion(std::shared_ptr<const TriangleBvh> bvh);
/// With resolution > 0 the network runs at that width (height scaled to keep
/// the aspect ratio): the observation is first resampled into the smaller
/// camera by back-projection and splatting, matching training pairs rendered
/// at that size.
CompletionFn learned_completion(std::shared_ptr<const MirrorModelParams> params, int resolution = 0);

/// Observed points (tag observed) followed by completed points (tag generated).
/// `milliseconds` covers mirror_pose, completion and fusion only.
TimedCloud reconstruct_view_dependent(const DepthImage& observed, const CameraModel& cam,
                                      const CompletionFn& completion, const Point3& object_center);

// --- persistence ---------------------------------------------------------------

/// "RBMR1" container with conv<k>.weight [out, in, 3, 3] and conv<k>.bias tensors.
void save_mirror_model(const std::filesystem::path& path, const MirrorModelParams& params);
MirrorModelParams load_mirror_model(const std::filesystem::path& path);

/// Directory of PFM files plus manifest.txt listing (front, splat, target) triples.
void write_mirror_pairs(const std::filesystem::path& dir, const std::vector<MirrorPair>& pairs);
std::vector<MirrorPair> read_mirror_pairs(const std::filesystem::path& dir);

}  // namespace recbench
