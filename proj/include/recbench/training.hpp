#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace recbench {

enum class OptimizerKind { sgd, momentum, adam };

/// Parses "sgd", "momentum" or "adam". Throws InvalidInput otherwise.
OptimizerKind parse_optimizer(const std::string& name);
std::string to_string(OptimizerKind kind);

/// Shared by the decoder and the mirror network.
struct TrainConfig {
    double learning_rate = 1e-3;
    double code_learning_rate = 1e-3;
    int epochs = 200;
    int batch_size = 1024;
    double clamp_delta = 0.1;
    double code_prior_weight = 1e-4;
    double code_init_sigma = 0.01;
    std::uint64_t seed = 1;
    OptimizerKind optimizer = OptimizerKind::adam;
    double momentum = 0.9;
    /// Latent-inference schedule. Weights stay frozen.
    int inference_steps = 400;
    double inference_learning_rate = 5e-3;
    /// Inference clamp starts here and decays geometrically to clamp_delta over
    /// the first half of the steps, so codes far from the data still get a
    /// gradient. Values <= clamp_delta disable the schedule.
    double inference_clamp_start = 0.5;
    int threads = 1;

    /// Throws InvalidInput on non-positive rates, negative counts or clamp_delta <= 0.
    void validate() const;
};

/// First-order update rule over a fixed list of tensors. Plain gradient
/// descent, heavy-ball momentum, or Adam (beta 0.9 / 0.999, eps 1e-8).
class Optimizer {
public:
    Optimizer(OptimizerKind kind, double learning_rate, std::vector<std::size_t> tensor_sizes,
              double momentum = 0.9);

    /// params[i] -= update(grads[i]). Sizes must match the constructor's.
    void step(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads);

    long steps_taken() const noexcept { return t_; }

private:
    OptimizerKind kind_;
    double lr_;
    double momentum_;
    long t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

}  // namespace recbench
