#include "recbench/training.hpp"

#include "recbench/errors.hpp"

#include <cmath>

namespace recbench {

OptimizerKind parse_optimizer(const std::string& name) {
    if (name == "sgd") return OptimizerKind::sgd;
    if (name == "momentum") return OptimizerKind::momentum;
    if (name == "adam") return OptimizerKind::adam;
    throw InvalidInput("unknown optimizer: " + name);
}

std::string to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::sgd: return "sgd";
        case OptimizerKind::momentum: return "momentum";
        case OptimizerKind::adam: return "adam";
    }
    return "adam";
}

void TrainConfig::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(learning_rate) || !positive(code_learning_rate) ||
        !positive(inference_learning_rate)) {
        throw InvalidInput("learning rates must be positive");
    }
    if (!positive(clamp_delta)) throw InvalidInput("clamp_delta must be positive");
    if (epochs < 0 || inference_steps < 0) throw InvalidInput("epoch and step counts must be >= 0");
    if (batch_size < 1) throw InvalidInput("batch_size must be >= 1");
    if (!(code_prior_weight >= 0.0) || !(code_init_sigma >= 0.0)) {
        throw InvalidInput("code prior weight and init sigma must be >= 0");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidInput("momentum must be in [0, 1)");
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate,
                     std::vector<std::size_t> tensor_sizes, double momentum)
    : kind_(kind), lr_(learning_rate), momentum_(momentum) {
    for (auto n : tensor_sizes) {
        m_.emplace_back(kind == OptimizerKind::sgd ? 0 : n, 0.0);
        v_.emplace_back(kind == OptimizerKind::adam ? n : 0, 0.0);
    }
}

void Optimizer::step(std::span<const std::span<double>> params,
                     std::span<const std::span<const double>> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw InvalidInput("optimizer tensor count mismatch");
    }
    ++t_;
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto p = params[k];
        auto g = grads[k];
        if (p.size() != g.size()) throw InvalidInput("optimizer tensor size mismatch");
        switch (kind_) {
            case OptimizerKind::sgd:
                for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr_ * g[i];
                break;
            case OptimizerKind::momentum: {
                auto& m = m_[k];
                for (std::size_t i = 0; i < p.size(); ++i) {
                    m[i] = momentum_ * m[i] + g[i];
                    p[i] -= lr_ * m[i];
                }
                break;
            }
            case OptimizerKind::adam: {
                auto& m = m_[k];
                auto& v = v_[k];
                for (std::size_t i = 0; i < p.size(); ++i) {
                    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                    p[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
                }
                break;
            }
        }
    }
}

}  // namespace recbench
