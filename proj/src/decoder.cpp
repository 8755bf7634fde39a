#include "recbench/decoder.hpp"

#include "recbench/errors.hpp"
#include "recbench/parallel.hpp"
#include "recbench/tensor_io.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace recbench {

namespace {

constexpr std::size_t kChunk = 128;
constexpr const char* kMagic = "RBSD1";

void check_architecture(int latent_dim, const std::vector<int>& hidden) {
    if (latent_dim < 0) throw InvalidInput("latent_dim must be >= 0");
    if (hidden.empty()) throw InvalidInput("decoder needs at least one hidden layer");
    for (int h : hidden) {
        if (h < 1) throw InvalidInput("hidden widths must be positive");
    }
}

std::vector<int> layer_widths(int input_dim, const std::vector<int>& hidden) {
    std::vector<int> widths{input_dim};
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    widths.push_back(1);
    return widths;
}

}  // namespace

// --- parameters ------------------------------------------------------------

DecoderParams DecoderParams::zeros(int latent_dim, std::vector<int> hidden) {
    check_architecture(latent_dim, hidden);
    DecoderParams p;
    p.latent_dim = latent_dim;
    p.hidden = std::move(hidden);
    const auto widths = layer_widths(p.input_dim(), p.hidden);
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
        p.weights.push_back(Eigen::MatrixXd::Zero(widths[k + 1], widths[k]));
        p.biases.push_back(Eigen::VectorXd::Zero(widths[k + 1]));
    }
    return p;
}

DecoderParams DecoderParams::random(std::uint64_t seed, int latent_dim, std::vector<int> hidden) {
    auto p = zeros(latent_dim, std::move(hidden));
    std::mt19937_64 rng(seed);
    for (auto& w : p.weights) {
        std::normal_distribution<double> g(0.0, std::sqrt(2.0 / static_cast<double>(w.rows() + w.cols())));
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = g(rng);
    }
    return p;
}

DecoderParams DecoderParams::full_preset(std::uint64_t seed) {
    return random(seed, 256, std::vector<int>(7, 512));
}

std::size_t DecoderParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        n += static_cast<std::size_t>(weights[k].size() + biases[k].size());
    }
    return n;
}

void DecoderParams::validate() const {
    check_architecture(latent_dim, hidden);
    const auto widths = layer_widths(input_dim(), hidden);
    if (weights.size() + 1 != widths.size() || biases.size() != weights.size()) {
        throw InvalidInput("decoder layer count does not match its architecture");
    }
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k].rows() != widths[k + 1] || weights[k].cols() != widths[k] ||
            biases[k].size() != widths[k + 1]) {
            throw InvalidInput("decoder layer " + std::to_string(k) + " has the wrong shape");
        }
        if (!weights[k].allFinite() || !biases[k].allFinite()) {
            throw InvalidInput("decoder parameters must be finite");
        }
    }
}

std::vector<std::span<double>> DecoderParams::tensors() {
    std::vector<std::span<double>> out;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        out.emplace_back(weights[k].data(), static_cast<std::size_t>(weights[k].size()));
        out.emplace_back(biases[k].data(), static_cast<std::size_t>(biases[k].size()));
    }
    return out;
}

std::vector<std::span<const double>> DecoderParams::tensors() const {
    std::vector<std::span<const double>> out;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        out.emplace_back(weights[k].data(), static_cast<std::size_t>(weights[k].size()));
        out.emplace_back(biases[k].data(), static_cast<std::size_t>(biases[k].size()));
    }
    return out;
}

double DecoderParams::lipschitz_bound() const {
    double bound = 1.0;
    for (const auto& w : weights) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
        bound *= svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    }
    return bound;
}

void DecoderParams::set_zero() {
    for (auto& w : weights) w.setZero();
    for (auto& b : biases) b.setZero();
}

// --- forward / backward ----------------------------------------------------

Eigen::MatrixXd decoder_inputs(const LatentCode& code, std::span<const Point3> points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    const auto l = code.size();
    Eigen::MatrixXd in(l + 3, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        in.col(j).head(l) = code;
        in.col(j).tail<3>() = points[static_cast<std::size_t>(j)];
    }
    return in;
}

Eigen::RowVectorXd decoder_forward_batch(const DecoderParams& params, const Eigen::MatrixXd& inputs,
                                         DecoderCache* cache) {
    if (inputs.rows() != params.input_dim()) {
        throw InvalidInput("decoder input has " + std::to_string(inputs.rows()) + " rows, expected " +
                           std::to_string(params.input_dim()));
    }
    if (params.weights.empty()) throw InvalidInput("decoder has no layers");
    const std::size_t last = params.weights.size() - 1;
    if (cache) {
        cache->activations.resize(params.weights.size());
        cache->activations[0] = inputs;
    }
    Eigen::MatrixXd a = inputs;
    for (std::size_t k = 0; k < last; ++k) {
        Eigen::MatrixXd z = params.weights[k] * a;
        z.colwise() += params.biases[k];
        a = z.array().tanh().matrix();
        if (cache) cache->activations[k + 1] = a;
    }
    Eigen::RowVectorXd out = params.weights[last] * a;
    out.array() += params.biases[last](0);
    return out;
}

double decoder_forward(const DecoderParams& params, const LatentCode& z, const Point3& p) {
    if (z.size() != params.latent_dim) throw InvalidInput("latent code has the wrong length");
    const Point3 points[1] = {p};
    return decoder_forward_batch(params, decoder_inputs(z, points))(0);
}

void decoder_backward(const DecoderParams& params, const DecoderCache& cache,
                      const Eigen::RowVectorXd& upstream, DecoderParams* param_grad,
                      Eigen::MatrixXd* input_grad) {
    const std::size_t layers = params.weights.size();
    if (cache.activations.size() != layers) throw InvalidInput("decoder cache does not match");
    Eigen::MatrixXd delta = upstream;  // dL/d(pre-activation) of the current layer
    for (std::size_t k = layers; k-- > 0;) {
        const Eigen::MatrixXd& a_in = cache.activations[k];
        if (param_grad) {
            param_grad->weights[k].noalias() += delta * a_in.transpose();
            param_grad->biases[k] += delta.rowwise().sum();
        }
        if (k == 0) {
            if (input_grad) *input_grad = params.weights[0].transpose() * delta;
            break;
        }
        Eigen::MatrixXd back = params.weights[k].transpose() * delta;
        delta = (back.array() * (1.0 - a_in.array().square())).matrix();
    }
}

double clamped_l1(double prediction, double target, double delta) {
    return std::abs(std::clamp(prediction, -delta, delta) - std::clamp(target, -delta, delta));
}

namespace {

// d clamped_l1 / d prediction.
double clamped_l1_grad(double prediction, double target, double delta) {
    if (!(std::abs(prediction) < delta)) return 0.0;
    const double diff = prediction - std::clamp(target, -delta, delta);
    return diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
}

struct SampleRef {
    std::uint32_t object;
    std::uint32_t index;
};

struct ChunkResult {
    DecoderParams grad;
    Eigen::MatrixXd input_grad;
    double loss_sum = 0.0;
};

// Clamped-L1 part of the loss and its gradients for one chunk. `scale`
// multiplies every per-sample gradient (1 / batch size).
void process_chunk(const DecoderParams& params, const Eigen::MatrixXd& inputs,
                   std::span<const double> targets, double delta, double scale,
                   ChunkResult& out, bool want_param_grad) {
    DecoderCache cache;
    const Eigen::RowVectorXd pred = decoder_forward_batch(params, inputs, &cache);
    Eigen::RowVectorXd upstream(pred.size());
    out.loss_sum = 0.0;
    for (Eigen::Index j = 0; j < pred.size(); ++j) {
        const double s = targets[static_cast<std::size_t>(j)];
        out.loss_sum += clamped_l1(pred(j), s, delta);
        upstream(j) = scale * clamped_l1_grad(pred(j), s, delta);
    }
    if (want_param_grad) {
        out.grad = DecoderParams::zeros(params.latent_dim, params.hidden);
        decoder_backward(params, cache, upstream, &out.grad, &out.input_grad);
    } else {
        decoder_backward(params, cache, upstream, nullptr, &out.input_grad);
    }
}

void add_into(DecoderParams& acc, const DecoderParams& g) {
    for (std::size_t k = 0; k < acc.weights.size(); ++k) {
        acc.weights[k] += g.weights[k];
        acc.biases[k] += g.biases[k];
    }
}

}  // namespace

double autodecoder_objective(const DecoderParams& params, std::span<const LatentCode> codes,
                             const std::vector<std::vector<SdfSample>>& samples_per_object,
                             const TrainConfig& cfg) {
    if (codes.size() != samples_per_object.size()) throw InvalidInput("one code per object required");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t o = 0; o < samples_per_object.size(); ++o) {
        const auto& samples = samples_per_object[o];
        std::vector<Point3> pts;
        pts.reserve(samples.size());
        for (const auto& s : samples) pts.push_back(s.point);
        const auto pred = decoder_forward_batch(params, decoder_inputs(codes[o], pts));
        const double prior = cfg.code_prior_weight * codes[o].squaredNorm();
        for (std::size_t j = 0; j < samples.size(); ++j) {
            sum += clamped_l1(pred(static_cast<Eigen::Index>(j)), samples[j].sdf, cfg.clamp_delta) + prior;
        }
        count += samples.size();
    }
    if (count == 0) throw InvalidInput("objective over an empty sample set");
    return sum / static_cast<double>(count);
}

// --- training --------------------------------------------------------------

AutodecoderResult train_autodecoder(const std::vector<std::vector<SdfSample>>& samples_per_object,
                                    const TrainConfig& cfg, int latent_dim, std::vector<int> hidden) {
    cfg.validate();
    auto params = DecoderParams::random(cfg.seed, latent_dim, std::move(hidden));
    std::mt19937_64 rng(cfg.seed ^ 0xc0dec0dec0dec0deULL);
    std::normal_distribution<double> g(0.0, cfg.code_init_sigma);
    std::vector<LatentCode> codes(samples_per_object.size(), LatentCode::Zero(latent_dim));
    for (auto& z : codes) {
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = g(rng);
    }
    return train_autodecoder(samples_per_object, cfg, std::move(params), std::move(codes));
}

AutodecoderResult train_autodecoder(const std::vector<std::vector<SdfSample>>& samples_per_object,
                                    const TrainConfig& cfg, DecoderParams params,
                                    std::vector<LatentCode> codes) {
    cfg.validate();
    params.validate();
    if (samples_per_object.empty()) throw InvalidInput("train_autodecoder: no objects");
    if (codes.size() != samples_per_object.size()) throw InvalidInput("one code per object required");
    std::vector<SampleRef> order;
    for (std::size_t o = 0; o < samples_per_object.size(); ++o) {
        if (samples_per_object[o].empty()) {
            throw InvalidInput("train_autodecoder: object " + std::to_string(o) + " has no samples");
        }
        if (codes[o].size() != params.latent_dim) throw InvalidInput("latent code has the wrong length");
        for (std::size_t j = 0; j < samples_per_object[o].size(); ++j) {
            order.push_back({static_cast<std::uint32_t>(o), static_cast<std::uint32_t>(j)});
        }
    }

    const auto L = params.latent_dim;
    std::vector<std::size_t> net_sizes;
    for (auto t : params.tensors()) net_sizes.push_back(t.size());
    Optimizer net_opt(cfg.optimizer, cfg.learning_rate, net_sizes, cfg.momentum);
    Optimizer code_opt(cfg.optimizer, cfg.code_learning_rate,
                       std::vector<std::size_t>(codes.size(), static_cast<std::size_t>(L)), cfg.momentum);

    std::mt19937_64 shuffle_rng(cfg.seed ^ 0x5eed5eed5eed5eedULL);
    AutodecoderResult result;
    result.epoch_losses.reserve(static_cast<std::size_t>(cfg.epochs));
    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    std::vector<LatentCode> code_grads(codes.size(), LatentCode::Zero(L));
    std::vector<std::size_t> present(codes.size(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t n = std::min(batch, order.size() - start);
            const double scale = 1.0 / static_cast<double>(n);
            const std::size_t chunks = (n + kChunk - 1) / kChunk;
            std::vector<ChunkResult> results(chunks);
            parallel_for(chunks, cfg.threads, [&](std::size_t c0, std::size_t c1) {
                for (std::size_t c = c0; c < c1; ++c) {
                    const std::size_t b0 = start + c * kChunk;
                    const std::size_t m = std::min(kChunk, start + n - b0);
                    Eigen::MatrixXd in(L + 3, static_cast<Eigen::Index>(m));
                    std::vector<double> targets(m);
                    for (std::size_t j = 0; j < m; ++j) {
                        const auto ref = order[b0 + j];
                        const auto& s = samples_per_object[ref.object][ref.index];
                        in.col(static_cast<Eigen::Index>(j)).head(L) = codes[ref.object];
                        in.col(static_cast<Eigen::Index>(j)).tail<3>() = s.point;
                        targets[j] = s.sdf;
                    }
                    process_chunk(params, in, targets, cfg.clamp_delta, scale, results[c], true);
                }
            });

            auto grad = DecoderParams::zeros(params.latent_dim, params.hidden);
            for (auto& z : code_grads) z.setZero();
            std::fill(present.begin(), present.end(), 0);
            double batch_loss = 0.0;
            for (std::size_t c = 0; c < chunks; ++c) {
                add_into(grad, results[c].grad);
                batch_loss += results[c].loss_sum;
                const std::size_t b0 = start + c * kChunk;
                for (Eigen::Index j = 0; j < results[c].input_grad.cols(); ++j) {
                    const auto obj = order[b0 + static_cast<std::size_t>(j)].object;
                    code_grads[obj] += results[c].input_grad.col(j).head(L);
                    ++present[obj];
                }
            }
            for (std::size_t o = 0; o < codes.size(); ++o) {
                if (present[o] == 0) continue;
                const double w = static_cast<double>(present[o]) * scale;
                code_grads[o] += 2.0 * cfg.code_prior_weight * w * codes[o];
                batch_loss += static_cast<double>(present[o]) * cfg.code_prior_weight * codes[o].squaredNorm();
            }
            epoch_sum += batch_loss;

            net_opt.step(params.tensors(), std::as_const(grad).tensors());
            std::vector<std::span<double>> code_views;
            std::vector<std::span<const double>> code_grad_views;
            for (std::size_t o = 0; o < codes.size(); ++o) {
                code_views.emplace_back(codes[o].data(), static_cast<std::size_t>(L));
                code_grad_views.emplace_back(code_grads[o].data(), static_cast<std::size_t>(L));
            }
            code_opt.step(code_views, code_grad_views);
        }
        result.epoch_losses.push_back(epoch_sum / static_cast<double>(order.size()));
    }
    result.params = std::move(params);
    result.codes = std::move(codes);
    return result;
}

LatentInference infer_latent(const DecoderParams& params, std::span<const SdfSample> partial,
                             const TrainConfig& cfg) {
    cfg.validate();
    params.validate();
    if (partial.empty()) throw InvalidInput("infer_latent: empty partial sample set");
    const auto L = params.latent_dim;
    LatentInference out;
    out.code = LatentCode::Zero(L);
    Optimizer opt(cfg.optimizer, cfg.inference_learning_rate, {static_cast<std::size_t>(L)},
                  cfg.momentum);
    const std::size_t n = partial.size();
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    const double scale = 1.0 / static_cast<double>(n);
    std::vector<double> targets(n);
    for (std::size_t j = 0; j < n; ++j) targets[j] = partial[j].sdf;

    const int decay_steps = cfg.inference_steps / 2;
    for (int step = 0; step < cfg.inference_steps; ++step) {
        double delta = cfg.clamp_delta;
        if (cfg.inference_clamp_start > cfg.clamp_delta && step < decay_steps) {
            const double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
            delta = cfg.inference_clamp_start * std::pow(cfg.clamp_delta / cfg.inference_clamp_start, frac);
        }
        std::vector<ChunkResult> results(chunks);
        parallel_for(chunks, cfg.threads, [&](std::size_t c0, std::size_t c1) {
            for (std::size_t c = c0; c < c1; ++c) {
                const std::size_t b0 = c * kChunk;
                const std::size_t m = std::min(kChunk, n - b0);
                Eigen::MatrixXd in(L + 3, static_cast<Eigen::Index>(m));
                for (std::size_t j = 0; j < m; ++j) {
                    in.col(static_cast<Eigen::Index>(j)).head(L) = out.code;
                    in.col(static_cast<Eigen::Index>(j)).tail<3>() = partial[b0 + j].point;
                }
                process_chunk(params, in, std::span<const double>(targets).subspan(b0, m), delta,
                              scale, results[c], false);
            }
        });
        LatentCode grad = 2.0 * cfg.code_prior_weight * out.code;
        double loss = cfg.code_prior_weight * out.code.squaredNorm();
        for (const auto& r : results) {
            grad += r.input_grad.topRows(L).rowwise().sum();
            loss += r.loss_sum * scale;
        }
        out.losses.push_back(loss);
        const std::span<double> views[1] = {std::span<double>(out.code.data(), static_cast<std::size_t>(L))};
        const std::span<const double> grad_views[1] = {
            std::span<const double>(grad.data(), static_cast<std::size_t>(L))};
        opt.step(views, grad_views);
    }
    return out;
}

std::vector<SdfSample> partial_view_samples(const DepthImage& depth, const CameraModel& cam,
                                            double clamp_delta, const PartialViewConfig& cfg) {
    if (!(cfg.spacing > 0.0) || cfg.free_space_steps < 0 || cfg.pixel_stride < 1) {
        throw InvalidInput("invalid partial-view sampling configuration");
    }
    const auto cloud = back_project(depth, cam);
    const Point3 eye = cam.position();
    std::vector<SdfSample> samples;
    for (std::size_t i = 0; i < cloud.size(); i += static_cast<std::size_t>(cfg.pixel_stride)) {
        const Point3& p = cloud[i];
        samples.push_back({p, 0.0});
        const Vec3 to_eye = eye - p;
        const double range = to_eye.norm();
        const Vec3 dir = to_eye / range;
        for (int k = 1; k <= cfg.free_space_steps; ++k) {
            const double d = k * cfg.spacing;
            if (d >= range) break;
            samples.push_back({p + d * dir, std::min(d, clamp_delta)});
        }
    }
    return samples;
}

TimedCloud reconstruct(const DecoderParams& params, const LatentCode& z, int grid_resolution,
                       const ReconstructOptions& options) {
    if (z.size() != params.latent_dim) throw InvalidInput("latent code has the wrong length");
    const double iso_epsilon = options.iso_epsilon > 0.0 ? options.iso_epsilon
                                                         : extraction_spacing(grid_resolution);
    const BatchSdfFn field = [&](std::span<const Point3> points, std::span<double> values) {
        for (std::size_t b0 = 0; b0 < points.size(); b0 += 4096) {
            const std::size_t m = std::min<std::size_t>(4096, points.size() - b0);
            const auto out = decoder_forward_batch(params, decoder_inputs(z, points.subspan(b0, m)));
            for (std::size_t j = 0; j < m; ++j) values[b0 + j] = out(static_cast<Eigen::Index>(j));
        }
    };
    const auto t0 = std::chrono::steady_clock::now();
    TimedCloud result;
    auto grid = extract_surface_points(field, grid_resolution, iso_epsilon, {.threads = options.threads});
    result.cloud.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i].norm() <= options.max_radius) result.cloud.add(grid[i], grid.source(i));
    }
    result.milliseconds =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

// --- persistence -------------------------------------------------------------

namespace {

Tensor matrix_tensor(const std::string& name, const Eigen::MatrixXd& m) {
    Tensor t{name, {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())}, {}};
    t.values.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) t.values.push_back(m(r, c));
    return t;
}

Eigen::MatrixXd tensor_matrix(const Tensor& t, Eigen::Index rows, Eigen::Index cols) {
    if (t.shape.size() != 2 || t.shape[0] != static_cast<std::size_t>(rows) ||
        t.shape[1] != static_cast<std::size_t>(cols)) {
        throw InvalidInput("tensor '" + t.name + "' has an unexpected shape");
    }
    Eigen::MatrixXd m(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = t.values[i++];
    return m;
}

}  // namespace

void save_decoder(const std::filesystem::path& path, const DecoderParams& params,
                  std::span<const LatentCode> codes) {
    params.validate();
    TensorArchive archive;
    archive.magic = kMagic;
    archive.meta["latent_dim"] = std::to_string(params.latent_dim);
    std::ostringstream hidden;
    for (std::size_t i = 0; i < params.hidden.size(); ++i) hidden << (i ? "," : "") << params.hidden[i];
    archive.meta["hidden"] = hidden.str();
    archive.meta["activation"] = "tanh";
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        archive.tensors.push_back(matrix_tensor("W" + std::to_string(k), params.weights[k]));
        archive.tensors.push_back(matrix_tensor("b" + std::to_string(k), params.biases[k]));
    }
    Eigen::MatrixXd code_matrix(static_cast<Eigen::Index>(codes.size()), params.latent_dim);
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i].size() != params.latent_dim) throw InvalidInput("latent code has the wrong length");
        code_matrix.row(static_cast<Eigen::Index>(i)) = codes[i].transpose();
    }
    archive.tensors.push_back(matrix_tensor("codes", code_matrix));
    write_tensor_archive(path, archive);
}

DecoderArtifact load_decoder(const std::filesystem::path& path) {
    const auto archive = read_tensor_archive(path, kMagic);
    auto meta = [&](const std::string& key) {
        const auto it = archive.meta.find(key);
        if (it == archive.meta.end()) throw InvalidInput("decoder archive lacks '" + key + "'");
        return it->second;
    };
    const int latent_dim = std::stoi(meta("latent_dim"));
    std::vector<int> hidden;
    std::istringstream widths(meta("hidden"));
    for (std::string w; std::getline(widths, w, ',');) hidden.push_back(std::stoi(w));

    DecoderArtifact out;
    out.params = DecoderParams::zeros(latent_dim, hidden);
    for (std::size_t k = 0; k < out.params.weights.size(); ++k) {
        auto& w = out.params.weights[k];
        w = tensor_matrix(archive.get("W" + std::to_string(k)), w.rows(), w.cols());
        out.params.biases[k] =
            tensor_matrix(archive.get("b" + std::to_string(k)), out.params.biases[k].size(), 1);
    }
    const auto& codes = archive.get("codes");
    if (codes.shape.size() != 2) throw InvalidInput("codes tensor must be 2-D");
    const auto m = tensor_matrix(codes, static_cast<Eigen::Index>(codes.shape[0]), latent_dim);
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.codes.push_back(m.row(i).transpose());
    out.params.validate();
    return out;
}

}  // namespace recbench
