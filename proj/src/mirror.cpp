#include "recbench/mirror.hpp"

#include "recbench/errors.hpp"
#include "recbench/io_stats.hpp"
#include "recbench/parallel.hpp"
#include "recbench/tensor_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace recbench {

namespace {

constexpr const char* kModelMagic = "RBMR1";
constexpr const char* kPairsMagic = "RBMIRROR 1";

}  // namespace

CameraModel mirror_pose(const CameraModel& cam, const Point3& object_center) {
    const Point3 eye = cam.position();
    if ((eye - object_center).norm() < 1e-12) {
        throw InvalidInput("mirror_pose: camera is at the object center");
    }
    CameraModel out = cam;
    out.pose = look_at(2.0 * object_center - eye, object_center, Vec3::UnitZ());
    return out;
}

DepthImage complete_view_oracle(const TriangleMesh& mesh, const CameraModel& virtual_cam) {
    return render_depth(mesh, virtual_cam);
}

// --- parameters --------------------------------------------------------------

MirrorModelParams MirrorModelParams::zeros(const std::vector<int>& channels) {
    if (channels.size() < 2) throw InvalidInput("mirror network needs at least one layer");
    MirrorModelParams p;
    for (std::size_t k = 0; k + 1 < channels.size(); ++k) {
        if (channels[k] < 1 || channels[k + 1] < 1) throw InvalidInput("channel counts must be positive");
        ConvLayer layer;
        layer.in_channels = channels[k];
        layer.out_channels = channels[k + 1];
        layer.weight = Eigen::MatrixXd::Zero(channels[k + 1], channels[k] * 9);
        layer.bias = Eigen::VectorXd::Zero(channels[k + 1]);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

MirrorModelParams MirrorModelParams::random(std::uint64_t seed, const std::vector<int>& channels) {
    auto p = zeros(channels);
    std::mt19937_64 rng(seed);
    for (auto& layer : p.layers) {
        std::normal_distribution<double> g(0.0, std::sqrt(2.0 / (9.0 * layer.in_channels)));
        for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = g(rng);
    }
    return p;
}

std::vector<int> MirrorModelParams::channels() const {
    std::vector<int> c;
    if (layers.empty()) return c;
    c.push_back(layers.front().in_channels);
    for (const auto& l : layers) c.push_back(l.out_channels);
    return c;
}

std::size_t MirrorModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

void MirrorModelParams::validate() const {
    if (layers.empty()) throw InvalidInput("mirror network has no layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& l = layers[k];
        if (l.weight.rows() != l.out_channels || l.weight.cols() != 9 * l.in_channels ||
            l.bias.size() != l.out_channels) {
            throw InvalidInput("mirror layer " + std::to_string(k) + " has the wrong shape");
        }
        if (k > 0 && l.in_channels != layers[k - 1].out_channels) {
            throw InvalidInput("mirror layer " + std::to_string(k) + " does not chain");
        }
        if (!l.weight.allFinite() || !l.bias.allFinite()) {
            throw InvalidInput("mirror parameters must be finite");
        }
    }
    if (layers.back().out_channels != 1) throw InvalidInput("mirror network must output one channel");
}

std::vector<std::span<double>> MirrorModelParams::tensors() {
    std::vector<std::span<double>> out;
    for (auto& l : layers) {
        out.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
        out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
    }
    return out;
}

std::vector<std::span<const double>> MirrorModelParams::tensors() const {
    std::vector<std::span<const double>> out;
    for (const auto& l : layers) {
        out.emplace_back(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
        out.emplace_back(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
    }
    return out;
}

// --- convolution -----------------------------------------------------------------

namespace {

Eigen::MatrixXd im2col(const FeatureMap& input, int height, int width) {
    const auto channels = input.rows();
    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(channels * 9, static_cast<Eigen::Index>(height) * width);
    for (Eigen::Index c = 0; c < channels; ++c) {
        for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
                const Eigen::Index row = (c * 3 + ky) * 3 + kx;
                for (int y = 0; y < height; ++y) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= height) continue;
                    for (int x = 0; x < width; ++x) {
                        const int sx = x + kx - 1;
                        if (sx < 0 || sx >= width) continue;
                        cols(row, y * width + x) = input(c, sy * width + sx);
                    }
                }
            }
        }
    }
    return cols;
}

FeatureMap col2im(const Eigen::MatrixXd& cols, Eigen::Index channels, int height, int width) {
    FeatureMap out = FeatureMap::Zero(channels, static_cast<Eigen::Index>(height) * width);
    for (Eigen::Index c = 0; c < channels; ++c) {
        for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
                const Eigen::Index row = (c * 3 + ky) * 3 + kx;
                for (int y = 0; y < height; ++y) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= height) continue;
                    for (int x = 0; x < width; ++x) {
                        const int sx = x + kx - 1;
                        if (sx < 0 || sx >= width) continue;
                        out(c, sy * width + sx) += cols(row, y * width + x);
                    }
                }
            }
        }
    }
    return out;
}

void check_map(const ConvLayer& layer, const FeatureMap& input, int height, int width) {
    if (height < 1 || width < 1 || input.cols() != static_cast<Eigen::Index>(height) * width) {
        throw InvalidInput("feature map size does not match its image dimensions");
    }
    if (input.rows() != layer.in_channels) throw InvalidInput("feature map has the wrong channel count");
}

}  // namespace

FeatureMap conv2d(const ConvLayer& layer, const FeatureMap& input, int height, int width) {
    check_map(layer, input, height, width);
    FeatureMap out = layer.weight * im2col(input, height, width);
    out.colwise() += layer.bias;
    return out;
}

FeatureMap conv2d_reference(const ConvLayer& layer, const FeatureMap& input, int height, int width) {
    check_map(layer, input, height, width);
    FeatureMap out(layer.out_channels, static_cast<Eigen::Index>(height) * width);
    for (int o = 0; o < layer.out_channels; ++o) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                double acc = layer.bias(o);
                for (int c = 0; c < layer.in_channels; ++c) {
                    for (int ky = 0; ky < 3; ++ky) {
                        for (int kx = 0; kx < 3; ++kx) {
                            const int sy = y + ky - 1, sx = x + kx - 1;
                            if (sy < 0 || sy >= height || sx < 0 || sx >= width) continue;
                            acc += layer.weight(o, (c * 3 + ky) * 3 + kx) * input(c, sy * width + sx);
                        }
                    }
                }
                out(o, y * width + x) = acc;
            }
        }
    }
    return out;
}

FeatureMap mirror_input(const DepthImage& splat) {
    FeatureMap in(2, static_cast<Eigen::Index>(splat.size()));
    for (std::size_t i = 0; i < splat.size(); ++i) {
        const double d = splat.data()[i];
        const bool valid = d > 0.0;
        in(0, static_cast<Eigen::Index>(i)) = valid ? d : 0.0;
        in(1, static_cast<Eigen::Index>(i)) = valid ? 1.0 : 0.0;
    }
    return in;
}

Eigen::RowVectorXd mirror_forward(const MirrorModelParams& params, const FeatureMap& input,
                                  int height, int width, MirrorCache* cache) {
    if (params.layers.empty()) throw InvalidInput("mirror network has no layers");
    if (cache) {
        cache->height = height;
        cache->width = width;
        cache->columns.clear();
        cache->pre.clear();
    }
    FeatureMap x = input;
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        const auto& layer = params.layers[k];
        check_map(layer, x, height, width);
        Eigen::MatrixXd cols = im2col(x, height, width);
        FeatureMap pre = layer.weight * cols;
        pre.colwise() += layer.bias;
        const bool last = k + 1 == params.layers.size();
        x = last ? pre : FeatureMap(pre.cwiseMax(0.0));
        if (cache) {
            cache->columns.push_back(std::move(cols));
            cache->pre.push_back(std::move(pre));
        }
    }
    return x.row(0);
}

void mirror_backward(const MirrorModelParams& params, const MirrorCache& cache,
                     const Eigen::RowVectorXd& upstream, MirrorModelParams& grad) {
    if (cache.columns.size() != params.layers.size()) throw InvalidInput("mirror cache does not match");
    Eigen::MatrixXd delta = upstream;
    for (std::size_t k = params.layers.size(); k-- > 0;) {
        const auto& layer = params.layers[k];
        grad.layers[k].weight.noalias() += delta * cache.columns[k].transpose();
        grad.layers[k].bias += delta.rowwise().sum();
        if (k == 0) break;
        const Eigen::MatrixXd dcols = layer.weight.transpose() * delta;
        FeatureMap dx = col2im(dcols, layer.in_channels, cache.height, cache.width);
        delta = (dx.array() * (cache.pre[k - 1].array() > 0.0).cast<double>()).matrix();
    }
}

// --- data ------------------------------------------------------------------------

MirrorPair make_mirror_pair(const TriangleBvh& bvh, const CameraModel& cam, const Point3& object_center) {
    MirrorPair pair;
    pair.front = render_depth(bvh, cam);
    const auto vcam = mirror_pose(cam, object_center);
    pair.splat = splat_cloud(back_project(pair.front, cam), vcam);
    pair.target = render_depth(bvh, vcam);
    return pair;
}

MaskedL1 masked_l1(const Eigen::RowVectorXd& output, const DepthImage& target) {
    if (static_cast<std::size_t>(output.size()) != target.size()) {
        throw InvalidInput("prediction and target sizes differ");
    }
    MaskedL1 r;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double t = target.data()[i];
        if (!(t > 0.0)) continue;
        r.sum += std::abs(output(static_cast<Eigen::Index>(i)) - t);
        ++r.count;
    }
    return r;
}

namespace {

void check_pair(const MirrorPair& pair) {
    if (pair.splat.width() != pair.target.width() || pair.splat.height() != pair.target.height() ||
        pair.splat.size() == 0) {
        throw InvalidInput("mirror pair images disagree in size");
    }
}

struct ImageGrad {
    MirrorModelParams grad;
    MaskedL1 loss;
};

// Unnormalized sign gradient of the masked L1 for one pair.
void image_gradient(const MirrorModelParams& params, const MirrorPair& pair, ImageGrad& out) {
    const int h = pair.target.height(), w = pair.target.width();
    MirrorCache cache;
    const auto pred = mirror_forward(params, mirror_input(pair.splat), h, w, &cache);
    out.loss = masked_l1(pred, pair.target);
    Eigen::RowVectorXd upstream = Eigen::RowVectorXd::Zero(pred.size());
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        const double t = pair.target.data()[static_cast<std::size_t>(i)];
        if (!(t > 0.0)) continue;
        const double diff = pred(i) - t;
        upstream(i) = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    }
    out.grad = MirrorModelParams::zeros(params.channels());
    mirror_backward(params, cache, upstream, out.grad);
}

}  // namespace

double mirror_loss(const MirrorModelParams& params, const std::vector<MirrorPair>& pairs) {
    MaskedL1 total;
    for (const auto& pair : pairs) {
        check_pair(pair);
        const auto pred =
            mirror_forward(params, mirror_input(pair.splat), pair.target.height(), pair.target.width());
        const auto r = masked_l1(pred, pair.target);
        total.sum += r.sum;
        total.count += r.count;
    }
    return total.mean();
}

namespace {

// Sums the per-image gradients in image order; returns the total valid count.
std::size_t accumulate_gradients(const MirrorModelParams& params, const std::vector<MirrorPair>& pairs,
                                 std::span<const std::size_t> indices, int threads,
                                 MirrorModelParams& total, MaskedL1& loss) {
    std::vector<ImageGrad> grads(indices.size());
    parallel_for(indices.size(), threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t j = b0; j < b1; ++j) image_gradient(params, pairs[indices[j]], grads[j]);
    });
    total = MirrorModelParams::zeros(params.channels());
    std::size_t valid = 0;
    for (const auto& g : grads) {
        for (std::size_t k = 0; k < total.layers.size(); ++k) {
            total.layers[k].weight += g.grad.layers[k].weight;
            total.layers[k].bias += g.grad.layers[k].bias;
        }
        loss.sum += g.loss.sum;
        loss.count += g.loss.count;
        valid += g.loss.count;
    }
    if (valid > 0) {
        const double scale = 1.0 / static_cast<double>(valid);
        for (auto& l : total.layers) {
            l.weight *= scale;
            l.bias *= scale;
        }
    }
    return valid;
}

}  // namespace

MirrorLossGradient mirror_loss_gradient(const MirrorModelParams& params, const std::vector<MirrorPair>& pairs,
                                        int threads) {
    params.validate();
    for (const auto& p : pairs) check_pair(p);
    std::vector<std::size_t> all(pairs.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    MirrorLossGradient out;
    MaskedL1 loss;
    accumulate_gradients(params, pairs, all, threads, out.grad, loss);
    out.loss = loss.mean();
    return out;
}

MirrorTrainResult train_mirror_model(const std::vector<MirrorPair>& pairs, const TrainConfig& cfg) {
    return train_mirror_model(pairs, cfg, MirrorModelParams::random(cfg.seed));
}

MirrorTrainResult train_mirror_model(const std::vector<MirrorPair>& pairs, const TrainConfig& cfg,
                                     MirrorModelParams params) {
    cfg.validate();
    params.validate();
    if (pairs.empty()) throw InvalidInput("train_mirror_model: empty dataset");
    for (const auto& p : pairs) check_pair(p);

    std::vector<std::size_t> sizes;
    for (auto t : params.tensors()) sizes.push_back(t.size());
    Optimizer opt(cfg.optimizer, cfg.learning_rate, sizes, cfg.momentum);
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(cfg.seed ^ 0x3141592653589793ULL);
    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);

    MirrorTrainResult result;
    MirrorModelParams total;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        MaskedL1 epoch_loss;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t n = std::min(batch, order.size() - start);
            const std::span<const std::size_t> indices(order.data() + start, n);
            if (accumulate_gradients(params, pairs, indices, cfg.threads, total, epoch_loss) == 0) continue;
            opt.step(params.tensors(), std::as_const(total).tensors());
        }
        result.epoch_losses.push_back(epoch_loss.mean());
    }
    result.params = std::move(params);
    return result;
}

// --- inference -----------------------------------------------------------------

namespace {

struct RawPrediction {
    DepthImage raw;
    DepthImage splat;
};

RawPrediction predict(const MirrorModelParams& params, const DepthImage& observed,
                      const CameraModel& cam, const CameraModel& virtual_cam) {
    if (!observed.matches(cam)) throw InvalidInput("observed depth does not match its camera");
    virtual_cam.validate();
    RawPrediction out;
    out.splat = splat_cloud(back_project(observed, cam), virtual_cam);
    const auto pred = mirror_forward(params, mirror_input(out.splat), virtual_cam.height, virtual_cam.width);
    out.raw = DepthImage::for_camera(virtual_cam);
    for (std::size_t i = 0; i < out.raw.size(); ++i) out.raw.data()[i] = pred(static_cast<Eigen::Index>(i));
    return out;
}

}  // namespace

DepthImage mirror_predict_raw(const MirrorModelParams& params, const DepthImage& observed,
                              const CameraModel& cam, const CameraModel& virtual_cam) {
    return predict(params, observed, cam, virtual_cam).raw;
}

std::vector<bool> close_mask(const std::vector<bool>& mask, int width, int height) {
    auto at = [&](const std::vector<bool>& m, int u, int v, bool outside) {
        if (u < 0 || v < 0 || u >= width || v >= height) return outside;
        return static_cast<bool>(m[static_cast<std::size_t>(v) * width + u]);
    };
    std::vector<bool> dilated(mask.size()), closed(mask.size());
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            bool any = false;
            for (int dv = -1; dv <= 1 && !any; ++dv)
                for (int du = -1; du <= 1 && !any; ++du) any = at(mask, u + du, v + dv, false);
            dilated[static_cast<std::size_t>(v) * width + u] = any;
        }
    }
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            bool all = true;
            for (int dv = -1; dv <= 1 && all; ++dv)
                for (int du = -1; du <= 1 && all; ++du) all = at(dilated, u + du, v + dv, true);
            closed[static_cast<std::size_t>(v) * width + u] = all;
        }
    }
    return closed;
}

DepthImage complete_view_learned(const MirrorModelParams& params, const DepthImage& observed,
                                 const CameraModel& cam, const CameraModel& virtual_cam) {
    auto pred = predict(params, observed, cam, virtual_cam);
    std::vector<bool> mask(pred.splat.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = pred.splat.data()[i] > 0.0;
    const auto support = close_mask(mask, virtual_cam.width, virtual_cam.height);
    for (std::size_t i = 0; i < pred.raw.size(); ++i) {
        double& d = pred.raw.data()[i];
        if (!(d > 0.0) || !support[i]) d = 0.0;
    }
    return pred.raw;
}

double masked_mean_abs_error(const DepthImage& raw, const DepthImage& target) {
    if (raw.size() != target.size()) throw InvalidInput("prediction and target sizes differ");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (!(target.data()[i] > 0.0)) continue;
        sum += std::abs(raw.data()[i] - target.data()[i]);
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

// --- pipeline -----------------------------------------------------------------

CompletionFn oracle_completion(std::shared_ptr<const TriangleBvh> bvh) {
    return [bvh](const DepthImage&, const CameraModel&, const CameraModel& virtual_cam) {
        return render_depth(*bvh, virtual_cam);
    };
}

CompletionFn learned_completion(std::shared_ptr<const MirrorModelParams> params, int resolution) {
    if (resolution < 0) throw InvalidInput("learned_completion: negative resolution");
    return [params, resolution](const DepthImage& observed, const CameraModel& cam,
                                const CameraModel& virtual_cam) {
        if (resolution == 0 || resolution == cam.width) {
            return complete_view_learned(*params, observed, cam, virtual_cam);
        }
        if (!observed.matches(cam)) throw InvalidInput("observed depth does not match its camera");
        const int height = std::max(1, static_cast<int>(std::lround(
                                           static_cast<double>(resolution) * cam.height / cam.width)));
        const auto small = cam.resized(resolution, height);
        const auto resampled = splat_cloud(back_project(observed, cam), small);
        return complete_view_learned(*params, resampled, small, virtual_cam.resized(resolution, height));
    };
}

TimedCloud reconstruct_view_dependent(const DepthImage& observed, const CameraModel& cam,
                                      const CompletionFn& completion, const Point3& object_center) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto virtual_cam = mirror_pose(cam, object_center);
    const auto completed = completion(observed, cam, virtual_cam);
    TimedCloud out;
    out.cloud = back_project(observed, cam, PointSource::observed);
    const auto completed_cam = completed.matches(virtual_cam)
                                   ? virtual_cam
                                   : virtual_cam.resized(completed.width(), completed.height());
    out.cloud.append(back_project(completed, completed_cam, PointSource::generated));
    out.milliseconds =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

// --- persistence ---------------------------------------------------------------

void save_mirror_model(const std::filesystem::path& path, const MirrorModelParams& params) {
    params.validate();
    TensorArchive archive;
    archive.magic = kModelMagic;
    std::ostringstream channels;
    const auto c = params.channels();
    for (std::size_t i = 0; i < c.size(); ++i) channels << (i ? "," : "") << c[i];
    archive.meta["channels"] = channels.str();
    archive.meta["kernel"] = "3";
    archive.meta["activation"] = "relu";
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        const auto& l = params.layers[k];
        Tensor w{"conv" + std::to_string(k) + ".weight",
                 {static_cast<std::size_t>(l.out_channels), static_cast<std::size_t>(l.in_channels), 3, 3},
                 {}};
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
            for (Eigen::Index col = 0; col < l.weight.cols(); ++col) w.values.push_back(l.weight(r, col));
        Tensor b{"conv" + std::to_string(k) + ".bias", {static_cast<std::size_t>(l.out_channels)},
                 std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())};
        archive.tensors.push_back(std::move(w));
        archive.tensors.push_back(std::move(b));
    }
    write_tensor_archive(path, archive);
}

MirrorModelParams load_mirror_model(const std::filesystem::path& path) {
    const auto archive = read_tensor_archive(path, kModelMagic);
    const auto it = archive.meta.find("channels");
    if (it == archive.meta.end()) throw InvalidInput("mirror archive lacks 'channels'");
    std::vector<int> channels;
    std::istringstream list(it->second);
    for (std::string c; std::getline(list, c, ',');) channels.push_back(std::stoi(c));
    auto params = MirrorModelParams::zeros(channels);
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        auto& l = params.layers[k];
        const auto& w = archive.get("conv" + std::to_string(k) + ".weight");
        const auto& b = archive.get("conv" + std::to_string(k) + ".bias");
        if (w.values.size() != static_cast<std::size_t>(l.weight.size()) ||
            b.values.size() != static_cast<std::size_t>(l.bias.size())) {
            throw InvalidInput("mirror archive tensor sizes do not match 'channels'");
        }
        std::size_t i = 0;
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
            for (Eigen::Index col = 0; col < l.weight.cols(); ++col) l.weight(r, col) = w.values[i++];
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = b.values[static_cast<std::size_t>(r)];
    }
    params.validate();
    return params;
}

void write_mirror_pairs(const std::filesystem::path& dir, const std::vector<MirrorPair>& pairs) {
    std::filesystem::create_directories(dir);
    note_file_access();
    std::ofstream manifest(dir / "manifest.txt");
    if (!manifest) throw IoError("cannot write " + (dir / "manifest.txt").string());
    manifest << kPairsMagic << "\npairs " << pairs.size() << '\n';
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        std::ostringstream id;
        id << std::setw(5) << std::setfill('0') << i;
        const std::string front = "front_" + id.str() + ".pfm";
        const std::string splat = "splat_" + id.str() + ".pfm";
        const std::string target = "target_" + id.str() + ".pfm";
        write_pfm(dir / front, pairs[i].front);
        write_pfm(dir / splat, pairs[i].splat);
        write_pfm(dir / target, pairs[i].target);
        manifest << "pair " << front << ' ' << splat << ' ' << target << '\n';
    }
    if (!manifest) throw IoError("write failed: " + (dir / "manifest.txt").string());
}

std::vector<MirrorPair> read_mirror_pairs(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.txt";
    if (!std::filesystem::exists(manifest_path)) throw MissingArtifact(manifest_path.string());
    note_file_access();
    std::ifstream manifest(manifest_path);
    std::string line;
    if (!std::getline(manifest, line) || line != kPairsMagic) {
        throw InvalidInput("not a mirror pair manifest: " + manifest_path.string());
    }
    std::vector<MirrorPair> pairs;
    while (std::getline(manifest, line)) {
        std::istringstream fields(line);
        std::string kind;
        fields >> kind;
        if (kind != "pair") continue;
        std::string front, splat, target;
        if (!(fields >> front >> splat >> target)) throw InvalidInput("malformed manifest line: " + line);
        pairs.push_back({read_pfm(dir / front), read_pfm(dir / splat), read_pfm(dir / target)});
    }
    return pairs;
}

}  // namespace recbench
