#include "recbench/metrics.hpp"

#include "recbench/errors.hpp"
#include "recbench/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

namespace recbench {

namespace {

constexpr std::uint32_t kLeafSize = 8;

struct VoxelKeyHash {
    std::size_t operator()(const VoxelKey& k) const noexcept {
        auto mix = [](std::uint64_t h, std::int64_t v) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return h;
        };
        return static_cast<std::size_t>(mix(mix(mix(0, k.x), k.y), k.z));
    }
};

bool closer(double d_sq, std::uint32_t idx, double best_sq, std::uint32_t best) {
    return d_sq < best_sq || (d_sq == best_sq && idx < best);
}

}  // namespace

KdTree::KdTree(std::span<const Point3> points) : points_(points.begin(), points.end()) {
    order_.resize(points_.size());
    for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    if (!points_.empty()) build(0, static_cast<std::uint32_t>(points_.size()));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({begin, end, -1, -1, 0, 0.0});
    if (end - begin <= kLeafSize) return index;

    Aabb box;
    for (std::uint32_t i = begin; i < end; ++i) box.extend(points_[order_[i]]);
    int axis = 0;
    box.extent().maxCoeff(&axis);
    if (!(box.extent()[axis] > 0.0)) return index;  // all points coincide

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double pa = points_[a][axis], pb = points_[b][axis];
                         return pa < pb || (pa == pb && a < b);
                     });
    nodes_[index].axis = axis;
    nodes_[index].split = points_[order_[mid]][axis];
    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

void KdTree::search(std::int32_t node_index, const Point3& q, double& best_sq,
                    std::uint32_t& best) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_index)];
    if (node.left < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const std::uint32_t idx = order_[i];
            const double d_sq = (points_[idx] - q).squaredNorm();
            if (closer(d_sq, idx, best_sq, best)) {
                best_sq = d_sq;
                best = idx;
            }
        }
        return;
    }
    // Left holds coordinates <= split, right holds coordinates >= split.
    const double diff = q[node.axis] - node.split;
    const auto near = diff < 0.0 ? node.left : node.right;
    const auto far = diff < 0.0 ? node.right : node.left;
    search(near, q, best_sq, best);
    // Equality keeps the far side alive so an equidistant lower index can win.
    if (diff * diff <= best_sq) search(far, q, best_sq, best);
}

NearestResult KdTree::nearest(const Point3& query) const {
    if (points_.empty()) throw InvalidInput("nearest: empty tree");
    double best_sq = std::numeric_limits<double>::infinity();
    std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
    search(0, query, best_sq, best);
    return {points_[best], std::sqrt(best_sq), best};
}

NearestResult nearest_brute_force(std::span<const Point3> points, const Point3& query) {
    if (points.empty()) throw InvalidInput("nearest: empty point set");
    double best_sq = std::numeric_limits<double>::infinity();
    std::uint32_t best = 0;
    for (std::uint32_t i = 0; i < points.size(); ++i) {
        const double d_sq = (points[i] - query).squaredNorm();
        if (d_sq < best_sq) {
            best_sq = d_sq;
            best = i;
        }
    }
    return {points[best], std::sqrt(best_sq), best};
}

// ---------------------------------------------------------------------------

std::vector<double> directed_distances(const PointCloud& from, const PointCloud& to,
                                       int threads) {
    if (from.empty() || to.empty()) throw InvalidInput("distance between empty clouds");
    const KdTree tree(to.points());
    std::vector<double> dist(from.size());
    parallel_for(from.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) dist[i] = tree.nearest(from[i]).distance;
    });
    return dist;
}

namespace {

double mean(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

CloudDistances cloud_distances(const PointCloud& a, const PointCloud& b, int threads) {
    const auto ab = directed_distances(a, b, threads);
    const auto ba = directed_distances(b, a, threads);
    return {0.5 * (mean(ab) + mean(ba)), std::max(max_of(ab), max_of(ba))};
}

double chamfer(const PointCloud& a, const PointCloud& b, int threads) {
    return cloud_distances(a, b, threads).chamfer;
}

double hausdorff(const PointCloud& a, const PointCloud& b, int threads) {
    return cloud_distances(a, b, threads).hausdorff;
}

// ---------------------------------------------------------------------------

void VoxelFilterConfig::validate() const {
    if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
        throw InvalidInput("voxel_size must be positive");
    }
    if (min_points_per_voxel == 0) throw InvalidInput("min_points_per_voxel must be positive");
}

VoxelKey voxel_of(const Point3& p, double voxel_size) {
    return {static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
            static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
            static_cast<std::int64_t>(std::floor(p.z() / voxel_size))};
}

PointCloud voxel_filter(const PointCloud& cloud, const VoxelFilterConfig& cfg) {
    cfg.validate();
    std::vector<VoxelKey> keys;
    keys.reserve(cloud.size());
    std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> counts;
    for (const auto& p : cloud.points()) {
        keys.push_back(voxel_of(p, cfg.voxel_size));
        ++counts[keys.back()];
    }
    PointCloud out;
    out.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (counts[keys[i]] >= cfg.min_points_per_voxel) out.add(cloud[i], cloud.source(i));
    }
    return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
    if (!(voxel_size > 0.0)) throw InvalidInput("voxel_size must be positive");
    struct Accum {
        Vec3 sum = Vec3::Zero();
        std::size_t count = 0;
        PointSource source = PointSource::observed;
    };
    std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> slot;
    std::vector<Accum> cells;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto key = voxel_of(cloud[i], voxel_size);
        auto [it, inserted] = slot.try_emplace(key, cells.size());
        if (inserted) cells.push_back({Vec3::Zero(), 0, cloud.source(i)});
        auto& cell = cells[it->second];
        cell.sum += cloud[i];
        ++cell.count;
    }
    PointCloud out;
    out.reserve(cells.size());
    for (const auto& cell : cells) out.add(cell.sum / static_cast<double>(cell.count), cell.source);
    return out;
}

InjectionResult run_outlier_injection(const InjectionSetup& setup, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    PointCloud cloud;
    cloud.reserve(setup.surface_points + setup.sparse_points);
    for (std::size_t i = 0; i < setup.surface_points; ++i) {
        Vec3 d(gauss(rng), gauss(rng), gauss(rng));
        cloud.add(setup.sphere_radius * d.normalized(), PointSource::observed);
    }
    std::uniform_real_distribution<double> lateral(-setup.slab_half_width, setup.slab_half_width);
    std::uniform_real_distribution<double> depth(setup.sphere_radius + setup.surface_margin,
                                                 setup.camera_distance);
    for (std::size_t i = 0; i < setup.sparse_points; ++i) {
        const double x = lateral(rng), y = lateral(rng);
        cloud.add(Point3(x, y, depth(rng)), PointSource::generated);
    }

    const auto kept = voxel_filter(cloud, setup.filter);
    const auto kept_surface = static_cast<double>(kept.count(PointSource::observed));
    const auto kept_sparse = static_cast<double>(kept.count(PointSource::generated));
    InjectionResult result;
    result.surface_kept = kept_surface / static_cast<double>(setup.surface_points);
    result.sparse_removed =
        setup.sparse_points == 0 ? 1.0 : 1.0 - kept_sparse / static_cast<double>(setup.sparse_points);
    return result;
}

}  // namespace recbench
