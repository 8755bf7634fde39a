#pragma once

#include "recbench/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace recbench {

struct NearestResult {
    Point3 point = Point3::Zero();
    double distance = 0.0;
    std::size_t index = 0;
};

/// Static 3D k-d tree. Nodes split at the median of the widest axis of their
/// points. Nearest-neighbour queries are exact; ties go to the lowest point index.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(std::span<const Point3> points);

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }

    /// Throws InvalidInput on an empty tree.
    NearestResult nearest(const Point3& query) const;

private:
    struct Node {
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        int axis = 0;
        double split = 0.0;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::int32_t node, const Point3& q, double& best_sq, std::uint32_t& best) const;

    std::vector<Point3> points_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

/// Exhaustive reference for KdTree::nearest.
NearestResult nearest_brute_force(std::span<const Point3> points, const Point3& query);

/// Nearest-neighbour distance from every point of `from` to the set `to`.
std::vector<double> directed_distances(const PointCloud& from, const PointCloud& to,
                                       int threads = 1);

/// Mean of the two directed mean nearest-neighbour distances (unsquared,
/// meters). Throws InvalidInput if either cloud is empty.
double chamfer(const PointCloud& a, const PointCloud& b, int threads = 1);

/// Larger of the two directed maximum nearest-neighbour distances. Throws
/// InvalidInput if either cloud is empty.
double hausdorff(const PointCloud& a, const PointCloud& b, int threads = 1);

struct CloudDistances {
    double chamfer = 0.0;
    double hausdorff = 0.0;
};

/// Both metrics from one pair of nearest-neighbour passes.
CloudDistances cloud_distances(const PointCloud& a, const PointCloud& b, int threads = 1);

struct VoxelFilterConfig {
    double voxel_size = 0.05;
    std::size_t min_points_per_voxel = 3;

    void validate() const;
};

/// Integer cell of a point on the origin-anchored grid.
struct VoxelKey {
    std::int64_t x = 0, y = 0, z = 0;
    bool operator==(const VoxelKey&) const = default;
};
VoxelKey voxel_of(const Point3& p, double voxel_size);

/// Drops points whose voxel holds fewer than min_points_per_voxel points.
/// Survivors keep their order and tags.
PointCloud voxel_filter(const PointCloud& cloud, const VoxelFilterConfig& cfg);

/// One centroid per occupied voxel, in order of first occupancy. The output
/// point takes the tag of the voxel's first point.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

/// Labeled outlier-injection experiment: a densely sampled sphere plus sparse
/// points in the slab between its front surface and a camera on +z.
struct InjectionSetup {
    double sphere_radius = 0.2;
    std::size_t surface_points = 10000;
    std::size_t sparse_points = 200;
    double camera_distance = 2.0;
    /// Half width of the slab in x and y.
    double slab_half_width = 0.5;
    /// Sparse points start this far in front of the sphere.
    double surface_margin = 0.1;
    VoxelFilterConfig filter{};
};

struct InjectionResult {
    double sparse_removed = 0.0;   // fraction
    double surface_kept = 0.0;     // fraction
};

InjectionResult run_outlier_injection(const InjectionSetup& setup, std::uint64_t seed);

}  // namespace recbench
