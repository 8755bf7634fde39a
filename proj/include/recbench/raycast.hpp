#pragma once

#include "recbench/geometry.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace recbench {

struct RayHit {
    double t = 0.0;             ///< ray parameter; the hit is origin + t * dir
    std::uint32_t triangle = 0;
    bool grazing = false;       ///< hit within tolerance of an edge or vertex
};

/// Barycentric ray/triangle test (Möller–Trumbore). Rays closer to parallel
/// than `1e-12` in the determinant are rejected. Hits at t <= t_min are ignored.
std::optional<RayHit> intersect_triangle(const Point3& origin, const Vec3& dir, const Point3& a,
                                         const Point3& b, const Point3& c, double t_min = 0.0);

/// Closest point of triangle abc to p.
Point3 closest_point_on_triangle(const Point3& p, const Point3& a, const Point3& b,
                                 const Point3& c);

/// Reference queries: every triangle is tested.
std::optional<RayHit> closest_hit_brute(const TriangleMesh& mesh, const Point3& origin,
                                        const Vec3& dir);
double unsigned_distance_brute(const TriangleMesh& mesh, const Point3& p);

/// Axis-aligned bounding-box hierarchy over the triangles of a mesh.
/// Query results match the brute-force versions exactly: both evaluate the
/// same per-triangle kernels and keep the minimum.
class TriangleBvh {
public:
    TriangleBvh() = default;
    explicit TriangleBvh(const TriangleMesh& mesh);

    const TriangleMesh& mesh() const noexcept { return mesh_; }
    bool empty() const noexcept { return mesh_.triangles.empty(); }

    std::optional<RayHit> closest_hit(const Point3& origin, const Vec3& dir) const;

    /// Calls `visit` for every triangle hit with t > 0, in no particular order.
    void for_each_hit(const Point3& origin, const Vec3& dir,
                      const std::function<void(const RayHit&)>& visit) const;

    /// Minimum point-to-triangle distance. Requires a non-empty mesh.
    double unsigned_distance(const Point3& p) const;

private:
    struct Node {
        Aabb box;
        std::uint32_t first = 0;  ///< leaf: first entry in order_; inner: left child
        std::uint32_t count = 0;  ///< leaf triangle count; 0 marks an inner node
        std::uint32_t right = 0;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end,
                        const std::vector<Point3>& centroids);

    TriangleMesh mesh_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
};

}  // namespace recbench
