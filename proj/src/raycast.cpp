#include "recbench/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace recbench {

namespace {

constexpr double kParallelEps = 1e-12;
constexpr double kGrazeEps = 1e-9;
constexpr std::uint32_t kLeafSize = 4;

bool ray_hits_box(const Aabb& box, const Point3& origin, const Vec3& inv_dir, double t_max) {
    double t0 = 0.0;
    double t1 = t_max;
    for (int axis = 0; axis < 3; ++axis) {
        double near = (box.lo[axis] - origin[axis]) * inv_dir[axis];
        double far = (box.hi[axis] - origin[axis]) * inv_dir[axis];
        if (near > far) std::swap(near, far);
        // A NaN arises only for a zero direction component with the origin on
        // the slab boundary; keep the box in that case.
        if (std::isnan(near) || std::isnan(far)) continue;
        t0 = std::max(t0, near);
        t1 = std::min(t1, far);
        if (t0 > t1) return false;
    }
    return true;
}

double box_distance_sq(const Aabb& box, const Point3& p) {
    const Vec3 d = (box.lo - p).cwiseMax(p - box.hi).cwiseMax(Vec3::Zero());
    return d.squaredNorm();
}

}  // namespace

std::optional<RayHit> intersect_triangle(const Point3& origin, const Vec3& dir, const Point3& a,
                                         const Point3& b, const Point3& c, double t_min) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 pvec = dir.cross(e2);
    const double det = e1.dot(pvec);
    if (std::abs(det) < kParallelEps) return std::nullopt;

    const double inv_det = 1.0 / det;
    const Vec3 tvec = origin - a;
    const double u = tvec.dot(pvec) * inv_det;
    if (u < -kGrazeEps || u > 1.0 + kGrazeEps) return std::nullopt;
    const Vec3 qvec = tvec.cross(e1);
    const double v = dir.dot(qvec) * inv_det;
    if (v < -kGrazeEps || u + v > 1.0 + kGrazeEps) return std::nullopt;

    const double t = e2.dot(qvec) * inv_det;
    if (!(t > t_min)) return std::nullopt;

    RayHit hit;
    hit.t = t;
    hit.grazing = u < kGrazeEps || v < kGrazeEps || u + v > 1.0 - kGrazeEps;
    return hit;
}

// Ericson, Real-Time Collision Detection, 5.1.5.
Point3 closest_point_on_triangle(const Point3& p, const Point3& a, const Point3& b,
                                 const Point3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    }

    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

std::optional<RayHit> closest_hit_brute(const TriangleMesh& mesh, const Point3& origin,
                                        const Vec3& dir) {
    std::optional<RayHit> best;
    for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        auto hit = intersect_triangle(origin, dir, mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                      mesh.vertices[tri[2]]);
        if (hit && (!best || hit->t < best->t)) {
            hit->triangle = t;
            best = hit;
        }
    }
    return best;
}

double unsigned_distance_brute(const TriangleMesh& mesh, const Point3& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& tri : mesh.triangles) {
        const Point3 q = closest_point_on_triangle(p, mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                                   mesh.vertices[tri[2]]);
        best = std::min(best, (q - p).squaredNorm());
    }
    return std::sqrt(best);
}

// ---------------------------------------------------------------------------

TriangleBvh::TriangleBvh(const TriangleMesh& mesh) : mesh_(mesh) {
    const auto n = static_cast<std::uint32_t>(mesh_.triangles.size());
    if (n == 0) return;
    std::vector<Point3> centroids(n);
    for (std::uint32_t t = 0; t < n; ++t) {
        const auto& tri = mesh_.triangles[t];
        centroids[t] = (mesh_.vertices[tri[0]] + mesh_.vertices[tri[1]] + mesh_.vertices[tri[2]]) / 3.0;
    }
    order_.resize(n);
    for (std::uint32_t t = 0; t < n; ++t) order_[t] = t;
    nodes_.reserve(2 * n / kLeafSize + 1);
    build(0, n, centroids);
}

std::uint32_t TriangleBvh::build(std::uint32_t begin, std::uint32_t end,
                                 const std::vector<Point3>& centroids) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();

    Aabb box, centroid_box;
    for (std::uint32_t i = begin; i < end; ++i) {
        const auto& tri = mesh_.triangles[order_[i]];
        for (auto v : tri) box.extend(mesh_.vertices[v]);
        centroid_box.extend(centroids[order_[i]]);
    }
    // Pad so rounding in the slab test never culls a triangle the exact
    // kernel would report.
    const double pad = 1e-9 * (1.0 + box.extent().cwiseAbs().maxCoeff());
    box.lo.array() -= pad;
    box.hi.array() += pad;
    nodes_[index].box = box;

    if (end - begin <= kLeafSize) {
        nodes_[index].first = begin;
        nodes_[index].count = end - begin;
        return index;
    }

    int axis = 0;
    centroid_box.extent().maxCoeff(&axis);
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         if (centroids[a][axis] != centroids[b][axis]) {
                             return centroids[a][axis] < centroids[b][axis];
                         }
                         return a < b;
                     });
    const std::uint32_t left = build(begin, mid, centroids);
    const std::uint32_t right = build(mid, end, centroids);
    nodes_[index].first = left;
    nodes_[index].right = right;
    nodes_[index].count = 0;
    return index;
}

std::optional<RayHit> TriangleBvh::closest_hit(const Point3& origin, const Vec3& dir) const {
    std::optional<RayHit> best;
    if (nodes_.empty()) return best;
    const Vec3 inv_dir = dir.cwiseInverse();
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        const double t_max = best ? best->t : std::numeric_limits<double>::infinity();
        if (!ray_hits_box(node.box, origin, inv_dir, t_max)) continue;
        if (node.count == 0) {
            stack.push_back(node.right);
            stack.push_back(node.first);
            continue;
        }
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
            const auto t = order_[i];
            const auto& tri = mesh_.triangles[t];
            auto hit = intersect_triangle(origin, dir, mesh_.vertices[tri[0]],
                                          mesh_.vertices[tri[1]], mesh_.vertices[tri[2]]);
            if (hit && (!best || hit->t < best->t || (hit->t == best->t && t < best->triangle))) {
                hit->triangle = t;
                best = hit;
            }
        }
    }
    return best;
}

void TriangleBvh::for_each_hit(const Point3& origin, const Vec3& dir,
                               const std::function<void(const RayHit&)>& visit) const {
    if (nodes_.empty()) return;
    const Vec3 inv_dir = dir.cwiseInverse();
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (!ray_hits_box(node.box, origin, inv_dir, std::numeric_limits<double>::infinity())) {
            continue;
        }
        if (node.count == 0) {
            stack.push_back(node.right);
            stack.push_back(node.first);
            continue;
        }
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
            const auto t = order_[i];
            const auto& tri = mesh_.triangles[t];
            auto hit = intersect_triangle(origin, dir, mesh_.vertices[tri[0]],
                                          mesh_.vertices[tri[1]], mesh_.vertices[tri[2]]);
            if (hit) {
                hit->triangle = t;
                visit(*hit);
            }
        }
    }
}

double TriangleBvh::unsigned_distance(const Point3& p) const {
    double best = std::numeric_limits<double>::infinity();
    if (nodes_.empty()) return best;
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (box_distance_sq(node.box, p) > best) continue;
        if (node.count == 0) {
            const double dl = box_distance_sq(nodes_[node.first].box, p);
            const double dr = box_distance_sq(nodes_[node.right].box, p);
            // Nearer child on top of the stack.
            if (dl < dr) {
                stack.push_back(node.right);
                stack.push_back(node.first);
            } else {
                stack.push_back(node.first);
                stack.push_back(node.right);
            }
            continue;
        }
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
            const auto& tri = mesh_.triangles[order_[i]];
            const Point3 q = closest_point_on_triangle(p, mesh_.vertices[tri[0]],
                                                       mesh_.vertices[tri[1]],
                                                       mesh_.vertices[tri[2]]);
            best = std::min(best, (q - p).squaredNorm());
        }
    }
    return std::sqrt(best);
}

}  // namespace recbench
