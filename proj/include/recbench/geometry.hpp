#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace recbench {

/// A point in meters. Double precision throughout the geometry layer.
using Point3 = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// True when all three coordinates are finite.
bool is_finite(const Point3& p) noexcept;

enum class PointSource : std::uint8_t {
    observed = 0,
    generated = 1,
};

/// Ordered points, each tagged with where it came from.
class PointCloud {
public:
    PointCloud() = default;
    /// All points tagged `observed`.
    explicit PointCloud(std::vector<Point3> points);
    PointCloud(std::vector<Point3> points, std::vector<PointSource> sources);

    void add(const Point3& p, PointSource source = PointSource::observed);
    void append(const PointCloud& other);
    void reserve(std::size_t n);

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }

    const Point3& operator[](std::size_t i) const { return points_[i]; }
    PointSource source(std::size_t i) const { return sources_[i]; }
    std::span<const Point3> points() const noexcept { return points_; }
    std::span<const PointSource> sources() const noexcept { return sources_; }

    std::size_t count(PointSource source) const noexcept;

private:
    std::vector<Point3> points_;
    std::vector<PointSource> sources_;
};

using Triangle = std::array<std::uint32_t, 3>;

struct Aabb {
    Point3 lo = Point3::Constant(std::numeric_limits<double>::infinity());
    Point3 hi = Point3::Constant(-std::numeric_limits<double>::infinity());

    void extend(const Point3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void extend(const Aabb& b) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    bool valid() const { return (lo.array() <= hi.array()).all(); }
    Point3 center() const { return 0.5 * (lo + hi); }
    Vec3 extent() const { return hi - lo; }
};

/// Indexed triangle soup. Construction does not validate; call validate()
/// at trust boundaries (file loading, procedural generation tests).
struct TriangleMesh {
    std::vector<Point3> vertices;
    std::vector<Triangle> triangles;

    bool empty() const noexcept { return triangles.empty(); }

    /// Throws InvalidInput on out-of-range indices, non-finite vertices, or
    /// triangles with area <= min_area.
    void validate(double min_area = 1e-12) const;

    /// Every undirected edge is shared by exactly two triangles. Winding is not
    /// inspected; signs come from ray parity. Empty meshes are not watertight.
    bool is_watertight() const;

    Aabb bounds() const;
    double triangle_area(std::size_t t) const;
    double surface_area() const;

    /// Appends `other`, offsetting its indices.
    void merge(const TriangleMesh& other);
};

struct Normalization {
    TriangleMesh mesh;
    double scale = 1.0;
    Point3 center = Point3::Zero();

    /// Maps a point of the normalized frame back to the input frame.
    Point3 to_original(const Point3& p) const { return p / scale + center; }
};

/// Area-weighted uniform samples on the mesh surface, all tagged `observed`.
/// Deterministic for a fixed seed.
PointCloud sample_surface(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed);

/// Centers the vertex bounding box at the origin and scales so the farthest
/// vertex has norm 1. Throws InvalidInput for a mesh without vertices.
Normalization normalize_to_unit_sphere(const TriangleMesh& mesh);

/// Proper rigid motion p -> R p + t.
class RigidTransform {
public:
    RigidTransform() = default;
    /// Throws InvalidInput if `rotation` is not orthonormal with det +1 within 1e-9.
    RigidTransform(const Mat3& rotation, const Vec3& translation);

    static RigidTransform identity() { return {}; }
    /// Rotation about a unit axis by `angle` radians.
    static RigidTransform from_axis_angle(const Vec3& axis, double angle,
                                          const Vec3& translation = Vec3::Zero());

    const Mat3& rotation() const noexcept { return rotation_; }
    const Vec3& translation() const noexcept { return translation_; }

    Point3 apply(const Point3& p) const { return rotation_ * p + translation_; }
    Vec3 apply_direction(const Vec3& d) const { return rotation_ * d; }

    RigidTransform inverse() const;

    /// Largest entry of |RᵀR - I| together with |det R - 1|.
    double orthonormality_error() const;

private:
    Mat3 rotation_ = Mat3::Identity();
    Vec3 translation_ = Vec3::Zero();
};

Point3 apply_transform(const RigidTransform& t, const Point3& p);

/// a ∘ b: applies b first, then a. The product rotation is projected back
/// onto SO(3) when drift exceeds 1e-9.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& t);

/// Nearest rotation matrix in the Frobenius sense.
Mat3 reorthonormalize(const Mat3& m);

/// Pinhole camera, OpenCV convention: +z forward, +x right, +y down.
/// Pixel (u, v) covers [u, u+1) x [v, v+1); its center is (u + 0.5, v + 0.5).
struct CameraModel {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 1;
    int height = 1;
    RigidTransform pose;  ///< camera-to-world

    /// Throws InvalidInput when the intrinsics violate their invariants.
    void validate() const;

    Point3 position() const { return pose.translation(); }
    Vec3 forward() const { return pose.rotation().col(2); }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    /// Camera-frame ray direction through a pixel center, with unit z component.
    Vec3 pixel_ray(int u, int v) const {
        return {(u + 0.5 - cx) / fx, (v + 0.5 - cy) / fy, 1.0};
    }

    /// Symmetric frustum with vertical field of view `fov_y_deg` and square pixels.
    static CameraModel with_fov(int width, int height, double fov_y_deg,
                                const RigidTransform& pose = {});

    /// Same view, intrinsics rescaled to a new resolution.
    CameraModel resized(int new_width, int new_height) const;
};

/// Camera-to-world pose at `eye` looking at `target`, with image up along
/// `up` where possible. Falls back to up = (0,1,0) when the view direction is
/// within 1e-6 of ±up.
RigidTransform look_at(const Point3& eye, const Point3& target,
                       const Vec3& up = Vec3::UnitZ());

}  // namespace recbench
