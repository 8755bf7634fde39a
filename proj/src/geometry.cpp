#include "recbench/geometry.hpp"

#include "recbench/errors.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <utility>

namespace recbench {

bool is_finite(const Point3& p) noexcept {
    return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

// ---------------------------------------------------------------------------
// PointCloud

PointCloud::PointCloud(std::vector<Point3> points)
    : points_(std::move(points)), sources_(points_.size(), PointSource::observed) {}

PointCloud::PointCloud(std::vector<Point3> points, std::vector<PointSource> sources)
    : points_(std::move(points)), sources_(std::move(sources)) {
    if (points_.size() != sources_.size()) {
        throw InvalidInput("PointCloud: points and sources differ in length");
    }
}

void PointCloud::add(const Point3& p, PointSource source) {
    points_.push_back(p);
    sources_.push_back(source);
}

void PointCloud::append(const PointCloud& other) {
    points_.insert(points_.end(), other.points_.begin(), other.points_.end());
    sources_.insert(sources_.end(), other.sources_.begin(), other.sources_.end());
}

void PointCloud::reserve(std::size_t n) {
    points_.reserve(n);
    sources_.reserve(n);
}

std::size_t PointCloud::count(PointSource source) const noexcept {
    return static_cast<std::size_t>(std::count(sources_.begin(), sources_.end(), source));
}

// ---------------------------------------------------------------------------
// TriangleMesh

void TriangleMesh::validate(double min_area) const {
    for (const auto& v : vertices) {
        if (!is_finite(v)) throw InvalidInput("mesh has a non-finite vertex");
    }
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        for (auto idx : triangles[t]) {
            if (idx >= vertices.size()) {
                throw InvalidInput("triangle " + std::to_string(t) + " references vertex " +
                                   std::to_string(idx) + " of " +
                                   std::to_string(vertices.size()));
            }
        }
        if (!(triangle_area(t) > min_area)) {
            throw InvalidInput("triangle " + std::to_string(t) + " is degenerate");
        }
    }
}

bool TriangleMesh::is_watertight() const {
    if (triangles.empty()) return false;
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_use;
    for (const auto& tri : triangles) {
        for (int k = 0; k < 3; ++k) {
            auto a = tri[k];
            auto b = tri[(k + 1) % 3];
            if (a == b) return false;
            ++edge_use[{std::min(a, b), std::max(a, b)}];
        }
    }
    return std::all_of(edge_use.begin(), edge_use.end(),
                       [](const auto& e) { return e.second == 2; });
}

Aabb TriangleMesh::bounds() const {
    Aabb box;
    for (const auto& v : vertices) box.extend(v);
    return box;
}

double TriangleMesh::triangle_area(std::size_t t) const {
    const auto& tri = triangles[t];
    const Vec3 e1 = vertices[tri[1]] - vertices[tri[0]];
    const Vec3 e2 = vertices[tri[2]] - vertices[tri[0]];
    return 0.5 * e1.cross(e2).norm();
}

double TriangleMesh::surface_area() const {
    double total = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t) total += triangle_area(t);
    return total;
}

void TriangleMesh::merge(const TriangleMesh& other) {
    const auto offset = static_cast<std::uint32_t>(vertices.size());
    vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
    for (auto tri : other.triangles) {
        for (auto& idx : tri) idx += offset;
        triangles.push_back(tri);
    }
}

PointCloud sample_surface(const TriangleMesh& mesh, std::size_t count, std::uint64_t seed) {
    if (mesh.empty()) throw InvalidInput("cannot sample the surface of an empty mesh");
    std::vector<double> cumulative(mesh.triangles.size());
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        total += mesh.triangle_area(t);
        cumulative[t] = total;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PointCloud cloud;
    cloud.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double pick = unit(rng) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
        if (it == cumulative.end()) --it;
        const auto& tri = mesh.triangles[static_cast<std::size_t>(it - cumulative.begin())];
        const double r1 = std::sqrt(unit(rng));
        const double r2 = unit(rng);
        cloud.add((1.0 - r1) * mesh.vertices[tri[0]] + r1 * (1.0 - r2) * mesh.vertices[tri[1]] +
                  r1 * r2 * mesh.vertices[tri[2]]);
    }
    return cloud;
}

Normalization normalize_to_unit_sphere(const TriangleMesh& mesh) {
    if (mesh.vertices.empty()) throw InvalidInput("cannot normalize an empty mesh");

    const Point3 center = mesh.bounds().center();
    double max_norm = 0.0;
    for (const auto& v : mesh.vertices) max_norm = std::max(max_norm, (v - center).norm());
    if (!(max_norm > 0.0)) throw InvalidInput("cannot normalize a mesh collapsed to a point");

    Normalization out;
    out.center = center;
    out.scale = 1.0 / max_norm;
    out.mesh.triangles = mesh.triangles;
    out.mesh.vertices.reserve(mesh.vertices.size());
    for (const auto& v : mesh.vertices) out.mesh.vertices.push_back((v - center) / max_norm);
    return out;
}

// ---------------------------------------------------------------------------
// RigidTransform

namespace {

double rotation_error(const Mat3& r) {
    const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    return std::max(ortho, std::abs(r.determinant() - 1.0));
}

constexpr double kRotationTolerance = 1e-9;

}  // namespace

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
    if (!rotation_.allFinite() || !translation_.allFinite()) {
        throw InvalidInput("rigid transform has non-finite entries");
    }
    if (rotation_error(rotation_) > kRotationTolerance) {
        throw InvalidInput("rotation is not orthonormal with determinant +1");
    }
}

RigidTransform RigidTransform::from_axis_angle(const Vec3& axis, double angle,
                                               const Vec3& translation) {
    const Mat3 r = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
    return RigidTransform(r, translation);
}

RigidTransform RigidTransform::inverse() const {
    RigidTransform inv;
    inv.rotation_ = rotation_.transpose();
    inv.translation_ = -(inv.rotation_ * translation_);
    return inv;
}

double RigidTransform::orthonormality_error() const { return rotation_error(rotation_); }

Point3 apply_transform(const RigidTransform& t, const Point3& p) { return t.apply(p); }

Mat3 reorthonormalize(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    const Mat3& v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
    return u * v.transpose();
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
    Mat3 r = a.rotation() * b.rotation();
    if (rotation_error(r) > kRotationTolerance) r = reorthonormalize(r);
    return RigidTransform(r, a.rotation() * b.translation() + a.translation());
}

RigidTransform inverse(const RigidTransform& t) { return t.inverse(); }

// ---------------------------------------------------------------------------
// Cameras

void CameraModel::validate() const {
    if (width <= 0 || height <= 0) throw InvalidInput("camera dimensions must be positive");
    if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidInput("camera focal lengths must be positive");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
        throw InvalidInput("camera principal point lies outside the image");
    }
}

CameraModel CameraModel::with_fov(int width, int height, double fov_y_deg,
                                  const RigidTransform& pose) {
    CameraModel cam;
    cam.width = width;
    cam.height = height;
    cam.fy = 0.5 * height / std::tan(0.5 * fov_y_deg * M_PI / 180.0);
    cam.fx = cam.fy;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    cam.pose = pose;
    cam.validate();
    return cam;
}

CameraModel CameraModel::resized(int new_width, int new_height) const {
    CameraModel cam = *this;
    const double sx = static_cast<double>(new_width) / width;
    const double sy = static_cast<double>(new_height) / height;
    cam.width = new_width;
    cam.height = new_height;
    cam.fx *= sx;
    cam.cx *= sx;
    cam.fy *= sy;
    cam.cy *= sy;
    cam.validate();
    return cam;
}

RigidTransform look_at(const Point3& eye, const Point3& target, const Vec3& up) {
    const Vec3 diff = target - eye;
    if (!(diff.norm() > 0.0)) throw InvalidInput("look_at: eye coincides with target");
    const Vec3 forward = diff.normalized();

    Vec3 up_dir = up.normalized();
    if ((forward - up_dir).norm() < 1e-6 || (forward + up_dir).norm() < 1e-6) {
        up_dir = Vec3::UnitY();
    }
    const Vec3 right = forward.cross(up_dir).normalized();
    const Vec3 down = forward.cross(right);

    Mat3 r;
    r.col(0) = right;
    r.col(1) = down;
    r.col(2) = forward;
    return RigidTransform(r, eye);
}

}  // namespace recbench
