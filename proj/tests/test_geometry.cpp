#include "recbench/errors.hpp"
#include "recbench/geometry.hpp"
#include "recbench/mesh_io.hpp"
#include "recbench/primitives.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <random>
#include <sstream>

using namespace recbench;

namespace {

double max_vertex_norm(const TriangleMesh& mesh) {
    double m = 0.0;
    for (const auto& v : mesh.vertices) m = std::max(m, v.norm());
    return m;
}

RigidTransform random_transform(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
    q.normalize();
    return RigidTransform(q.toRotationMatrix(), Vec3(g(rng), g(rng), g(rng)));
}

}  // namespace

TEST_CASE("normalize_to_unit_sphere leaves a centered unit sphere unchanged") {
    const auto sphere = primitives::icosphere(2);
    const auto norm = normalize_to_unit_sphere(sphere);
    CHECK(norm.scale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm.center.norm() < 1e-12);
    for (std::size_t i = 0; i < sphere.vertices.size(); ++i) {
        CHECK((norm.mesh.vertices[i] - sphere.vertices[i]).norm() < 1e-12);
    }
}

TEST_CASE("normalize_to_unit_sphere on an offset box") {
    const auto box = primitives::box({1, 1, 1}, {3, 3, 3});
    const auto norm = normalize_to_unit_sphere(box);
    CHECK((norm.center - Point3(2, 2, 2)).norm() < 1e-15);
    CHECK(std::abs(norm.scale - 1.0 / std::sqrt(3.0)) < 1e-12);
    CHECK(std::abs(max_vertex_norm(norm.mesh) - 1.0) < 1e-9);
    for (std::size_t i = 0; i < box.vertices.size(); ++i) {
        CHECK((norm.to_original(norm.mesh.vertices[i]) - box.vertices[i]).norm() < 1e-12);
    }
}

TEST_CASE("normalize_to_unit_sphere on a single offset triangle") {
    TriangleMesh tri;
    tri.vertices = {{10.0, -4.0, 7.5}, {12.5, -3.0, 7.0}, {11.0, -1.0, 9.0}};
    tri.triangles = {{0, 1, 2}};
    const auto norm = normalize_to_unit_sphere(tri);
    CHECK(std::abs(max_vertex_norm(norm.mesh) - 1.0) < 1e-9);
    CHECK(norm.mesh.bounds().center().norm() < 1e-12);
}

TEST_CASE("normalize_to_unit_sphere rejects an empty mesh") {
    CHECK_THROWS_AS(normalize_to_unit_sphere(TriangleMesh{}), InvalidInput);
}

TEST_CASE("normalize_to_unit_sphere is idempotent") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        TriangleMesh mesh;
        for (int i = 0; i < 12; ++i) mesh.vertices.push_back({u(rng), u(rng), u(rng)});
        for (std::uint32_t i = 0; i + 2 < 12; ++i) mesh.triangles.push_back({i, i + 1, i + 2});
        const auto once = normalize_to_unit_sphere(mesh).mesh;
        const auto twice = normalize_to_unit_sphere(once).mesh;
        for (std::size_t i = 0; i < once.vertices.size(); ++i) {
            CHECK((once.vertices[i] - twice.vertices[i]).norm() < 1e-9);
        }
    }
}

TEST_CASE("apply_transform basics") {
    CHECK((apply_transform(RigidTransform::identity(), {1, 2, 3}) - Point3(1, 2, 3)).norm() == 0.0);
    const auto half_turn = RigidTransform::from_axis_angle(Vec3::UnitZ(), M_PI);
    CHECK((apply_transform(half_turn, {1, 0, 0}) - Point3(-1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("compose and inverse obey rigid-motion algebra") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto t = random_transform(rng);
        const Point3 p(g(rng), g(rng), g(rng));
        CHECK((apply_transform(compose(t, inverse(t)), p) - p).norm() < 1e-12);
        CHECK((apply_transform(inverse(t), apply_transform(t, p)) - p).norm() < 1e-12);

        const auto same = compose(RigidTransform::identity(), t);
        CHECK((same.rotation() - t.rotation()).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((same.translation() - t.translation()).norm() < 1e-15);

        const auto back = inverse(inverse(t));
        CHECK((back.rotation() - t.rotation()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((back.translation() - t.translation()).norm() < 1e-12);
    }
}

TEST_CASE("long compose chains stay on SO(3)") {
    std::mt19937_64 rng(3);
    RigidTransform acc;
    for (int i = 0; i < 1000; ++i) {
        acc = compose(random_transform(rng), acc);
        REQUIRE(acc.orthonormality_error() <= 1e-9);
        acc = compose(acc, inverse(random_transform(rng)));
        REQUIRE(acc.orthonormality_error() <= 1e-9);
    }
}

TEST_CASE("reorthonormalize projects a drifted matrix back onto SO(3)") {
    Mat3 m = RigidTransform::from_axis_angle(Vec3(1, 2, 3), 0.7).rotation();
    m(0, 1) += 1e-6;
    m(2, 2) -= 2e-6;
    const Mat3 r = reorthonormalize(m);
    CHECK(RigidTransform(r, Vec3::Zero()).orthonormality_error() < 1e-12);
    CHECK((r - m).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("RigidTransform rejects improper rotations") {
    Mat3 reflect = Mat3::Identity();
    reflect(0, 0) = -1.0;
    CHECK_THROWS_AS(RigidTransform(reflect, Vec3::Zero()), InvalidInput);
    CHECK_THROWS_AS(RigidTransform(2.0 * Mat3::Identity(), Vec3::Zero()), InvalidInput);
}

TEST_CASE("look_at builds a forward/right/down frame") {
    const auto pose = look_at({2, 0, 0}, {0, 0, 0});
    CHECK((pose.rotation().col(2) - Vec3(-1, 0, 0)).norm() < 1e-15);
    // Image down is world -z when looking horizontally.
    CHECK((pose.rotation().col(1) - Vec3(0, 0, -1)).norm() < 1e-15);
    CHECK(pose.orthonormality_error() < 1e-12);

    // View along the up axis uses the fallback.
    const auto top = look_at({0, 0, 2}, {0, 0, 0});
    CHECK((top.rotation().col(2) - Vec3(0, 0, -1)).norm() < 1e-15);
    CHECK(top.orthonormality_error() < 1e-12);
    CHECK_THROWS_AS(look_at({1, 1, 1}, {1, 1, 1}), InvalidInput);
}

TEST_CASE("camera invariants are enforced") {
    auto cam = CameraModel::with_fov(64, 48, 60.0);
    CHECK(cam.cx == 32.0);
    CHECK(cam.cy == 24.0);
    CHECK(cam.fy == doctest::Approx(24.0 / std::tan(M_PI / 6.0)));
    cam.cx = 64.0;
    CHECK_THROWS_AS(cam.validate(), InvalidInput);
    cam.cx = 10.0;
    cam.fx = 0.0;
    CHECK_THROWS_AS(cam.validate(), InvalidInput);
}

TEST_CASE("mesh validation and watertightness") {
    CHECK(primitives::icosphere(3).is_watertight());
    CHECK(primitives::box({0, 0, 0}, {1, 1, 1}).is_watertight());
    CHECK(primitives::uv_sphere(8, 12).is_watertight());
    CHECK_NOTHROW(primitives::icosphere(2).validate());

    TriangleMesh open;
    open.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    open.triangles = {{0, 1, 2}};
    CHECK_FALSE(open.is_watertight());
    CHECK_FALSE(TriangleMesh{}.is_watertight());

    TriangleMesh bad = open;
    bad.triangles = {{0, 1, 5}};
    CHECK_THROWS_AS(bad.validate(), InvalidInput);

    TriangleMesh degenerate;
    degenerate.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    degenerate.triangles = {{0, 1, 2}};
    CHECK_THROWS_AS(degenerate.validate(), InvalidInput);
}

TEST_CASE("icosphere chordal error shrinks with subdivision") {
    const double e3 = primitives::icosphere_chordal_error(3);
    const double e4 = primitives::icosphere_chordal_error(4);
    // Halving the edge length roughly quarters the sagitta.
    CHECK(e4 < 0.3 * e3);
    CHECK(e4 > 0.2 * e3);
    CHECK(e4 < 1.2e-3);
}

TEST_CASE("OBJ parsing fan-triangulates polygons and resolves index forms") {
    std::istringstream in(
        "# quad\n"
        "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
        "vt 0 0\nvn 0 0 1\n"
        "f 1/1/1 2/1/1 3/1/1 4/1/1\n"
        "f -4 -3 -1\n");
    const auto mesh = parse_obj(in);
    REQUIRE(mesh.triangles.size() == 3);
    CHECK(mesh.triangles[0] == Triangle{0, 1, 2});
    CHECK(mesh.triangles[1] == Triangle{0, 2, 3});
    CHECK(mesh.triangles[2] == Triangle{0, 1, 3});

    std::istringstream bad("v 0 0 0\nf 1 2 3\n");
    CHECK_THROWS_AS(parse_obj(bad), InvalidInput);
}

TEST_CASE("OBJ and PLY round trips are exact") {
    const auto mesh = normalize_to_unit_sphere(primitives::box({0.1, 0.2, 0.3}, {1.7, 1.1, 0.9})).mesh;
    std::stringstream obj;
    write_obj(obj, mesh);
    const auto back = parse_obj(obj);
    REQUIRE(back.vertices.size() == mesh.vertices.size());
    CHECK(back.triangles == mesh.triangles);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        CHECK(back.vertices[i] == mesh.vertices[i]);
    }

    const auto cloud = sample_surface(mesh, 50, 1);
    std::stringstream ply;
    write_ply(ply, cloud);
    const auto cloud_back = parse_ply(ply);
    REQUIRE(cloud_back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) CHECK(cloud_back[i] == cloud[i]);
}

TEST_CASE("sample_surface stays on the surface and is seeded") {
    const auto box = primitives::box({-1, -1, -1}, {1, 1, 1});
    const auto a = sample_surface(box, 500, 9);
    const auto b = sample_surface(box, 500, 9);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == b[i]);
        CHECK(std::abs(a[i].cwiseAbs().maxCoeff() - 1.0) < 1e-12);
    }
}
