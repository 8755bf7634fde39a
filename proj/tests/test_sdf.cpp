#include "recbench/errors.hpp"
#include "recbench/primitives.hpp"
#include "recbench/sdf.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace recbench;

namespace {

double sphere_sdf(const Point3& p) { return p.norm() - 1.0; }

double box_sdf(const Point3& p, double half) {
    const Vec3 q = p.cwiseAbs() - Vec3::Constant(half);
    return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

}  // namespace

TEST_CASE("signed_distance of a fine icosphere matches the analytic sphere") {
    const auto sphere = primitives::icosphere(4);
    const double chord = primitives::icosphere_chordal_error(4);
    CHECK(std::abs(signed_distance(sphere, {0, 0, 0}) + 1.0) <= chord);
    CHECK(std::abs(signed_distance(sphere, {2, 0, 0}) - 1.0) <= chord);
    CHECK(std::abs(signed_distance(sphere, sphere.vertices[17])) <= 1e-12);
    CHECK_THROWS_AS(signed_distance(TriangleMesh{}, {0, 0, 0}), InvalidInput);
}

TEST_CASE("accelerated and reference signed distances agree exactly") {
    const auto mesh = primitives::icosphere(3, 0.9);
    const SignedDistanceField field(mesh);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.3, 1.3);
    for (int i = 0; i < 300; ++i) {
        const Point3 p(u(rng), u(rng), u(rng));
        CHECK(field(p) == signed_distance(mesh, p));
    }
}

TEST_CASE("signed distance agrees with analytic fields within the chordal band") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.5, 1.5);

    const double chord = primitives::icosphere_chordal_error(4);
    const SignedDistanceField sphere(primitives::icosphere(4));
    const SignedDistanceField box(primitives::box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}));
    for (int i = 0; i < 2000; ++i) {
        const Point3 p(u(rng), u(rng), u(rng));
        const double s = sphere(p), expect = sphere_sdf(p);
        REQUIRE(std::abs(s - expect) <= 2.0 * chord);
        if (std::abs(expect) > 2.0 * chord) REQUIRE(std::signbit(s) == std::signbit(expect));

        const double b = box(p), bexpect = box_sdf(p, 0.5);
        REQUIRE(std::abs(b - bexpect) <= 1e-12);
        if (std::abs(bexpect) > 1e-12) REQUIRE(std::signbit(b) == std::signbit(bexpect));
    }
}

TEST_CASE("ray parity does not depend on the probe direction") {
    const SignedDistanceField field(primitives::icosphere(3));
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.3, 1.3);
    for (int i = 0; i < 200; ++i) {
        const Point3 p(u(rng), u(rng), u(rng));
        if (std::abs(p.norm() - 1.0) < 0.05) continue;
        std::optional<bool> first;
        int trusted = 0;
        for (const auto& dir : parity_directions()) {
            const auto inside = inside_by_parity(field.bvh(), p, dir);
            if (!inside) continue;
            ++trusted;
            if (!first) first = inside;
            REQUIRE(*inside == *first);
        }
        CHECK(trusted >= 12);
    }
}

TEST_CASE("sample_training_set contracts") {
    const auto sphere = primitives::icosphere(4);
    SamplingConfig cfg;
    cfg.total_count = 0;
    CHECK(sample_training_set(sphere, cfg, 1).empty());

    cfg.total_count = 3000;
    const auto samples = sample_training_set(sphere, cfg, 1);
    REQUIRE(samples.size() == 3000);
    const double chord = primitives::icosphere_chordal_error(4);
    for (const auto& s : samples) {
        REQUIRE(std::abs(s.sdf - sphere_sdf(s.point)) <= 2.0 * chord);
        REQUIRE(s.point.norm() <= 1.1 + 6 * cfg.surface_noise_sigma + 1.0);
    }
    const std::size_t near = static_cast<std::size_t>(std::count_if(
        samples.begin(), samples.end(), [](const SdfSample& s) { return std::abs(s.sdf) < 0.1; }));
    CHECK(near > 2500);

    const auto again = sample_training_set(sphere, cfg, 1, 3);
    REQUIRE(again.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        REQUIRE(again[i].point == samples[i].point);
        REQUIRE(again[i].sdf == samples[i].sdf);
    }

    cfg.negative_floor_tau = 0.05;
    const auto floored = sample_training_set(sphere, cfg, 1);
    CHECK(floored.size() < samples.size());
    for (const auto& s : floored) REQUIRE(s.sdf >= -0.05);

    cfg.near_surface_fraction = 1.5;
    CHECK_THROWS_AS(sample_training_set(sphere, cfg, 1), InvalidInput);
}

TEST_CASE("default negative floor follows watertightness") {
    CHECK_FALSE(SamplingConfig::defaults_for(primitives::icosphere(1)).negative_floor_tau);
    TriangleMesh open = primitives::icosphere(1);
    open.triangles.pop_back();
    REQUIRE(SamplingConfig::defaults_for(open).negative_floor_tau);
    CHECK(*SamplingConfig::defaults_for(open).negative_floor_tau == 0.05);
}

TEST_CASE("extract_surface_points on analytic fields") {
    const int res = 64;
    const double eps = 2.0 * (2.2 / res);
    const auto cloud = extract_surface_points(PointSdfFn(sphere_sdf), res, eps);
    REQUIRE(!cloud.empty());
    for (const auto& p : cloud.points()) REQUIRE(std::abs(p.norm() - 1.0) <= 2e-2);
    CHECK(cloud.count(PointSource::generated) == cloud.size());

    const auto none = extract_surface_points(PointSdfFn([](const Point3&) { return 1.0; }), res, eps);
    CHECK(none.empty());

    const auto plane =
        extract_surface_points(PointSdfFn([](const Point3& p) { return p.x(); }), res, eps);
    REQUIRE(!plane.empty());
    for (const auto& p : plane.points()) REQUIRE(std::abs(p.x()) <= 1e-6);

    const auto all = extract_surface_points(PointSdfFn([](const Point3&) { return 0.0; }), 8, 0.01);
    CHECK(all.size() == 8 * 8 * 8);

    CHECK_THROWS_AS(extract_surface_points(PointSdfFn(sphere_sdf), 7, eps), InvalidInput);
}

TEST_CASE("extracted point count scales with surface area") {
    std::size_t previous = 0;
    for (int res : {32, 64, 128}) {
        const double eps = 2.0 * extraction_spacing(res);
        const auto n = extract_surface_points(PointSdfFn(sphere_sdf), res, eps).size();
        if (previous > 0) {
            const double ratio = static_cast<double>(n) / static_cast<double>(previous);
            CHECK(ratio >= 3.0);
            CHECK(ratio <= 5.0);
        }
        previous = n;
    }
}

TEST_CASE("extraction output order is independent of thread count") {
    const double eps = 2.0 * extraction_spacing(48);
    const auto one = extract_surface_points(PointSdfFn(sphere_sdf), 48, eps, {.threads = 1});
    const auto many = extract_surface_points(PointSdfFn(sphere_sdf), 48, eps, {.threads = 5});
    REQUIRE(one.size() == many.size());
    for (std::size_t i = 0; i < one.size(); ++i) REQUIRE(one[i] == many[i]);
}

TEST_CASE("sample set persistence") {
    const auto dir = std::filesystem::temp_directory_path() / "recbench_test_sdf";
    std::filesystem::create_directories(dir);
    SamplingConfig cfg;
    cfg.total_count = 200;
    cfg.negative_floor_tau = 0.05;
    const auto samples = sample_training_set(primitives::icosphere(2), cfg, 42);
    write_samples(dir / "s.bin", samples, {42, cfg});
    SampleSetHeader header;
    const auto back = read_samples(dir / "s.bin", &header);
    REQUIRE(back.size() == samples.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].point == samples[i].point);
        CHECK(back[i].sdf == samples[i].sdf);
    }
    CHECK(header.seed == 42);
    CHECK(header.config.total_count == 200);
    REQUIRE(header.config.negative_floor_tau);
    CHECK(*header.config.negative_floor_tau == 0.05);
    CHECK_THROWS_AS(read_samples(dir / "missing.bin"), MissingArtifact);
}
