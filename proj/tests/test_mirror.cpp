#include "recbench/errors.hpp"
#include "recbench/metrics.hpp"
#include "recbench/mirror.hpp"
#include "recbench/primitives.hpp"

#include "gradcheck.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace recbench;

namespace {

CameraModel camera_at(const Point3& eye, int size = 64, double fov = 60.0) {
    return CameraModel::with_fov(size, size, fov, look_at(eye, Point3::Zero()));
}

double max_abs_difference(const DepthImage& a, const DepthImage& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    return worst;
}

TriangleMesh transformed(TriangleMesh mesh, const RigidTransform& t) {
    for (auto& v : mesh.vertices) v = t.apply(v);
    return mesh;
}

// Passes the splatted depth straight through: three centre taps of weight 1.
MirrorModelParams identity_network() {
    auto p = MirrorModelParams::zeros();
    p.layers[0].weight(0, 4) = 1.0;
    p.layers[1].weight(0, 4) = 1.0;
    p.layers[2].weight(0, 4) = 1.0;
    return p;
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "recbench_test_mirror";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("mirror_pose examples") {
    const auto v = mirror_pose(camera_at({0, 0, 2}), Point3::Zero());
    CHECK((v.position() - Point3(0, 0, -2)).norm() < 1e-15);
    CHECK((v.forward() - Vec3(0, 0, 1)).norm() < 1e-12);

    const auto cam = camera_at({0, 0.1, 2});
    const auto w = mirror_pose(cam, Point3::Zero());
    CHECK((w.position() - Point3(0, -0.1, -2)).norm() < 1e-15);
    CHECK(w.fx == cam.fx);
    CHECK(w.cy == cam.cy);
    CHECK(w.width == cam.width);

    CHECK_THROWS_AS(mirror_pose(cam, cam.position()), InvalidInput);
}

TEST_CASE("mirror_pose is an involution") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Point3 center = 0.2 * Point3(g(rng), g(rng), g(rng));
        const Point3 eye = center + Point3(g(rng), g(rng), g(rng)).normalized() * 2.0;
        const auto cam = CameraModel::with_fov(32, 32, 60.0, look_at(eye, center));
        const auto twice = mirror_pose(mirror_pose(cam, center), center);
        CHECK((twice.position() - cam.position()).norm() <= 1e-12);
        CHECK((twice.forward() - cam.forward()).norm() <= 1e-9);
    }
}

TEST_CASE("oracle back view of a sphere is the flipped front view") {
    // The icosphere is symmetric under each coordinate plane, so the relation is
    // exact for cameras on the axes.
    const auto sphere = primitives::icosphere(3);
    for (const Point3 eye : {Point3(0, 0, 2), Point3(2, 0, 0), Point3(0, -2, 0)}) {
        const auto cam = camera_at(eye);
        const auto front = render_depth(sphere, cam);
        const auto back = complete_view_oracle(sphere, mirror_pose(cam, Point3::Zero()));
        REQUIRE(front.valid_count() > 1000);
        CHECK(max_abs_difference(back, front.flipped_horizontally()) <= 1e-9);
    }
}

TEST_CASE("point-symmetric meshes flip vertically, not horizontally") {
    // Turning the camera around the object is a half turn about the image
    // vertical; point reflection differs from it by a mirror in that axis.
    const auto t = RigidTransform::from_axis_angle(Vec3(1, 2, 3).normalized(), 0.7);
    const auto mesh = transformed(primitives::box({-0.5, -0.3, -0.2}, {0.5, 0.3, 0.2}), t);
    const auto cam = camera_at({0.3, 0.4, 2});
    const auto front = render_depth(mesh, cam);
    const auto back = complete_view_oracle(mesh, mirror_pose(cam, Point3::Zero()));
    CHECK(max_abs_difference(back, front.flipped_vertically()) <= 1e-9);
    CHECK(max_abs_difference(back, front.flipped_horizontally()) > 0.1);
}

TEST_CASE("oracle back view of an L-shape differs from the flipped front view") {
    auto mesh = primitives::box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.0});
    mesh.merge(primitives::box({-0.5, -0.5, 0.0}, {0.0, 0.5, 0.5}));
    const auto cam = camera_at({0, 0, 2});
    const auto front = render_depth(mesh, cam);
    const auto back = complete_view_oracle(mesh, mirror_pose(cam, Point3::Zero()));
    CHECK(max_abs_difference(back, front.flipped_horizontally()) > 0.1);
    CHECK(max_abs_difference(back, front.flipped_vertically()) > 0.1);
}

TEST_CASE("oracle of an empty mesh is all invalid") {
    const auto back = complete_view_oracle(TriangleMesh{}, mirror_pose(camera_at({0, 0, 2}), Point3::Zero()));
    CHECK(back.valid_count() == 0);
}

TEST_CASE("conv2d matches the per-pixel reference") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (const auto& [in, out, h, w] : {std::tuple{2, 8, 5, 7}, std::tuple{8, 8, 1, 1}, std::tuple{3, 1, 9, 4}}) {
        ConvLayer layer{in, out, Eigen::MatrixXd(out, in * 9), Eigen::VectorXd(out)};
        for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = g(rng);
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = g(rng);
        FeatureMap x(in, h * w);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
        const auto fast = conv2d(layer, x, h, w);
        const auto ref = conv2d_reference(layer, x, h, w);
        CHECK((fast - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
    ConvLayer layer{2, 1, Eigen::MatrixXd::Zero(1, 18), Eigen::VectorXd::Zero(1)};
    CHECK_THROWS_AS(conv2d(layer, FeatureMap::Zero(3, 4), 2, 2), InvalidInput);
    CHECK_THROWS_AS(conv2d(layer, FeatureMap::Zero(2, 5), 2, 2), InvalidInput);
}

TEST_CASE("mirror network parameter shapes") {
    const auto p = MirrorModelParams::random(1);
    CHECK(p.channels() == std::vector<int>{2, 8, 8, 1});
    CHECK(p.parameter_count() == (8 * 18 + 8) + (8 * 72 + 8) + (1 * 72 + 1));
    CHECK_NOTHROW(p.validate());
    auto bad = p;
    bad.layers[1].weight.resize(8, 71);
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad = p;
    bad.layers[2].bias(0) = std::nan("");
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    CHECK_THROWS_AS(MirrorModelParams::zeros({2}), InvalidInput);
}

TEST_CASE("mirror loss gradient matches central differences") {
    const auto stats = gradcheck::check_mirror(2024, 100);
    MESSAGE("checked ", stats.checked, " skipped ", stats.skipped, " max rel err ", stats.max_relative_error);
    CHECK(stats.checked >= 100 * 800);
    CHECK(stats.max_relative_error <= 1e-4);
}

TEST_CASE("zero network completes nothing") {
    const auto sphere = primitives::icosphere(3);
    const auto cam = camera_at({0, 0, 2}, 32);
    const auto observed = render_depth(sphere, cam);
    const auto out =
        complete_view_learned(MirrorModelParams::zeros(), observed, cam, mirror_pose(cam, Point3::Zero()));
    CHECK(out.valid_count() == 0);
    CHECK_THROWS_AS(complete_view_learned(MirrorModelParams::zeros(), observed, camera_at({0, 0, 2}, 16),
                                          mirror_pose(cam, Point3::Zero())),
                    InvalidInput);
}

TEST_CASE("identity network returns the closed splat") {
    const auto sphere = primitives::icosphere(3);
    const auto cam = camera_at({0, 0, 2}, 32);
    const auto vcam = mirror_pose(cam, Point3::Zero());
    const auto observed = render_depth(sphere, cam);
    const auto splat = splat_cloud(back_project(observed, cam), vcam);
    const auto out = complete_view_learned(identity_network(), observed, cam, vcam);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (splat.data()[i] > 0.0) CHECK(out.data()[i] == splat.data()[i]);
        else CHECK(out.data()[i] == 0.0);
    }
}

TEST_CASE("close_mask fills one-pixel holes and keeps the border") {
    std::vector<bool> mask(25, true);
    mask[12] = false;
    CHECK(close_mask(mask, 5, 5) == std::vector<bool>(25, true));

    std::vector<bool> lone(25, false);
    lone[12] = true;
    CHECK(close_mask(lone, 5, 5) == lone);
    CHECK(close_mask(std::vector<bool>(25, false), 5, 5) == std::vector<bool>(25, false));
}

TEST_CASE("training fits a constant target") {
    std::vector<MirrorPair> pairs;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 4; ++i) {
        MirrorPair p{DepthImage(8, 8), DepthImage(8, 8), DepthImage(8, 8)};
        for (std::size_t k = 0; k < p.splat.size(); ++k) {
            p.splat.data()[k] = u(rng) < 0.6 ? 1.0 + u(rng) : 0.0;
            p.target.data()[k] = 1.5;
        }
        pairs.push_back(p);
    }
    TrainConfig cfg;
    cfg.epochs = 4000;
    cfg.batch_size = 4;
    cfg.learning_rate = 1e-3;
    const auto result = train_mirror_model(pairs, cfg);
    CHECK(result.epoch_losses.back() < result.epoch_losses.front());
    for (const auto& p : pairs) {
        const auto out = mirror_forward(result.params, mirror_input(p.splat), 8, 8);
        CHECK((out.array() - 1.5).abs().mean() <= 0.01);
    }
}

TEST_CASE("training approaches the identity on the depth channel") {
    std::vector<MirrorPair> pairs;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 8; ++i) {
        MirrorPair p{DepthImage(8, 8), DepthImage(8, 8), DepthImage(8, 8)};
        for (std::size_t k = 0; k < p.splat.size(); ++k) {
            p.splat.data()[k] = u(rng) < 0.7 ? 1.0 + u(rng) : 0.0;
        }
        p.target = p.splat;
        pairs.push_back(p);
    }
    TrainConfig cfg;
    cfg.epochs = 2000;
    cfg.batch_size = 8;
    cfg.learning_rate = 3e-3;
    const auto result = train_mirror_model(pairs, cfg);
    CHECK(mirror_loss(result.params, pairs) <= 0.01);
}

TEST_CASE("training contracts") {
    const auto sphere = primitives::icosphere(2, 0.6);
    const TriangleBvh bvh(sphere);
    std::vector<MirrorPair> pairs{make_mirror_pair(bvh, camera_at({0, 0, 2}, 16), Point3::Zero()),
                                  make_mirror_pair(bvh, camera_at({2, 0, 0}, 16), Point3::Zero())};
    TrainConfig cfg;
    cfg.epochs = 0;
    const auto init = MirrorModelParams::random(9);
    const auto same = train_mirror_model(pairs, cfg, init);
    CHECK(same.epoch_losses.empty());
    for (std::size_t k = 0; k < init.layers.size(); ++k) {
        CHECK(same.params.layers[k].weight == init.layers[k].weight);
        CHECK(same.params.layers[k].bias == init.layers[k].bias);
    }

    CHECK_THROWS_AS(train_mirror_model({}, cfg), InvalidInput);
    auto mismatched = pairs;
    mismatched[1].target = DepthImage(8, 8);
    CHECK_THROWS_AS(train_mirror_model(mismatched, cfg), InvalidInput);

}

TEST_CASE("training is independent of thread count within a batch") {
    const auto sphere = primitives::icosphere(2, 0.6);
    const TriangleBvh bvh(sphere);
    std::vector<MirrorPair> pairs;
    for (const Point3 eye : {Point3(0, 0, 2), Point3(2, 0, 0), Point3(0, 2, 0), Point3(1.2, 1.2, 1.0)}) {
        pairs.push_back(make_mirror_pair(bvh, camera_at(eye, 16), Point3::Zero()));
    }
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 4;
    cfg.threads = 1;
    const auto a = train_mirror_model(pairs, cfg);
    cfg.threads = 3;
    const auto b = train_mirror_model(pairs, cfg);
    CHECK(a.epoch_losses == b.epoch_losses);
    for (std::size_t k = 0; k < a.params.layers.size(); ++k) {
        CHECK(a.params.layers[k].weight == b.params.layers[k].weight);
    }
}

TEST_CASE("fused cloud provenance") {
    const auto sphere = primitives::icosphere(3);
    const auto bvh = std::make_shared<const TriangleBvh>(sphere);
    const auto cam = camera_at({0, 0, 2});
    const auto observed = render_depth(*bvh, cam);
    const auto fused = reconstruct_view_dependent(observed, cam, oracle_completion(bvh), Point3::Zero());
    const auto back = render_depth(*bvh, mirror_pose(cam, Point3::Zero()));
    CHECK(fused.cloud.count(PointSource::observed) == observed.valid_count());
    CHECK(fused.cloud.count(PointSource::generated) == back.valid_count());
    CHECK(fused.cloud.size() == observed.valid_count() + back.valid_count());
    CHECK(fused.milliseconds >= 0.0);

    const auto blank = reconstruct_view_dependent(DepthImage::for_camera(cam), cam, oracle_completion(bvh),
                                                  Point3::Zero());
    CHECK(blank.cloud.count(PointSource::observed) == 0);
    CHECK(blank.cloud.size() == back.valid_count());

    const auto nothing = reconstruct_view_dependent(
        DepthImage::for_camera(cam), cam,
        learned_completion(std::make_shared<const MirrorModelParams>(identity_network())), Point3::Zero());
    CHECK(nothing.cloud.empty());
}

TEST_CASE("oracle fusion covers both visible caps of a sphere") {
    // From distance 2 each camera sees the cap within 60 degrees of its axis, so
    // an equatorial band stays unobserved and its midline is 2 sin(15 deg) from
    // the nearest covered point.
    const auto sphere = primitives::icosphere(5);
    const auto bvh = std::make_shared<const TriangleBvh>(sphere);
    const Vec3 axis = Vec3(1.0, 1.2, 1.1).normalized();
    const auto cam = camera_at(axis * 2.0);
    const auto fused =
        reconstruct_view_dependent(render_depth(*bvh, cam), cam, oracle_completion(bvh), Point3::Zero());
    const auto truth = sample_surface(sphere, 10000, 1);
    const KdTree tree(fused.cloud.points());
    double cap_gap = 0.0;
    for (const auto& p : truth.points()) {
        if (std::abs(p.normalized().dot(axis)) >= std::cos(55.0 * M_PI / 180.0)) {
            cap_gap = std::max(cap_gap, tree.nearest(p).distance);
        }
    }
    CHECK(cap_gap <= 0.1);
    const double band = 2.0 * std::sin(15.0 * M_PI / 180.0);
    const double d_h = hausdorff(fused.cloud, truth);
    CHECK(d_h >= band - 0.01);
    CHECK(d_h <= band + 0.1);

}

TEST_CASE("voxel filter removes sparse points injected into a learned completion") {
    const auto sphere = primitives::icosphere(3, 0.5);
    const auto cam = camera_at({0, 0, 2});
    const auto observed = render_depth(sphere, cam);
    const auto params = std::make_shared<const MirrorModelParams>(identity_network());
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto fused = reconstruct_view_dependent(observed, cam, learned_completion(params), Point3::Zero()).cloud;
        REQUIRE(fused.count(PointSource::generated) > 300);
        const std::size_t dense = fused.size();
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> xy(-0.5, 0.5), z(0.7, 2.0);
        for (int i = 0; i < 200; ++i) fused.add({xy(rng), xy(rng), z(rng)}, PointSource::generated);
        const auto kept = voxel_filter(fused, VoxelFilterConfig{0.1, 3});
        std::size_t outliers_kept = 0;
        for (std::size_t i = 0; i < kept.size(); ++i) outliers_kept += kept[i].z() > 0.6;
        CHECK(outliers_kept <= 10);
        CHECK(kept.size() - outliers_kept >= dense * 9 / 10);
    }
}

TEST_CASE("mirror model and pair persistence") {
    const auto dir = temp_dir();
    const auto params = MirrorModelParams::random(12);
    save_mirror_model(dir / "model.rbmr", params);
    const auto loaded = load_mirror_model(dir / "model.rbmr");
    REQUIRE(loaded.channels() == params.channels());
    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        CHECK(loaded.layers[k].weight == params.layers[k].weight);
        CHECK(loaded.layers[k].bias == params.layers[k].bias);
    }
    CHECK_THROWS_AS(load_mirror_model(dir / "absent.rbmr"), MissingArtifact);

    const auto sphere = primitives::icosphere(2, 0.7);
    const TriangleBvh bvh(sphere);
    const std::vector<MirrorPair> pairs{make_mirror_pair(bvh, camera_at({0, 0, 2}, 16), Point3::Zero()),
                                        make_mirror_pair(bvh, camera_at({0, 2, 0}, 16), Point3::Zero())};
    write_mirror_pairs(dir / "pairs", pairs);
    const auto back = read_mirror_pairs(dir / "pairs");
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        // PFM stores float32.
        CHECK(max_abs_difference(back[i].front, pairs[i].front) < 1e-6);
        CHECK(max_abs_difference(back[i].splat, pairs[i].splat) < 1e-6);
        CHECK(max_abs_difference(back[i].target, pairs[i].target) < 1e-6);
    }
    CHECK_THROWS_AS(read_mirror_pairs(dir / "nowhere"), MissingArtifact);
}
