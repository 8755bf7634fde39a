// Acceptance run: one PASS/FAIL line per criterion. Each criterion is a set of
// named checks; --expect-fail names checks known to fail, and the exit code is
// 0 only when the failing checks are exactly that set.

#include "gradcheck.hpp"

#include "recbench/dataset.hpp"
#include "recbench/decoder.hpp"
#include "recbench/evaluation.hpp"
#include "recbench/metrics.hpp"
#include "recbench/mirror.hpp"
#include "recbench/primitives.hpp"
#include "recbench/report.hpp"
#include "recbench/sdf.hpp"
#include "recbench/shapes.hpp"
#include "recbench/timing.hpp"

#include <CLI11.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace recbench;

#ifndef RECBENCH_CLI
#define RECBENCH_CLI "recbench"
#endif

namespace {

struct Check {
    std::string id;
    bool ok = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, double spread) {
    std::uniform_real_distribution<double> u(-spread, spread);
    PointCloud c;
    for (std::size_t i = 0; i < n; ++i) c.add(Point3(u(rng), u(rng), u(rng)));
    return c;
}

CloudDistances brute_metrics(const PointCloud& a, const PointCloud& b) {
    auto directed = [](const PointCloud& from, const PointCloud& to, double& mean, double& mx) {
        mean = 0.0;
        mx = 0.0;
        for (const auto& p : from.points()) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to.points()) best = std::min(best, (p - q).norm());
            mean += best;
            mx = std::max(mx, best);
        }
        mean /= static_cast<double>(from.size());
    };
    double ma, xa, mb, xb;
    directed(a, b, ma, xa);
    directed(b, a, mb, xb);
    return {0.5 * (ma + mb), std::max(xa, xb)};
}

PointCloud sphere_samples(double radius, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    PointCloud c;
    for (std::size_t i = 0; i < n; ++i) c.add(radius * Vec3(g(rng), g(rng), g(rng)).normalized());
    return c;
}

CameraModel camera_at(const Point3& eye, int size) {
    return CameraModel::with_fov(size, size, 60.0, look_at(eye, Point3::Zero()));
}

// Cameras drawn like the dataset's rings: radius 2, elevation within +-60 deg.
std::vector<CameraModel> ring(int count, int size, std::uint64_t seed) {
    DatasetConfig dc;
    dc.views_per_instance = count;
    dc.image_size = size;
    return camera_ring(dc, seed);
}

// Models trained once and reused by later criteria.
struct Shared {
    std::optional<DecoderParams> decoder;
    std::optional<TrainConfig> sdf_cfg;
    std::optional<MirrorModelParams> mirror;
};

constexpr int kSpheres = 10;
double training_radius(int i) { return 0.3 + 0.6 * i / (kSpheres - 1); }

const DecoderParams& sphere_decoder(Shared& s) {
    if (!s.decoder) {
        std::vector<std::vector<SdfSample>> data;
        for (int i = 0; i < kSpheres; ++i) {
            SamplingConfig sc;
            sc.total_count = 4000;
            data.push_back(sample_training_set(primitives::icosphere(4, training_radius(i)), sc, 100 + i));
        }
        TrainConfig cfg;
        cfg.epochs = 300;
        cfg.batch_size = 512;
        s.decoder = train_autodecoder(data, cfg).params;
        s.sdf_cfg = cfg;
    }
    return *s.decoder;
}

constexpr int kMirrorRes = 32;

MirrorPair random_sphere_pair(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> radius(lo, hi);
    const TriangleBvh bvh(primitives::icosphere(3, radius(rng)));
    const auto cam = ring(1, kMirrorRes, rng()).front();
    return make_mirror_pair(bvh, cam, Point3::Zero());
}

const MirrorModelParams& sphere_mirror(Shared& s) {
    if (!s.mirror) {
        std::mt19937_64 rng(7);
        std::vector<MirrorPair> pairs;
        for (int i = 0; i < 200; ++i) pairs.push_back(random_sphere_pair(rng, 0.3, 0.9));
        TrainConfig cfg;
        cfg.epochs = 400;
        cfg.batch_size = 8;
        cfg.learning_rate = 3e-3;
        cfg.seed = 3;
        s.mirror = train_mirror_model(pairs, cfg).params;
    }
    return *s.mirror;
}

std::vector<Check> metric_oracle() {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::size_t> size(1, 200);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto a = random_cloud(rng, size(rng), 1.0), b = random_cloud(rng, size(rng), 0.7);
        const auto d = cloud_distances(a, b), ref = brute_metrics(a, b);
        worst = std::max({worst, std::abs(d.chamfer - ref.chamfer), std::abs(d.hausdorff - ref.hausdorff)});
    }
    return {{"1.brute", worst <= 1e-12, fmt("max |kd - brute| %.3g over 100 pairs", worst)}};
}

std::vector<Check> metric_dominance() {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> size(1, 300);
    std::uniform_real_distribution<double> spread(0.1, 2.0);
    int violations = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto a = random_cloud(rng, size(rng), spread(rng)), b = random_cloud(rng, size(rng), spread(rng));
        const auto d = cloud_distances(a, b);
        violations += d.hausdorff < d.chamfer;
    }
    return {{"2.dominance", violations == 0, fmt("%d violations in 1000 pairs", violations)}};
}

std::vector<Check> sdf_correctness() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const auto sphere = primitives::icosphere(4);
    const double band = 2.0 * primitives::icosphere_chordal_error(4);
    const auto box = primitives::box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
    // The box mesh is exact; its band is a floating-point floor.
    const double box_band = 1e-12;
    double sphere_err = 0.0, box_err = 0.0;
    int sign_errors = 0;
    for (int i = 0; i < 10000; ++i) {
        const Point3 p(u(rng), u(rng), u(rng));
        const double s = signed_distance(sphere, p), es = p.norm() - 1.0;
        sphere_err = std::max(sphere_err, std::abs(s - es));
        if (std::abs(es) > band && std::signbit(s) != std::signbit(es)) ++sign_errors;
        const Vec3 q = p.cwiseAbs() - Vec3::Constant(0.5);
        const double eb = q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
        const double b = signed_distance(box, p);
        box_err = std::max(box_err, std::abs(b - eb));
        if (std::abs(eb) > box_band && std::signbit(b) != std::signbit(eb)) ++sign_errors;
    }
    return {{"3.sphere", sphere_err <= band, fmt("icosphere max err %.3g (band %.3g)", sphere_err, band)},
            {"3.box", box_err <= box_band, fmt("box max err %.3g", box_err)},
            {"3.sign", sign_errors == 0, fmt("%d sign errors", sign_errors)}};
}

std::vector<Check> render_round_trip() {
    const auto sphere = primitives::icosphere(6);
    std::size_t close = 0, total = 0;
    double splat_err = 0.0;
    for (const auto& cam : ring(5, 64, 4)) {
        const auto depth = render_depth(sphere, cam);
        const auto cloud = back_project(depth, cam);
        total += cloud.size();
        for (const auto& p : cloud.points()) close += std::abs(p.norm() - 1.0) <= 1e-3;
        const auto back = splat_cloud(cloud, cam);
        for (std::size_t i = 0; i < depth.size(); ++i) {
            if (depth.data()[i] > 0.0) splat_err = std::max(splat_err, std::abs(back.data()[i] - depth.data()[i]));
        }
    }
    const double frac = static_cast<double>(close) / static_cast<double>(total);
    return {{"4.surface", frac >= 0.99, fmt("%.4f of %zu pixels within 1e-3", frac, total)},
            {"4.splat", splat_err <= 1e-9, fmt("splat max err %.3g", splat_err)}};
}

std::vector<Check> mirror_symmetry() {
    const auto sphere = primitives::icosphere(3);
    const TriangleBvh bvh(sphere);
    double flip_err = 0.0;
    for (const Point3 eye : {Point3(0, 0, 2), Point3(2, 0, 0), Point3(0, -2, 0)}) {
        const auto cam = camera_at(eye, 64);
        const auto front = render_depth(bvh, cam);
        const auto back = render_depth(bvh, mirror_pose(cam, Point3::Zero()));
        const auto flipped = front.flipped_horizontally();
        for (std::size_t i = 0; i < back.size(); ++i) {
            flip_err = std::max(flip_err, std::abs(back.data()[i] - flipped.data()[i]));
        }
    }
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    double pos_err = 0.0, dir_err = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Point3 c(0.3 * g(rng), 0.3 * g(rng), 0.3 * g(rng));
        const Point3 eye = c + (1.5 + std::abs(g(rng))) * Vec3(g(rng), g(rng), g(rng)).normalized();
        const auto cam = CameraModel::with_fov(64, 64, 60.0, look_at(eye, c));
        const auto twice = mirror_pose(mirror_pose(cam, c), c);
        pos_err = std::max(pos_err, (twice.position() - cam.position()).norm());
        dir_err = std::max(dir_err, (twice.forward() - cam.forward()).norm());
    }
    return {{"5.flip", flip_err <= 1e-9, fmt("sphere flip max err %.3g", flip_err)},
            {"5.involution", pos_err <= 1e-12 && dir_err <= 1e-9,
             fmt("involution position %.3g direction %.3g", pos_err, dir_err)}};
}

std::vector<Check> gradient_checks() {
    const auto dec = gradcheck::check_decoder(6, 100);
    const auto mir = gradcheck::check_mirror(2024, 100);
    return {{"6.decoder", dec.max_relative_error <= 1e-4,
             fmt("decoder max rel err %.3g over %zu", dec.max_relative_error, dec.checked)},
            {"6.mirror", mir.max_relative_error <= 1e-4,
             fmt("mirror max rel err %.3g over %zu (%zu at kinks skipped)", mir.max_relative_error, mir.checked,
                 mir.skipped)}};
}

std::vector<Check> deepsdf_run(Shared& shared) {
    const auto& decoder = sphere_decoder(shared);
    std::vector<Check> checks;
    int k = 0;
    // Between training radii 0.5/0.567 and 0.7/0.767.
    for (const double radius : {0.55, 0.74}) {
        const auto cam = ring(1, 64, 70 + k).front();
        const auto depth = render_depth(primitives::icosphere(5, radius), cam);
        const auto partial = partial_view_samples(depth, cam, shared.sdf_cfg->clamp_delta);
        const auto code = infer_latent(decoder, partial, *shared.sdf_cfg).code;
        const auto rec = reconstruct(decoder, code, 64);
        const double d = rec.cloud.empty() ? INFINITY : chamfer(rec.cloud, sphere_samples(radius, 10000, 9));
        checks.push_back({fmt("7.r%.2f", radius), d <= 0.05, fmt("held-out r=%.2f chamfer %.4f", radius, d)});
        ++k;
    }
    return checks;
}

std::vector<Check> mirror_pipeline(Shared& shared) {
    std::vector<Check> checks;

    // Oracle completion on held-out convex procedural instances.
    EvalConfig ec;
    double worst = 0.0, best = INFINITY;
    for (const auto category : {Category::can, Category::jar}) {
        for (int i = 0; i < 5; ++i) {
            const auto seed = instance_seed(2024, category, "test", i);
            const auto mesh = build_shape(random_shape_spec(category, seed));
            const auto bvh = std::make_shared<const TriangleBvh>(mesh);
            const auto cam = ring(1, 64, seed).front();
            const auto fused = reconstruct_view_dependent(render_depth(*bvh, cam), cam, oracle_completion(bvh),
                                                          Point3::Zero());
            const auto pred = voxel_downsample(voxel_filter(fused.cloud, ec.outlier_filter), ec.metric_voxel);
            const double d = hausdorff(pred, ground_truth_cloud(mesh, seed, ec));
            worst = std::max(worst, d);
            best = std::min(best, d);
        }
    }
    checks.push_back({"8.oracle", worst <= 0.1, fmt("oracle d_H %.3f..%.3f on 10 cans/jars", best, worst)});

    // Learned completion on held-out spheres (pooled over target pixels).
    const auto& params = sphere_mirror(shared);
    std::mt19937_64 rng(8);
    double sum = 0.0, max_mae = 0.0;
    std::size_t pixels = 0;
    for (int i = 0; i < 20; ++i) {
        const auto pair = random_sphere_pair(rng, 0.3, 0.9);
        const auto raw = mirror_forward(params, mirror_input(pair.splat), kMirrorRes, kMirrorRes);
        const auto l1 = masked_l1(raw, pair.target);
        sum += l1.sum;
        pixels += l1.count;
        max_mae = std::max(max_mae, l1.mean());
    }
    const double mae = sum / static_cast<double>(pixels);
    checks.push_back({"8.learned", mae <= 0.05,
                      fmt("learned masked MAE %.4f on 20 held-out spheres (worst image %.4f)", mae, max_mae)});
    return checks;
}

std::vector<Check> outlier_filtering() {
    double removed = 1.0, kept = 1.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto r = run_outlier_injection({}, seed);
        removed = std::min(removed, r.sparse_removed);
        kept = std::min(kept, r.surface_kept);
    }
    return {{"9.removed", removed >= 0.95, fmt("min sparse removed %.4f", removed)},
            {"9.kept", kept >= 0.99, fmt("min surface kept %.4f", kept)}};
}

std::vector<Check> timing_order(Shared& shared) {
    const auto& decoder = sphere_decoder(shared);
    const auto& mirror = sphere_mirror(shared);
    std::vector<TimingSample> samples;
    int k = 0;
    for (const double radius : {0.35, 0.5, 0.6, 0.7, 0.85}) {
        const auto cam = ring(1, 64, 90 + k++).front();
        const auto depth = render_depth(primitives::icosphere(4, radius), cam);
        const auto code =
            infer_latent(decoder, partial_view_samples(depth, cam, shared.sdf_cfg->clamp_delta), *shared.sdf_cfg).code;
        samples.push_back({depth, cam, code});
    }
    const auto t = time_methods(samples, mirror, decoder, {});
    return {{"10.ratio", t.ratio >= 5.0,
             fmt("mirror %.3f ms, sdf grid-64 %.1f ms, ratio %.1f", t.mirror_median_ms, t.sdf_median_ms, t.ratio)},
            {"10.no_io", t.file_accesses == 0, fmt("%llu file accesses while timing",
                                                   static_cast<unsigned long long>(t.file_accesses))}};
}

int run_command(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<Check> end_to_end(const fs::path& work) {
    const auto out = work / "micro";
    fs::remove_all(out);
    fs::create_directories(out);
    const auto cfg = work / "micro.cfg";
    std::ofstream(cfg) << "categories = bottle,mug\n"
                          "train_count = 5\n"
                          "test_count = 2\n"
                          "sdf_samples = 4000\n"
                          "sdf_epochs = 100\n"
                          "mirror_epochs = 100\n"
                          "ground_truth_samples = 10000\n";
    const std::string base = std::string("\"") + RECBENCH_CLI + "\" --seed 5 --out \"" + out.string() +
                             "\" --config \"" + cfg.string() + "\" ";
    std::vector<Check> checks;
    bool all_zero = true;
    std::string codes;
    for (const char* sub : {"gen-data", "train-sdf", "train-mirror", "evaluate", "report"}) {
        const int code = run_command(base + sub + " > \"" + (work / (std::string(sub) + ".log")).string() + "\" 2>&1");
        codes += fmt("%s=%d ", sub, code);
        all_zero = all_zero && code == 0;
        if (code != 0) break;
    }
    checks.push_back({"11.exit", all_zero, codes});
    if (!all_zero) return checks;

    const auto records = read_results_csv(out / "results.csv");
    std::size_t bad = 0;
    for (const auto& r : records) bad += !(r.d_c <= r.d_h);
    std::ifstream in(out / "report.csv");
    std::stringstream text;
    text << in.rdbuf();
    const auto report = parse_report_csv(text.str());
    std::size_t bad_cells = 0;
    for (std::size_t i = 0; i + 1 < report.rows.size(); i += 2) {
        for (std::size_t c = 0; c < 6; ++c) {
            const auto& dc = report.rows[i].values[c];
            const auto& dh = report.rows[i + 1].values[c];
            if (dc.has_value() != dh.has_value() || (dc && !(*dc <= *dh))) ++bad_cells;
        }
    }
    checks.push_back({"11.dominance", bad == 0 && bad_cells == 0 && !records.empty(),
                      fmt("%zu records, %zu rows with d_C > d_H, %zu report cells", records.size(), bad, bad_cells)});
    return checks;
}

struct Criterion {
    int number;
    const char* title;
    double limit_seconds;  // 0: none
    std::function<std::vector<Check>()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recbench acceptance criteria"};
    std::vector<int> only;
    std::vector<std::string> expect_fail;
    std::string work = (fs::temp_directory_path() / "recbench_acceptance").string();
    app.add_option("--only", only, "run only these criteria");
    app.add_option("--expect-fail", expect_fail, "check ids known to fail (e.g. 8.oracle)");
    app.add_option("--work", work, "scratch directory");
    CLI11_PARSE(app, argc, argv);

    Shared shared;
    const std::vector<Criterion> criteria{
        {1, "metric oracle equivalence", 10, metric_oracle},
        {2, "metric dominance", 0, metric_dominance},
        {3, "SDF correctness", 60, sdf_correctness},
        {4, "render round trip", 0, render_round_trip},
        {5, "mirror symmetry oracle", 0, mirror_symmetry},
        {6, "gradient checks", 0, gradient_checks},
        {7, "desk-scale DeepSDF", 600, [&] { return deepsdf_run(shared); }},
        {8, "desk-scale mirror pipeline", 600, [&] { return mirror_pipeline(shared); }},
        {9, "outlier filtering", 0, outlier_filtering},
        {10, "timing ordering", 0, [&] { return timing_order(shared); }},
        {11, "end-to-end report", 1800, [&] { return end_to_end(work); }},
    };

    fs::create_directories(work);
    std::set<std::string> failed;
    std::set<std::string> known;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.number) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<Check> checks;
        try {
            checks = c.run();
        } catch (const std::exception& e) {
            checks.push_back({std::to_string(c.number) + ".error", false, std::string("exception: ") + e.what()});
        }
        const double secs = seconds_since(t0);
        if (c.limit_seconds > 0) {
            checks.push_back({std::to_string(c.number) + ".runtime", secs <= c.limit_seconds,
                              fmt("limit %.0f s", c.limit_seconds)});
        }
        bool ok = true;
        std::string detail;
        for (const auto& ch : checks) {
            known.insert(ch.id);
            if (!ch.ok) failed.insert(ch.id);
            ok = ok && ch.ok;
            detail += (detail.empty() ? "" : "; ") + std::string(ch.ok ? "" : "[" + ch.id + " failed] ") + ch.detail;
        }
        std::printf("%s %2d %s (%.1f s): %s\n", ok ? "PASS" : "FAIL", c.number, c.title, secs, detail.c_str());
        std::fflush(stdout);
    }

    std::set<std::string> expected;
    for (const auto& id : expect_fail) {
        if (known.count(id)) expected.insert(id);
    }
    int status = 0;
    for (const auto& id : failed) {
        if (!expected.count(id)) {
            std::printf("unexpected failure: %s\n", id.c_str());
            status = 1;
        }
    }
    for (const auto& id : expected) {
        if (!failed.count(id)) {
            std::printf("expected failure now passes: %s (update --expect-fail)\n", id.c_str());
            status = 1;
        }
    }
    std::printf("%zu of %zu checks failed, %zu expected\n", failed.size(), known.size(), expected.size());
    return status;
}
