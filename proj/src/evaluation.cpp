#include "recbench/evaluation.hpp"

#include "recbench/errors.hpp"
#include "recbench/io_stats.hpp"
#include "recbench/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

namespace recbench {

namespace {

constexpr const char* kCsvHeader = "method,category,instance,view,d_c,d_h,inference_ms,point_count";

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

bool needs_mirror(Method m) { return m == Method::mirror_learned; }
bool needs_decoder(Method m) { return m == Method::deepsdf; }

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::mirror_oracle: return "mirror_oracle";
        case Method::mirror_learned: return "mirror_learned";
        case Method::deepsdf: return "deepsdf";
    }
    throw InvalidInput("unknown method");
}

Method parse_method(const std::string& name) {
    for (auto m : all_methods()) {
        if (to_string(m) == name) return m;
    }
    throw InvalidInput("unknown method '" + name + "'");
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> all{Method::mirror_oracle, Method::mirror_learned, Method::deepsdf};
    return all;
}

void EvalConfig::validate() const {
    if (methods.empty()) throw InvalidInput("no evaluation methods selected");
    if (ground_truth_samples < 1) throw InvalidInput("ground_truth_samples must be >= 1");
    if (!(metric_voxel > 0.0)) throw InvalidInput("metric_voxel must be positive");
    outlier_filter.validate();
    if (mirror_resolution < 0) throw InvalidInput("mirror_resolution must be >= 0");
    if (grid_resolution < 2) throw InvalidInput("grid_resolution must be >= 2");
    sdf.validate();
}

std::filesystem::path mirror_model_path(const std::filesystem::path& out) { return out / "models" / "mirror.rbmr"; }
std::filesystem::path decoder_model_path(const std::filesystem::path& out) { return out / "models" / "deepsdf.rbsd"; }

Models load_models(const std::filesystem::path& out, const std::vector<Method>& methods) {
    Models models;
    if (std::any_of(methods.begin(), methods.end(), needs_mirror)) {
        models.mirror = std::make_shared<const MirrorModelParams>(load_mirror_model(mirror_model_path(out)));
    }
    if (std::any_of(methods.begin(), methods.end(), needs_decoder)) {
        models.decoder = std::make_shared<const DecoderParams>(load_decoder(decoder_model_path(out)).params);
    }
    return models;
}

PointCloud ground_truth_cloud(const TriangleMesh& mesh, std::uint64_t seed, const EvalConfig& cfg) {
    return voxel_downsample(sample_surface(mesh, cfg.ground_truth_samples, seed), cfg.metric_voxel);
}

EvalRecord evaluate_view(Method method, const Models& models, const View& view, const TriangleMesh& mesh,
                         const PointCloud& ground_truth, const EvalConfig& cfg) {
    EvalRecord rec;
    rec.method = method;
    PointCloud prediction;
    switch (method) {
        case Method::mirror_oracle:
        case Method::mirror_learned: {
            CompletionFn completion;
            if (method == Method::mirror_oracle) {
                completion = oracle_completion(std::make_shared<const TriangleBvh>(mesh));
            } else {
                if (!models.mirror) throw MissingArtifact("mirror model");
                completion = learned_completion(models.mirror, cfg.mirror_resolution);
            }
            const auto fused = reconstruct_view_dependent(view.depth, view.cam, completion, Point3::Zero());
            rec.inference_ms = fused.milliseconds;
            prediction = voxel_filter(fused.cloud, cfg.outlier_filter);
            break;
        }
        case Method::deepsdf: {
            if (!models.decoder) throw MissingArtifact("decoder model");
            const auto t0 = std::chrono::steady_clock::now();
            const auto samples = partial_view_samples(view.depth, view.cam, cfg.sdf.clamp_delta, cfg.partial_view);
            if (!samples.empty()) {
                const auto code = infer_latent(*models.decoder, samples, cfg.sdf).code;
                auto opts = cfg.reconstruct;
                opts.threads = 1;
                prediction = reconstruct(*models.decoder, code, cfg.grid_resolution, opts).cloud;
            }
            rec.inference_ms = elapsed_ms(t0);
            break;
        }
    }
    rec.point_count = prediction.size();
    const auto reduced = voxel_downsample(prediction, cfg.metric_voxel);
    if (reduced.empty() || ground_truth.empty()) {
        rec.d_c = rec.d_h = std::numeric_limits<double>::infinity();
    } else {
        const auto d = cloud_distances(reduced, ground_truth);
        rec.d_c = d.chamfer;
        rec.d_h = d.hausdorff;
    }
    return rec;
}

std::vector<EvalRecord> run_evaluation(const Dataset& dataset, const Models& models, const EvalConfig& cfg) {
    cfg.validate();
    for (auto m : cfg.methods) {
        if (needs_mirror(m) && !models.mirror) throw MissingArtifact(mirror_model_path(dataset.root).string());
        if (needs_decoder(m) && !models.decoder) throw MissingArtifact(decoder_model_path(dataset.root).string());
    }
    const auto tests = dataset.split("test");
    std::vector<std::vector<EvalRecord>> per_instance(tests.size());
    parallel_for(tests.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& inst = tests[i];
            const auto mesh = load_mesh(dataset, inst);
            const auto views = load_views(dataset, inst);
            const auto truth = ground_truth_cloud(mesh, inst.shape.seed, cfg);
            for (std::size_t v = 0; v < views.size(); ++v) {
                for (auto m : cfg.methods) {
                    auto rec = evaluate_view(m, models, views[v], mesh, truth, cfg);
                    rec.category = inst.category;
                    rec.instance = inst.id;
                    rec.view = static_cast<int>(v);
                    per_instance[i].push_back(std::move(rec));
                }
            }
        }
    });
    std::vector<EvalRecord> records;
    for (auto& r : per_instance) records.insert(records.end(), r.begin(), r.end());
    std::stable_sort(records.begin(), records.end(), [](const EvalRecord& a, const EvalRecord& b) {
        return std::tie(a.method, a.category, a.instance, a.view) < std::tie(b.method, b.category, b.instance, b.view);
    });
    return records;
}

std::string format_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse_real(const std::string& text) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
        throw InvalidInput("not a number: '" + text + "'");
    }
    return v;
}

void write_results_csv(const std::filesystem::path& path, const std::vector<EvalRecord>& records) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    note_file_access();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << to_string(r.method) << ',' << to_string(r.category) << ',' << r.instance << ',' << r.view << ','
            << format_real(r.d_c) << ',' << format_real(r.d_h) << ',' << format_real(r.inference_ms) << ','
            << r.point_count << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<EvalRecord> read_results_csv(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingArtifact(path.string());
    note_file_access();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw InvalidInput(path.string() + ": unexpected header");
    std::vector<EvalRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream s(line);
        for (std::string cell; std::getline(s, cell, ',');) cells.push_back(cell);
        if (cells.size() != 8) throw InvalidInput(path.string() + ": expected 8 columns: " + line);
        EvalRecord r;
        r.method = parse_method(cells[0]);
        r.category = parse_category(cells[1]);
        r.instance = cells[2];
        r.view = static_cast<int>(parse_real(cells[3]));
        r.d_c = parse_real(cells[4]);
        r.d_h = parse_real(cells[5]);
        r.inference_ms = parse_real(cells[6]);
        r.point_count = static_cast<std::size_t>(parse_real(cells[7]));
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace recbench
