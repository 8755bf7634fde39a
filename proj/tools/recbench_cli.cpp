#include "recbench/config.hpp"
#include "recbench/dataset.hpp"
#include "recbench/errors.hpp"
#include "recbench/evaluation.hpp"
#include "recbench/io_stats.hpp"
#include "recbench/pipeline.hpp"
#include "recbench/report.hpp"
#include "recbench/timing.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace recbench;

namespace {

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out = "recbench_out";
    std::string config;
    std::string preset;
    std::vector<std::string> overrides;
};

BenchConfig resolve_config(const GlobalOptions& g) {
    BenchConfig cfg;
    if (!g.config.empty()) cfg = load_config(g.config);
    if (!g.preset.empty()) set_config_value(cfg, "preset", g.preset);
    for (const auto& kv : g.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigurationError("--set expects key=value, got '" + kv + "'");
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (g.seed) cfg.seed = *g.seed;
    if (g.threads) cfg.threads = *g.threads;
    cfg.validate();
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    note_file_access();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int gen_data(const GlobalOptions& g) {
    const auto cfg = resolve_config(g);
    const auto t0 = std::chrono::steady_clock::now();
    const auto ds = generate_dataset(g.out, cfg.dataset, cfg.seed, cfg.threads);
    write_text(fs::path(g.out) / "config.txt", dump_config(cfg));
    std::printf("gen-data: %zu instances in %s (%.1f s)\n", ds.instances.size(), g.out.c_str(), seconds_since(t0));
    return 0;
}

int train_sdf(const GlobalOptions& g) {
    const auto cfg = resolve_config(g);
    const auto ds = load_dataset(g.out);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = train_sdf_on_dataset(ds, cfg);
    fs::create_directories(decoder_model_path(g.out).parent_path());
    save_decoder(decoder_model_path(g.out), result.params, result.codes);
    std::printf("train-sdf: %zu objects, loss %.5f -> %.5f (%.1f s), wrote %s\n", result.codes.size(),
                result.epoch_losses.empty() ? 0.0 : result.epoch_losses.front(),
                result.epoch_losses.empty() ? 0.0 : result.epoch_losses.back(), seconds_since(t0),
                decoder_model_path(g.out).string().c_str());
    return 0;
}

int train_mirror(const GlobalOptions& g) {
    const auto cfg = resolve_config(g);
    const auto ds = load_dataset(g.out);
    const auto t0 = std::chrono::steady_clock::now();
    const auto pairs = mirror_pairs_from_dataset(ds, cfg);
    write_mirror_pairs(fs::path(g.out) / "mirror_pairs", pairs);
    const auto result = train_mirror_on_pairs(pairs, cfg);
    fs::create_directories(mirror_model_path(g.out).parent_path());
    save_mirror_model(mirror_model_path(g.out), result.params);
    std::printf("train-mirror: %zu pairs, loss %.5f -> %.5f (%.1f s), wrote %s\n", pairs.size(),
                result.epoch_losses.empty() ? 0.0 : result.epoch_losses.front(),
                result.epoch_losses.empty() ? 0.0 : result.epoch_losses.back(), seconds_since(t0),
                mirror_model_path(g.out).string().c_str());
    return 0;
}

int evaluate(const GlobalOptions& g) {
    const auto cfg = resolve_config(g);
    const auto ds = load_dataset(g.out);
    const auto models = load_models(g.out, cfg.eval.methods);
    const auto t0 = std::chrono::steady_clock::now();
    const auto records = run_evaluation(ds, models, cfg.evaluation());
    const auto path = fs::path(g.out) / "results.csv";
    write_results_csv(path, records);
    std::printf("evaluate: %zu records (%.1f s), wrote %s\n", records.size(), seconds_since(t0), path.string().c_str());
    return 0;
}

int report(const GlobalOptions& g) {
    const auto records = read_results_csv(fs::path(g.out) / "results.csv");
    const auto table = make_report(records);
    write_report(g.out, table);
    std::fputs(table.to_text().c_str(), stdout);
    return 0;
}

int bench_time(const GlobalOptions& g) {
    const auto cfg = resolve_config(g);
    const auto ds = load_dataset(g.out);
    const auto models = load_models(g.out, {Method::mirror_learned, Method::deepsdf});
    const auto samples = timing_samples(ds, *models.decoder, cfg);
    TimingOptions opts;
    opts.repetitions = cfg.timing_repetitions;
    opts.grid_resolution = cfg.eval.grid_resolution;
    opts.mirror_resolution = cfg.eval.mirror_resolution;
    opts.reconstruct = cfg.eval.reconstruct;
    const auto summary = time_methods(samples, *models.mirror, *models.decoder, opts);
    std::string text;
    char line[256];
    std::snprintf(line, sizeof line, "objects %zu\nrepetitions %d\n", samples.size(), opts.repetitions);
    text += line;
    std::snprintf(line, sizeof line, "mirror_median_ms %s\nsdf_median_ms %s\nratio %s\nfile_accesses %llu\n",
                  format_real(summary.mirror_median_ms).c_str(), format_real(summary.sdf_median_ms).c_str(),
                  format_real(summary.ratio).c_str(), static_cast<unsigned long long>(summary.file_accesses));
    text += line;
    write_text(fs::path(g.out) / "timing.txt", text);
    std::fputs(text.c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-view reconstruction benchmark: SDF auto-decoder vs mirrored depth completion"};
    app.require_subcommand(1);
    GlobalOptions g;
    std::uint64_t seed = 0;
    int threads = 0;
    auto* seed_opt = app.add_option("--seed", seed, "global seed")->check(CLI::NonNegativeNumber);
    app.add_option("--out", g.out, "dataset / artifact directory")->capture_default_str();
    app.add_option("--config", g.config, "key=value config file");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--preset", g.preset, "desk or full")->check(CLI::IsMember({"desk", "full"}));
    app.add_option("--set", g.overrides, "override one config key (key=value), repeatable");
    app.fallthrough();

    int (*run)(const GlobalOptions&) = nullptr;
    app.add_subcommand("gen-data", "generate the procedural dataset")->callback([&] { run = gen_data; });
    app.add_subcommand("train-sdf", "train the SDF auto-decoder")->callback([&] { run = train_sdf; });
    app.add_subcommand("train-mirror", "train the mirror completion network")->callback([&] { run = train_mirror; });
    app.add_subcommand("evaluate", "reconstruct every test view and write results.csv")->callback([&] {
        run = evaluate;
    });
    app.add_subcommand("report", "per-category table from results.csv")->callback([&] { run = report; });
    app.add_subcommand("bench-time", "median completion vs grid reconstruction time")->callback([&] {
        run = bench_time;
    });
    app.add_subcommand("config-keys", "list every config key")->callback([&] {
        run = [](const GlobalOptions&) {
            for (const auto& k : config_keys()) std::printf("%-24s %s\n", k.key.c_str(), k.description.c_str());
            std::fputs("\ndefaults:\n", stdout);
            std::fputs(dump_config(BenchConfig{}).c_str(), stdout);
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (*seed_opt) g.seed = seed;
    if (*threads_opt) g.threads = threads;

    try {
        return run(g);
    } catch (const MissingArtifact& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
