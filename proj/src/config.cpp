#include "recbench/config.hpp"

#include "recbench/errors.hpp"
#include "recbench/io_stats.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace recbench {

namespace {

struct Entry {
    const char* key;
    const char* description;
    std::function<std::string(const BenchConfig&)> get;
    std::function<void(BenchConfig&, const std::string&)> set;
};

[[noreturn]] void bad_value(const std::string& value, const char* what) {
    throw ConfigurationError("'" + value + "' is not " + what);
}

template <typename T>
T parse_integer(const std::string& value) {
    T out{};
    const auto r = std::from_chars(value.data(), value.data() + value.size(), out);
    if (r.ec != std::errc() || r.ptr != value.data() + value.size()) bad_value(value, "an integer");
    return out;
}

double parse_double(const std::string& value) {
    try {
        return parse_real(value);
    } catch (const InvalidInput&) {
        bad_value(value, "a number");
    }
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::istringstream s(value);
    for (std::string item; std::getline(s, item, ',');) {
        if (item.empty()) bad_value(value, "a comma-separated list");
        out.push_back(item);
    }
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + fmt(items[i]);
    return out;
}

template <typename Field>
Entry int_entry(const char* key, const char* description, Field field) {
    return {key, description, [field](const BenchConfig& c) { return std::to_string(field(const_cast<BenchConfig&>(c))); },
            [field](BenchConfig& c, const std::string& v) {
                field(c) = parse_integer<std::remove_reference_t<decltype(field(c))>>(v);
            }};
}

template <typename Field>
Entry real_entry(const char* key, const char* description, Field field) {
    return {key, description, [field](const BenchConfig& c) { return format_real(field(const_cast<BenchConfig&>(c))); },
            [field](BenchConfig& c, const std::string& v) { field(c) = parse_double(v); }};
}

Entry optimizer_entry(const char* key, const char* description, TrainConfig BenchConfig::*member) {
    return {key, description, [member](const BenchConfig& c) { return to_string((c.*member).optimizer); },
            [member](BenchConfig& c, const std::string& v) {
                try {
                    (c.*member).optimizer = parse_optimizer(v);
                } catch (const InvalidInput&) {
                    bad_value(v, "sgd, momentum or adam");
                }
            }};
}

void apply_preset(BenchConfig& c, const std::string& v) {
    if (v == "desk") {
        c.latent_dim = 16;
        c.hidden = {64, 64, 64};
        c.sampling.total_count = SamplingConfig{}.total_count;
    } else if (v == "full") {
        c.latent_dim = 256;
        c.hidden = std::vector<int>(7, 512);
        c.sampling.total_count = 5'000'000;
    } else {
        bad_value(v, "desk or full");
    }
    c.preset = v;
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table{
        int_entry("seed", "global seed; training and sampling seeds derive from it",
                  [](BenchConfig& c) -> std::uint64_t& { return c.seed; }),
        int_entry("threads", "worker threads (timing always runs single-threaded)",
                  [](BenchConfig& c) -> int& { return c.threads; }),
        // dataset
        {"categories", "comma list from bottle,can,helmet,jar,laptop,mug",
         [](const BenchConfig& c) { return join(c.dataset.categories, [](Category k) { return to_string(k); }); },
         [](BenchConfig& c, const std::string& v) {
             c.dataset.categories.clear();
             for (const auto& name : split_list(v)) {
                 try {
                     c.dataset.categories.push_back(parse_category(name));
                 } catch (const InvalidInput&) {
                     bad_value(name, "a category");
                 }
             }
         }},
        int_entry("train_count", "training instances per category",
                  [](BenchConfig& c) -> int& { return c.dataset.train_count; }),
        int_entry("test_count", "test instances per category", [](BenchConfig& c) -> int& { return c.dataset.test_count; }),
        int_entry("views_per_instance", "rendered views per instance",
                  [](BenchConfig& c) -> int& { return c.dataset.views_per_instance; }),
        int_entry("image_size", "view width and height in pixels",
                  [](BenchConfig& c) -> int& { return c.dataset.image_size; }),
        real_entry("fov_deg", "vertical field of view", [](BenchConfig& c) -> double& { return c.dataset.fov_deg; }),
        real_entry("camera_radius", "camera distance from the object center",
                   [](BenchConfig& c) -> double& { return c.dataset.camera_radius; }),
        real_entry("max_elevation_deg", "camera elevation bound",
                   [](BenchConfig& c) -> double& { return c.dataset.max_elevation_deg; }),
        // decoder
        {"preset", "desk or full; sets latent_dim, hidden and sdf_samples before other keys",
         [](const BenchConfig& c) { return c.preset; }, apply_preset},
        int_entry("latent_dim", "latent code length", [](BenchConfig& c) -> int& { return c.latent_dim; }),
        {"hidden", "comma list of hidden layer widths",
         [](const BenchConfig& c) { return join(c.hidden, [](int w) { return std::to_string(w); }); },
         [](BenchConfig& c, const std::string& v) {
             c.hidden.clear();
             for (const auto& w : split_list(v)) c.hidden.push_back(parse_integer<int>(w));
         }},
        int_entry("sdf_samples", "SDF training samples per object",
                  [](BenchConfig& c) -> std::size_t& { return c.sampling.total_count; }),
        real_entry("near_surface_fraction", "share of samples perturbed off the surface",
                   [](BenchConfig& c) -> double& { return c.sampling.near_surface_fraction; }),
        real_entry("surface_noise_sigma", "std-dev of the surface perturbation",
                   [](BenchConfig& c) -> double& { return c.sampling.surface_noise_sigma; }),
        {"negative_floor_tau", "discard samples with sdf < -tau; 'disabled' keeps all",
         [](const BenchConfig& c) {
             return c.sampling.negative_floor_tau ? format_real(*c.sampling.negative_floor_tau) : "disabled";
         },
         [](BenchConfig& c, const std::string& v) {
             if (v == "disabled") c.sampling.negative_floor_tau.reset();
             else c.sampling.negative_floor_tau = parse_double(v);
         }},
        real_entry("sampling_ball_radius", "radius of the uniform-sample ball",
                   [](BenchConfig& c) -> double& { return c.sampling.ball_radius; }),
        real_entry("sdf_learning_rate", "decoder weight learning rate",
                   [](BenchConfig& c) -> double& { return c.sdf.learning_rate; }),
        real_entry("code_learning_rate", "latent code learning rate",
                   [](BenchConfig& c) -> double& { return c.sdf.code_learning_rate; }),
        int_entry("sdf_epochs", "decoder training epochs", [](BenchConfig& c) -> int& { return c.sdf.epochs; }),
        int_entry("sdf_batch_size", "samples per decoder minibatch",
                  [](BenchConfig& c) -> int& { return c.sdf.batch_size; }),
        real_entry("clamp_delta", "SDF clamp bound", [](BenchConfig& c) -> double& { return c.sdf.clamp_delta; }),
        real_entry("code_prior_weight", "lambda of the code norm penalty",
                   [](BenchConfig& c) -> double& { return c.sdf.code_prior_weight; }),
        real_entry("code_init_sigma", "std-dev of initial codes",
                   [](BenchConfig& c) -> double& { return c.sdf.code_init_sigma; }),
        optimizer_entry("sdf_optimizer", "sgd, momentum or adam", &BenchConfig::sdf),
        real_entry("sdf_momentum", "momentum coefficient", [](BenchConfig& c) -> double& { return c.sdf.momentum; }),
        int_entry("inference_steps", "latent optimization steps per view",
                  [](BenchConfig& c) -> int& { return c.sdf.inference_steps; }),
        real_entry("inference_learning_rate", "latent optimization learning rate",
                   [](BenchConfig& c) -> double& { return c.sdf.inference_learning_rate; }),
        real_entry("inference_clamp_start", "initial clamp of the annealed inference loss",
                   [](BenchConfig& c) -> double& { return c.sdf.inference_clamp_start; }),
        int_entry("free_space_steps", "free-space samples per observed pixel",
                  [](BenchConfig& c) -> int& { return c.eval.partial_view.free_space_steps; }),
        real_entry("free_space_spacing", "distance between free-space samples",
                   [](BenchConfig& c) -> double& { return c.eval.partial_view.spacing; }),
        int_entry("pixel_stride", "use every n-th observed pixel",
                  [](BenchConfig& c) -> int& { return c.eval.partial_view.pixel_stride; }),
        int_entry("grid_resolution", "SDF extraction grid", [](BenchConfig& c) -> int& { return c.eval.grid_resolution; }),
        real_entry("iso_epsilon", "extraction band; 0 selects one grid spacing",
                   [](BenchConfig& c) -> double& { return c.eval.reconstruct.iso_epsilon; }),
        real_entry("max_radius", "drop reconstructed points beyond this radius",
                   [](BenchConfig& c) -> double& { return c.eval.reconstruct.max_radius; }),
        // mirror
        real_entry("mirror_learning_rate", "mirror network learning rate",
                   [](BenchConfig& c) -> double& { return c.mirror.learning_rate; }),
        int_entry("mirror_epochs", "mirror network epochs", [](BenchConfig& c) -> int& { return c.mirror.epochs; }),
        int_entry("mirror_batch_size", "images per mirror minibatch",
                  [](BenchConfig& c) -> int& { return c.mirror.batch_size; }),
        optimizer_entry("mirror_optimizer", "sgd, momentum or adam", &BenchConfig::mirror),
        int_entry("mirror_resolution", "width of the mirror network images",
                  [](BenchConfig& c) -> int& { return c.eval.mirror_resolution; }),
        // evaluation
        {"methods", "comma list from mirror_oracle,mirror_learned,deepsdf",
         [](const BenchConfig& c) { return join(c.eval.methods, [](Method m) { return to_string(m); }); },
         [](BenchConfig& c, const std::string& v) {
             c.eval.methods.clear();
             for (const auto& name : split_list(v)) {
                 try {
                     c.eval.methods.push_back(parse_method(name));
                 } catch (const InvalidInput&) {
                     bad_value(name, "a method");
                 }
             }
         }},
        int_entry("ground_truth_samples", "surface samples per test object",
                  [](BenchConfig& c) -> std::size_t& { return c.eval.ground_truth_samples; }),
        real_entry("metric_voxel", "common downsampling voxel before metrics",
                   [](BenchConfig& c) -> double& { return c.eval.metric_voxel; }),
        real_entry("outlier_voxel", "voxel size of the mirror outlier filter",
                   [](BenchConfig& c) -> double& { return c.eval.outlier_filter.voxel_size; }),
        int_entry("outlier_min_points", "points a voxel needs to survive the filter",
                  [](BenchConfig& c) -> std::size_t& { return c.eval.outlier_filter.min_points_per_voxel; }),
        // timing
        int_entry("timing_objects", "test objects in bench-time", [](BenchConfig& c) -> int& { return c.timing_objects; }),
        int_entry("timing_repetitions", "repetitions per object in bench-time",
                  [](BenchConfig& c) -> int& { return c.timing_repetitions; }),
    };
    return table;
}

const Entry& find(const std::string& key) {
    for (const auto& e : entries()) {
        if (e.key == key) return e;
    }
    throw ConfigurationError("unknown config key '" + key + "'");
}

}  // namespace

TrainConfig BenchConfig::default_mirror_training() {
    TrainConfig t;
    t.learning_rate = 3e-3;
    t.epochs = 400;
    t.batch_size = 8;
    return t;
}

EvalConfig BenchConfig::evaluation() const {
    auto e = eval;
    e.sdf = sdf;
    e.threads = threads;
    return e;
}

void BenchConfig::validate() const {
    if (threads < 1) throw InvalidInput("threads must be >= 1");
    dataset.validate();
    if (latent_dim < 1) throw InvalidInput("latent_dim must be >= 1");
    if (hidden.empty()) throw InvalidInput("hidden needs at least one layer");
    for (int w : hidden) {
        if (w < 1) throw InvalidInput("hidden widths must be >= 1");
    }
    sampling.validate();
    sdf.validate();
    mirror.validate();
    eval.validate();
    if (eval.partial_view.free_space_steps < 0 || !(eval.partial_view.spacing > 0.0) ||
        eval.partial_view.pixel_stride < 1) {
        throw InvalidInput("partial-view settings out of range");
    }
    if (timing_objects < 1 || timing_repetitions < 1) throw InvalidInput("timing counts must be >= 1");
}

std::vector<ConfigKey> config_keys() {
    std::vector<ConfigKey> out;
    for (const auto& e : entries()) out.push_back({e.key, e.description});
    return out;
}

void set_config_value(BenchConfig& cfg, const std::string& key, const std::string& value) {
    try {
        find(key).set(cfg, value);
    } catch (const ConfigurationError& e) {
        throw ConfigurationError(key + ": " + e.what());
    }
}

std::string get_config_value(const BenchConfig& cfg, const std::string& key) { return find(key).get(cfg); }

void apply_config_text(BenchConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::set<std::string> seen;
    int number = 0;
    for (std::string line; std::getline(in, line);) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigurationError("line " + std::to_string(number) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigurationError("line " + std::to_string(number) + ": repeated key " + key);
        find(key);
        pairs.emplace_back(key, value);
    }
    for (const auto& [k, v] : pairs) {
        if (k == "preset") set_config_value(cfg, k, v);
    }
    for (const auto& [k, v] : pairs) {
        if (k != "preset") set_config_value(cfg, k, v);
    }
}

BenchConfig load_config(const std::filesystem::path& path, BenchConfig base) {
    if (!std::filesystem::exists(path)) throw MissingArtifact(path.string());
    note_file_access();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream text;
    text << in.rdbuf();
    apply_config_text(base, text.str());
    return base;
}

std::string dump_config(const BenchConfig& cfg) {
    std::string out;
    for (const auto& e : entries()) out += std::string(e.key) + " = " + e.get(cfg) + "\n";
    return out;
}

}  // namespace recbench
