#include "recbench/dataset.hpp"

#include "recbench/errors.hpp"
#include "recbench/io_stats.hpp"
#include "recbench/mesh_io.hpp"
#include "recbench/parallel.hpp"
#include "recbench/raycast.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

namespace recbench {

namespace {

constexpr const char* kManifestMagic = "RBDATASET 1";

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string padded(int index) {
    std::ostringstream s;
    s << std::setw(3) << std::setfill('0') << index;
    return s.str();
}

std::string view_stem(int k) {
    std::ostringstream s;
    s << "view_" << std::setw(2) << std::setfill('0') << k;
    return s.str();
}

}  // namespace

void DatasetConfig::validate() const {
    if (categories.empty()) throw InvalidInput("dataset needs at least one category");
    if (std::set<Category>(categories.begin(), categories.end()).size() != categories.size()) {
        throw InvalidInput("dataset categories repeat");
    }
    if (train_count < 1 || test_count < 1) throw InvalidInput("train_count and test_count must be >= 1");
    if (views_per_instance < 1) throw InvalidInput("views_per_instance must be >= 1");
    if (image_size < 1) throw InvalidInput("image_size must be >= 1");
    if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw InvalidInput("fov_deg must be in (0, 180)");
    if (!(camera_radius > 1.0)) throw InvalidInput("camera_radius must exceed the unit sphere");
    if (!(max_elevation_deg >= 0.0 && max_elevation_deg <= 90.0)) {
        throw InvalidInput("max_elevation_deg must be in [0, 90]");
    }
}

CameraModel DatasetConfig::intrinsics() const { return CameraModel::with_fov(image_size, image_size, fov_deg); }

std::vector<CameraModel> camera_ring(const DatasetConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    const double zmax = std::sin(cfg.max_elevation_deg * M_PI / 180.0);
    std::uniform_real_distribution<double> height(-zmax, zmax), azimuth(0.0, 2.0 * M_PI);
    std::vector<CameraModel> cams;
    for (int k = 0; k < cfg.views_per_instance; ++k) {
        // Uniform z gives uniform area on the sphere (Archimedes).
        const double z = height(rng), phi = azimuth(rng);
        const double r = std::sqrt(1.0 - z * z);
        const Point3 eye = cfg.camera_radius * Point3(r * std::cos(phi), r * std::sin(phi), z);
        auto cam = cfg.intrinsics();
        cam.pose = look_at(eye, Point3::Zero());
        cams.push_back(cam);
    }
    return cams;
}

std::filesystem::path InstanceRecord::directory(const std::filesystem::path& root) const {
    return root / to_string(category) / split / id;
}

std::vector<InstanceRecord> Dataset::split(const std::string& name) const {
    std::vector<InstanceRecord> out;
    for (const auto& i : instances) {
        if (i.split == name) out.push_back(i);
    }
    return out;
}

std::uint64_t instance_seed(std::uint64_t seed, Category category, const std::string& split, int index) {
    std::uint64_t h = splitmix(seed);
    h = splitmix(h ^ static_cast<std::uint64_t>(category));
    h = splitmix(h ^ (split == "train" ? 0x7ea1ULL : 0x7e57ULL));
    return splitmix(h ^ static_cast<std::uint64_t>(index));
}

Dataset generate_dataset(const std::filesystem::path& out, const DatasetConfig& cfg, std::uint64_t seed,
                         int threads) {
    cfg.validate();
    Dataset ds;
    ds.root = out;
    ds.config = cfg;
    ds.seed = seed;
    std::vector<std::uint64_t> seeds;
    for (auto c : cfg.categories) {
        for (const std::string split : {"train", "test"}) {
            const int count = split == "train" ? cfg.train_count : cfg.test_count;
            for (int i = 0; i < count; ++i) {
                const auto s = instance_seed(seed, c, split, i);
                ds.instances.push_back({c, split, padded(i), random_shape_spec(c, s)});
                seeds.push_back(s);
            }
        }
    }

    std::filesystem::create_directories(out);
    parallel_for(ds.instances.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& inst = ds.instances[i];
            const auto dir = inst.directory(out);
            std::filesystem::create_directories(dir / "views");
            const auto mesh = build_shape(inst.shape);
            write_obj(dir / "mesh.obj", mesh);
            const TriangleBvh bvh(mesh);
            const auto cams = camera_ring(cfg, splitmix(seeds[i] ^ 0xca3e7a5ULL));
            for (std::size_t k = 0; k < cams.size(); ++k) {
                const auto stem = view_stem(static_cast<int>(k));
                write_pfm(dir / "views" / (stem + ".pfm"), render_depth(bvh, cams[k]));
                write_camera(dir / "views" / (stem + ".cam"), cams[k]);
            }
        }
    });

    note_file_access();
    std::ofstream manifest(out / "manifest.txt");
    if (!manifest) throw IoError("cannot write " + (out / "manifest.txt").string());
    manifest.precision(17);
    manifest << kManifestMagic << '\n'
             << "seed " << seed << '\n'
             << "train_count " << cfg.train_count << '\n'
             << "test_count " << cfg.test_count << '\n'
             << "views_per_instance " << cfg.views_per_instance << '\n'
             << "image_size " << cfg.image_size << '\n'
             << "fov_deg " << cfg.fov_deg << '\n'
             << "camera_radius " << cfg.camera_radius << '\n'
             << "max_elevation_deg " << cfg.max_elevation_deg << '\n'
             << "categories";
    for (auto c : cfg.categories) manifest << ' ' << to_string(c);
    manifest << '\n';
    for (const auto& inst : ds.instances) {
        manifest << "instance " << to_string(inst.category) << ' ' << inst.split << ' ' << inst.id << ' '
                 << inst.shape.seed;
        for (const auto& [k, v] : inst.shape.parameters) manifest << ' ' << k << '=' << v;
        manifest << '\n';
    }
    if (!manifest) throw IoError("failed writing " + (out / "manifest.txt").string());
    return ds;
}

Dataset load_dataset(const std::filesystem::path& root) {
    const auto path = root / "manifest.txt";
    if (!std::filesystem::exists(path)) throw MissingArtifact(path.string());
    note_file_access();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kManifestMagic) {
        throw InvalidInput(path.string() + ": not a dataset manifest");
    }
    Dataset ds;
    ds.root = root;
    ds.config.categories.clear();
    while (std::getline(in, line)) {
        std::istringstream f(line);
        std::string key;
        if (!(f >> key)) continue;
        if (key == "seed") f >> ds.seed;
        else if (key == "train_count") f >> ds.config.train_count;
        else if (key == "test_count") f >> ds.config.test_count;
        else if (key == "views_per_instance") f >> ds.config.views_per_instance;
        else if (key == "image_size") f >> ds.config.image_size;
        else if (key == "fov_deg") f >> ds.config.fov_deg;
        else if (key == "camera_radius") f >> ds.config.camera_radius;
        else if (key == "max_elevation_deg") f >> ds.config.max_elevation_deg;
        else if (key == "categories") {
            for (std::string c; f >> c;) ds.config.categories.push_back(parse_category(c));
        } else if (key == "instance") {
            InstanceRecord r;
            std::string category;
            f >> category >> r.split >> r.id >> r.shape.seed;
            r.category = parse_category(category);
            r.shape.category = r.category;
            for (std::string kv; f >> kv;) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw InvalidInput(path.string() + ": malformed parameter " + kv);
                r.shape.parameters[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
            }
            r.shape.validate();
            ds.instances.push_back(std::move(r));
        } else {
            throw InvalidInput(path.string() + ": unknown manifest key " + key);
        }
        if (f.fail() && !f.eof()) throw InvalidInput(path.string() + ": malformed line: " + line);
    }
    ds.config.validate();
    return ds;
}

TriangleMesh load_mesh(const Dataset& dataset, const InstanceRecord& instance) {
    return read_obj(instance.directory(dataset.root) / "mesh.obj");
}

std::vector<View> load_views(const Dataset& dataset, const InstanceRecord& instance) {
    const auto dir = instance.directory(dataset.root) / "views";
    std::vector<View> views;
    for (int k = 0; k < dataset.config.views_per_instance; ++k) {
        const auto stem = view_stem(k);
        View v{read_pfm(dir / (stem + ".pfm")), read_camera(dir / (stem + ".cam"))};
        if (!v.depth.matches(v.cam)) throw InvalidInput(dir.string() + ": view and camera sizes differ");
        views.push_back(std::move(v));
    }
    return views;
}

}  // namespace recbench
