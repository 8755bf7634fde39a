#include "recbench/sdf.hpp"

#include "recbench/binary_io.hpp"
#include "recbench/errors.hpp"
#include "recbench/io_stats.hpp"
#include "recbench/parallel.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace recbench {

namespace {

constexpr double kOriginTolerance = 1e-12;

std::array<Vec3, 16> make_parity_directions() {
    std::array<Vec3, 16> dirs;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / 16.0;
        const double r = std::sqrt(1.0 - z * z);
        const double phi = 0.3 + golden * static_cast<double>(i);
        dirs[i] = Vec3(r * std::cos(phi), r * std::sin(phi), z).normalized();
    }
    return dirs;
}

const std::array<Vec3, 16> kParityDirections = make_parity_directions();

template <typename ForEachHit>
std::optional<bool> parity_from_hits(ForEachHit&& for_each_hit) {
    int crossings = 0;
    bool grazing = false;
    for_each_hit([&](const RayHit& hit) {
        ++crossings;
        if (hit.grazing || hit.t < kOriginTolerance) grazing = true;
    });
    if (grazing) return std::nullopt;
    return crossings % 2 == 1;
}

std::optional<bool> inside_by_parity_brute(const TriangleMesh& mesh, const Point3& p,
                                           const Vec3& dir) {
    return parity_from_hits([&](auto&& visit) {
        for (const auto& tri : mesh.triangles) {
            if (auto hit = intersect_triangle(p, dir, mesh.vertices[tri[0]],
                                              mesh.vertices[tri[1]], mesh.vertices[tri[2]])) {
                visit(*hit);
            }
        }
    });
}

// First trustworthy parity over the probe directions. A point that grazes
// along all of them sits on an edge to within tolerance and is reported outside.
template <typename Parity>
bool resolve_inside(Parity&& parity) {
    for (const auto& dir : kParityDirections) {
        if (auto inside = parity(dir)) return *inside;
    }
    return false;
}

}  // namespace

std::span<const Vec3> parity_directions() { return kParityDirections; }

std::optional<bool> inside_by_parity(const TriangleBvh& bvh, const Point3& p, const Vec3& dir) {
    return parity_from_hits([&](auto&& visit) { bvh.for_each_hit(p, dir, visit); });
}

double signed_distance(const TriangleMesh& mesh, const Point3& p) {
    if (mesh.empty()) throw InvalidInput("signed_distance: empty mesh");
    const double dist = unsigned_distance_brute(mesh, p);
    if (dist == 0.0) return 0.0;
    const bool inside =
        resolve_inside([&](const Vec3& dir) { return inside_by_parity_brute(mesh, p, dir); });
    return inside ? -dist : dist;
}

SignedDistanceField::SignedDistanceField(const TriangleMesh& mesh) : bvh_(mesh) {
    if (mesh.empty()) throw InvalidInput("SignedDistanceField: empty mesh");
}

double SignedDistanceField::operator()(const Point3& p) const {
    const double dist = bvh_.unsigned_distance(p);
    if (dist == 0.0) return 0.0;
    const bool inside =
        resolve_inside([&](const Vec3& dir) { return inside_by_parity(bvh_, p, dir); });
    return inside ? -dist : dist;
}

// ---------------------------------------------------------------------------

void SamplingConfig::validate() const {
    if (!(near_surface_fraction >= 0.0 && near_surface_fraction <= 1.0)) {
        throw InvalidInput("near_surface_fraction must lie in [0, 1]");
    }
    if (!(surface_noise_sigma >= 0.0) || !std::isfinite(surface_noise_sigma)) {
        throw InvalidInput("surface_noise_sigma must be >= 0");
    }
    if (negative_floor_tau && !(*negative_floor_tau >= 0.0)) {
        throw InvalidInput("negative_floor_tau must be >= 0");
    }
    if (!(ball_radius > 0.0)) throw InvalidInput("ball_radius must be positive");
}

SamplingConfig SamplingConfig::defaults_for(const TriangleMesh& mesh) {
    SamplingConfig cfg;
    if (!mesh.is_watertight()) cfg.negative_floor_tau = 0.05;
    return cfg;
}

std::vector<SdfSample> sample_training_set(const TriangleMesh& mesh, const SamplingConfig& cfg,
                                           std::uint64_t seed, int threads) {
    cfg.validate();
    if (cfg.total_count == 0) return {};
    if (mesh.empty()) throw InvalidInput("sample_training_set: empty mesh");

    const auto near_count = static_cast<std::size_t>(
        std::llround(cfg.near_surface_fraction * static_cast<double>(cfg.total_count)));
    std::vector<SdfSample> samples(cfg.total_count);

    // All randomness is drawn up front on one stream so the result does not
    // depend on how the distance evaluation below is split across threads.
    const PointCloud surface = sample_surface(mesh, near_count, seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t i = 0; i < near_count; ++i) {
        Vec3 offset(noise(rng), noise(rng), noise(rng));
        samples[i].point = surface[i] + cfg.surface_noise_sigma * offset;
    }
    for (std::size_t i = near_count; i < cfg.total_count; ++i) {
        Vec3 q;
        do {
            q = Vec3(unit(rng), unit(rng), unit(rng));
        } while (q.squaredNorm() > 1.0);
        samples[i].point = cfg.ball_radius * q;
    }

    const SignedDistanceField field(mesh);
    parallel_for(samples.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) samples[i].sdf = field(samples[i].point);
    });

    if (cfg.negative_floor_tau) {
        const double floor = -*cfg.negative_floor_tau;
        std::erase_if(samples, [floor](const SdfSample& s) { return s.sdf < floor; });
    }
    return samples;
}

// ---------------------------------------------------------------------------

double extraction_spacing(int grid_resolution, double domain_half_extent) {
    return 2.0 * domain_half_extent / grid_resolution;
}

PointCloud extract_surface_points(const BatchSdfFn& sdf, int grid_resolution, double iso_epsilon,
                                  const ExtractionOptions& options) {
    if (grid_resolution < 8) throw InvalidInput("grid_resolution must be at least 8");
    const int n = grid_resolution;
    const double h = extraction_spacing(n, options.domain_half_extent);
    const double lo = -options.domain_half_extent;
    const double step = options.gradient_step;
    auto coord = [&](int i) { return lo + (i + 0.5) * h; };

    std::vector<std::vector<Point3>> slabs(static_cast<std::size_t>(n));
    parallel_for(slabs.size(), options.threads, [&](std::size_t i0, std::size_t i1) {
        std::vector<Point3> grid(static_cast<std::size_t>(n) * n);
        std::vector<double> values(grid.size());
        for (std::size_t i = i0; i < i1; ++i) {
            const double x = coord(static_cast<int>(i));
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    grid[static_cast<std::size_t>(j) * n + k] = Point3(x, coord(j), coord(k));
                }
            }
            sdf(grid, values);

            std::vector<Point3> kept;
            std::vector<double> kept_values;
            for (std::size_t g = 0; g < grid.size(); ++g) {
                if (std::abs(values[g]) <= iso_epsilon) {
                    kept.push_back(grid[g]);
                    kept_values.push_back(values[g]);
                }
            }
            if (kept.empty()) continue;

            std::vector<Point3> probes;
            probes.reserve(kept.size() * 6);
            for (const auto& p : kept) {
                for (int axis = 0; axis < 3; ++axis) {
                    Point3 plus = p, minus = p;
                    plus[axis] += step;
                    minus[axis] -= step;
                    probes.push_back(plus);
                    probes.push_back(minus);
                }
            }
            std::vector<double> probe_values(probes.size());
            sdf(probes, probe_values);

            for (std::size_t q = 0; q < kept.size(); ++q) {
                Vec3 grad;
                for (int axis = 0; axis < 3; ++axis) {
                    grad[axis] = (probe_values[6 * q + 2 * axis] - probe_values[6 * q + 2 * axis + 1]) /
                                 (2.0 * step);
                }
                const double g2 = grad.squaredNorm();
                if (std::sqrt(g2) >= 1e-8) kept[q] -= (kept_values[q] / g2) * grad;
            }
            slabs[i] = std::move(kept);
        }
    });

    PointCloud cloud;
    std::size_t total = 0;
    for (const auto& s : slabs) total += s.size();
    cloud.reserve(total);
    for (const auto& s : slabs) {
        for (const auto& p : s) cloud.add(p, PointSource::generated);
    }
    return cloud;
}

PointCloud extract_surface_points(const PointSdfFn& sdf, int grid_resolution, double iso_epsilon,
                                  const ExtractionOptions& options) {
    BatchSdfFn batch = [&sdf](std::span<const Point3> points, std::span<double> values) {
        for (std::size_t i = 0; i < points.size(); ++i) values[i] = sdf(points[i]);
    };
    return extract_surface_points(batch, grid_resolution, iso_epsilon, options);
}

// ---------------------------------------------------------------------------

void write_samples(const std::filesystem::path& path, std::span<const SdfSample> samples,
                   const SampleSetHeader& header) {
    note_file_access();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(17);
    const auto& cfg = header.config;
    out << "RBSAMPLES 1\n"
        << "count " << samples.size() << '\n'
        << "seed " << header.seed << '\n'
        << "total_count " << cfg.total_count << '\n'
        << "near_surface_fraction " << cfg.near_surface_fraction << '\n'
        << "surface_noise_sigma " << cfg.surface_noise_sigma << '\n'
        << "negative_floor_tau ";
    if (cfg.negative_floor_tau) {
        out << *cfg.negative_floor_tau;
    } else {
        out << "disabled";
    }
    out << "\nball_radius " << cfg.ball_radius << "\nend\n";
    for (const auto& s : samples) {
        binary::put_f64(out, s.point.x());
        binary::put_f64(out, s.point.y());
        binary::put_f64(out, s.point.z());
        binary::put_f64(out, s.sdf);
    }
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<SdfSample> read_samples(const std::filesystem::path& path, SampleSetHeader* header) {
    if (!std::filesystem::exists(path)) throw MissingArtifact(path.string());
    note_file_access();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line) || line != "RBSAMPLES 1") {
        throw InvalidInput(path.string() + ": not a sample set");
    }
    SampleSetHeader parsed;
    std::size_t count = 0;
    bool have_count = false;
    while (std::getline(in, line) && line != "end") {
        std::istringstream ss(line);
        std::string key, value;
        ss >> key >> value;
        try {
            if (key == "count") {
                count = std::stoull(value);
                have_count = true;
            } else if (key == "seed") {
                parsed.seed = std::stoull(value);
            } else if (key == "total_count") {
                parsed.config.total_count = std::stoull(value);
            } else if (key == "near_surface_fraction") {
                parsed.config.near_surface_fraction = std::stod(value);
            } else if (key == "surface_noise_sigma") {
                parsed.config.surface_noise_sigma = std::stod(value);
            } else if (key == "negative_floor_tau") {
                if (value == "disabled") {
                    parsed.config.negative_floor_tau.reset();
                } else {
                    parsed.config.negative_floor_tau = std::stod(value);
                }
            } else if (key == "ball_radius") {
                parsed.config.ball_radius = std::stod(value);
            }
        } catch (const std::logic_error&) {
            throw InvalidInput(path.string() + ": bad header field '" + key + "'");
        }
    }
    if (line != "end" || !have_count) throw InvalidInput(path.string() + ": truncated header");

    std::vector<SdfSample> samples(count);
    for (auto& s : samples) {
        if (!binary::get_f64(in, s.point.x()) || !binary::get_f64(in, s.point.y()) ||
            !binary::get_f64(in, s.point.z()) || !binary::get_f64(in, s.sdf)) {
            throw InvalidInput(path.string() + ": sample records truncated");
        }
    }
    if (header) *header = parsed;
    return samples;
}

}  // namespace recbench
