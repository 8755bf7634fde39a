#pragma once

#include "recbench/geometry.hpp"
#include "recbench/raycast.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace recbench {

/// A point with its signed distance (negative inside).
struct SdfSample {
    Point3 point = Point3::Zero();
    double sdf = 0.0;
};

/// Training-sample generation settings. Defaults are the desk-scale preset;
/// the full-scale preprocessing used 250,000 and later 5,000,000 samples.
struct SamplingConfig {
    std::size_t total_count = 50'000;
    double near_surface_fraction = 0.9;
    double surface_noise_sigma = 0.02;
    /// Samples with sdf < -tau are discarded. Disabled when empty.
    std::optional<double> negative_floor_tau;
    double ball_radius = 1.1;

    /// Throws InvalidInput if a field is out of range.
    void validate() const;

    /// Defaults, with the negative floor (0.05) enabled for non-watertight input.
    static SamplingConfig defaults_for(const TriangleMesh& mesh);
};

/// Fixed probe directions for ray-parity sign tests. Deliberately not aligned
/// with coordinate axes, so axis-aligned geometry rarely grazes.
std::span<const Vec3> parity_directions();

/// Odd/even crossing count along `dir` from `p`. Returns nullopt when a hit is
/// within tolerance of an edge, a vertex, or the origin, so the count cannot
/// be trusted.
std::optional<bool> inside_by_parity(const TriangleBvh& bvh, const Point3& p, const Vec3& dir);

/// Reference signed distance: brute-force minimum over triangles for the
/// magnitude, ray parity (with direction retry on grazing) for the sign.
/// Throws InvalidInput for an empty mesh.
double signed_distance(const TriangleMesh& mesh, const Point3& p);

/// Accelerated signed distance over a mesh. Produces the same values as
/// signed_distance(mesh, p).
class SignedDistanceField {
public:
    /// Throws InvalidInput for an empty mesh.
    explicit SignedDistanceField(const TriangleMesh& mesh);

    double operator()(const Point3& p) const;
    const TriangleBvh& bvh() const noexcept { return bvh_; }

private:
    TriangleBvh bvh_;
};

/// Near-surface Gaussian-perturbed samples plus uniform samples in the ball,
/// each labelled with its exact signed distance; samples below the negative
/// floor are dropped. Deterministic for a fixed seed and independent of `threads`.
std::vector<SdfSample> sample_training_set(const TriangleMesh& mesh, const SamplingConfig& cfg,
                                           std::uint64_t seed, int threads = 1);

/// Batch evaluator: writes f(points[i]) into values[i].
using BatchSdfFn = std::function<void(std::span<const Point3> points, std::span<double> values)>;
using PointSdfFn = std::function<double(const Point3&)>;

struct ExtractionOptions {
    double domain_half_extent = 1.1;
    double gradient_step = 1e-4;  ///< central-difference step for the refinement gradient
    int threads = 1;
};

/// Evaluates the field at the cell centers of a resolution^3 grid over
/// [-1.1, 1.1]^3 (spacing 2.2 / resolution), keeps points with |sdf| <= iso_epsilon
/// and moves each one Newton step p -= sdf * g / |g|^2 (skipped when |g| < 1e-8).
/// Output order is x-major grid order regardless of `threads`. All points are
/// tagged `generated`. Throws InvalidInput for resolution < 8.
PointCloud extract_surface_points(const BatchSdfFn& sdf, int grid_resolution, double iso_epsilon,
                                  const ExtractionOptions& options = {});
PointCloud extract_surface_points(const PointSdfFn& sdf, int grid_resolution, double iso_epsilon,
                                  const ExtractionOptions& options = {});

/// Grid spacing used by extract_surface_points.
double extraction_spacing(int grid_resolution, double domain_half_extent = 1.1);

// --- persistence -----------------------------------------------------------

struct SampleSetHeader {
    std::uint64_t seed = 0;
    SamplingConfig config;
};

/// Text header (count, seed, config) terminated by an `end` line, followed by
/// little-endian records of 3 x float64 point and 1 x float64 sdf.
void write_samples(const std::filesystem::path& path, std::span<const SdfSample> samples,
                   const SampleSetHeader& header);
std::vector<SdfSample> read_samples(const std::filesystem::path& path,
                                    SampleSetHeader* header = nullptr);

}  // namespace recbench
