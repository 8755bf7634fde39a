#pragma once

#include "recbench/depth.hpp"
#include "recbench/geometry.hpp"
#include "recbench/shapes.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace recbench {

struct DatasetConfig {
    std::vector<Category> categories{all_categories().begin(), all_categories().end()};
    int train_count = 30;
    int test_count = 10;
    int views_per_instance = 5;
    int image_size = 64;
    double fov_deg = 60.0;
    double camera_radius = 2.0;
    double max_elevation_deg = 60.0;

    /// Throws InvalidInput on counts < 1, duplicate categories or a camera
    /// radius that does not clear the unit sphere.
    void validate() const;
    CameraModel intrinsics() const;
};

/// Cameras at camera_radius looking at the origin, uniform over the sphere
/// band |elevation| <= max_elevation_deg.
std::vector<CameraModel> camera_ring(const DatasetConfig& cfg, std::uint64_t seed);

struct InstanceRecord {
    Category category = Category::bottle;
    std::string split;  ///< "train" or "test"
    std::string id;     ///< zero-padded index within (category, split)
    ShapeSpec shape;

    /// <root>/<category>/<split>/<id>
    std::filesystem::path directory(const std::filesystem::path& root) const;
};

struct Dataset {
    std::filesystem::path root;
    DatasetConfig config;
    std::uint64_t seed = 0;
    std::vector<InstanceRecord> instances;

    std::vector<InstanceRecord> split(const std::string& name) const;
};

struct View {
    DepthImage depth;
    CameraModel cam;
};

/// Writes every mesh and view plus <out>/manifest.txt. Shapes and cameras of an
/// instance depend only on (seed, category, split, index), so output is
/// bit-identical for equal arguments and any thread count.
Dataset generate_dataset(const std::filesystem::path& out, const DatasetConfig& cfg, std::uint64_t seed,
                         int threads = 1);

/// Reads <root>/manifest.txt. Throws MissingArtifact when it is absent.
Dataset load_dataset(const std::filesystem::path& root);

TriangleMesh load_mesh(const Dataset& dataset, const InstanceRecord& instance);
std::vector<View> load_views(const Dataset& dataset, const InstanceRecord& instance);

/// Seed of one instance; also used for its cameras and ground-truth samples.
std::uint64_t instance_seed(std::uint64_t seed, Category category, const std::string& split, int index);

}  // namespace recbench
