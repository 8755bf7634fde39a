#pragma once

#include "recbench/geometry.hpp"
#include "recbench/raycast.hpp"

#include <filesystem>
#include <vector>

namespace recbench {

/// Row-major z-depth image in meters; 0.0 marks a pixel with no surface.
class DepthImage {
public:
    DepthImage() = default;
    DepthImage(int width, int height);
    static DepthImage for_camera(const CameraModel& cam) { return {cam.width, cam.height}; }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return depth_.size(); }

    double at(int u, int v) const { return depth_[index(u, v)]; }
    double& at(int u, int v) { return depth_[index(u, v)]; }
    bool valid(int u, int v) const { return at(u, v) > 0.0; }
    std::size_t valid_count() const noexcept;

    const std::vector<double>& data() const noexcept { return depth_; }
    std::vector<double>& data() noexcept { return depth_; }

    /// Column order reversed: result(u, v) = this(width - 1 - u, v).
    DepthImage flipped_horizontally() const;
    DepthImage flipped_vertically() const;

    bool matches(const CameraModel& cam) const {
        return cam.width == width_ && cam.height == height_;
    }

    /// Throws InvalidInput if a stored depth is negative or non-finite.
    void validate() const;

private:
    std::size_t index(int u, int v) const {
        return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(u);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> depth_;
};

struct RenderOptions {
    bool use_bvh = true;
    int threads = 1;
};

/// Ray-casts one ray per pixel center and stores the camera-z distance to the
/// nearest triangle. An empty mesh renders all-invalid. Throws
/// ConfigurationError when the camera lies inside the mesh's bounding sphere
/// (vertex bounding-box center, farthest-vertex radius).
DepthImage render_depth(const TriangleMesh& mesh, const CameraModel& cam,
                        const RenderOptions& options = {});
DepthImage render_depth(const TriangleBvh& bvh, const CameraModel& cam, int threads = 1);

/// One world-frame point per valid pixel, in row-major pixel order. Throws
/// InvalidInput when the image and camera sizes differ.
PointCloud back_project(const DepthImage& depth, const CameraModel& cam,
                        PointSource tag = PointSource::observed);

/// Z-buffer projection of a cloud into the camera; each pixel keeps the
/// smallest positive depth. Points behind the camera or outside the image are dropped.
DepthImage splat_cloud(const PointCloud& cloud, const CameraModel& cam);

// --- persistence -----------------------------------------------------------

/// PFM ("Pf", little-endian, scale -1.0), rows stored bottom to top.
/// Depths pass through float32.
void write_pfm(const std::filesystem::path& path, const DepthImage& depth);
DepthImage read_pfm(const std::filesystem::path& path);

/// Camera sidecar: intrinsics, image size, row-major rotation, translation.
void write_camera(const std::filesystem::path& path, const CameraModel& cam);
CameraModel read_camera(const std::filesystem::path& path);

}  // namespace recbench
