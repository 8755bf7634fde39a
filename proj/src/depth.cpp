#include "recbench/depth.hpp"

#include "recbench/errors.hpp"
#include "recbench/io_stats.hpp"
#include "recbench/parallel.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace recbench {

DepthImage::DepthImage(int width, int height) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw InvalidInput("depth image dimensions must be positive");
    depth_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0);
}

std::size_t DepthImage::valid_count() const noexcept {
    std::size_t n = 0;
    for (double d : depth_) n += d > 0.0;
    return n;
}

DepthImage DepthImage::flipped_horizontally() const {
    DepthImage out(width_, height_);
    for (int v = 0; v < height_; ++v) {
        for (int u = 0; u < width_; ++u) out.at(u, v) = at(width_ - 1 - u, v);
    }
    return out;
}

DepthImage DepthImage::flipped_vertically() const {
    DepthImage out(width_, height_);
    for (int v = 0; v < height_; ++v) {
        for (int u = 0; u < width_; ++u) out.at(u, v) = at(u, height_ - 1 - v);
    }
    return out;
}

void DepthImage::validate() const {
    for (double d : depth_) {
        if (!std::isfinite(d) || d < 0.0) throw InvalidInput("depth image holds an invalid value");
    }
}

// ---------------------------------------------------------------------------

DepthImage render_depth(const TriangleBvh& bvh, const CameraModel& cam, int threads) {
    cam.validate();
    DepthImage image = DepthImage::for_camera(cam);
    const TriangleMesh& mesh = bvh.mesh();
    if (mesh.empty()) return image;

    const Point3 center = mesh.bounds().center();
    double radius = 0.0;
    for (const auto& v : mesh.vertices) radius = std::max(radius, (v - center).norm());
    if ((cam.position() - center).norm() <= radius) {
        throw ConfigurationError("camera lies inside the object's bounding sphere");
    }

    const Point3 origin = cam.position();
    const Mat3& rot = cam.pose.rotation();
    parallel_for(static_cast<std::size_t>(cam.height), threads, [&](std::size_t v0, std::size_t v1) {
        for (auto v = static_cast<int>(v0); v < static_cast<int>(v1); ++v) {
            for (int u = 0; u < cam.width; ++u) {
                const Vec3 dir = rot * cam.pixel_ray(u, v);
                if (auto hit = bvh.closest_hit(origin, dir)) image.at(u, v) = hit->t;
            }
        }
    });
    return image;
}

DepthImage render_depth(const TriangleMesh& mesh, const CameraModel& cam,
                        const RenderOptions& options) {
    if (options.use_bvh) return render_depth(TriangleBvh(mesh), cam, options.threads);

    cam.validate();
    DepthImage image = DepthImage::for_camera(cam);
    if (mesh.empty()) return image;
    const Point3 center = mesh.bounds().center();
    double radius = 0.0;
    for (const auto& v : mesh.vertices) radius = std::max(radius, (v - center).norm());
    if ((cam.position() - center).norm() <= radius) {
        throw ConfigurationError("camera lies inside the object's bounding sphere");
    }
    const Point3 origin = cam.position();
    parallel_for(static_cast<std::size_t>(cam.height), options.threads,
                 [&](std::size_t v0, std::size_t v1) {
                     for (auto v = static_cast<int>(v0); v < static_cast<int>(v1); ++v) {
                         for (int u = 0; u < cam.width; ++u) {
                             const Vec3 dir = cam.pose.rotation() * cam.pixel_ray(u, v);
                             if (auto hit = closest_hit_brute(mesh, origin, dir)) {
                                 image.at(u, v) = hit->t;
                             }
                         }
                     }
                 });
    return image;
}

PointCloud back_project(const DepthImage& depth, const CameraModel& cam, PointSource tag) {
    if (!depth.matches(cam)) {
        throw InvalidInput("depth image is " + std::to_string(depth.width()) + "x" +
                           std::to_string(depth.height()) + " but camera is " +
                           std::to_string(cam.width) + "x" + std::to_string(cam.height));
    }
    PointCloud cloud;
    cloud.reserve(depth.valid_count());
    for (int v = 0; v < depth.height(); ++v) {
        for (int u = 0; u < depth.width(); ++u) {
            const double z = depth.at(u, v);
            if (!(z > 0.0)) continue;
            cloud.add(cam.pose.apply(z * cam.pixel_ray(u, v)), tag);
        }
    }
    return cloud;
}

DepthImage splat_cloud(const PointCloud& cloud, const CameraModel& cam) {
    cam.validate();
    DepthImage image = DepthImage::for_camera(cam);
    const RigidTransform world_to_cam = cam.pose.inverse();
    for (const auto& p : cloud.points()) {
        const Point3 q = world_to_cam.apply(p);
        if (!(q.z() > 0.0)) continue;
        const double fu = std::floor(cam.fx * q.x() / q.z() + cam.cx);
        const double fv = std::floor(cam.fy * q.y() / q.z() + cam.cy);
        if (!(fu >= 0.0 && fu < cam.width && fv >= 0.0 && fv < cam.height)) continue;
        double& cell = image.at(static_cast<int>(fu), static_cast<int>(fv));
        if (cell == 0.0 || q.z() < cell) cell = q.z();
    }
    return image;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

void put_le_float(std::ostream& out, float value) {
    auto bits = std::bit_cast<std::uint32_t>(value);
    unsigned char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

float get_float(std::istream& in, bool little_endian) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw InvalidInput("PFM data truncated");
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) {
        const int shift = little_endian ? 8 * i : 8 * (3 - i);
        bits |= static_cast<std::uint32_t>(bytes[i]) << shift;
    }
    return std::bit_cast<float>(bits);
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const DepthImage& depth) {
    note_file_access();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "Pf\n" << depth.width() << ' ' << depth.height() << "\n-1.0\n";
    for (int v = depth.height() - 1; v >= 0; --v) {
        for (int u = 0; u < depth.width(); ++u) put_le_float(out, static_cast<float>(depth.at(u, v)));
    }
    if (!out) throw IoError("failed writing " + path.string());
}

DepthImage read_pfm(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingArtifact(path.string());
    note_file_access();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string magic;
    int width = 0, height = 0;
    double scale = 0.0;
    in >> magic >> width >> height >> scale;
    in.get();  // single whitespace byte before the raster
    if (!in || magic != "Pf") throw InvalidInput(path.string() + ": not a single-channel PFM");
    if (width <= 0 || height <= 0) throw InvalidInput(path.string() + ": bad PFM dimensions");
    const bool little_endian = scale < 0.0;
    DepthImage depth(width, height);
    for (int v = height - 1; v >= 0; --v) {
        for (int u = 0; u < width; ++u) depth.at(u, v) = get_float(in, little_endian);
    }
    return depth;
}

void write_camera(const std::filesystem::path& path, const CameraModel& cam) {
    note_file_access();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(17);
    out << "intrinsics " << cam.fx << ' ' << cam.fy << ' ' << cam.cx << ' ' << cam.cy << '\n';
    out << "size " << cam.width << ' ' << cam.height << '\n';
    out << "rotation";
    const Mat3& r = cam.pose.rotation();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) out << ' ' << r(i, j);
    }
    const Vec3& t = cam.pose.translation();
    out << "\ntranslation " << t.x() << ' ' << t.y() << ' ' << t.z() << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

CameraModel read_camera(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingArtifact(path.string());
    note_file_access();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    CameraModel cam;
    Mat3 r = Mat3::Identity();
    Vec3 t = Vec3::Zero();
    int seen = 0;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        bool ok = true;
        if (key == "intrinsics") {
            ok = static_cast<bool>(ss >> cam.fx >> cam.fy >> cam.cx >> cam.cy);
            seen |= 1;
        } else if (key == "size") {
            ok = static_cast<bool>(ss >> cam.width >> cam.height);
            seen |= 2;
        } else if (key == "rotation") {
            for (int i = 0; i < 9 && ok; ++i) ok = static_cast<bool>(ss >> r(i / 3, i % 3));
            seen |= 4;
        } else if (key == "translation") {
            ok = static_cast<bool>(ss >> t.x() >> t.y() >> t.z());
            seen |= 8;
        }
        if (!ok) throw InvalidInput(path.string() + ": malformed '" + key + "' record");
    }
    if (seen != 15) throw InvalidInput(path.string() + ": incomplete camera file");
    cam.pose = RigidTransform(r, t);
    cam.validate();
    return cam;
}

}  // namespace recbench
