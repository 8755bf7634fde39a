#pragma once

#include "recbench/geometry.hpp"

#include <filesystem>
#include <iosfwd>

namespace recbench {

/// Wavefront OBJ, `v` and `f` records only. Faces with more than three
/// corners are fan-triangulated; `v/vt/vn` corner syntax and negative
/// (relative) indices are accepted. Other records are ignored.
TriangleMesh parse_obj(std::istream& in);
TriangleMesh read_obj(const std::filesystem::path& path);

/// Vertices with 17 significant digits so a read-back is exact.
void write_obj(std::ostream& out, const TriangleMesh& mesh);
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

/// ASCII PLY with `x y z` double properties.
void write_ply(std::ostream& out, const PointCloud& cloud);
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);

/// Reads the vertex element of an ASCII PLY; needs at least x, y, z properties.
PointCloud parse_ply(std::istream& in);
PointCloud read_ply(const std::filesystem::path& path);

}  // namespace recbench
