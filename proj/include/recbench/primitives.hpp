#pragma once

#include "recbench/geometry.hpp"

namespace recbench::primitives {

/// Subdivided icosahedron projected onto a sphere. Subdivision 0 is the
/// icosahedron itself; each level quadruples the triangle count. The mesh is
/// symmetric under reflection through each coordinate plane.
TriangleMesh icosphere(int subdivisions, double radius = 1.0,
                       const Point3& center = Point3::Zero());

/// Latitude/longitude sphere with poles on the z axis.
TriangleMesh uv_sphere(int rings, int segments, double radius = 1.0);

/// Axis-aligned box, 12 triangles.
TriangleMesh box(const Point3& lo, const Point3& hi);

/// Closed surface of revolution about the z axis. `profile` holds (r, z)
/// pairs; the first and last lie on the axis (r = 0), all others have r > 0.
/// Traversed with the enclosed region on the left, faces point outward.
TriangleMesh revolve(const std::vector<Eigen::Vector2d>& profile, int segments);

/// Capped cylinder along z, centered at the origin.
TriangleMesh cylinder(double radius, double height, int segments = 48);

/// Cylinder of length `length` with hemispherical ends, along z.
TriangleMesh capsule(double radius, double length, int segments = 48, int arc_steps = 12);

/// Upper hemisphere of `radius` with a concentric hollow of radius - thickness,
/// closed by a flat annulus at z = 0.
TriangleMesh hemisphere_shell(double radius, double thickness, int segments = 48, int arc_steps = 16);

/// Icosphere scaled by the semi-axes.
TriangleMesh ellipsoid(const Vec3& semi_axes, int subdivisions = 3);

/// Tube of radius `minor` around the arc of radius `major` in the xz plane,
/// for angles in [-half_angle, half_angle] from +x, with flat end caps.
TriangleMesh torus_arc(double major, double minor, double half_angle, int arc_steps = 24,
                       int tube_segments = 16);

/// Signed enclosed volume; positive when faces point outward.
double signed_volume(const TriangleMesh& mesh);

/// Largest distance between the polyhedral icosphere and the true sphere of
/// the same radius (attained at face centers).
double icosphere_chordal_error(int subdivisions, double radius = 1.0);

}  // namespace recbench::primitives
