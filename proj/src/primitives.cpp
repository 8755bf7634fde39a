#include "recbench/primitives.hpp"

#include "recbench/errors.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace recbench::primitives {

TriangleMesh icosphere(int subdivisions, double radius, const Point3& center) {
    if (subdivisions < 0) throw InvalidInput("icosphere: negative subdivision level");

    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Point3> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& v : verts) v.normalize();
    std::vector<Triangle> tris = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
        auto mid = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = std::minmax(a, b);
            if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
            verts.push_back((verts[a] + verts[b]).normalized());
            const auto idx = static_cast<std::uint32_t>(verts.size() - 1);
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<Triangle> next;
        next.reserve(tris.size() * 4);
        for (const auto& t : tris) {
            const auto ab = mid(t[0], t[1]);
            const auto bc = mid(t[1], t[2]);
            const auto ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        tris = std::move(next);
    }

    TriangleMesh mesh;
    mesh.triangles = std::move(tris);
    mesh.vertices.reserve(verts.size());
    for (const auto& v : verts) mesh.vertices.push_back(center + radius * v);
    return mesh;
}

TriangleMesh uv_sphere(int rings, int segments, double radius) {
    if (rings < 2 || segments < 3) throw InvalidInput("uv_sphere: too few rings or segments");
    TriangleMesh mesh;
    mesh.vertices.push_back({0, 0, radius});
    for (int r = 1; r < rings; ++r) {
        const double theta = M_PI * r / rings;
        for (int s = 0; s < segments; ++s) {
            const double phi = 2.0 * M_PI * s / segments;
            mesh.vertices.push_back({radius * std::sin(theta) * std::cos(phi),
                                     radius * std::sin(theta) * std::sin(phi),
                                     radius * std::cos(theta)});
        }
    }
    mesh.vertices.push_back({0, 0, -radius});
    const auto south = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
    auto ring_vertex = [&](int r, int s) {
        return static_cast<std::uint32_t>(1 + (r - 1) * segments + (s % segments));
    };
    for (int s = 0; s < segments; ++s) {
        mesh.triangles.push_back({0, ring_vertex(1, s), ring_vertex(1, s + 1)});
    }
    for (int r = 1; r + 1 < rings; ++r) {
        for (int s = 0; s < segments; ++s) {
            const auto a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
            const auto c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
            mesh.triangles.push_back({a, c, d});
            mesh.triangles.push_back({a, d, b});
        }
    }
    for (int s = 0; s < segments; ++s) {
        mesh.triangles.push_back({south, ring_vertex(rings - 1, s + 1), ring_vertex(rings - 1, s)});
    }
    return mesh;
}

TriangleMesh box(const Point3& lo, const Point3& hi) {
    TriangleMesh mesh;
    for (int i = 0; i < 8; ++i) {
        mesh.vertices.push_back({(i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(),
                                 (i & 4) ? hi.z() : lo.z()});
    }
    // Outward winding; corner index bits are (x, y, z).
    mesh.triangles = {
        {0, 2, 3}, {0, 3, 1},  // z = lo
        {4, 5, 7}, {4, 7, 6},  // z = hi
        {0, 1, 5}, {0, 5, 4},  // y = lo
        {2, 6, 7}, {2, 7, 3},  // y = hi
        {0, 4, 6}, {0, 6, 2},  // x = lo
        {1, 3, 7}, {1, 7, 5},  // x = hi
    };
    return mesh;
}

TriangleMesh revolve(const std::vector<Eigen::Vector2d>& profile, int segments) {
    if (segments < 3) throw InvalidInput("revolve: too few segments");
    if (profile.size() < 3) throw InvalidInput("revolve: profile needs at least three points");
    if (profile.front().x() != 0.0 || profile.back().x() != 0.0) {
        throw InvalidInput("revolve: profile must start and end on the axis");
    }
    const int rings = static_cast<int>(profile.size()) - 2;
    for (int i = 1; i <= rings; ++i) {
        if (!(profile[static_cast<std::size_t>(i)].x() > 0.0)) {
            throw InvalidInput("revolve: interior profile points must have r > 0");
        }
    }
    TriangleMesh mesh;
    mesh.vertices.push_back({0, 0, profile.front().y()});
    for (int i = 1; i <= rings; ++i) {
        const auto& q = profile[static_cast<std::size_t>(i)];
        for (int s = 0; s < segments; ++s) {
            const double phi = 2.0 * M_PI * s / segments;
            mesh.vertices.push_back({q.x() * std::cos(phi), q.x() * std::sin(phi), q.y()});
        }
    }
    mesh.vertices.push_back({0, 0, profile.back().y()});
    const auto top = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
    auto at = [&](int ring, int s) {
        return static_cast<std::uint32_t>(1 + (ring - 1) * segments + (s % segments));
    };
    for (int s = 0; s < segments; ++s) mesh.triangles.push_back({0, at(1, s + 1), at(1, s)});
    for (int ring = 1; ring < rings; ++ring) {
        for (int s = 0; s < segments; ++s) {
            mesh.triangles.push_back({at(ring, s), at(ring, s + 1), at(ring + 1, s + 1)});
            mesh.triangles.push_back({at(ring, s), at(ring + 1, s + 1), at(ring + 1, s)});
        }
    }
    for (int s = 0; s < segments; ++s) mesh.triangles.push_back({top, at(rings, s), at(rings, s + 1)});
    return mesh;
}

TriangleMesh cylinder(double radius, double height, int segments) {
    if (!(radius > 0.0) || !(height > 0.0)) throw InvalidInput("cylinder: non-positive size");
    return revolve({{0, -height / 2}, {radius, -height / 2}, {radius, height / 2}, {0, height / 2}}, segments);
}

TriangleMesh capsule(double radius, double length, int segments, int arc_steps) {
    if (!(radius > 0.0) || !(length > 0.0)) throw InvalidInput("capsule: non-positive size");
    if (arc_steps < 2) throw InvalidInput("capsule: too few arc steps");
    std::vector<Eigen::Vector2d> profile{{0, -length / 2 - radius}};
    for (int i = 1; i <= arc_steps; ++i) {
        const double theta = -M_PI / 2 + M_PI / 2 * i / arc_steps;
        profile.push_back({radius * std::cos(theta), -length / 2 + radius * std::sin(theta)});
    }
    for (int i = 0; i < arc_steps; ++i) {
        const double theta = M_PI / 2 * i / arc_steps;
        profile.push_back({radius * std::cos(theta), length / 2 + radius * std::sin(theta)});
    }
    profile.push_back({0, length / 2 + radius});
    return revolve(profile, segments);
}

TriangleMesh hemisphere_shell(double radius, double thickness, int segments, int arc_steps) {
    if (!(radius > 0.0) || !(thickness > 0.0) || !(thickness < radius)) {
        throw InvalidInput("hemisphere_shell: need 0 < thickness < radius");
    }
    if (arc_steps < 2) throw InvalidInput("hemisphere_shell: too few arc steps");
    const double inner = radius - thickness;
    std::vector<Eigen::Vector2d> profile{{0, inner}};
    for (int i = 1; i <= arc_steps; ++i) {
        const double theta = M_PI / 2 - M_PI / 2 * i / arc_steps;
        profile.push_back({inner * std::cos(theta), inner * std::sin(theta)});
    }
    for (int i = 0; i < arc_steps; ++i) {
        const double theta = M_PI / 2 * i / arc_steps;
        profile.push_back({radius * std::cos(theta), radius * std::sin(theta)});
    }
    profile.push_back({0, radius});
    return revolve(profile, segments);
}

TriangleMesh ellipsoid(const Vec3& semi_axes, int subdivisions) {
    if (!(semi_axes.minCoeff() > 0.0)) throw InvalidInput("ellipsoid: non-positive semi-axis");
    auto mesh = icosphere(subdivisions);
    for (auto& v : mesh.vertices) v = v.cwiseProduct(semi_axes);
    return mesh;
}

TriangleMesh torus_arc(double major, double minor, double half_angle, int arc_steps, int tube_segments) {
    if (!(minor > 0.0) || !(major > minor)) throw InvalidInput("torus_arc: need 0 < minor < major");
    if (!(half_angle > 0.0) || !(half_angle < M_PI)) throw InvalidInput("torus_arc: half angle out of (0, pi)");
    if (arc_steps < 1 || tube_segments < 3) throw InvalidInput("torus_arc: too few steps");
    TriangleMesh mesh;
    auto center = [&](double phi) { return Point3(major * std::cos(phi), 0, major * std::sin(phi)); };
    for (int i = 0; i <= arc_steps; ++i) {
        const double phi = -half_angle + 2.0 * half_angle * i / arc_steps;
        const Vec3 radial(std::cos(phi), 0, std::sin(phi));
        for (int k = 0; k < tube_segments; ++k) {
            const double psi = 2.0 * M_PI * k / tube_segments;
            mesh.vertices.push_back(center(phi) + minor * (std::cos(psi) * radial + std::sin(psi) * Vec3::UnitY()));
        }
    }
    auto at = [&](int i, int k) { return static_cast<std::uint32_t>(i * tube_segments + (k % tube_segments)); };
    for (int i = 0; i < arc_steps; ++i) {
        for (int k = 0; k < tube_segments; ++k) {
            mesh.triangles.push_back({at(i, k), at(i + 1, k), at(i + 1, k + 1)});
            mesh.triangles.push_back({at(i, k), at(i + 1, k + 1), at(i, k + 1)});
        }
    }
    mesh.vertices.push_back(center(-half_angle));
    const auto start = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
    mesh.vertices.push_back(center(half_angle));
    const auto end = static_cast<std::uint32_t>(mesh.vertices.size() - 1);
    for (int k = 0; k < tube_segments; ++k) {
        mesh.triangles.push_back({start, at(0, k + 1), at(0, k)});
        mesh.triangles.push_back({end, at(arc_steps, k), at(arc_steps, k + 1)});
    }
    if (signed_volume(mesh) < 0.0) {
        for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
    }
    return mesh;
}

double signed_volume(const TriangleMesh& mesh) {
    double v = 0.0;
    for (const auto& t : mesh.triangles) {
        v += mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
    }
    return v / 6.0;
}

double icosphere_chordal_error(int subdivisions, double radius) {
    const TriangleMesh mesh = icosphere(subdivisions, radius);
    double worst = 0.0;
    for (const auto& t : mesh.triangles) {
        const Point3& a = mesh.vertices[t[0]];
        const Vec3 n = (mesh.vertices[t[1]] - a).cross(mesh.vertices[t[2]] - a).normalized();
        worst = std::max(worst, radius - std::abs(n.dot(a)));
    }
    return worst;
}

}  // namespace recbench::primitives
