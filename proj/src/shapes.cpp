#include "recbench/shapes.hpp"

#include "recbench/errors.hpp"
#include "recbench/primitives.hpp"

#include <cmath>
#include <random>
#include <utility>
#include <vector>

namespace recbench {

namespace {

constexpr double kPartGap = 0.02;

struct Range {
    const char* name;
    double lo;
    double hi;
};

const std::vector<Range>& ranges(Category c) {
    static const std::map<Category, std::vector<Range>> table{
        {Category::bottle, {{"radius", 0.25, 0.4}, {"length", 1.0, 1.8}}},
        {Category::can, {{"radius", 0.3, 0.5}, {"height", 0.8, 1.4}}},
        {Category::helmet, {{"thickness", 0.05, 0.15}}},
        {Category::jar, {{"a", 0.7, 1.0}, {"b", 0.7, 1.0}, {"c", 0.8, 1.3}}},
        {Category::laptop,
         {{"width", 1.0, 1.4}, {"depth", 0.7, 1.0}, {"thickness", 0.03, 0.08}, {"angle_deg", 90.0, 120.0}}},
        {Category::mug,
         {{"radius", 0.35, 0.5},
          {"height", 0.8, 1.2},
          {"handle_radius", 0.25, 0.35},
          {"handle_thickness", 0.04, 0.07}}},
    };
    return table.at(c);
}

TriangleMesh laptop(double width, double depth, double thickness, double angle_deg) {
    auto mesh = primitives::box({-width / 2, -depth / 2, 0.0}, {width / 2, depth / 2, thickness});
    // The lid is modelled closed above the base, then swung open about the
    // hinge line y = depth/2, z = thickness + gap.
    auto lid = primitives::box({-width / 2, -depth / 2, thickness + kPartGap},
                               {width / 2, depth / 2, 2 * thickness + kPartGap});
    const double beta = angle_deg * M_PI / 180.0;
    const double hinge_y = depth / 2, hinge_z = thickness + kPartGap;
    for (auto& v : lid.vertices) {
        const double y = v.y() - hinge_y, z = v.z() - hinge_z;
        v.y() = hinge_y + y * std::cos(beta) + z * std::sin(beta);
        v.z() = hinge_z - y * std::sin(beta) + z * std::cos(beta);
    }
    mesh.merge(lid);
    return mesh;
}

TriangleMesh mug(double radius, double height, double handle_radius, double handle_thickness) {
    auto mesh = primitives::cylinder(radius, height);
    // Arc ends stop kPartGap short of the wall.
    const double half_angle = std::acos((handle_thickness + kPartGap) / handle_radius);
    auto handle = primitives::torus_arc(handle_radius, handle_thickness, half_angle);
    for (auto& v : handle.vertices) v.x() += radius;
    mesh.merge(handle);
    return mesh;
}

}  // namespace

const std::array<Category, 6>& all_categories() {
    static const std::array<Category, 6> all{Category::bottle, Category::can,    Category::helmet,
                                             Category::jar,    Category::laptop, Category::mug};
    return all;
}

std::string to_string(Category c) {
    switch (c) {
        case Category::bottle: return "bottle";
        case Category::can: return "can";
        case Category::helmet: return "helmet";
        case Category::jar: return "jar";
        case Category::laptop: return "laptop";
        case Category::mug: return "mug";
    }
    throw InvalidInput("unknown category");
}

Category parse_category(const std::string& name) {
    for (auto c : all_categories()) {
        if (to_string(c) == name) return c;
    }
    throw InvalidInput("unknown category '" + name + "'");
}

void ShapeSpec::validate() const {
    const auto& expected = ranges(category);
    if (parameters.size() != expected.size()) {
        throw InvalidInput(to_string(category) + ": expected " + std::to_string(expected.size()) + " parameters");
    }
    for (const auto& r : expected) {
        const auto it = parameters.find(r.name);
        if (it == parameters.end()) throw InvalidInput(to_string(category) + ": missing parameter " + r.name);
        if (!(it->second >= r.lo && it->second <= r.hi)) {
            throw InvalidInput(to_string(category) + ": " + r.name + " outside [" + std::to_string(r.lo) + ", " +
                               std::to_string(r.hi) + "]");
        }
    }
}

ShapeSpec random_shape_spec(Category category, std::uint64_t seed) {
    ShapeSpec spec;
    spec.category = category;
    spec.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& r : ranges(category)) spec.parameters[r.name] = r.lo + (r.hi - r.lo) * unit(rng);
    return spec;
}

TriangleMesh build_shape(const ShapeSpec& spec) {
    spec.validate();
    const auto& p = spec.parameters;
    TriangleMesh mesh;
    switch (spec.category) {
        case Category::bottle: mesh = primitives::capsule(p.at("radius"), p.at("length")); break;
        case Category::can: mesh = primitives::cylinder(p.at("radius"), p.at("height")); break;
        case Category::helmet: mesh = primitives::hemisphere_shell(1.0, p.at("thickness")); break;
        case Category::jar: mesh = primitives::ellipsoid({p.at("a"), p.at("b"), p.at("c")}); break;
        case Category::laptop:
            mesh = laptop(p.at("width"), p.at("depth"), p.at("thickness"), p.at("angle_deg"));
            break;
        case Category::mug:
            mesh = mug(p.at("radius"), p.at("height"), p.at("handle_radius"), p.at("handle_thickness"));
            break;
    }
    return normalize_to_unit_sphere(mesh).mesh;
}

}  // namespace recbench
