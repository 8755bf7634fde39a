#pragma once

#include "recbench/geometry.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>

namespace recbench {

/// Report column order.
enum class Category { bottle, can, helmet, jar, laptop, mug };

const std::array<Category, 6>& all_categories();
std::string to_string(Category c);
/// Throws InvalidInput for an unknown name.
Category parse_category(const std::string& name);

/// Procedural stand-in for one object. Parameter ranges, in units before
/// normalization:
///   bottle  capsule        radius [0.25, 0.4], length [1.0, 1.8]
///   can     cylinder       radius [0.3, 0.5], height [0.8, 1.4]
///   helmet  hemisphere     thickness [0.05, 0.15] (outer radius 1)
///   jar     ellipsoid      a, b [0.7, 1.0], c [0.8, 1.3]
///   laptop  box pair       width [1.0, 1.4], depth [0.7, 1.0], thickness [0.03, 0.08],
///                          angle_deg [90, 120] (lid opening, hinge gap 0.02)
///   mug     cylinder+arc   radius [0.35, 0.5], height [0.8, 1.2],
///                          handle_radius [0.25, 0.35], handle_thickness [0.04, 0.07]
/// Multi-part shapes keep their parts 0.02 apart so every part is closed and
/// none overlap.
struct ShapeSpec {
    Category category = Category::bottle;
    std::map<std::string, double> parameters;
    std::uint64_t seed = 0;

    /// Throws InvalidInput on a missing, unknown or out-of-range parameter.
    void validate() const;
};

/// Parameters drawn uniformly from the documented ranges.
ShapeSpec random_shape_spec(Category category, std::uint64_t seed);

/// Mesh normalized to the unit sphere (bounding-box center at the origin).
TriangleMesh build_shape(const ShapeSpec& spec);

}  // namespace recbench
