#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sandpile/field.hpp"
#include "sandpile/rational.hpp"

namespace sandpile {

/// Planar domain to be scaled by n. Polygons must be simple and convex,
/// listed in counter-clockwise order (the constructor normalizes orientation).
struct ShapeSpec {
    enum class Kind { UnitSquare, Square2, Rectangle, Polygon };

    Kind kind = Kind::UnitSquare;
    std::vector<RatPoint> vertices;  // CCW convex polygon; filled for every kind

    static ShapeSpec unit_square();            // (0,1)^2
    static ShapeSpec square2();                // (-1,1)^2
    static ShapeSpec rectangle(const RatPoint& lo, const RatPoint& hi);
    static ShapeSpec polygon(std::vector<RatPoint> verts);

    /// Strict interior test, exact.
    bool strictly_inside(const RatPoint& p) const;

    std::string name() const;
};

struct DomainMask {
    Window win;                     // bounding box of members padded by one cell
    std::vector<std::uint8_t> member;
    std::int64_t n = 1;
    ShapeSpec shape;
    std::size_t member_count = 0;

    bool is_member(LatticePoint p) const {
        return win.contains(p) && member[win.index(p)] != 0;
    }
    std::vector<LatticePoint> members() const;
};

/// Lattice points p with p/n strictly inside the shape.
DomainMask build_mask(const ShapeSpec& shape, std::int64_t n);

/// Mask from an explicit member list (tests and custom regions).
DomainMask mask_from_points(const std::vector<LatticePoint>& pts);

}  // namespace sandpile
