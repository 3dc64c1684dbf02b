#include "sandpile/shape.hpp"

#include <algorithm>
#include <stdexcept>

namespace sandpile {

namespace {

Rat polygon_area2(const std::vector<RatPoint>& v) {
    Rat s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const RatPoint& a = v[i];
        const RatPoint& b = v[(i + 1) % v.size()];
        s += cross(a, b);
    }
    return s;
}

void validate_convex(const std::vector<RatPoint>& v) {
    if (v.size() < 3) throw std::domain_error("polygon needs at least 3 vertices");
    if (polygon_area2(v) == 0) throw std::domain_error("degenerate shape (zero area)");
    // all turns weakly one way and no repeated vertices
    for (std::size_t i = 0; i < v.size(); ++i) {
        const RatPoint& a = v[i];
        const RatPoint& b = v[(i + 1) % v.size()];
        const RatPoint& c = v[(i + 2) % v.size()];
        if (a == b) throw std::domain_error("polygon has repeated vertices");
        if (cross(b - a, c - b) < 0) throw std::domain_error("polygon must be convex (CCW)");
    }
}

}  // namespace

ShapeSpec ShapeSpec::unit_square() {
    ShapeSpec s;
    s.kind = Kind::UnitSquare;
    s.vertices = {{Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(1), Rat(1)}, {Rat(0), Rat(1)}};
    return s;
}

ShapeSpec ShapeSpec::square2() {
    ShapeSpec s;
    s.kind = Kind::Square2;
    s.vertices = {{Rat(-1), Rat(-1)}, {Rat(1), Rat(-1)}, {Rat(1), Rat(1)}, {Rat(-1), Rat(1)}};
    return s;
}

ShapeSpec ShapeSpec::rectangle(const RatPoint& lo, const RatPoint& hi) {
    if (!(lo.x < hi.x && lo.y < hi.y)) throw std::domain_error("degenerate rectangle");
    ShapeSpec s;
    s.kind = Kind::Rectangle;
    s.vertices = {{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}};
    return s;
}

ShapeSpec ShapeSpec::polygon(std::vector<RatPoint> verts) {
    if (polygon_area2(verts) < 0) std::reverse(verts.begin(), verts.end());
    validate_convex(verts);
    ShapeSpec s;
    s.kind = Kind::Polygon;
    s.vertices = std::move(verts);
    return s;
}

bool ShapeSpec::strictly_inside(const RatPoint& p) const {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const RatPoint& a = vertices[i];
        const RatPoint& b = vertices[(i + 1) % vertices.size()];
        if (cross(b - a, p - a) <= 0) return false;
    }
    return true;
}

std::string ShapeSpec::name() const {
    switch (kind) {
        case Kind::UnitSquare: return "unit-square";
        case Kind::Square2: return "square2";
        case Kind::Rectangle: return "rectangle";
        case Kind::Polygon: return "polygon";
    }
    return "?";
}

std::vector<LatticePoint> DomainMask::members() const {
    std::vector<LatticePoint> out;
    out.reserve(member_count);
    for (std::int64_t y = win.y0; y < win.y0 + win.height; ++y)
        for (std::int64_t x = win.x0; x < win.x0 + win.width; ++x)
            if (member[win.index({x, y})]) out.push_back({x, y});
    return out;
}

DomainMask build_mask(const ShapeSpec& shape, std::int64_t n) {
    if (n < 1) throw std::domain_error("build_mask: n must be >= 1");
    validate_convex(shape.vertices);

    // rational bbox of n*shape
    Rat minx = shape.vertices[0].x, maxx = minx, miny = shape.vertices[0].y, maxy = miny;
    for (const auto& v : shape.vertices) {
        minx = std::min(minx, v.x);
        maxx = std::max(maxx, v.x);
        miny = std::min(miny, v.y);
        maxy = std::max(maxy, v.y);
    }
    auto floor_rat = [](const Rat& r) {
        BigInt num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
        BigInt q = num / den;
        if (num < 0 && q * den != num) --q;
        return q.convert_to<std::int64_t>();
    };
    std::int64_t lox = floor_rat(Rat(n) * minx), hix = floor_rat(Rat(n) * maxx) + 1;
    std::int64_t loy = floor_rat(Rat(n) * miny), hiy = floor_rat(Rat(n) * maxy) + 1;

    const bool axis_box = shape.kind != ShapeSpec::Kind::Polygon;
    std::vector<LatticePoint> pts;
    for (std::int64_t y = loy; y <= hiy; ++y)
        for (std::int64_t x = lox; x <= hix; ++x) {
            bool in;
            if (axis_box) {
                in = Rat(n) * minx < x && Rat(x) < Rat(n) * maxx && Rat(n) * miny < y &&
                     Rat(y) < Rat(n) * maxy;
            } else {
                in = shape.strictly_inside({Rat(x, n), Rat(y, n)});
            }
            if (in) pts.push_back({x, y});
        }

    DomainMask m = mask_from_points(pts);
    m.n = n;
    m.shape = shape;
    return m;
}

DomainMask mask_from_points(const std::vector<LatticePoint>& pts) {
    DomainMask m;
    m.shape = ShapeSpec::unit_square();
    if (pts.empty()) {
        m.win = Window(0, 0, 1, 1);
        m.member.assign(1, 0);
        m.member_count = 0;
        return m;
    }
    std::int64_t lox = pts[0].x, hix = pts[0].x, loy = pts[0].y, hiy = pts[0].y;
    for (auto p : pts) {
        lox = std::min(lox, p.x);
        hix = std::max(hix, p.x);
        loy = std::min(loy, p.y);
        hiy = std::max(hiy, p.y);
    }
    m.win = Window(lox - 1, loy - 1, hix - lox + 3, hiy - loy + 3);
    m.member.assign(m.win.cells(), 0);
    for (auto p : pts) m.member[m.win.index(p)] = 1;
    m.member_count = 0;
    for (auto b : m.member) m.member_count += b;
    return m;
}

}  // namespace sandpile
