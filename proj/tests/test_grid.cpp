#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sandpile/field.hpp"
#include "sandpile/shape.hpp"

using namespace sandpile;

namespace {

IntField random_field(const Window& w, std::mt19937_64& rng, std::int64_t lo = -9,
                      std::int64_t hi = 9) {
    IntField f(w);
    std::uniform_int_distribution<std::int64_t> d(lo, hi);
    for (auto& v : f.values()) v = d(rng);
    return f;
}

}  // namespace

TEST_CASE("laplacian of a constant field vanishes") {
    Window w(-2, -2, 5, 5);
    IntField f(w);
    for (auto& v : f.values()) v = 7;
    // interior points see four equal neighbors; border points read exterior zeros
    CHECK(laplacian_at(f, {0, 0}) == 0);
    CHECK(laplacian_at(f, {-1, 1}) == 0);
}

TEST_CASE("laplacian of q(x)=x1(x1+1)/2 is 1 in the interior") {
    Window w(-5, -5, 11, 11);
    IntField f(w);
    for (std::int64_t y = -5; y <= 5; ++y)
        for (std::int64_t x = -5; x <= 5; ++x) f.set({x, y}, x * (x + 1) / 2);
    for (std::int64_t y = -4; y <= 4; ++y)
        for (std::int64_t x = -4; x <= 4; ++x) CHECK(laplacian_at(f, {x, y}) == 1);
}

TEST_CASE("laplacian of x^2+y^2 is 4 in the interior") {
    Window w(-5, -5, 11, 11);
    IntField f(w);
    for (std::int64_t y = -5; y <= 5; ++y)
        for (std::int64_t x = -5; x <= 5; ++x) f.set({x, y}, x * x + y * y);
    CHECK(laplacian_at(f, {0, 0}) == 4);
    CHECK(laplacian_at(f, {2, -3}) == 4);
}

TEST_CASE("laplacian of an affine field vanishes in the interior") {
    Window w(-5, -5, 11, 11);
    IntField f(w);
    for (std::int64_t y = -5; y <= 5; ++y)
        for (std::int64_t x = -5; x <= 5; ++x) f.set({x, y}, 3 * x - y);
    IntField lap = laplacian_field(f, Window(-4, -4, 9, 9));
    for (auto v : lap.values()) CHECK(v == 0);
}

TEST_CASE("laplacian_field rejects an uncontained window") {
    IntField f(Window(0, 0, 4, 4));
    CHECK_THROWS_AS(laplacian_field(f, Window(0, 0, 5, 4)), std::domain_error);
}

TEST_CASE("laplacian_field of the zero field is zero") {
    IntField f(Window(0, 0, 6, 6));
    IntField lap = laplacian_field(f, f.window());
    for (auto v : lap.values()) CHECK(v == 0);
}

TEST_CASE("laplacian is linear and sums to a boundary flux") {
    std::mt19937_64 rng(42);
    Window w(-3, -3, 7, 7);
    for (int trial = 0; trial < 25; ++trial) {
        IntField u = random_field(w, rng), v = random_field(w, rng);
        std::int64_t a = static_cast<std::int64_t>(rng() % 7) - 3;
        std::int64_t b = static_cast<std::int64_t>(rng() % 7) - 3;
        IntField combo(w);
        for (std::size_t i = 0; i < combo.values().size(); ++i)
            combo.values()[i] = a * u.values()[i] + b * v.values()[i];
        // linearity, exactly, everywhere
        for (std::int64_t y = -3; y <= 3; ++y)
            for (std::int64_t x = -3; x <= 3; ++x)
                CHECK(laplacian_at(combo, {x, y}) ==
                      a * laplacian_at(u, {x, y}) + b * laplacian_at(v, {x, y}));

        // discrete divergence theorem: the window sum telescopes to edge flux
        std::int64_t total = 0;
        for (std::int64_t y = -3; y <= 3; ++y)
            for (std::int64_t x = -3; x <= 3; ++x) total += laplacian_at(u, {x, y});
        std::int64_t flux = 0;
        for (std::int64_t y = -3; y <= 3; ++y)
            for (std::int64_t x = -3; x <= 3; ++x) {
                // edges leaving the window: the outside endpoint reads 0
                for (auto d : {LatticePoint{1, 0}, LatticePoint{-1, 0}, LatticePoint{0, 1},
                               LatticePoint{0, -1}}) {
                    LatticePoint q{x + d.x, y + d.y};
                    if (!w.contains(q)) flux -= u.at({x, y});
                }
            }
        CHECK(total == flux);
    }
}

TEST_CASE("shift_cutoff") {
    Window w(-4, -4, 9, 9);
    SUBCASE("alpha = 0 is the identity") {
        std::mt19937_64 rng(1);
        IntField f = random_field(w, rng);
        CHECK(shift_cutoff(f, 0) == f);
    }
    SUBCASE("zero field shifted by 1 has laplacian 1 in the interior") {
        IntField z(w);
        IntField s = shift_cutoff(z, 1);
        for (std::int64_t y = -3; y <= 3; ++y)
            for (std::int64_t x = -3; x <= 3; ++x) CHECK(laplacian_at(s, {x, y}) == 1);
    }
    SUBCASE("+1 then -1 round-trips") {
        std::mt19937_64 rng(2);
        IntField f = random_field(w, rng);
        CHECK(shift_cutoff(shift_cutoff(f, 1), -1) == f);
    }
}

TEST_CASE("build_mask on the unit square") {
    SUBCASE("n=3 keeps the four strictly interior sites") {
        DomainMask m = build_mask(ShapeSpec::unit_square(), 3);
        CHECK(m.member_count == 4);
        for (std::int64_t x : {1, 2})
            for (std::int64_t y : {1, 2}) CHECK(m.is_member({x, y}));
        CHECK_FALSE(m.is_member({0, 1}));
        CHECK_FALSE(m.is_member({3, 2}));
    }
    SUBCASE("n=1 is empty") {
        DomainMask m = build_mask(ShapeSpec::unit_square(), 1);
        CHECK(m.member_count == 0);
    }
    SUBCASE("window pads members by one cell") {
        DomainMask m = build_mask(ShapeSpec::unit_square(), 5);
        CHECK(m.win.x0 == 0);
        CHECK(m.win.y0 == 0);
        CHECK(m.win.width == 6);
        CHECK(m.win.height == 6);
    }
}

TEST_CASE("build_mask on the centered square has (2n-1)^2 members") {
    for (std::int64_t n : {1, 2, 5, 12}) {
        DomainMask m = build_mask(ShapeSpec::square2(), n);
        CHECK(m.member_count == static_cast<std::size_t>((2 * n - 1) * (2 * n - 1)));
    }
}

TEST_CASE("build_mask matches the polygon path on the square") {
    auto poly = ShapeSpec::polygon({{Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(1), Rat(1)}, {Rat(0), Rat(1)}});
    for (std::int64_t n : {3, 7}) {
        DomainMask a = build_mask(ShapeSpec::unit_square(), n);
        DomainMask b = build_mask(poly, n);
        CHECK(a.member_count == b.member_count);
        for (auto p : a.members()) CHECK(b.is_member(p));
    }
}

TEST_CASE("build_mask is monotone in n for the centered square") {
    // star-shaped about the origin: members at scale n, pushed into the
    // domain at scale 2n, stay members
    DomainMask m1 = build_mask(ShapeSpec::square2(), 6);
    DomainMask m2 = build_mask(ShapeSpec::square2(), 12);
    for (auto p : m1.members()) CHECK(m2.is_member({2 * p.x, 2 * p.y}));
}

TEST_CASE("degenerate shapes are rejected") {
    CHECK_THROWS_AS(ShapeSpec::polygon({{Rat(0), Rat(0)}, {Rat(1), Rat(0)}, {Rat(2), Rat(0)}}),
                    std::domain_error);
    CHECK_THROWS_AS(build_mask(ShapeSpec::unit_square(), 0), std::domain_error);
}

TEST_CASE("convexity is required") {
    CHECK_THROWS_AS(ShapeSpec::polygon({{Rat(0), Rat(0)},
                                        {Rat(2), Rat(0)},
                                        {Rat(1), Rat(1, 2)},
                                        {Rat(2), Rat(2)},
                                        {Rat(0), Rat(2)}}),
                    std::domain_error);
}
