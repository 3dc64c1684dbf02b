#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sandpile/patterns.hpp"

using namespace sandpile;

namespace {

PeriodicPattern stripes2() {
    // vertical stripes of period 2: value = x mod 2
    return PeriodicPattern({2, 0}, {0, 1}, {{{0, 0}, 0}, {{1, 0}, 1}});
}

PeriodicPattern constant(std::int64_t v) {
    return PeriodicPattern({1, 0}, {0, 1}, {{{0, 0}, v}});
}

IMat23 vmat(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, std::int64_t e,
            std::int64_t f) {
    return IMat23{{{a, b, c}, {d, e, f}}};
}

}  // namespace

TEST_CASE("v_norm") {
    IMat23 V = vmat(1, 0, -1, 0, 1, -1);
    CHECK(v_norm(V, {0, 0}) == 0);
    CHECK(v_norm(V, {1, 0}) == 1);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        IVec2 x{static_cast<std::int64_t>(rng() % 19) - 9, static_cast<std::int64_t>(rng() % 19) - 9};
        CHECK(v_norm(V, {2 * x[0], 2 * x[1]}) == 2 * v_norm(V, x));
    }
}

TEST_CASE("vinv_norm basics") {
    IMat23 V = vmat(1, 0, -1, 0, 1, -1);
    CHECK(vinv_norm(V, {0, 0}) == 0);
    CHECK(vinv_norm(V, {1, 0}) == 1);
}

TEST_CASE("vinv_norm equals brute force on random feasible instances") {
    std::mt19937_64 rng(17);
    std::vector<IMat23> vs = {vmat(1, 0, -1, 0, 1, -1), vmat(2, -1, -1, -1, 2, -1),
                              vmat(3, -1, -2, 1, 1, -2), vmat(1, 1, -2, -1, 2, -1)};
    int tested = 0;
    for (int t = 0; t < 1000; ++t) {
        const IMat23& V = vs[rng() % vs.size()];
        std::array<std::int64_t, 3> y{static_cast<std::int64_t>(rng() % 5) - 2,
                                      static_cast<std::int64_t>(rng() % 5) - 2,
                                      static_cast<std::int64_t>(rng() % 5) - 2};
        IVec2 x{V[0][0] * y[0] + V[0][1] * y[1] + V[0][2] * y[2],
                V[1][0] * y[0] + V[1][1] * y[1] + V[1][2] * y[2]};
        auto got = vinv_norm(V, x);
        REQUIRE(got.has_value());
        std::int64_t best = -1;
        for (std::int64_t a = -6; a <= 6; ++a)
            for (std::int64_t b = -6; b <= 6; ++b)
                for (std::int64_t c = -6; c <= 6; ++c) {
                    if (std::llabs(a) + std::llabs(b) + std::llabs(c) > 6) continue;
                    if (V[0][0] * a + V[0][1] * b + V[0][2] * c != x[0]) continue;
                    if (V[1][0] * a + V[1][1] * b + V[1][2] * c != x[1]) continue;
                    std::int64_t n1 = std::llabs(a) + std::llabs(b) + std::llabs(c);
                    if (best < 0 || n1 < best) best = n1;
                }
        if (best >= 0) {
            CHECK(*got == best);
            ++tested;
        } else {
            CHECK(*got > 6);
        }
    }
    CHECK(tested > 500);
}

TEST_CASE("vinv_norm reports infeasibility") {
    // columns of V generate the sublattice {x : x1 + x2 even}
    IMat23 V = vmat(1, 1, -2, -1, 1, 0);
    CHECK(vinv_norm(V, {1, 1}).has_value());
    CHECK_FALSE(vinv_norm(V, {1, 0}).has_value());
}

TEST_CASE("norm duality holds on random feasible triples") {
    std::mt19937_64 rng(23);
    std::vector<IMat23> vs = {vmat(1, 0, -1, 0, 1, -1), vmat(2, -1, -1, -1, 2, -1),
                              vmat(3, -1, -2, 1, 1, -2)};
    for (int t = 0; t < 10000; ++t) {
        const IMat23& V = vs[rng() % vs.size()];
        IVec2 x{static_cast<std::int64_t>(rng() % 21) - 10, static_cast<std::int64_t>(rng() % 21) - 10};
        std::array<std::int64_t, 3> y{static_cast<std::int64_t>(rng() % 7) - 3,
                                      static_cast<std::int64_t>(rng() % 7) - 3,
                                      static_cast<std::int64_t>(rng() % 7) - 3};
        IVec2 z{V[0][0] * y[0] + V[0][1] * y[1] + V[0][2] * y[2],
                V[1][0] * y[0] + V[1][1] * y[1] + V[1][2] * y[2]};
        auto zn = vinv_norm(V, z);
        REQUIRE(zn.has_value());
        std::int64_t lhs = std::llabs(x[0] * z[0] + x[1] * z[1]);
        CHECK(lhs <= v_norm(V, x) * *zn);
    }
}

TEST_CASE("structure identities accept a valid vector and reject perturbations") {
    // V with pairwise column determinants (1, -1, 1) and a trace-1 hessian
    PatternData d;
    d.V = vmat(1, 0, -1, 0, 1, -1);
    d.P(0, 0) = Rat(1);
    d.P(0, 1) = Rat(0);
    d.P(1, 0) = Rat(0);
    d.P(1, 1) = Rat(0);
    d.A = vmat(1, 0, -1, 0, 0, 0);  // A = P V
    StructureReport rep = validate_structure(d);
    CHECK(rep.pv_equals_a);
    CHECK(rep.row_sums_vanish);
    CHECK(rep.symplectic);
    CHECK(rep.v_rank2);
    CHECK(rep.pass());

    SUBCASE("a second valid instance") {
        PatternData e;
        e.V = vmat(1, 0, -1, 0, 1, -1);
        e.P(0, 0) = Rat(2);
        e.P(0, 1) = Rat(1);
        e.P(1, 0) = Rat(1);
        e.P(1, 1) = Rat(-1);
        e.A = vmat(2, 1, -3, 1, -1, 0);
        CHECK(validate_structure(e).pass());
    }
    SUBCASE("perturbing one entry of A breaks an identity") {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j) {
                PatternData bad = d;
                bad.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += 1;
                CHECK_FALSE(validate_structure(bad).pass());
            }
    }
}

TEST_CASE("tile checks") {
    // 4x4 block tile minus two opposite corners over the lattice (3,0),(0,3):
    // translates cover the plane, overlap only on tile boundaries, and meet
    // hex-adjacently
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> tile;
    for (std::int64_t y = 0; y <= 3; ++y)
        for (std::int64_t x = 0; x <= 3; ++x) {
            if ((x == 3 && y == 0) || (x == 0 && y == 3)) continue;
            bool interior = x >= 1 && x <= 2 && y >= 1 && y <= 2;
            tile[{x, y}] = interior ? 0 : 2;  // web of twos on the boundary
        }
    PatternData d;
    d.V = vmat(3, 0, -3, 0, 3, -3);
    d.P(0, 0) = Rat(1, 3);
    d.P(1, 1) = Rat(0);
    d.A = vmat(1, 0, -1, 0, 0, 0);
    d.tile = tile;
    StructureReport rep = validate_structure(d);
    CHECK(rep.tile_boundary_two);
    CHECK(rep.tile_covers);
    CHECK(rep.tile_overlaps_on_boundary);

    SUBCASE("an interior laplacian value on the boundary fails the check") {
        PatternData bad = d;
        (*bad.tile)[{0, 0}] = 1;
        CHECK_FALSE(validate_structure(bad).tile_boundary_two);
    }
}

TEST_CASE("pattern lookup and synthesis") {
    PeriodicPattern p = stripes2();
    CHECK(p.covolume() == 2);
    CHECK(p.at({0, 0}) == 0);
    CHECK(p.at({1, 0}) == 1);
    CHECK(p.at({-1, 5}) == 1);
    CHECK(p.at({4, -3}) == 0);
    IntField f = synthesize(p, Window(-3, -3, 7, 7));
    for (std::int64_t y = -3; y <= 3; ++y)
        for (std::int64_t x = -3; x <= 3; ++x)
            CHECK(f.at({x, y}) == ((x % 2 + 2) % 2));
}

TEST_CASE("pattern tile must be a transversal") {
    CHECK_THROWS_AS(PeriodicPattern({2, 0}, {0, 1}, {{{0, 0}, 0}, {{2, 0}, 1}}), std::domain_error);
    CHECK_THROWS_AS(PeriodicPattern({2, 0}, {0, 1}, {{{0, 0}, 0}}), std::domain_error);
    CHECK_THROWS_AS(PeriodicPattern({2, 0}, {4, 0}, {{{0, 0}, 0}}), std::domain_error);
}

TEST_CASE("match_at") {
    SUBCASE("constant pattern matches a constant image at the origin offset") {
        PeriodicPattern p = constant(2);
        IntField img(Window(-5, -5, 11, 11));
        for (auto& v : img.values()) v = 2;
        for (std::int64_t r : {1, 2, 3}) {
            auto off = match_at(img, p, {0, 0}, r);
            REQUIRE(off.has_value());
            CHECK(*off == LatticePoint{0, 0});
        }
    }
    SUBCASE("shifted stripes match with the shifted offset") {
        PeriodicPattern p = stripes2();
        IntField img(Window(-6, -6, 13, 13));
        for (std::int64_t y = -6; y <= 6; ++y)
            for (std::int64_t x = -6; x <= 6; ++x) img.set({x, y}, ((x + 1) % 2 + 2) % 2);
        auto off = match_at(img, p, {0, 0}, 2);
        REQUIRE(off.has_value());
        CHECK(*off == LatticePoint{1, 0});
    }
    SUBCASE("stripes never match a constant image") {
        PeriodicPattern p = stripes2();
        IntField img(Window(-4, -4, 9, 9));
        for (auto& v : img.values()) v = 0;
        CHECK_FALSE(match_at(img, p, {0, 0}, 1).has_value());
    }
    SUBCASE("ball leaving the window is an error") {
        PeriodicPattern p = constant(0);
        IntField img(Window(0, 0, 3, 3));
        CHECK_THROWS_AS(match_at(img, p, {0, 0}, 1), std::domain_error);
    }
    SUBCASE("translation equivariance") {
        std::mt19937_64 rng(31);
        PeriodicPattern p({3, 1}, {0, 2}, [] {
            std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> t;
            int v = 0;
            for (std::int64_t x = 0; x < 3; ++x)
                for (std::int64_t y = 0; y < 2; ++y) t[{x, y}] = v++;
            return t;
        }());
        IntField base = synthesize(p, Window(-12, -12, 25, 25));
        LatticePoint w{2, -1};
        IntField shifted(Window(-9, -9, 19, 19));
        for (std::int64_t y = -9; y <= 9; ++y)
            for (std::int64_t x = -9; x <= 9; ++x) shifted.set({x, y}, base.at({x + w.x, y + w.y}));
        for (int t = 0; t < 20; ++t) {
            LatticePoint x{static_cast<std::int64_t>(rng() % 9) - 4,
                           static_cast<std::int64_t>(rng() % 9) - 4};
            auto a = match_at(shifted, p, x, 2);
            auto b = match_at(base, p, {x.x + w.x, x.y + w.y}, 2);
            REQUIRE(a.has_value());
            REQUIRE(b.has_value());
            CHECK(*a == *b);
        }
    }
}

TEST_CASE("match_fraction") {
    PeriodicPattern p({3, 0}, {0, 3}, [] {
        std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> t;
        int v = 0;
        for (std::int64_t y = 0; y < 3; ++y)
            for (std::int64_t x = 0; x < 3; ++x) t[{x, y}] = v++;  // all-distinct tile
        return t;
    }());
    IntField img = synthesize(p, Window(-15, -15, 31, 31));
    std::vector<LatticePoint> cells;
    for (std::int64_t y = -10; y <= 10; ++y)
        for (std::int64_t x = -10; x <= 10; ++x) cells.push_back({x, y});
    Region region = Region::from_cells(cells);

    SUBCASE("perfect image matches fully at any radius") {
        for (std::int64_t r : {1, 2, 4}) {
            MatchReport rep = match_fraction(img, p, region, r);
            CHECK(rep.fraction == 1.0);
            CHECK(rep.matched == rep.total);
        }
    }
    SUBCASE("single corrupted cell removes exactly the covering plus shape") {
        IntField bad = img;
        bad.set({0, 0}, 99);
        MatchReport rep = match_fraction(bad, p, region, 1);
        MatchReport clean = match_fraction(img, p, region, 1);
        CHECK(clean.matched - rep.matched == 5);
        CHECK(rep.total == clean.total);
    }
    SUBCASE("disjoint values match nowhere") {
        IntField off(img.window());
        for (auto& v : off.values()) v = 77;
        MatchReport rep = match_fraction(off, p, region, 1);
        CHECK(rep.fraction == 0.0);
    }
    SUBCASE("fractions are deterministic across thread counts") {
        IntField bad = img;
        bad.set({1, 2}, 99);
        bad.set({-3, 4}, 98);
        MatchReport a = match_fraction(bad, p, region, 2, 1);
        MatchReport b = match_fraction(bad, p, region, 2, 8);
        CHECK(a.matched == b.matched);
        CHECK(a.total == b.total);
        CHECK(a.offsets == b.offsets);
    }
    SUBCASE("empty eroded region is an error") {
        Region tiny = Region::from_cells({{0, 0}}).with_margin(3);
        CHECK_THROWS_AS(match_fraction(img, p, tiny, 3), std::domain_error);
    }
}

TEST_CASE("region erosion") {
    std::vector<LatticePoint> cells;
    for (std::int64_t y = 0; y < 10; ++y)
        for (std::int64_t x = 0; x < 10; ++x) cells.push_back({x, y});
    Region r = Region::from_cells(cells, 2);
    auto eroded = r.eroded();
    CHECK(eroded.size() == 36);
    for (auto p : eroded) {
        CHECK(p.x >= 2);
        CHECK(p.x <= 7);
    }
    CHECK(r.eroded(3).size() == 16);
    CHECK(r.eroded(1).size() == 36);
}

TEST_CASE("polygon regions rasterize exactly") {
    Region r = Region::from_polygon({{Rat(0), Rat(0)}, {Rat(4), Rat(0)}, {Rat(0), Rat(4)}}, 2);
    for (auto p : r.cells()) {
        CHECK(p.x >= 1);
        CHECK(p.y >= 1);
        CHECK(p.x + p.y <= 7);
    }
    CHECK(r.cells().size() == 21);
}

TEST_CASE("detect_period") {
    SUBCASE("recovers a synthetic 3x3 period lattice") {
        PeriodicPattern p({3, 0}, {0, 3}, [] {
            std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> t;
            int v = 0;
            for (std::int64_t y = 0; y < 3; ++y)
                for (std::int64_t x = 0; x < 3; ++x) t[{x, y}] = (v++ * 7) % 5;
            return t;
        }());
        IntField img = synthesize(p, Window(0, 0, 40, 40));
        std::vector<LatticePoint> cells;
        for (std::int64_t y = 0; y < 40; ++y)
            for (std::int64_t x = 0; x < 40; ++x) cells.push_back({x, y});
        auto got = detect_period(img, Region::from_cells(cells), 4);
        REQUIRE(got.has_value());
        CHECK(got->covolume() == 9);
        CHECK(hnf2(got->basis1(), got->basis2()) == hnf2({3, 0}, {0, 3}));
        for (std::int64_t y = 0; y < 40; ++y)
            for (std::int64_t x = 0; x < 40; ++x) CHECK(got->at({x, y}) == img.at({x, y}));
    }
    SUBCASE("constant field gives the unit lattice") {
        IntField img(Window(0, 0, 30, 30));
        for (auto& v : img.values()) v = 2;
        std::vector<LatticePoint> cells;
        for (std::int64_t y = 0; y < 30; ++y)
            for (std::int64_t x = 0; x < 30; ++x) cells.push_back({x, y});
        auto got = detect_period(img, Region::from_cells(cells), 3);
        REQUIRE(got.has_value());
        CHECK(got->covolume() == 1);
        CHECK(got->basis1() == IVec2{1, 0});
        CHECK(got->basis2() == IVec2{0, 1});
    }
    SUBCASE("aperiodic field fails") {
        IntField img(Window(0, 0, 40, 40));
        std::mt19937_64 rng(9);
        for (auto& v : img.values()) v = static_cast<std::int64_t>(rng() % 1000000);
        std::vector<LatticePoint> cells;
        for (std::int64_t y = 0; y < 40; ++y)
            for (std::int64_t x = 0; x < 40; ++x) cells.push_back({x, y});
        CHECK_FALSE(detect_period(img, Region::from_cells(cells), 4).has_value());
    }
    SUBCASE("region too small for the bound fails") {
        IntField img(Window(0, 0, 10, 10));
        std::vector<LatticePoint> cells;
        for (std::int64_t y = 0; y < 10; ++y)
            for (std::int64_t x = 0; x < 10; ++x) cells.push_back({x, y});
        CHECK_FALSE(detect_period(img, Region::from_cells(cells), 4).has_value());
    }
}

TEST_CASE("detect_period recovers random small lattices up to equivalence") {
    std::mt19937_64 rng(41);
    int recovered = 0;
    for (int trial = 0; trial < 30; ++trial) {
        IVec2 v1{1 + static_cast<std::int64_t>(rng() % 4), static_cast<std::int64_t>(rng() % 5) - 2};
        IVec2 v2{static_cast<std::int64_t>(rng() % 5) - 2, 1 + static_cast<std::int64_t>(rng() % 4)};
        std::int64_t det = v1[0] * v2[1] - v1[1] * v2[0];
        if (det == 0 || std::llabs(det) > 36) continue;
        auto h = hnf2(v1, v2);
        std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> tile;
        std::int64_t idx = 0;
        for (std::int64_t y = 0; y < h[2]; ++y)
            for (std::int64_t x = 0; x < h[0]; ++x) tile[{x, y}] = (idx++ * 13) % 7;
        PeriodicPattern p(v1, v2, tile);
        IntField img = synthesize(p, Window(0, 0, 64, 64));
        std::vector<LatticePoint> cells;
        for (std::int64_t y = 0; y < 64; ++y)
            for (std::int64_t x = 0; x < 64; ++x) cells.push_back({x, y});
        auto got = detect_period(img, Region::from_cells(cells), 7);
        REQUIRE(got.has_value());
        CHECK(got->covolume() <= std::llabs(det));
        for (std::int64_t y = 0; y < 64; ++y)
            for (std::int64_t x = 0; x < 64; ++x) CHECK(got->at({x, y}) == img.at({x, y}));
        if (got->covolume() == std::llabs(det)) {
            CHECK(hnf2(got->basis1(), got->basis2()) == hnf2(v1, v2));
            ++recovered;
        }
    }
    CHECK(recovered >= 20);
}

TEST_CASE("gauss_reduce and hnf2") {
    SUBCASE("reduction finds the shortest basis") {
        auto [a, b] = gauss_reduce({5, 3}, {2, 1});
        CHECK(a == IVec2{1, 0});
        CHECK(b == IVec2{0, 1});
    }
    SUBCASE("hnf is invariant under unimodular changes of basis") {
        std::mt19937_64 rng(13);
        for (int t = 0; t < 100; ++t) {
            IVec2 v1{static_cast<std::int64_t>(rng() % 9) - 4, static_cast<std::int64_t>(rng() % 9) - 4};
            IVec2 v2{static_cast<std::int64_t>(rng() % 9) - 4, static_cast<std::int64_t>(rng() % 9) - 4};
            if (v1[0] * v2[1] - v1[1] * v2[0] == 0) continue;
            std::int64_t k = static_cast<std::int64_t>(rng() % 7) - 3;
            IVec2 w1{v1[0] + k * v2[0], v1[1] + k * v2[1]};
            CHECK(hnf2(v1, v2) == hnf2(v2, w1));
            auto [r1, r2] = gauss_reduce(v1, v2);
            CHECK(hnf2(r1, r2) == hnf2(v1, v2));
        }
    }
    SUBCASE("degenerate input is rejected") {
        CHECK_THROWS_AS(hnf2({2, 4}, {1, 2}), std::domain_error);
        CHECK_THROWS_AS(gauss_reduce({0, 0}, {1, 2}), std::domain_error);
    }
}

TEST_CASE("fit_quadratic") {
    std::vector<LatticePoint> cells;
    for (std::int64_t y = -6; y <= 6; ++y)
        for (std::int64_t x = -6; x <= 6; ++x) cells.push_back({x, y});
    Region region = Region::from_cells(cells);
    Window w(-7, -7, 15, 15);

    SUBCASE("exact lattice quadratic is recovered with zero residual") {
        IntField f(w);
        for (std::int64_t y = -7; y <= 7; ++y)
            for (std::int64_t x = -7; x <= 7; ++x) f.set({x, y}, x * (x + 1) / 2 + y * (y + 1) / 2);
        QuadraticFit fit = fit_quadratic(f, region);
        CHECK(fit.P(0, 0) == Rat(1));
        CHECK(fit.P(0, 1) == Rat(0));
        CHECK(fit.P(1, 1) == Rat(1));
        CHECK(fit.residual < 1e-6);
    }
    SUBCASE("bounded periodic noise does not move the rounded hessian") {
        IntField f(w);
        for (std::int64_t y = -7; y <= 7; ++y)
            for (std::int64_t x = -7; x <= 7; ++x)
                f.set({x, y}, x * (x + 1) / 2 + y * (y + 1) / 2 + ((x % 3) + 3) % 3);
        QuadraticFit fit = fit_quadratic(f, region);
        CHECK(fit.P(0, 0) == Rat(1));
        CHECK(fit.P(0, 1) == Rat(0));
        CHECK(fit.P(1, 1) == Rat(1));
        CHECK(fit.residual <= 3.0);
    }
    SUBCASE("affine fields have a zero hessian") {
        IntField f(w);
        for (std::int64_t y = -7; y <= 7; ++y)
            for (std::int64_t x = -7; x <= 7; ++x) f.set({x, y}, 3 * x - 2 * y + 5);
        QuadraticFit fit = fit_quadratic(f, region);
        CHECK(fit.P(0, 0) == Rat(0));
        CHECK(fit.P(0, 1) == Rat(0));
        CHECK(fit.P(1, 1) == Rat(0));
        CHECK(fit.residual < 1e-6);
    }
    SUBCASE("rank-deficient designs are rejected") {
        std::vector<LatticePoint> line;
        for (std::int64_t x = 0; x < 10; ++x) line.push_back({x, 0});
        IntField f(Window(-1, -1, 12, 3));
        CHECK_THROWS_AS(fit_quadratic(f, Region::from_cells(line)), std::domain_error);
    }
    SUBCASE("half-integer hessian entries are representable") {
        IntField f(w);
        for (std::int64_t y = -7; y <= 7; ++y)
            for (std::int64_t x = -7; x <= 7; ++x) f.set({x, y}, x * (x + 1) / 2);
        QuadraticFit fit = fit_quadratic(f, region);
        CHECK(fit.P(0, 0) == Rat(1));
        CHECK(fit.P(1, 1) == Rat(0));
    }
}
