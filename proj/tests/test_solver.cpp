#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "sandpile/solver.hpp"

using namespace sandpile;

namespace {

DomainMask rect_mask(std::int64_t w, std::int64_t h, std::int64_t x0 = 0, std::int64_t y0 = 0) {
    std::vector<LatticePoint> pts;
    for (std::int64_t y = y0; y < y0 + h; ++y)
        for (std::int64_t x = x0; x < x0 + w; ++x) pts.push_back({x, y});
    return mask_from_points(pts);
}

}  // namespace

TEST_CASE("single site least solution is zero") {
    DomainMask m = rect_mask(1, 1);
    Solution s = solve_least(m);
    CHECK(s.u.at({0, 0}) == 0);
    Solution b = brute_force_least(m, 2, brute_force_bound(m));
    CHECK(b.u == s.u);
}

TEST_CASE("2x2 block solves to -1 with laplacian 2 everywhere") {
    DomainMask m = rect_mask(2, 2);
    Solution s = solve_least(m);
    for (auto p : m.members()) {
        CHECK(s.u.at(p) == -1);
        CHECK(laplacian_at(s.u, p) == 2);
    }
    Solution b = brute_force_least(m, 2, -4);
    CHECK(b.u == s.u);
}

TEST_CASE("empty mask solves to the zero field") {
    DomainMask m = mask_from_points({});
    Solution s = solve_least(m);
    CHECK(s.mask.member_count == 0);
    for (auto v : s.u.values()) CHECK(v == 0);
    CHECK(s.stats.burn_pass);
}

TEST_CASE("1x3 strip matches the exhaustive oracle") {
    DomainMask m = rect_mask(3, 1);
    Solution s = solve_least(m);
    Solution b = brute_force_least(m, 2, brute_force_bound(m));
    CHECK(s.u == b.u);
}

TEST_CASE("oracle equivalence over random small masks and cutoffs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<LatticePoint> pts{{0, 0}};
        while (pts.size() < 8) {
            LatticePoint base = pts[rng() % pts.size()];
            LatticePoint q{base.x + static_cast<std::int64_t>(rng() % 3) - 1,
                           base.y + static_cast<std::int64_t>(rng() % 3) - 1};
            if (q.x < 0 || q.x >= 3 || q.y < 0 || q.y >= 4) continue;
            if (std::find(pts.begin(), pts.end(), q) == pts.end()) pts.push_back(q);
            if (rng() % 4 == 0) break;
        }
        DomainMask m = mask_from_points(pts);
        std::int64_t cutoff = static_cast<std::int64_t>(rng() % 4);  // 0..3
        Solution s = solve_least(m, cutoff);
        Solution b = brute_force_least(m, cutoff, brute_force_bound(m, cutoff));
        CHECK(s.u == b.u);
    }
}

TEST_CASE("feasibility and support are audited on every solve") {
    DomainMask m = rect_mask(5, 4);
    Solution s = solve_least(m);
    for (std::int64_t y = m.win.y0; y < m.win.y0 + m.win.height; ++y)
        for (std::int64_t x = m.win.x0; x < m.win.x0 + m.win.width; ++x) {
            LatticePoint p{x, y};
            if (m.is_member(p)) CHECK(laplacian_at(s.u, p) <= 2);
            else CHECK(s.u.at(p) == 0);
        }
}

TEST_CASE("solve is independent of threading") {
    DomainMask m = rect_mask(33, 29);
    Solution s1 = solve_least(m, 2, 1);
    Solution s8 = solve_least(m, 2, 8);
    CHECK(s1.u == s8.u);
}

TEST_CASE("brute force refuses too many members") {
    DomainMask m = rect_mask(4, 4);
    CHECK_THROWS_AS(brute_force_least(m, 2, -4), std::domain_error);
}

TEST_CASE("burning certificate") {
    SUBCASE("2x2 least solution burns in one round") {
        Solution s = solve_least(rect_mask(2, 2));
        BurnReport rep = burning_certificate(s);
        CHECK(rep.pass);
        REQUIRE(rep.burned.size() == 4);
        for (const auto& [p, round] : rep.burned) CHECK(round == 1);
    }
    SUBCASE("least solutions pass, +1 shifts fail") {
        DomainMask m = rect_mask(9, 9);
        Solution s = solve_least(m);
        CHECK(burning_certificate(s).pass);

        Solution shifted = s;
        for (auto p : m.members()) shifted.u.set(p, s.u.at(p) + 1);
        // still feasible: the laplacian only drops, and only at boundary members
        BurnReport rep = burning_certificate(shifted);
        CHECK_FALSE(rep.pass);
        CHECK_FALSE(rep.unburned.empty());
    }
    SUBCASE("empty mask passes vacuously") {
        Solution s = solve_least(mask_from_points({}));
        CHECK(burning_certificate(s).pass);
    }
    SUBCASE("violating input is rejected") {
        Solution s = solve_least(rect_mask(2, 2));
        s.u.set({0, 0}, -5);  // laplacian at a neighbor now exceeds 2
        CHECK_THROWS_AS(burning_certificate(s), std::domain_error);
    }
}

TEST_CASE("stabilize") {
    SUBCASE("already stable single site") {
        DomainMask m = rect_mask(1, 1);
        SandpileConfig cfg{IntField(m.win), m};
        cfg.s.set({0, 0}, 1);
        auto [odo, fin] = stabilize(cfg);
        CHECK(odo.at({0, 0}) == 0);
        CHECK(fin.at({0, 0}) == 1);
    }
    SUBCASE("single site with four grains topples once") {
        DomainMask m = rect_mask(1, 1);
        SandpileConfig cfg{IntField(m.win), m};
        cfg.s.set({0, 0}, 4);
        auto [odo, fin] = stabilize(cfg);
        CHECK(odo.at({0, 0}) == 1);
        CHECK(fin.at({0, 0}) == 0);
    }
    SUBCASE("three grains at the center of a 5x5 mask topple once") {
        DomainMask m = rect_mask(5, 5);
        SandpileConfig cfg{IntField(m.win), m};
        cfg.s.set({2, 2}, 3);
        auto [odo, fin] = stabilize(cfg);
        CHECK(odo.at({2, 2}) == 1);
        // a topple removes four grains, so the center ends at 3 - 4 = -1 and
        // each neighbor gains one; total mass inside the mask is conserved
        CHECK(fin.at({2, 2}) == -1);
        for (auto d : {LatticePoint{1, 0}, LatticePoint{-1, 0}, LatticePoint{0, 1}, LatticePoint{0, -1}})
            CHECK(fin.at(LatticePoint{2, 2} + d) == 1);
        std::int64_t mass = 0;
        for (auto p : m.members()) mass += fin.at(p);
        CHECK(mass == 3);
        for (auto p : m.members()) CHECK(fin.at(p) <= 2);
    }
    SUBCASE("negative grains on a member are rejected") {
        DomainMask m = rect_mask(2, 2);
        SandpileConfig cfg{IntField(m.win), m};
        cfg.s.set({0, 0}, -1);
        CHECK_THROWS_AS(stabilize(cfg), std::domain_error);
    }
    SUBCASE("abelian: batching the grains does not change the result") {
        std::mt19937_64 rng(3);
        DomainMask m = rect_mask(9, 9);
        SandpileConfig cfg{IntField(m.win), m};
        for (auto p : m.members()) cfg.s.set(p, static_cast<std::int64_t>(rng() % 6));
        auto [odo1, fin1] = stabilize(cfg);

        SandpileConfig half{IntField(m.win), m};
        for (auto p : m.members()) half.s.set(p, cfg.s.at(p) / 2);
        auto [odoA, finA] = stabilize(half);
        SandpileConfig rest{finA, m};
        for (auto p : m.members()) rest.s.set(p, rest.s.at(p) + cfg.s.at(p) - cfg.s.at(p) / 2);
        auto [odoB, finB] = stabilize(rest);
        CHECK(finB == fin1);
        IntField sum(m.win);
        for (std::size_t i = 0; i < sum.values().size(); ++i)
            sum.values()[i] = odoA.values()[i] + odoB.values()[i];
        CHECK(sum == odo1);
    }
}

TEST_CASE("least solution laplacian stays in the figure range on squares") {
    // observational: values in {-1, 0, 1, 2} for square domains
    for (std::int64_t n : {9, 27}) {
        DomainMask m = build_mask(ShapeSpec::unit_square(), n);
        Solution s = solve_least(m);
        for (auto p : m.members()) {
            std::int64_t l = laplacian_at(s.u, p);
            CHECK(l >= -1);
            CHECK(l <= 2);
        }
    }
}

TEST_CASE("nonstandard cutoff agrees with the oracle") {
    DomainMask m = rect_mask(2, 3);
    Solution s3 = solve_least(m, 3);
    Solution b3 = brute_force_least(m, 3, brute_force_bound(m, 3));
    CHECK(s3.u == b3.u);
}
