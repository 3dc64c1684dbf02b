#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sandpile/field.hpp"
#include "sandpile/rational.hpp"

namespace sandpile {

using IVec2 = std::array<std::int64_t, 2>;
using IMat23 = std::array<std::array<std::int64_t, 3>, 2>;  // rows of 3

/// Doubly periodic integer pattern given by a lattice basis and one value per
/// coset of the lattice.
class PeriodicPattern {
public:
    PeriodicPattern(IVec2 v1, IVec2 v2, std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> tile);

    const IVec2& basis1() const { return v1_; }
    const IVec2& basis2() const { return v2_; }
    std::int64_t covolume() const { return cov_; }

    std::int64_t at(LatticePoint p) const;

    /// canonical coset representative of p (inside the HNF fundamental domain)
    LatticePoint reduce(LatticePoint p) const;
    std::vector<LatticePoint> coset_representatives() const;

    const std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t>& tile() const { return tile_; }

private:
    IVec2 v1_, v2_;
    std::int64_t cov_;
    // column HNF of [v1 v2]: (d1, k; 0, d2) with 0 <= k < d2... stored lower-triangular
    std::int64_t h11_, h21_, h22_;
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> tile_;
    std::vector<std::int64_t> values_;  // indexed over the canonical domain
};

/// Builds the field p(x) over a window from a pattern (test helper and the
/// self-match path).
IntField synthesize(const PeriodicPattern& pattern, const Window& window);

/// Structure data attached to a pattern: symmetric P with PV = A plus the
/// associated integer matrices, and optionally a tile with its Laplacian
/// values for the boundary / covering checks.
struct PatternData {
    RatMat2 P;
    IMat23 A{};
    IMat23 V{};
    std::optional<std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t>> tile;  // cell -> laplacian
};

struct StructureReport {
    bool pv_equals_a = false;
    bool row_sums_vanish = false;
    bool symplectic = false;
    bool v_rank2 = false;
    double covolume = 0.0;  // sqrt(det(V V^t))
    bool tile_boundary_two = true;   // vacuous without a tile
    bool tile_covers = true;         // vacuous without a tile
    bool tile_overlaps_on_boundary = true;
    std::vector<std::string> violations;
    bool pass() const { return violations.empty(); }
};

StructureReport validate_structure(const PatternData& data);

/// |x|_V = max_i |(V^t x)_i|
std::int64_t v_norm(const IMat23& V, const IVec2& x);

/// min { |y|_1 : V y = x } over integer y, or nullopt when x is not in the
/// integer column span. Requires rank 2 and V * (1,1,1)^t = 0 (the kernel is
/// then spanned by (1,1,1), and the minimum is a one-parameter search).
std::optional<std::int64_t> vinv_norm(const IMat23& V, const IVec2& x);

struct MatchReport {
    std::string region;
    std::int64_t r = 0;
    std::int64_t total = 0;
    std::int64_t matched = 0;
    double fraction = 0.0;
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> offsets;  // matched offset histogram
};

/// Lattice region: explicit cells or a rational polygon at scale n, plus an
/// erosion margin (Euclidean, in lattice units).
class Region {
public:
    static Region from_cells(std::vector<LatticePoint> cells, std::int64_t margin = 0);
    static Region from_polygon(std::vector<RatPoint> polygon, std::int64_t scale,
                               std::int64_t margin = 0);

    std::int64_t margin() const { return margin_; }
    Region with_margin(std::int64_t m) const;

    /// region cells (polygon rasterized at its scale), before erosion
    const std::vector<LatticePoint>& cells() const { return cells_; }
    /// cells surviving erosion by max(margin, extra)
    std::vector<LatticePoint> eroded(std::int64_t extra = 0) const;

    std::string describe() const;

private:
    std::vector<LatticePoint> cells_;
    std::int64_t margin_ = 0;
    std::string desc_;
};

/// Does the pattern r-match the image at x: is there an offset y with
/// image(x+z) = pattern(y+z) for every lattice z with |z| <= r? Returns the
/// lexicographically least matching coset representative.
std::optional<LatticePoint> match_at(const IntField& image, const PeriodicPattern& pattern,
                                     LatticePoint x, std::int64_t r);

/// Fraction of eroded region points where the pattern r-matches the image.
MatchReport match_fraction(const IntField& image, const PeriodicPattern& pattern,
                           const Region& region, std::int64_t r, int threads = 1);

/// Finds the lattice of shifts t, |t| <= bound, under which the image is
/// invariant on the region, and extracts the pattern. Failure is a value.
std::optional<PeriodicPattern> detect_period(const IntField& image, const Region& region,
                                             std::int64_t bound);

struct QuadraticFit {
    RatMat2 P;        // rounded to denominators <= 10
    double b1 = 0, b2 = 0, c = 0;
    double residual = 0;  // max |field - fit| over the region
};

/// Least-squares quadratic fit x.P x/2 + b.x + c over the region, with the
/// Hessian rounded to the nearest rationals with denominator at most 10.
QuadraticFit fit_quadratic(const IntField& field, const Region& region);

// small exact lattice helpers (used by detect_period and the tests)

/// Lagrange-reduced basis of the lattice spanned by a, b with a deterministic
/// sign and order convention (shortest first, lexicographically positive).
std::pair<IVec2, IVec2> gauss_reduce(IVec2 a, IVec2 b);

/// Column Hermite form of the rank-2 lattice spanned by a, b:
/// columns (h11, h21) and (0, h22), h11 > 0, h22 > 0, 0 <= h21 < h22.
std::array<std::int64_t, 3> hnf2(IVec2 a, IVec2 b);

}  // namespace sandpile
