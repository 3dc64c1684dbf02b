#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sandpile/continuum.hpp"
#include "sandpile/patterns.hpp"
#include "sandpile/solver.hpp"

namespace sandpile {

struct ConvergenceRow {
    std::int64_t n = 0;
    int depth = 0;
    double sup_error = 0;         // max over members |u_n(p) - n^2 vbar(p/n)|
    double sup_error_prev = 0;    // same against depth-1 (supersolution gap witness)
    double normalized = 0;        // sup_error / n^2
    std::optional<double> exponent;  // log(e'/e)/log(n'/n) vs the previous row
    std::int64_t members = 0;
    bool burn_pass = false;
};

/// Solves each n over the square and compares against the sampled continuum
/// field. Supported shapes: the centered square (direct sampling at p/n) and
/// the unit square (sampling at (2p-n)/n with the n^2/4 scale).
std::vector<ConvergenceRow> convergence_report(const ShapeSpec& shape,
                                               const std::vector<std::int64_t>& ns, int depth,
                                               int threads = 1);

/// max over members of |u(p) - scale^2 vbar(x(p))| for a solved square mask,
/// sharing one integration pass per row.
double sup_error_against(const SuperSolution& ss, const Solution& sol, int threads = 1);

struct DefectReport {
    int k = 0;  // 1-based rank of the piece by decreasing ownership area
    IfsWord word;
    std::vector<RatPoint> patch_scaled;  // piece triangle in lattice coordinates
    std::int64_t r = 0;
    std::int64_t eroded_points = 0;
    double fraction = 0.0;          // eroded by r + margin, as reported
    double fraction_fixed = 0.0;    // eroded by max(rs) + margin (monotone in r)
    std::int64_t covolume = 0;
    bool period_detected = false;
    bool skipped = false;
};

/// For each of the k_max largest w pieces, extracts the empirical pattern of
/// the Laplacian inside the piece ownership region and reports the matched
/// fraction at each radius. The erosion margin is r + 2.
std::vector<DefectReport> defect_report(const Solution& sol, const SuperSolution& ss,
                                        const std::vector<std::int64_t>& rs, int k_max,
                                        int threads = 1);

struct PerfectPatchRow {
    std::int64_t n = 0;
    bool power_of_three = false;
    int k = 0;
    IfsWord word;
    std::int64_t points = 0;
    std::int64_t defects = 0;  // eroded ownership points where the pattern fails to r-match
    std::int64_t covolume = 0;
    bool period_detected = false;
};

/// Per-patch defect counts for n = 3^m (plus optional contrast scales),
/// matching radius r = 2; patches with fewer eroded points than min_patch are
/// omitted. Exploratory: the caller decides what to conclude.
std::vector<PerfectPatchRow> perfect_check(const std::vector<int>& ms, std::int64_t min_patch,
                                           const std::vector<std::int64_t>& contrast_ns = {},
                                           int threads = 1);

struct DecayReport {
    std::vector<Rat> w_areas_sorted;  // ownership areas of w pieces, descending
    Rat w_total{0};
    Rat z_total{0};     // unresolved remainder (z layer ownership)
    Rat base_area{0};   // base ownership
    bool sums_to_one = false;
    double ratio = 0;   // fitted geometric decay ratio of the sorted areas
    bool decay_ok = false;  // ratio < 1
};

DecayReport patch_measure_decay(const SuperSolution& ss);

/// Ownership cell mask of a piece in the lattice picture of a solved mask
/// (unit square: continuum x = (2p-n)/n; centered square: x = p/n), folded to
/// the first quadrant representative.
std::vector<LatticePoint> ownership_cells(const SuperSolution& ss, const DomainMask& mask,
                                          const PatchRef& ref);

}  // namespace sandpile
