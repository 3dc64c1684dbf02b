#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sandpile/field.hpp"
#include "sandpile/shape.hpp"

namespace sandpile {

struct SolveStats {
    std::int64_t sweeps = 0;
    std::int64_t updates = 0;
    double wall_ms = 0.0;
    bool burn_pass = false;
    std::string strategy;
};

/// Least integer field u with laplacian(u) <= cutoff on mask members and
/// u = 0 elsewhere.
struct Solution {
    IntField u;
    DomainMask mask;
    std::int64_t cutoff = 2;
    SolveStats stats;
};

struct BurnReport {
    std::vector<std::pair<LatticePoint, std::int64_t>> burned;  // point, round
    std::vector<LatticePoint> unburned;
    bool pass = false;
};

struct SandpileConfig {
    IntField s;
    DomainMask mask;
};

/// Computes the pointwise least u with laplacian(u) <= cutoff at members and
/// u = 0 off members. Internally iterates the damped monotone update
/// v <- min(v, floor((sum of neighbor v + cutoff)/4)) on v = -u from a
/// certified upper bound; the fixed point is unique, so the result does not
/// depend on sweep order or thread count.
Solution solve_least(const DomainMask& mask, std::int64_t cutoff = 2, int threads = 1);

/// Independent oracle: exhaustive search over assignments in {lo..0}^members
/// for the coordinatewise least feasible field. Branches that already violate
/// a constraint are pruned, which does not change the searched set.
/// Refuses masks with more than 12 members.
Solution brute_force_least(const DomainMask& mask, std::int64_t cutoff, std::int64_t lo);

/// Certified lower bound for brute_force_least: -max of the separable
/// comparison quadratic over the padded mask window (maximum principle).
std::int64_t brute_force_bound(const DomainMask& mask, std::int64_t cutoff = 2);

/// Least-ness certificate. Burns p in Y when
/// laplacian(u)(p) + 4 - #(neighbors of p in Y) > cutoff; passes iff every
/// member burns. Passing is equivalent to u being the pointwise least
/// solution (decreasing u by 1 on any finite nonempty Y would violate the
/// constraint at the first site of Y that burns).
BurnReport burning_certificate(const Solution& sol);

/// Classic toppling: repeatedly picks a member p with s(p) >= cutoff + 1,
/// removes four grains and adds one to each neighbor (grains landing off the
/// mask vanish). Returns the topple-count field and the stable final
/// configuration; both are independent of the toppling order.
std::pair<IntField, IntField> stabilize(const SandpileConfig& config, std::int64_t cutoff = 2);

}  // namespace sandpile
