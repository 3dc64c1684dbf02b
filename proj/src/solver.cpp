#include "sandpile/solver.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <thread>

#include "sandpile/parallel.hpp"

namespace sandpile {

namespace {

// Upper bound for v = -u on members: the separable quadratic
// psi(p) = t1*(t1+1)/2 + t2*(t2+1)/2 (t = p - window center) has constant
// laplacian 2, so by the maximum principle v <= max psi over the padded
// window; scale by ceil(cutoff/2) for other nonnegative cutoffs.
std::int64_t initial_bound(const DomainMask& mask, std::int64_t cutoff) {
    const Window& w = mask.win;
    std::int64_t dx = w.width - 1, dy = w.height - 1;
    std::int64_t diam2 = dx * dx + dy * dy;
    std::int64_t scale = cutoff >= 0 ? (cutoff + 1) / 2 + 1 : 1;
    return diam2 * scale + 4;
}

void audit_solution(const Solution& sol) {
    const Window& w = sol.u.window();
    for (std::int64_t y = w.y0; y < w.y0 + w.height; ++y)
        for (std::int64_t x = w.x0; x < w.x0 + w.width; ++x) {
            LatticePoint p{x, y};
            if (sol.mask.is_member(p)) {
                if (laplacian_at(sol.u, p) > sol.cutoff)
                    throw std::runtime_error("solve_least: constraint violated after convergence");
            } else if (sol.u.at(p) != 0) {
                throw std::runtime_error("solve_least: nonzero value off members");
            }
        }
}

struct Grid {
    std::int64_t w, h;  // member window interior dims
    std::vector<std::int64_t> v;
    std::vector<std::uint8_t> mem;
    std::size_t idx(std::int64_t x, std::int64_t y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
               static_cast<std::size_t>(x);
    }
};

// One Gauss-Seidel pass over rows [ry0, ry1); alternating directions by
// sweep parity. Only decreases values, never below the fixed point.
std::int64_t sweep_rows(Grid& g, std::int64_t cutoff, std::int64_t ry0, std::int64_t ry1,
                        int parity) {
    std::int64_t changed = 0;
    bool flip_y = parity & 2, flip_x = parity & 1;
    for (std::int64_t yy = ry0; yy < ry1; ++yy) {
        std::int64_t y = flip_y ? ry1 - 1 - (yy - ry0) : yy;
        for (std::int64_t xx = 0; xx < g.w; ++xx) {
            std::int64_t x = flip_x ? g.w - 1 - xx : xx;
            std::size_t i = g.idx(x, y);
            if (!g.mem[i]) continue;
            std::int64_t nb = 0;
            if (x + 1 < g.w) nb += g.v[i + 1];
            if (x > 0) nb += g.v[i - 1];
            if (y + 1 < g.h) nb += g.v[i + static_cast<std::size_t>(g.w)];
            if (y > 0) nb += g.v[i - static_cast<std::size_t>(g.w)];
            std::int64_t num = nb + cutoff;
            std::int64_t cap = num >= 0 ? num / 4 : -((-num + 3) / 4);
            if (cap < g.v[i]) {
                g.v[i] = cap;
                ++changed;
            }
        }
    }
    return changed;
}

}  // namespace

Solution solve_least(const DomainMask& mask, std::int64_t cutoff, int threads) {
    auto t0 = std::chrono::steady_clock::now();
    Solution sol;
    sol.mask = mask;
    sol.cutoff = cutoff;
    sol.u = IntField(mask.win);

    if (mask.member_count == 0) {
        sol.stats.strategy = "empty";
        sol.stats.burn_pass = true;
        return sol;
    }

    // work on the window interior (members never touch the padded border)
    Grid g;
    g.w = mask.win.width;
    g.h = mask.win.height;
    g.v.assign(mask.win.cells(), 0);
    g.mem = mask.member;
    std::int64_t B = initial_bound(mask, cutoff);
    for (std::size_t i = 0; i < g.v.size(); ++i)
        if (g.mem[i]) g.v[i] = B;

    std::int64_t sweeps = 0, updates = 0;
    if (threads <= 1 || g.h < 8 * threads) {
        // alternating-direction sweeps with a row worklist: after the first
        // full sweep only rows around changed sites are re-examined
        std::vector<std::uint8_t> dirty(static_cast<std::size_t>(g.h), 1);
        for (;;) {
            int parity = static_cast<int>(sweeps & 3);
            bool flip_y = parity & 2;
            std::vector<std::uint8_t> next(static_cast<std::size_t>(g.h), 0);
            std::int64_t ch = 0;
            for (std::int64_t yy = 0; yy < g.h; ++yy) {
                std::int64_t y = flip_y ? g.h - 1 - yy : yy;
                if (!dirty[static_cast<std::size_t>(y)]) continue;
                std::int64_t c = sweep_rows(g, cutoff, y, y + 1, parity);
                if (c) {
                    ch += c;
                    if (y > 0) next[static_cast<std::size_t>(y - 1)] = 1;
                    next[static_cast<std::size_t>(y)] = 1;
                    if (y + 1 < g.h) next[static_cast<std::size_t>(y + 1)] = 1;
                }
            }
            ++sweeps;
            updates += ch;
            if (ch == 0) break;
            dirty = std::move(next);
        }
        sol.stats.strategy = "row-worklist";
    } else {
        // Strip decomposition on persistent workers. In each round a worker
        // relaxes the interior rows of its strip to a local fixed point (it
        // writes only interior rows and reads at most the frozen strip
        // boundary rows); the boundary rows are then relaxed serially.
        // Every update keeps v above the unique fixed point, so the
        // converged field is identical to the serial result.
        std::size_t nstrips = static_cast<std::size_t>(threads);
        std::vector<std::int64_t> cuts(nstrips + 1);
        for (std::size_t i = 0; i <= nstrips; ++i)
            cuts[i] = static_cast<std::int64_t>(static_cast<std::size_t>(g.h) * i / nstrips);
        std::vector<std::int64_t> boundary_rows;
        for (std::size_t s = 0; s < nstrips; ++s) {
            boundary_rows.push_back(cuts[s]);
            if (cuts[s + 1] - 1 > cuts[s]) boundary_rows.push_back(cuts[s + 1] - 1);
        }

        std::atomic<std::int64_t> round_changes{0};
        std::atomic<std::int64_t> total_updates{0};
        std::atomic<bool> done{false};
        std::int64_t round = 0;
        std::barrier sync(static_cast<std::ptrdiff_t>(nstrips), [&]() noexcept {
            // serial phase between parallel phases: boundary rows, then the
            // global convergence decision
            std::int64_t ch = 0;
            for (auto r : boundary_rows) ch += sweep_rows(g, cutoff, r, r + 1, static_cast<int>(round & 3));
            total_updates.fetch_add(ch);
            round_changes.fetch_add(ch);
            if (round_changes.exchange(0) == 0) done.store(true);
            ++round;
        });

        auto worker = [&](std::size_t s) {
            std::int64_t lo = cuts[s] + 1, hi = cuts[s + 1] - 1;
            while (!done.load()) {
                std::int64_t ch = 0;
                if (lo < hi) {
                    for (int pass = 0; pass < 8; ++pass) {
                        std::int64_t c = sweep_rows(g, cutoff, lo, hi,
                                                    static_cast<int>((round + pass) & 3));
                        ch += c;
                        if (c == 0) break;
                    }
                }
                round_changes.fetch_add(ch);
                total_updates.fetch_add(ch);
                sync.arrive_and_wait();
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t s = 0; s < nstrips; ++s) pool.emplace_back(worker, s);
        for (auto& t : pool) t.join();
        sweeps = round;
        updates = total_updates.load();
        sol.stats.strategy = "strips";
    }

    for (std::int64_t y = 0; y < g.h; ++y)
        for (std::int64_t x = 0; x < g.w; ++x) {
            std::size_t i = g.idx(x, y);
            if (g.mem[i]) sol.u.values()[i] = -g.v[i];
        }
    sol.stats.sweeps = sweeps;
    sol.stats.updates = updates;
    audit_solution(sol);
    sol.stats.burn_pass = burning_certificate(sol).pass;
    sol.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

std::int64_t brute_force_bound(const DomainMask& mask, std::int64_t cutoff) {
    const Window& w = mask.win;
    std::int64_t cx = w.x0 + w.width / 2, cy = w.y0 + w.height / 2;
    auto psi1 = [](std::int64_t t) { return t * (t + 1) / 2; };
    std::int64_t m = 0;
    for (std::int64_t y = w.y0 - 1; y <= w.y0 + w.height; ++y)
        for (std::int64_t x = w.x0 - 1; x <= w.x0 + w.width; ++x)
            m = std::max(m, psi1(x - cx) + psi1(y - cy));
    std::int64_t scale = cutoff >= 0 ? (cutoff + 1) / 2 + 1 : 1;
    return -m * scale;
}

Solution brute_force_least(const DomainMask& mask, std::int64_t cutoff, std::int64_t lo) {
    if (mask.member_count > 12) throw std::domain_error("brute_force_least: too many members");
    if (lo > 0) throw std::domain_error("brute_force_least: lo must be <= 0");
    Solution sol;
    sol.mask = mask;
    sol.cutoff = cutoff;
    sol.u = IntField(mask.win);
    if (mask.member_count == 0) {
        sol.stats.strategy = "brute-empty";
        return sol;
    }

    auto cells = mask.members();
    const int m = static_cast<int>(cells.size());
    std::vector<std::array<int, 4>> nbrs(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        int k = 0;
        for (auto d : {LatticePoint{1, 0}, LatticePoint{-1, 0}, LatticePoint{0, 1}, LatticePoint{0, -1}}) {
            LatticePoint q = cells[static_cast<std::size_t>(i)] + d;
            for (int j = 0; j < m; ++j)
                if (cells[static_cast<std::size_t>(j)] == q) nbrs[static_cast<std::size_t>(i)][static_cast<std::size_t>(k++)] = j;
        }
        while (k < 4) nbrs[static_cast<std::size_t>(i)][static_cast<std::size_t>(k++)] = -1;
    }

    std::vector<std::int64_t> val(static_cast<std::size_t>(m), 0);
    std::vector<std::int64_t> best(static_cast<std::size_t>(m), 0);  // u = 0 is feasible for cutoff >= 0
    std::vector<std::uint8_t> assigned(static_cast<std::size_t>(m), 0);
    bool any_feasible = cutoff >= 0;

    // Constraint at j is satisfiable given the partial assignment iff
    //   sum(assigned neighbor values) + (#unassigned)*lo - 4*val[j] <= cutoff.
    // Unassigned values can only be >= lo, so this prune is sound; once all
    // neighbors of j are assigned it is the exact constraint.
    auto partial_ok = [&](int j) {
        std::int64_t s = 0;
        std::int64_t un = 0;
        for (int q : nbrs[static_cast<std::size_t>(j)]) {
            if (q < 0) continue;  // exterior neighbor, value 0
            if (assigned[static_cast<std::size_t>(q)]) s += val[static_cast<std::size_t>(q)];
            else ++un;
        }
        return s + un * lo - 4 * val[static_cast<std::size_t>(j)] <= cutoff;
    };

    // depth-first product scan of {lo..0}^m with sound pruning
    std::vector<std::int64_t> stack_val(static_cast<std::size_t>(m), lo - 1);
    int depth = 0;
    stack_val[0] = lo - 1;
    while (depth >= 0) {
        std::size_t d = static_cast<std::size_t>(depth);
        ++stack_val[d];
        if (stack_val[d] > 0) {
            stack_val[d] = lo - 1;
            assigned[d] = 0;
            --depth;
            continue;
        }
        val[d] = stack_val[d];
        assigned[d] = 1;
        bool ok = partial_ok(depth);
        if (ok)
            for (int q : nbrs[d]) {
                if (q >= 0 && q < depth && !partial_ok(q)) {
                    ok = false;
                    break;
                }
            }
        if (!ok) {
            assigned[d] = 0;
            continue;
        }
        if (depth == m - 1) {
            any_feasible = true;
            for (int i = 0; i < m; ++i)
                best[static_cast<std::size_t>(i)] = std::min(best[static_cast<std::size_t>(i)], val[static_cast<std::size_t>(i)]);
            assigned[d] = 0;
            continue;
        }
        ++depth;
    }

    if (!any_feasible) throw std::domain_error("brute_force_least: no feasible field in range");
    for (int i = 0; i < m; ++i) sol.u.set(cells[static_cast<std::size_t>(i)], best[static_cast<std::size_t>(i)]);
    sol.stats.strategy = "brute";
    return sol;
}

BurnReport burning_certificate(const Solution& sol) {
    BurnReport rep;
    auto cells = sol.mask.members();
    const Window& w = sol.mask.win;

    std::vector<std::int64_t> lap(w.cells(), 0);
    std::vector<std::uint8_t> in_y(w.cells(), 0);
    for (auto p : cells) {
        std::int64_t l = laplacian_at(sol.u, p);
        if (l > sol.cutoff) throw std::domain_error("burning_certificate: constraint violated");
        lap[w.index(p)] = l;
        in_y[w.index(p)] = 1;
    }

    auto nbr_in_y = [&](LatticePoint p) {
        std::int64_t c = 0;
        for (auto d : {LatticePoint{1, 0}, LatticePoint{-1, 0}, LatticePoint{0, 1}, LatticePoint{0, -1}}) {
            LatticePoint q = p + d;
            if (w.contains(q) && in_y[w.index(q)]) ++c;
        }
        return c;
    };

    // simultaneous rounds: only neighbors of the last round's burns can
    // become burnable, so the candidate set shrinks to those
    std::vector<LatticePoint> frontier = cells;
    std::vector<std::uint8_t> in_frontier(w.cells(), 1);
    std::int64_t round = 0;
    while (!frontier.empty()) {
        ++round;
        std::vector<LatticePoint> now;
        for (auto p : frontier) {
            in_frontier[w.index(p)] = 0;
            if (in_y[w.index(p)] && lap[w.index(p)] + 4 - nbr_in_y(p) > sol.cutoff)
                now.push_back(p);
        }
        if (now.empty()) break;
        std::vector<LatticePoint> next;
        for (auto p : now) in_y[w.index(p)] = 0;
        for (auto p : now) {
            rep.burned.emplace_back(p, round);
            for (auto d : {LatticePoint{1, 0}, LatticePoint{-1, 0}, LatticePoint{0, 1}, LatticePoint{0, -1}}) {
                LatticePoint q = p + d;
                if (w.contains(q) && in_y[w.index(q)] && !in_frontier[w.index(q)]) {
                    in_frontier[w.index(q)] = 1;
                    next.push_back(q);
                }
            }
        }
        frontier = std::move(next);
    }
    for (auto p : cells)
        if (in_y[w.index(p)]) rep.unburned.push_back(p);
    rep.pass = rep.unburned.empty();
    return rep;
}

std::pair<IntField, IntField> stabilize(const SandpileConfig& config, std::int64_t cutoff) {
    const DomainMask& mask = config.mask;
    const Window& w = mask.win;
    for (auto p : mask.members())
        if (config.s.at(p) < 0) throw std::domain_error("stabilize: negative grains on a member");

    IntField odo(w), s(w);
    for (std::int64_t y = w.y0; y < w.y0 + w.height; ++y)
        for (std::int64_t x = w.x0; x < w.x0 + w.width; ++x)
            s.set({x, y}, config.s.at({x, y}));

    std::deque<LatticePoint> queue;
    std::vector<std::uint8_t> queued(w.cells(), 0);
    auto enqueue = [&](LatticePoint p) {
        if (mask.is_member(p) && !queued[w.index(p)] && s.at(p) >= cutoff + 1) {
            queue.push_back(p);
            queued[w.index(p)] = 1;
        }
    };
    for (auto p : mask.members()) enqueue(p);

    while (!queue.empty()) {
        LatticePoint p = queue.front();
        queue.pop_front();
        queued[w.index(p)] = 0;
        while (s.at(p) >= cutoff + 1) {
            s.set(p, s.at(p) - 4);
            odo.set(p, odo.at(p) + 1);
            for (auto d : {LatticePoint{1, 0}, LatticePoint{-1, 0}, LatticePoint{0, 1}, LatticePoint{0, -1}}) {
                LatticePoint q = p + d;
                if (w.contains(q)) s.set(q, s.at(q) + 1);  // off-mask cells are sinks
                enqueue(q);
            }
        }
    }
    // grains that fell on non-member window cells vanish
    for (std::int64_t y = w.y0; y < w.y0 + w.height; ++y)
        for (std::int64_t x = w.x0; x < w.x0 + w.width; ++x)
            if (!mask.is_member({x, y})) s.set({x, y}, config.s.at({x, y}));
    return {odo, s};
}

}  // namespace sandpile
