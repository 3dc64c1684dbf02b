#include "sandpile/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sandpile/parallel.hpp"

namespace sandpile {

namespace {

bool is_unit_square(const ShapeSpec& s) { return s.kind == ShapeSpec::Kind::UnitSquare; }
bool is_square2(const ShapeSpec& s) { return s.kind == ShapeSpec::Kind::Square2; }

Rat fold1(const Rat& v) { return v < 0 ? Rat(-v) : v; }

// continuum coordinate of a lattice point for the solved shape
RatPoint continuum_coord(const DomainMask& mask, LatticePoint p) {
    if (is_unit_square(mask.shape))
        return {Rat(2 * p.x - mask.n, mask.n), Rat(2 * p.y - mask.n, mask.n)};
    return {Rat(p.x, mask.n), Rat(p.y, mask.n)};
}

}  // namespace

double sup_error_against(const SuperSolution& ss, const Solution& sol, int threads) {
    const DomainMask& mask = sol.mask;
    const bool unit = is_unit_square(mask.shape);
    const Rat scale2 = unit ? Rat(mask.n) * Rat(mask.n) / 4 : Rat(mask.n) * Rat(mask.n);

    const Window& w = mask.win;
    std::vector<double> row_sup(static_cast<std::size_t>(w.height), 0.0);
    parallel_for(static_cast<std::size_t>(w.height), threads, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
            std::int64_t py = w.y0 + static_cast<std::int64_t>(r);
            std::vector<Rat> xs;
            std::vector<LatticePoint> pts;
            for (std::int64_t px = w.x0; px < w.x0 + w.width; ++px) {
                if (!mask.is_member({px, py})) continue;
                pts.push_back({px, py});
            }
            if (pts.empty()) continue;
            Rat y = fold1(continuum_coord(mask, pts[0]).y);
            if (y > 1) continue;
            for (auto p : pts) xs.push_back(fold1(continuum_coord(mask, p).x));
            std::sort(xs.begin(), xs.end(), [](const Rat& a, const Rat& b) { return a > b; });
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            std::vector<Rat> vals = ss.value_row(y, xs);
            double sup = 0;
            for (auto p : pts) {
                Rat ax = fold1(continuum_coord(mask, p).x);
                auto it = std::lower_bound(xs.begin(), xs.end(), ax,
                                           [](const Rat& a, const Rat& b) { return a > b; });
                double pred = rat_to_double(scale2 * vals[static_cast<std::size_t>(it - xs.begin())]);
                sup = std::max(sup, std::fabs(static_cast<double>(sol.u.at(p)) - pred));
            }
            row_sup[r] = sup;
        }
    });
    double sup = 0;
    for (double s : row_sup) sup = std::max(sup, s);
    return sup;
}

std::vector<ConvergenceRow> convergence_report(const ShapeSpec& shape,
                                               const std::vector<std::int64_t>& ns, int depth,
                                               int threads) {
    if (!is_unit_square(shape) && !is_square2(shape))
        throw std::domain_error("convergence_report: only the square shapes have a continuum field");
    for (std::size_t i = 0; i + 1 < ns.size(); ++i)
        if (!(ns[i] < ns[i + 1])) throw std::domain_error("convergence_report: ns must increase");

    SuperSolution ss = ifs_generate(depth);
    SuperSolution ss_prev = ifs_generate(depth > 0 ? depth - 1 : 0);

    std::vector<ConvergenceRow> rows;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        std::int64_t n = ns[i];
        Solution sol = solve_least(build_mask(shape, n), 2, threads);
        ConvergenceRow row;
        row.n = n;
        row.depth = depth;
        row.members = static_cast<std::int64_t>(sol.mask.member_count);
        row.burn_pass = sol.stats.burn_pass;
        row.sup_error = sup_error_against(ss, sol, threads);
        row.sup_error_prev = sup_error_against(ss_prev, sol, threads);
        row.normalized = row.sup_error / (static_cast<double>(n) * static_cast<double>(n));
        if (!rows.empty() && rows.back().sup_error > 0 && row.sup_error > 0)
            row.exponent = std::log(row.sup_error / rows.back().sup_error) /
                           std::log(static_cast<double>(n) / static_cast<double>(rows.back().n));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<LatticePoint> ownership_cells(const SuperSolution& ss, const DomainMask& mask,
                                          const PatchRef& ref) {
    std::vector<LatticePoint> out;
    const Window& w = mask.win;
    for (std::int64_t py = w.y0; py < w.y0 + w.height; ++py)
        for (std::int64_t px = w.x0; px < w.x0 + w.width; ++px) {
            LatticePoint p{px, py};
            if (!mask.is_member(p)) continue;
            RatPoint x = continuum_coord(mask, p);
            Rat ax = fold1(x.x), ay = fold1(x.y);
            if (ax > 1 || ay > 1) continue;
            // first-quadrant fold representative only, to keep one copy
            if (x.x < 0 || x.y < 0) continue;
            PatchRef o = ss.owner({ax, ay});
            if (o.layer == ref.layer && o.index == ref.index) out.push_back(p);
        }
    return out;
}

namespace {

struct RankedPiece {
    PatchRef ref;
    Rat own_area;
    const TriangleMap* tm;
};

std::vector<RankedPiece> ranked_w_pieces(const SuperSolution& ss) {
    auto areas = ownership_areas(ss);
    std::vector<RankedPiece> out;
    std::size_t oi = 1;  // order: base, then w layers, then z
    for (int li = 1; li <= ss.depth(); ++li) {
        const auto& lay = ss.w_layers()[static_cast<std::size_t>(li - 1)];
        for (std::size_t i = 0; i < lay.size(); ++i, ++oi)
            out.push_back({{li, static_cast<int>(i)}, areas[oi], &lay[i]});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RankedPiece& a, const RankedPiece& b) { return a.own_area > b.own_area; });
    return out;
}

}  // namespace

std::vector<DefectReport> defect_report(const Solution& sol, const SuperSolution& ss,
                                        const std::vector<std::int64_t>& rs, int k_max,
                                        int threads) {
    if (rs.empty()) throw std::domain_error("defect_report: need at least one radius");
    std::int64_t rmax = *std::max_element(rs.begin(), rs.end());
    auto ranked = ranked_w_pieces(ss);
    if (static_cast<int>(ranked.size()) < k_max)
        throw std::domain_error("defect_report: not enough w pieces for k_max");

    IntField lap = laplacian_field(sol.u, sol.u.window());
    std::vector<DefectReport> rows;
    for (int k = 1; k <= k_max; ++k) {
        const auto& piece = ranked[static_cast<std::size_t>(k - 1)];
        auto cells = ownership_cells(ss, sol.mask, piece.ref);
        Region region = Region::from_cells(cells);
        const Rat lattice_scale = sol.mask.shape.kind == ShapeSpec::Kind::UnitSquare
                                      ? Rat(sol.mask.n, 2)
                                      : Rat(sol.mask.n);

        // pattern from the fixed (largest) erosion so every radius row uses
        // the same pattern
        auto fixed_cells = region.with_margin(rmax + 2).eroded();
        std::optional<PeriodicPattern> pat;
        if (!fixed_cells.empty()) {
            std::int64_t dia = 1;
            {
                std::int64_t x0 = fixed_cells[0].x, x1 = x0, y0 = fixed_cells[0].y, y1 = y0;
                for (auto p : fixed_cells) {
                    x0 = std::min(x0, p.x);
                    x1 = std::max(x1, p.x);
                    y0 = std::min(y0, p.y);
                    y1 = std::max(y1, p.y);
                }
                dia = static_cast<std::int64_t>(
                    std::sqrt(static_cast<double>((x1 - x0) * (x1 - x0) + (y1 - y0) * (y1 - y0))));
            }
            std::int64_t bound = std::min<std::int64_t>(24, dia / 8);
            if (bound >= 1) pat = detect_period(lap, Region::from_cells(fixed_cells), bound);
        }

        for (auto r : rs) {
            DefectReport row;
            row.k = k;
            row.word = piece.tm->word;
            for (const auto& v : piece.tm->dom) {
                RatPoint sv{lattice_scale * v.x, lattice_scale * v.y};
                if (sol.mask.shape.kind == ShapeSpec::Kind::UnitSquare) {
                    sv.x += Rat(sol.mask.n, 2);
                    sv.y += Rat(sol.mask.n, 2);
                }
                row.patch_scaled.push_back(sv);
            }
            row.r = r;
            auto eroded = region.with_margin(r + 2).eroded();
            row.eroded_points = static_cast<std::int64_t>(eroded.size());
            if (!pat || eroded.empty()) {
                row.skipped = true;
                rows.push_back(std::move(row));
                continue;
            }
            row.period_detected = true;
            row.covolume = pat->covolume();
            // the margin already covers the matching radius, so the single
            // erosion inside match_fraction is by r + 2 (or rmax + 2)
            row.fraction = match_fraction(lap, *pat, region.with_margin(r + 2), r, threads).fraction;
            if (!fixed_cells.empty())
                row.fraction_fixed =
                    match_fraction(lap, *pat, region.with_margin(rmax + 2), r, threads).fraction;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<PerfectPatchRow> perfect_check(const std::vector<int>& ms, std::int64_t min_patch,
                                           const std::vector<std::int64_t>& contrast_ns,
                                           int threads) {
    std::vector<std::int64_t> ns;
    for (int m : ms) {
        if (m < 1 || m > 6) throw std::domain_error("perfect_check: m must be in 1..6");
        std::int64_t n = 1;
        for (int i = 0; i < m; ++i) n *= 3;
        ns.push_back(n);
    }
    ns.insert(ns.end(), contrast_ns.begin(), contrast_ns.end());

    const int depth = 8;
    SuperSolution ss = ifs_generate(depth);
    auto ranked = ranked_w_pieces(ss);
    const std::int64_t r = 2;

    std::vector<PerfectPatchRow> rows;
    for (auto n : ns) {
        Solution sol = solve_least(build_mask(ShapeSpec::unit_square(), n), 2, threads);
        IntField lap = laplacian_field(sol.u, sol.u.window());
        bool pow3 = [n] {
            std::int64_t v = n;
            while (v % 3 == 0) v /= 3;
            return v == 1;
        }();
        for (std::size_t ki = 0; ki < ranked.size() && ki < 12; ++ki) {
            auto cells = ownership_cells(ss, sol.mask, ranked[ki].ref);
            Region region = Region::from_cells(cells, r + 2);
            auto eroded = region.eroded();
            if (static_cast<std::int64_t>(eroded.size()) < min_patch) continue;
            PerfectPatchRow row;
            row.n = n;
            row.power_of_three = pow3;
            row.k = static_cast<int>(ki + 1);
            row.word = ranked[ki].tm->word;
            row.points = static_cast<std::int64_t>(eroded.size());
            std::int64_t dia = static_cast<std::int64_t>(std::sqrt(static_cast<double>(eroded.size()))) * 2;
            std::int64_t bound = std::min<std::int64_t>(24, std::max<std::int64_t>(1, dia / 8));
            auto pat = detect_period(lap, Region::from_cells(eroded), bound);
            if (pat) {
                row.period_detected = true;
                row.covolume = pat->covolume();
                auto rep = match_fraction(lap, *pat, region, r, threads);
                row.defects = rep.total - rep.matched;
            } else {
                row.defects = row.points;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

DecayReport patch_measure_decay(const SuperSolution& ss) {
    DecayReport rep;
    auto areas = ownership_areas(ss);
    rep.base_area = areas[0];
    Rat total(0);
    std::size_t oi = 1;
    for (int li = 1; li <= ss.depth(); ++li) {
        const auto& lay = ss.w_layers()[static_cast<std::size_t>(li - 1)];
        for (std::size_t i = 0; i < lay.size(); ++i, ++oi) {
            rep.w_areas_sorted.push_back(areas[oi]);
            rep.w_total += areas[oi];
        }
    }
    for (std::size_t i = oi; i < areas.size(); ++i) rep.z_total += areas[i];
    std::sort(rep.w_areas_sorted.begin(), rep.w_areas_sorted.end(),
              [](const Rat& a, const Rat& b) { return a > b; });
    total = rep.base_area + rep.w_total + rep.z_total;
    rep.sums_to_one = total == Rat(1);

    // least-squares slope of log(area) against rank
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < rep.w_areas_sorted.size(); ++i) {
        if (rep.w_areas_sorted[i] == 0) continue;
        double x = static_cast<double>(i);
        double y = std::log(rat_to_double(rep.w_areas_sorted[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) {
        double denom = static_cast<double>(cnt) * sxx - sx * sx;
        double slope = (static_cast<double>(cnt) * sxy - sx * sy) / denom;
        rep.ratio = std::exp(slope);
        rep.decay_ok = rep.ratio < 1.0;
    }
    return rep;
}

}  // namespace sandpile
