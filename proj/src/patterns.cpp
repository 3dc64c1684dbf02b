#include "sandpile/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "sandpile/parallel.hpp"

namespace sandpile {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t norm2(const IVec2& v) { return v[0] * v[0] + v[1] * v[1]; }
std::int64_t det2(const IVec2& a, const IVec2& b) { return a[0] * b[1] - a[1] * b[0]; }
IVec2 sub(const IVec2& a, const IVec2& b, std::int64_t q) { return {a[0] - q * b[0], a[1] - q * b[1]}; }

bool lex_positive(const IVec2& v) { return v[0] > 0 || (v[0] == 0 && v[1] > 0); }

std::vector<LatticePoint> ball_offsets(std::int64_t r) {
    std::vector<LatticePoint> out;
    for (std::int64_t dy = -r; dy <= r; ++dy)
        for (std::int64_t dx = -r; dx <= r; ++dx)
            if (dx * dx + dy * dy <= r * r) out.push_back({dx, dy});
    return out;
}

}  // namespace

std::array<std::int64_t, 3> hnf2(IVec2 a, IVec2 b) {
    if (det2(a, b) == 0) throw std::domain_error("hnf2: vectors are not independent");
    // column operations: reduce to (h11, h21), (0, h22)
    // first make the second column's x-entry zero with a gcd cascade
    while (b[0] != 0) {
        if (a[0] == 0) std::swap(a, b);
        if (b[0] == 0) break;
        std::int64_t q = floor_div(a[0], b[0]);
        a = sub(a, b, q);
        std::swap(a, b);
    }
    if (a[0] == 0) std::swap(a, b);
    if (a[0] < 0) { a[0] = -a[0]; a[1] = -a[1]; }
    if (b[1] < 0) { b[1] = -b[1]; }
    // reduce h21 modulo h22
    std::int64_t h21 = a[1] - floor_div(a[1], b[1]) * b[1];
    return {a[0], h21, b[1]};
}

std::pair<IVec2, IVec2> gauss_reduce(IVec2 a, IVec2 b) {
    if (det2(a, b) == 0) throw std::domain_error("gauss_reduce: vectors are not independent");
    for (;;) {
        if (norm2(b) < norm2(a)) std::swap(a, b);
        // nearest integer to dot/|a|^2
        std::int64_t d = a[0] * b[0] + a[1] * b[1];
        std::int64_t n = norm2(a);
        std::int64_t q = floor_div(2 * d + n, 2 * n);
        if (q == 0) break;
        b = sub(b, a, q);
    }
    if (norm2(b) < norm2(a)) std::swap(a, b);
    if (!lex_positive(a)) a = {-a[0], -a[1]};
    if (!lex_positive(b)) b = {-b[0], -b[1]};
    // shortest first; on ties the lexicographically larger one leads, so the
    // unit lattice reads ((1,0), (0,1))
    if (norm2(a) > norm2(b) || (norm2(a) == norm2(b) && a < b)) std::swap(a, b);
    return {a, b};
}

PeriodicPattern::PeriodicPattern(IVec2 v1, IVec2 v2,
                                 std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> tile)
    : v1_(v1), v2_(v2), tile_(std::move(tile)) {
    std::int64_t d = det2(v1, v2);
    if (d == 0) throw std::domain_error("PeriodicPattern: basis is not independent");
    cov_ = d < 0 ? -d : d;
    auto h = hnf2(v1, v2);
    h11_ = h[0];
    h21_ = h[1];
    h22_ = h[2];
    if (h11_ * h22_ != cov_) throw std::logic_error("PeriodicPattern: HNF determinant mismatch");
    if (static_cast<std::int64_t>(tile_.size()) != cov_)
        throw std::domain_error("PeriodicPattern: tile size must equal the basis covolume");
    values_.assign(static_cast<std::size_t>(cov_), 0);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(cov_), 0);
    for (const auto& [cell, v] : tile_) {
        LatticePoint rp = reduce({cell.first, cell.second});
        std::size_t idx = static_cast<std::size_t>(rp.y * h11_ + rp.x);
        if (seen[idx]) throw std::domain_error("PeriodicPattern: tile has two cells in one coset");
        seen[idx] = 1;
        values_[idx] = v;
    }
}

LatticePoint PeriodicPattern::reduce(LatticePoint p) const {
    // subtract multiples of (h11, h21) to put x into [0, h11)
    std::int64_t m = floor_div(p.x, h11_);
    p.x -= m * h11_;
    p.y -= m * h21_;
    std::int64_t k = floor_div(p.y, h22_);
    p.y -= k * h22_;
    return p;
}

std::int64_t PeriodicPattern::at(LatticePoint p) const {
    LatticePoint rp = reduce(p);
    return values_[static_cast<std::size_t>(rp.y * h11_ + rp.x)];
}

std::vector<LatticePoint> PeriodicPattern::coset_representatives() const {
    std::vector<LatticePoint> out;
    out.reserve(static_cast<std::size_t>(cov_));
    for (std::int64_t y = 0; y < h22_; ++y)
        for (std::int64_t x = 0; x < h11_; ++x) out.push_back({x, y});
    return out;
}

IntField synthesize(const PeriodicPattern& pattern, const Window& window) {
    IntField f(window);
    for (std::int64_t y = window.y0; y < window.y0 + window.height; ++y)
        for (std::int64_t x = window.x0; x < window.x0 + window.width; ++x)
            f.set({x, y}, pattern.at({x, y}));
    return f;
}

// ---- norms ----

std::int64_t v_norm(const IMat23& V, const IVec2& x) {
    std::int64_t best = 0;
    for (int j = 0; j < 3; ++j) {
        std::int64_t c = V[0][static_cast<std::size_t>(j)] * x[0] + V[1][static_cast<std::size_t>(j)] * x[1];
        best = std::max(best, c < 0 ? -c : c);
    }
    return best;
}

std::optional<std::int64_t> vinv_norm(const IMat23& V, const IVec2& x) {
    std::array<IVec2, 3> col = {IVec2{V[0][0], V[1][0]}, IVec2{V[0][1], V[1][1]}, IVec2{V[0][2], V[1][2]}};
    for (int i = 0; i < 2; ++i)
        if (col[0][static_cast<std::size_t>(i)] + col[1][static_cast<std::size_t>(i)] +
                col[2][static_cast<std::size_t>(i)] != 0)
            throw std::domain_error("vinv_norm: V must annihilate (1,1,1)");
    // pick an independent column pair; the kernel of V is then spanned by (1,1,1)
    int ci = -1, cj = -1;
    for (int i = 0; i < 3 && ci < 0; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (det2(col[static_cast<std::size_t>(i)], col[static_cast<std::size_t>(j)]) != 0) {
                ci = i;
                cj = j;
                break;
            }
    if (ci < 0) throw std::domain_error("vinv_norm: V must have rank 2");
    std::int64_t d = det2(col[static_cast<std::size_t>(ci)], col[static_cast<std::size_t>(cj)]);
    // Cramer for y_ci, y_cj with the remaining coordinate set to zero
    std::int64_t nci = det2({x[0], x[1]}, col[static_cast<std::size_t>(cj)]);
    std::int64_t ncj = det2(col[static_cast<std::size_t>(ci)], {x[0], x[1]});
    if (nci % d != 0 || ncj % d != 0) return std::nullopt;
    std::array<std::int64_t, 3> y{};
    y[static_cast<std::size_t>(ci)] = nci / d;
    y[static_cast<std::size_t>(cj)] = ncj / d;
    // minimize |y + t(1,1,1)|_1 at t = -median and its neighbors
    std::array<std::int64_t, 3> s = y;
    std::sort(s.begin(), s.end());
    std::int64_t best = -1;
    for (std::int64_t t : {-s[1] - 1, -s[1], -s[1] + 1}) {
        std::int64_t v = 0;
        for (int i = 0; i < 3; ++i) v += std::llabs(y[static_cast<std::size_t>(i)] + t);
        if (best < 0 || v < best) best = v;
    }
    return best;
}

// ---- structure identities ----

StructureReport validate_structure(const PatternData& data) {
    StructureReport rep;
    auto note = [&](bool ok, const std::string& what) {
        if (!ok) rep.violations.push_back(what);
        return ok;
    };

    // PV = A
    bool pv = true;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) {
            Rat lhs = data.P(i, 0) * data.V[0][static_cast<std::size_t>(j)] +
                      data.P(i, 1) * data.V[1][static_cast<std::size_t>(j)];
            if (lhs != Rat(data.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])) pv = false;
        }
    rep.pv_equals_a = note(pv, "PV != A");

    bool rows = true;
    for (int i = 0; i < 2; ++i) {
        if (data.A[static_cast<std::size_t>(i)][0] + data.A[static_cast<std::size_t>(i)][1] +
                data.A[static_cast<std::size_t>(i)][2] != 0) rows = false;
        if (data.V[static_cast<std::size_t>(i)][0] + data.V[static_cast<std::size_t>(i)][1] +
                data.V[static_cast<std::size_t>(i)][2] != 0) rows = false;
    }
    rep.row_sums_vanish = note(rows, "A(1,1,1) or V(1,1,1) nonzero");

    // A^t Q V + V^t Q A = Q' with Q = (0 1; -1 0)
    static const std::int64_t Qp[3][3] = {{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}};
    bool sym = true;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            // a_i^t Q v_j + v_i^t Q a_j where Q w = (w2, -w1)
            std::int64_t ai0 = data.A[0][static_cast<std::size_t>(i)], ai1 = data.A[1][static_cast<std::size_t>(i)];
            std::int64_t vj0 = data.V[0][static_cast<std::size_t>(j)], vj1 = data.V[1][static_cast<std::size_t>(j)];
            std::int64_t vi0 = data.V[0][static_cast<std::size_t>(i)], vi1 = data.V[1][static_cast<std::size_t>(i)];
            std::int64_t aj0 = data.A[0][static_cast<std::size_t>(j)], aj1 = data.A[1][static_cast<std::size_t>(j)];
            std::int64_t t = (ai0 * vj1 - ai1 * vj0) + (vi0 * aj1 - vi1 * aj0);
            if (t != Qp[i][j]) sym = false;
        }
    rep.symplectic = note(sym, "A^t Q V + V^t Q A != Q'");

    // det(V V^t) > 0 iff rank 2
    std::int64_t g00 = 0, g01 = 0, g11 = 0;
    for (int j = 0; j < 3; ++j) {
        g00 += data.V[0][static_cast<std::size_t>(j)] * data.V[0][static_cast<std::size_t>(j)];
        g01 += data.V[0][static_cast<std::size_t>(j)] * data.V[1][static_cast<std::size_t>(j)];
        g11 += data.V[1][static_cast<std::size_t>(j)] * data.V[1][static_cast<std::size_t>(j)];
    }
    std::int64_t gram = g00 * g11 - g01 * g01;
    rep.v_rank2 = note(gram > 0, "V V^t is singular");
    rep.covolume = std::sqrt(static_cast<double>(gram));

    if (data.tile) {
        const auto& tile = *data.tile;
        std::set<std::pair<std::int64_t, std::int64_t>> cells;
        for (const auto& [cell, lap] : tile) cells.insert(cell);
        auto in_tile = [&](std::int64_t x, std::int64_t y) { return cells.count({x, y}) > 0; };

        bool btwo = true;
        for (const auto& [cell, lap] : tile) {
            bool boundary = !(in_tile(cell.first + 1, cell.second) && in_tile(cell.first - 1, cell.second) &&
                              in_tile(cell.first, cell.second + 1) && in_tile(cell.first, cell.second - 1));
            if (boundary && lap != 2) btwo = false;
        }
        rep.tile_boundary_two = note(btwo, "tile boundary has a laplacian value != 2");

        // covering and overlap checks on a window around the tile, with
        // translates T + m v1 + n v2 (v3 = -v1-v2 adds nothing new)
        IVec2 v1{data.V[0][0], data.V[1][0]}, v2{data.V[0][1], data.V[1][1]};
        if (det2(v1, v2) != 0) {
            std::int64_t x0 = tile.begin()->first.first, x1 = x0, y0 = tile.begin()->first.second, y1 = y0;
            for (const auto& [cell, lap] : tile) {
                x0 = std::min(x0, cell.first);
                x1 = std::max(x1, cell.first);
                y0 = std::min(y0, cell.second);
                y1 = std::max(y1, cell.second);
            }
            std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::pair<std::int64_t, std::int64_t>>>
                covered_by;
            const std::int64_t range = 4;
            for (std::int64_t m = -range; m <= range; ++m)
                for (std::int64_t n = -range; n <= range; ++n)
                    for (const auto& [cell, lap] : tile) {
                        std::pair<std::int64_t, std::int64_t> q{cell.first + m * v1[0] + n * v2[0],
                                                                cell.second + m * v1[1] + n * v2[1]};
                        if (q.first >= x0 && q.first <= x1 && q.second >= y0 && q.second <= y1)
                            covered_by[q].push_back({m, n});
                    }
            bool covers = true, overlap_ok = true;
            for (std::int64_t y = y0; y <= y1; ++y)
                for (std::int64_t x = x0; x <= x1; ++x) {
                    auto it = covered_by.find({x, y});
                    if (it == covered_by.end() || it->second.empty()) {
                        covers = false;
                        continue;
                    }
                    if (it->second.size() > 1) {
                        // multiply covered points must be tile-boundary points of
                        // each covering translate, and the translates must be
                        // hex-adjacent: (m,n) differences in {e1, e2, e1+e2}
                        for (const auto& [m, n] : it->second) {
                            std::int64_t lx = x - m * v1[0] - n * v2[0];
                            std::int64_t ly = y - m * v1[1] - n * v2[1];
                            bool boundary = !(in_tile(lx + 1, ly) && in_tile(lx - 1, ly) &&
                                              in_tile(lx, ly + 1) && in_tile(lx, ly - 1));
                            if (!boundary) overlap_ok = false;
                        }
                        for (std::size_t a = 0; a < it->second.size(); ++a)
                            for (std::size_t b = a + 1; b < it->second.size(); ++b) {
                                std::int64_t dm = it->second[a].first - it->second[b].first;
                                std::int64_t dn = it->second[a].second - it->second[b].second;
                                bool adj = (dm == 0 && std::llabs(dn) == 1) ||
                                           (dn == 0 && std::llabs(dm) == 1) || (dm == dn && std::llabs(dm) == 1);
                                if (!adj) overlap_ok = false;
                            }
                    }
                }
            rep.tile_covers = note(covers, "tile translates do not cover the test window");
            rep.tile_overlaps_on_boundary =
                note(overlap_ok, "tile translates overlap off the boundary or off-adjacent");
        }
    }
    return rep;
}

// ---- regions ----

Region Region::from_cells(std::vector<LatticePoint> cells, std::int64_t margin) {
    Region r;
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    r.cells_ = std::move(cells);
    r.margin_ = margin;
    r.desc_ = "cells:" + std::to_string(r.cells_.size());
    return r;
}

Region Region::from_polygon(std::vector<RatPoint> polygon, std::int64_t scale, std::int64_t margin) {
    if (polygon.size() < 3) throw std::domain_error("Region: polygon needs 3+ vertices");
    // rasterize: lattice p with p/scale strictly inside the polygon
    Rat minx = polygon[0].x, maxx = minx, miny = polygon[0].y, maxy = miny;
    for (const auto& v : polygon) {
        minx = std::min(minx, v.x);
        maxx = std::max(maxx, v.x);
        miny = std::min(miny, v.y);
        maxy = std::max(maxy, v.y);
    }
    // orientation
    Rat a2(0);
    for (std::size_t i = 0; i < polygon.size(); ++i)
        a2 += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
    if (a2 == 0) throw std::domain_error("Region: degenerate polygon");
    if (a2 < 0) std::reverse(polygon.begin(), polygon.end());

    auto strictly_inside = [&](const RatPoint& p) {
        for (std::size_t i = 0; i < polygon.size(); ++i) {
            const RatPoint& a = polygon[i];
            const RatPoint& b = polygon[(i + 1) % polygon.size()];
            if (cross(b - a, p - a) <= 0) return false;
        }
        return true;
    };

    auto bound = [&](const Rat& r, bool up) {
        Rat s = r * scale;
        BigInt num = boost::multiprecision::numerator(s), den = boost::multiprecision::denominator(s);
        BigInt q = num / den;
        if (num < 0 && q * den != num) --q;
        std::int64_t f = q.convert_to<std::int64_t>();
        return up ? f + 1 : f;
    };

    std::vector<LatticePoint> cells;
    for (std::int64_t y = bound(miny, false); y <= bound(maxy, true); ++y)
        for (std::int64_t x = bound(minx, false); x <= bound(maxx, true); ++x)
            if (strictly_inside({Rat(x, scale), Rat(y, scale)})) cells.push_back({x, y});

    Region r;
    r.cells_ = std::move(cells);
    r.margin_ = margin;
    r.desc_ = "polygon*" + std::to_string(scale) + ":" + std::to_string(r.cells_.size());
    return r;
}

Region Region::with_margin(std::int64_t m) const {
    Region r = *this;
    r.margin_ = m;
    return r;
}

std::vector<LatticePoint> Region::eroded(std::int64_t extra) const {
    std::int64_t m = std::max(margin_, extra);
    if (m == 0) return cells_;
    std::unordered_set<std::int64_t> have;
    auto key = [](LatticePoint p) { return (p.x << 21) ^ (p.y + (1 << 20)); };
    have.reserve(cells_.size() * 2);
    for (auto p : cells_) have.insert(key(p));
    auto offs = ball_offsets(m);
    std::vector<LatticePoint> out;
    for (auto p : cells_) {
        bool ok = true;
        for (auto d : offs)
            if (!have.count(key({p.x + d.x, p.y + d.y}))) {
                ok = false;
                break;
            }
        if (ok) out.push_back(p);
    }
    return out;
}

std::string Region::describe() const { return desc_ + " margin:" + std::to_string(margin_); }

// ---- matching ----

std::optional<LatticePoint> match_at(const IntField& image, const PeriodicPattern& pattern,
                                     LatticePoint x, std::int64_t r) {
    if (r < 1) throw std::domain_error("match_at: r must be >= 1");
    auto offs = ball_offsets(r);
    for (auto z : offs) {
        LatticePoint q = x + z;
        if (!image.window().contains(q)) throw std::domain_error("match_at: ball exits the image window");
    }
    for (auto y : pattern.coset_representatives()) {
        bool ok = true;
        for (auto z : offs)
            if (image.at(x + z) != pattern.at(y + z)) {
                ok = false;
                break;
            }
        if (ok) return y;
    }
    return std::nullopt;
}

MatchReport match_fraction(const IntField& image, const PeriodicPattern& pattern,
                           const Region& region, std::int64_t r, int threads) {
    MatchReport rep;
    rep.region = region.describe();
    rep.r = r;
    auto pts = region.eroded(r);
    auto offs = ball_offsets(r);
    auto reps = pattern.coset_representatives();

    // drop points whose matching ball leaves the image window
    std::vector<LatticePoint> usable;
    usable.reserve(pts.size());
    for (auto p : pts) {
        bool in = true;
        for (auto z : offs)
            if (!image.window().contains(p + z)) {
                in = false;
                break;
            }
        if (in) usable.push_back(p);
    }
    if (usable.empty()) throw std::domain_error("match_fraction: eroded region is empty");

    std::vector<std::int32_t> result(usable.size(), -1);
    parallel_for(usable.size(), threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            LatticePoint p = usable[i];
            for (std::size_t yi = 0; yi < reps.size(); ++yi) {
                bool ok = true;
                for (auto z : offs)
                    if (image.at(p + z) != pattern.at(reps[yi] + z)) {
                        ok = false;
                        break;
                    }
                if (ok) {
                    result[i] = static_cast<std::int32_t>(yi);
                    break;
                }
            }
        }
    });

    rep.total = static_cast<std::int64_t>(usable.size());
    for (std::size_t i = 0; i < usable.size(); ++i)
        if (result[i] >= 0) {
            ++rep.matched;
            auto y = reps[static_cast<std::size_t>(result[i])];
            ++rep.offsets[{y.x, y.y}];
        }
    rep.fraction = static_cast<double>(rep.matched) / static_cast<double>(rep.total);
    return rep;
}

std::optional<PeriodicPattern> detect_period(const IntField& image, const Region& region,
                                             std::int64_t bound) {
    if (bound < 1) return std::nullopt;
    const auto& pts = region.cells();
    if (pts.empty()) return std::nullopt;

    // index the region
    std::unordered_set<std::int64_t> have;
    auto key = [](LatticePoint p) { return (p.x << 21) ^ (p.y + (1 << 20)); };
    for (auto p : pts) have.insert(key(p));

    std::int64_t dia2 = 0;
    std::int64_t x0 = pts[0].x, x1 = x0, y0 = pts[0].y, y1 = y0;
    for (auto p : pts) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    dia2 = (x1 - x0) * (x1 - x0) + (y1 - y0) * (y1 - y0);
    if (dia2 < 64 * bound * bound) return std::nullopt;  // region must dwarf the period bound

    std::vector<IVec2> shifts;
    for (std::int64_t ty = 0; ty <= bound; ++ty)
        for (std::int64_t tx = -bound; tx <= bound; ++tx) {
            if (ty == 0 && tx <= 0) continue;  // half plane; shifts come in +- pairs
            if (tx * tx + ty * ty > bound * bound) continue;
            bool ok = true;
            std::int64_t overlap = 0;
            for (auto p : pts) {
                LatticePoint q{p.x + tx, p.y + ty};
                if (!have.count(key(q))) continue;
                ++overlap;
                if (image.at(p) != image.at(q)) {
                    ok = false;
                    break;
                }
            }
            if (ok && overlap > 0) shifts.push_back({tx, ty});
        }
    if (shifts.empty()) return std::nullopt;

    // lattice generated by all observed shifts: gcd cascade on the first
    // coordinates, then gcd of the pure-y generators
    {
        bool rank2 = false;
        for (std::size_t i = 1; i < shifts.size() && !rank2; ++i)
            if (det2(shifts[0], shifts[i]) != 0) rank2 = true;
        if (!rank2) return std::nullopt;
    }
    std::vector<IVec2> gens = shifts;
    for (;;) {
        int piv = -1;
        for (std::size_t i = 0; i < gens.size(); ++i)
            if (gens[i][0] != 0 &&
                (piv < 0 || std::llabs(gens[i][0]) < std::llabs(gens[static_cast<std::size_t>(piv)][0])))
                piv = static_cast<int>(i);
        if (piv < 0) break;
        bool changed = false;
        for (std::size_t i = 0; i < gens.size(); ++i) {
            if (static_cast<int>(i) == piv) continue;
            if (gens[i][0] == 0) continue;
            std::int64_t q = floor_div(gens[i][0], gens[static_cast<std::size_t>(piv)][0]);
            gens[i] = sub(gens[i], gens[static_cast<std::size_t>(piv)], q);
            if (gens[i][0] != 0) changed = true;
        }
        if (!changed) break;
    }
    IVec2 px{0, 0};
    std::int64_t gy = 0;
    for (const auto& g : gens) {
        if (g[0] != 0) px = g;  // unique survivor with x != 0
        else gy = std::gcd(gy, std::llabs(g[1]));
    }
    if (px[0] == 0 || gy == 0) return std::nullopt;
    auto [b1, b2] = gauss_reduce(px, {0, gy});

    // extract the tile over the canonical fundamental domain and verify it
    // against every region point
    auto h = hnf2(b1, b2);
    std::int64_t h11 = h[0], h21 = h[1], h22 = h[2];
    auto reduce = [&](LatticePoint p) {
        std::int64_t m = floor_div(p.x, h11);
        p.x -= m * h11;
        p.y -= m * h21;
        std::int64_t k = floor_div(p.y, h22);
        p.y -= k * h22;
        return p;
    };
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> tile;
    for (auto p : pts) {
        LatticePoint rp = reduce(p);
        auto it = tile.find({rp.x, rp.y});
        if (it == tile.end()) tile[{rp.x, rp.y}] = image.at(p);
        else if (it->second != image.at(p)) return std::nullopt;  // spurious lattice
    }
    if (static_cast<std::int64_t>(tile.size()) != h11 * h22) return std::nullopt;  // region misses cosets
    return PeriodicPattern(b1, b2, std::move(tile));
}

QuadraticFit fit_quadratic(const IntField& field, const Region& region) {
    const auto& pts = region.cells();
    if (pts.size() < 6) throw std::domain_error("fit_quadratic: need at least 6 points");

    // normal equations for [x^2/2, xy, y^2/2, x, y, 1]
    auto phi = [](LatticePoint p) {
        double x = static_cast<double>(p.x), y = static_cast<double>(p.y);
        return std::array<double, 6>{x * x / 2, x * y, y * y / 2, x, y, 1.0};
    };
    double ata[6][6] = {};
    double atb[6] = {};
    for (auto p : pts) {
        auto f = phi(p);
        double v = static_cast<double>(field.at(p));
        for (int i = 0; i < 6; ++i) {
            atb[i] += f[static_cast<std::size_t>(i)] * v;
            for (int j = 0; j < 6; ++j) ata[i][j] += f[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(j)];
        }
    }
    // gaussian elimination with partial pivoting
    double aug[6][7];
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) aug[i][j] = ata[i][j];
        aug[i][6] = atb[i];
    }
    for (int colm = 0; colm < 6; ++colm) {
        int piv = colm;
        for (int rw = colm + 1; rw < 6; ++rw)
            if (std::fabs(aug[rw][colm]) > std::fabs(aug[piv][colm])) piv = rw;
        if (std::fabs(aug[piv][colm]) < 1e-9)
            throw std::domain_error("fit_quadratic: rank-deficient design (points not in general position)");
        std::swap(aug[colm], aug[piv]);
        for (int rw = 0; rw < 6; ++rw) {
            if (rw == colm) continue;
            double f = aug[rw][colm] / aug[colm][colm];
            for (int cc = colm; cc < 7; ++cc) aug[rw][cc] -= f * aug[colm][cc];
        }
    }
    double sol[6];
    for (int i = 0; i < 6; ++i) sol[i] = aug[i][6] / aug[i][i];

    auto round_rat = [](double v) {
        Rat best(0);
        double err = 1e300;
        for (std::int64_t q = 1; q <= 10; ++q) {
            std::int64_t p = std::llround(v * static_cast<double>(q));
            double e = std::fabs(v - static_cast<double>(p) / static_cast<double>(q));
            if (e + 1e-12 < err) {
                err = e;
                best = Rat(p, q);
            }
        }
        return best;
    };

    QuadraticFit fit;
    fit.P(0, 0) = round_rat(sol[0]);
    fit.P(0, 1) = round_rat(sol[1]);
    fit.P(1, 0) = fit.P(0, 1);
    fit.P(1, 1) = round_rat(sol[2]);

    // refit the affine part with the rounded hessian frozen
    double p00 = rat_to_double(fit.P(0, 0)), p01 = rat_to_double(fit.P(0, 1)),
           p11 = rat_to_double(fit.P(1, 1));
    double m[3][4] = {};
    for (auto p : pts) {
        double x = static_cast<double>(p.x), y = static_cast<double>(p.y);
        double g = static_cast<double>(field.at(p)) - (p00 * x * x / 2 + p01 * x * y + p11 * y * y / 2);
        double f[3] = {x, y, 1.0};
        for (int i = 0; i < 3; ++i) {
            m[i][3] += f[i] * g;
            for (int j = 0; j < 3; ++j) m[i][j] += f[i] * f[j];
        }
    }
    for (int colm = 0; colm < 3; ++colm) {
        int piv = colm;
        for (int rw = colm + 1; rw < 3; ++rw)
            if (std::fabs(m[rw][colm]) > std::fabs(m[piv][colm])) piv = rw;
        std::swap(m[colm], m[piv]);
        for (int rw = 0; rw < 3; ++rw) {
            if (rw == colm) continue;
            double f = m[rw][colm] / m[colm][colm];
            for (int cc = colm; cc < 4; ++cc) m[rw][cc] -= f * m[colm][cc];
        }
    }
    fit.b1 = m[0][3] / m[0][0];
    fit.b2 = m[1][3] / m[1][1];
    fit.c = m[2][3] / m[2][2];

    double res = 0;
    for (auto p : pts) {
        double x = static_cast<double>(p.x), y = static_cast<double>(p.y);
        double pred = p00 * x * x / 2 + p01 * x * y + p11 * y * y / 2 + fit.b1 * x + fit.b2 * y + fit.c;
        res = std::max(res, std::fabs(static_cast<double>(field.at(p)) - pred));
    }
    fit.residual = res;
    return fit;
}

}  // namespace sandpile
