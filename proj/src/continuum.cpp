#include "sandpile/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sandpile/parallel.hpp"

namespace sandpile {

namespace {

using CVec3 = std::array<RatPoint, 3>;
using CMat3 = std::array<std::array<RatPoint, 3>, 3>;

CVec3 matvec3(const CMat3& m, const CVec3& v) {
    CVec3 out;
    for (int i = 0; i < 3; ++i) {
        RatPoint acc{Rat(0), Rat(0)};
        for (int j = 0; j < 3; ++j)
            acc = acc + cmul(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                             v[static_cast<std::size_t>(j)]);
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

CMat3 matconj3(const CMat3& m) {
    CMat3 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                conj(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    return out;
}

CMat3 matmul3(const CMat3& a, const CMat3& b) {
    CMat3 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            RatPoint acc{Rat(0), Rat(0)};
            for (int k = 0; k < 3; ++k)
                acc = acc + cmul(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                                 b[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
        }
    return out;
}

RatPoint c(std::int64_t re, std::int64_t im, std::int64_t den = 1) {
    return {Rat(re, den), Rat(im, den)};
}

// generator matrices of the triangle families
const CMat3& mat_Q() {
    static const CMat3 Q = {{{c(1, 0), c(0, 0), c(0, 0)},
                             {c(1, 1, 3), c(1, -1, 3), c(1, 0, 3)},
                             {c(1, -1, 3), c(1, 0, 3), c(1, 1, 3)}}};
    return Q;
}
const CMat3& mat_R() {
    static const CMat3 R = {{{c(0, 0), c(1, 0), c(0, 0)},
                             {c(0, 0), c(0, 0), c(1, 0)},
                             {c(1, 0), c(0, 0), c(0, 0)}}};
    return R;
}
const CMat3& mat_S() {
    static const CMat3 S = {{{c(1, 0, 3), c(1, 1, 3), c(1, -1, 3)},
                             {c(1, -1, 3), c(1, 0, 3), c(1, 1, 3)},
                             {c(1, 1, 3), c(1, -1, 3), c(1, 0, 3)}}};
    return S;
}

Rat tri_area2(const std::array<RatPoint, 3>& t) {
    return cross(t[1] - t[0], t[2] - t[0]);
}

double to_d(const Rat& r) { return rat_to_double(r); }

constexpr double kBoxEps = 1e-9;

}  // namespace

TriangleMap::TriangleMap(std::array<RatPoint, 3> d, std::array<RatPoint, 3> i, IfsWord w,
                         PatchFamily f)
    : dom(std::move(d)), img(std::move(i)), word(std::move(w)), family(f) {
    Rat det = tri_area2(dom);
    if (det == 0) throw std::domain_error("TriangleMap: degenerate domain triangle");
    RatPoint u = dom[1] - dom[0], v = dom[2] - dom[0];
    RatPoint p = img[1] - img[0], q = img[2] - img[0];
    lin(0, 0) = (p.x * v.y - q.x * u.y) / det;
    lin(0, 1) = (q.x * u.x - p.x * v.x) / det;
    lin(1, 0) = (p.y * v.y - q.y * u.y) / det;
    lin(1, 1) = (q.y * u.x - p.y * v.x) / det;
    off = img[0] - lin.apply(dom[0]);
    if (!lin.symmetric())
        throw std::logic_error("TriangleMap: interpolation gradient is not symmetric");
    bx0 = by0 = 1e300;
    bx1 = by1 = -1e300;
    for (const auto& t : dom) {
        bx0 = std::min(bx0, to_d(t.x));
        bx1 = std::max(bx1, to_d(t.x));
        by0 = std::min(by0, to_d(t.y));
        by1 = std::max(by1, to_d(t.y));
    }
    bx0 -= kBoxEps;
    by0 -= kBoxEps;
    bx1 += kBoxEps;
    by1 += kBoxEps;
}

bool TriangleMap::contains(const RatPoint& p) const {
    bool pos = tri_area2(dom) > 0;
    for (int k = 0; k < 3; ++k) {
        const RatPoint& a = dom[static_cast<std::size_t>(k)];
        const RatPoint& b = dom[static_cast<std::size_t>((k + 1) % 3)];
        Rat cr = cross(b - a, p - a);
        if (pos ? cr < 0 : cr > 0) return false;
    }
    return true;
}

Rat TriangleMap::area() const {
    Rat a2 = tri_area2(dom);
    if (a2 < 0) a2 = -a2;
    return a2 / 2;
}

RatPoint interpolate(const std::array<RatPoint, 3>& z, const std::array<RatPoint, 3>& a,
                     const RatPoint& x) {
    Rat det = tri_area2(z);
    if (det == 0) throw std::domain_error("interpolate: degenerate triangle");
    Rat t1 = cross(z[1] - x, z[2] - x) / det;
    Rat t2 = cross(z[2] - x, z[0] - x) / det;
    Rat t3 = cross(z[0] - x, z[1] - x) / det;
    if (t1 < 0 || t2 < 0 || t3 < 0)
        throw std::domain_error("interpolate: point outside the closed triangle");
    return t1 * a[0] + t2 * a[1] + t3 * a[2];
}

SuperSolution::SuperSolution(int depth) : depth_(depth) {
    if (depth < 0 || depth > 12)
        throw std::domain_error("SuperSolution: depth must be between 0 and 12");

    const CVec3 z0 = {c(1, 0), c(1, 1), c(0, 1)};
    const CVec3 a0 = {c(0, 0), c(-1, 0), c(0, 1)};
    // carrier triangle for the base affine map x -> (0, x2); its domain is
    // irrelevant because the base is the lookup fallback on the whole square
    base_ = TriangleMap({c(0, 0), c(1, 0), c(1, 1)},
                        {c(0, 0), c(0, 0), c(0, 1)}, "", PatchFamily::Base);

    CMat3 Rp[4] = {mat_R(), mat_R(), matmul3(mat_R(), mat_R()),
                   matmul3(matmul3(mat_R(), mat_R()), mat_R())};
    CMat3 QR[4], QcR[4];
    const CMat3 Qc = matconj3(mat_Q());
    for (int k = 1; k <= 3; ++k) {
        QR[k] = matmul3(mat_Q(), Rp[k]);
        QcR[k] = matmul3(Qc, Rp[k]);
    }
    const CMat3 S = mat_S();
    const CMat3 Sc = matconj3(S);

    std::vector<CVec3> zs = {z0}, as = {a0};
    std::vector<IfsWord> words = {""};
    w_layers_.resize(static_cast<std::size_t>(depth));
    for (int d = 0; d < depth; ++d) {
        auto& wl = w_layers_[static_cast<std::size_t>(d)];
        std::vector<CVec3> nz, na;
        std::vector<IfsWord> nw;
        nz.reserve(zs.size() * 3);
        na.reserve(zs.size() * 3);
        nw.reserve(zs.size() * 3);
        for (std::size_t i = 0; i < zs.size(); ++i) {
            wl.emplace_back(std::array<RatPoint, 3>(matvec3(S, zs[i])),
                            std::array<RatPoint, 3>(matvec3(Sc, as[i])), words[i], PatchFamily::W);
            for (int k = 1; k <= 3; ++k) {
                nz.push_back(matvec3(QR[k], zs[i]));
                na.push_back(matvec3(QcR[k], as[i]));
                nw.push_back(words[i] + static_cast<char>('0' + k));
            }
        }
        zs = std::move(nz);
        as = std::move(na);
        words = std::move(nw);
    }
    z_layer_.reserve(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i)
        z_layer_.emplace_back(std::array<RatPoint, 3>(zs[i]), std::array<RatPoint, 3>(as[i]),
                              words[i], PatchFamily::Z);
    build_index();
}

const std::vector<TriangleMap>& SuperSolution::layer(int layer_id) const {
    if (layer_id == depth_ + 1) return z_layer_;
    return w_layers_[static_cast<std::size_t>(layer_id - 1)];
}

const TriangleMap& SuperSolution::patch(const PatchRef& r) const {
    if (r.layer == 0) return base_;
    return layer(r.layer)[static_cast<std::size_t>(r.index)];
}

void SuperSolution::build_index() {
    index_.clear();
    edges_.clear();
    for (int li = 1; li <= depth_ + 1; ++li) {
        const auto& tris = layer(li);
        LayerIndex idx;
        idx.grid = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(tris.size()))));
        idx.grid = std::min(idx.grid, 128);
        idx.buckets.assign(static_cast<std::size_t>(idx.grid) * static_cast<std::size_t>(idx.grid),
                           {});
        for (std::size_t t = 0; t < tris.size(); ++t) {
            const auto& tm = tris[t];
            int gx0 = std::clamp(static_cast<int>(tm.bx0 * idx.grid), 0, idx.grid - 1);
            int gx1 = std::clamp(static_cast<int>(tm.bx1 * idx.grid), 0, idx.grid - 1);
            int gy0 = std::clamp(static_cast<int>(tm.by0 * idx.grid), 0, idx.grid - 1);
            int gy1 = std::clamp(static_cast<int>(tm.by1 * idx.grid), 0, idx.grid - 1);
            for (int gy = gy0; gy <= gy1; ++gy)
                for (int gx = gx0; gx <= gx1; ++gx)
                    idx.buckets[static_cast<std::size_t>(gy) * static_cast<std::size_t>(idx.grid) +
                                static_cast<std::size_t>(gx)]
                        .push_back(static_cast<std::int32_t>(t));
            for (int k = 0; k < 3; ++k) {
                Edge e;
                e.a = tm.dom[static_cast<std::size_t>(k)];
                e.b = tm.dom[static_cast<std::size_t>((k + 1) % 3)];
                e.ylo = std::min(to_d(e.a.y), to_d(e.b.y)) - kBoxEps;
                e.yhi = std::max(to_d(e.a.y), to_d(e.b.y)) + kBoxEps;
                e.layer = li;
                e.tri = static_cast<std::int32_t>(t);
                edges_.push_back(std::move(e));
            }
        }
        index_.push_back(std::move(idx));
    }
}

PatchRef SuperSolution::owner(const RatPoint& p) const {
    double px = to_d(p.x), py = to_d(p.y);
    for (int li = depth_ + 1; li >= 1; --li) {
        const auto& tris = layer(li);
        const auto& idx = index_[static_cast<std::size_t>(li - 1)];
        int gx = std::clamp(static_cast<int>(px * idx.grid), 0, idx.grid - 1);
        int gy = std::clamp(static_cast<int>(py * idx.grid), 0, idx.grid - 1);
        const auto& cand =
            idx.buckets[static_cast<std::size_t>(gy) * static_cast<std::size_t>(idx.grid) +
                        static_cast<std::size_t>(gx)];
        int best = -1;
        for (auto t : cand) {
            const auto& tm = tris[static_cast<std::size_t>(t)];
            if (px < tm.bx0 || px > tm.bx1 || py < tm.by0 || py > tm.by1) continue;
            if (!tm.contains(p)) continue;
            if (best < 0 || tris[static_cast<std::size_t>(best)].word < tm.word)
                best = static_cast<int>(t);
        }
        if (best >= 0) return {li, best};
    }
    return {0, -1};
}

namespace {
Rat fold1(const Rat& v) { return v < 0 ? Rat(-v) : v; }
}  // namespace

RatPoint SuperSolution::gradient_at(const RatPoint& x) const {
    Rat ax = fold1(x.x), ay = fold1(x.y);
    if (ax > 1 || ay > 1) return {Rat(0), Rat(0)};
    RatPoint f{ax, ay};
    const TriangleMap& tm = patch(owner(f));
    RatPoint g = tm.map(f);
    return {g.x + f.x, g.y};
}

std::vector<Rat> SuperSolution::value_row(const Rat& y, const std::vector<Rat>& xs) const {
    std::vector<Rat> out(xs.size(), Rat(0));
    if (xs.empty()) return out;
    if (y > 1 || y < 0) return out;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i] > xs[i + 1]))
            throw std::domain_error("value_row: xs must be strictly descending");
    if (xs.front() > 1 || xs.back() < 0) throw std::domain_error("value_row: xs must lie in [0,1]");

    // breakpoints: patch edges crossing or touching this row
    double yd = to_d(y);
    std::vector<Rat> cuts(xs.begin(), xs.end());
    cuts.emplace_back(1);
    for (const auto& e : edges_) {
        if (yd < e.ylo || yd > e.yhi) continue;
        bool a_on = e.a.y == y, b_on = e.b.y == y;
        if (a_on) cuts.push_back(e.a.x);
        if (b_on) cuts.push_back(e.b.x);
        if (!a_on && !b_on && ((e.a.y < y) != (e.b.y < y))) {
            Rat t = (y - e.a.y) / (e.b.y - e.a.y);
            cuts.push_back(e.a.x + t * (e.b.x - e.a.x));
        }
    }
    std::sort(cuts.begin(), cuts.end(), [](const Rat& a, const Rat& b) { return a > b; });
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    while (!cuts.empty() && cuts.front() > 1) cuts.erase(cuts.begin());
    Rat xstop = xs.back();

    // walk from x = 1 down, integrating the piecewise-linear first gradient
    // component exactly (trapezoid is exact on each owner's affine map)
    Rat v(0);
    std::size_t qi = 0;
    if (xs[qi] == Rat(1)) {
        out[qi] = v;
        ++qi;
    }
    for (std::size_t ci = 0; ci + 1 < cuts.size() && qi < xs.size(); ++ci) {
        const Rat& hi = cuts[ci];
        const Rat& lo = cuts[ci + 1];
        if (lo < xstop && hi <= xstop) break;
        RatPoint mid{(hi + lo) / 2, y};
        const TriangleMap& tm = patch(owner(mid));
        auto g1 = [&](const Rat& xx) {
            // first component of the full gradient on this patch
            return (tm.lin(0, 0) + 1) * xx + tm.lin(0, 1) * y + tm.off.x;
        };
        v += (g1(hi) + g1(lo)) / 2 * (lo - hi);
        while (qi < xs.size() && xs[qi] == lo) {
            out[qi] = v;
            ++qi;
        }
    }
    if (qi != xs.size()) throw std::logic_error("value_row: query abscissa missed");
    return out;
}

Rat SuperSolution::value_at(const RatPoint& x) const {
    Rat ax = fold1(x.x), ay = fold1(x.y);
    if (ax > 1 || ay > 1) return Rat(0);
    if (ax == 1) return Rat(0);
    return value_row(ay, {ax})[0];
}

RealField SuperSolution::sample_field(std::int64_t n, const Window& window, int threads) const {
    if (n < 1) throw std::domain_error("sample_field: n must be >= 1");
    RealField out(window);
    const Rat scale = Rat(n) * Rat(n);
    parallel_for(static_cast<std::size_t>(window.height), threads,
                 [&](std::size_t row0, std::size_t row1) {
                     for (std::size_t r = row0; r < row1; ++r) {
                         std::int64_t py = window.y0 + static_cast<std::int64_t>(r);
                         Rat y = fold1(Rat(py, n));
                         if (y > 1) continue;
                         std::vector<Rat> xs;
                         for (std::int64_t px = window.x0; px < window.x0 + window.width; ++px) {
                             Rat ax = fold1(Rat(px, n));
                             if (ax <= 1) xs.push_back(ax);
                         }
                         std::sort(xs.begin(), xs.end(), [](const Rat& a, const Rat& b) { return a > b; });
                         xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
                         if (xs.empty()) continue;
                         std::vector<Rat> vals = value_row(y, xs);
                         for (std::int64_t px = window.x0; px < window.x0 + window.width; ++px) {
                             Rat ax = fold1(Rat(px, n));
                             if (ax > 1) continue;
                             auto it = std::lower_bound(xs.begin(), xs.end(), ax,
                                                        [](const Rat& a, const Rat& b) { return a > b; });
                             out.set({px, py}, rat_to_double(scale * vals[static_cast<std::size_t>(
                                                                  it - xs.begin())]));
                         }
                     }
                 });
    return out;
}

SuperSolution ifs_generate(int depth) { return SuperSolution(depth); }

namespace {

// deterministic interior probe points of a patch, used to reconstruct c
std::vector<RatPoint> probe_points(const SuperSolution& ss, const PatchRef& ref) {
    std::vector<RatPoint> out;
    if (ref.layer == 0) {
        // the base keeps only thin slivers along the axes at high depth,
        // so probe points hugging the bottom and left edges
        for (std::int64_t g : {4, 9, 27, 81, 243, 729, 2187}) {
            std::int64_t step = std::max<std::int64_t>(1, g / 64);
            for (std::int64_t i = 1; i < g; i += step) {
                out.push_back({Rat(i, g), Rat(1, g)});
                out.push_back({Rat(1, g), Rat(i, g)});
            }
        }
        return out;
    }
    const TriangleMap& tm = ss.patch(ref);
    const auto& A = tm.dom[0];
    const auto& B = tm.dom[1];
    const auto& C = tm.dom[2];
    // centroid first, then a barycentric sub-grid
    out.push_back({(A.x + B.x + C.x) / 3, (A.y + B.y + C.y) / 3});
    for (std::int64_t g : {5, 11, 23, 47}) {
        for (std::int64_t i = 1; i < g; ++i)
            for (std::int64_t j = 1; i + j < g; ++j) {
                Rat u(i, g), v(j, g);
                Rat w = 1 - u - v;
                out.push_back({w * A.x + u * B.x + v * C.x, w * A.y + u * B.y + v * C.y});
            }
    }
    return out;
}

}  // namespace

std::vector<QuadraticPiece> pieces(const SuperSolution& ss, bool with_values) {
    std::vector<std::pair<PatchRef, const TriangleMap*>> order;
    order.push_back({{0, -1}, &ss.base()});
    for (int li = 1; li <= ss.depth(); ++li) {
        const auto& l = ss.w_layers()[static_cast<std::size_t>(li - 1)];
        for (std::size_t i = 0; i < l.size(); ++i)
            order.push_back({{li, static_cast<int>(i)}, &l[i]});
    }
    for (std::size_t i = 0; i < ss.z_layer().size(); ++i)
        order.push_back({{ss.depth() + 1, static_cast<int>(i)}, &ss.z_layer()[i]});

    std::vector<QuadraticPiece> out;
    out.reserve(order.size());
    for (const auto& [ref, tm] : order) {
        QuadraticPiece qp;
        qp.family = tm->family;
        qp.word = tm->word;
        qp.gamma_plus_candidate = tm->family == PatchFamily::W;
        if (ref.layer == 0) {
            qp.vertices = {c(0, 0), c(1, 0), c(1, 1), c(0, 1)};
            qp.area = Rat(1);
        } else {
            qp.vertices = {tm->dom[0], tm->dom[1], tm->dom[2]};
            qp.area = tm->area();
        }
        qp.P = tm->lin;
        qp.P(0, 0) += 1;  // the assembled gradient adds (x1, 0)
        qp.b = tm->off;
        if (with_values) {
            bool found = false;
            for (const auto& pt : probe_points(ss, ref)) {
                PatchRef o = ss.owner(pt);
                if (o.layer == ref.layer && o.index == ref.index) {
                    Rat val = ss.value_at(pt);
                    Rat quad = (qp.P(0, 0) * pt.x * pt.x + 2 * qp.P(0, 1) * pt.x * pt.y +
                                qp.P(1, 1) * pt.y * pt.y) /
                               2;
                    qp.c = val - quad - dot(qp.b, pt);
                    found = true;
                    break;
                }
            }
            if (!found)
                throw std::logic_error("pieces: no owned probe point found for patch " + qp.word);
        }
        out.push_back(std::move(qp));
    }
    return out;
}

// ---- exact ownership areas via convex decomposition ----

namespace {

using Poly = std::vector<RatPoint>;

Rat poly_area(const Poly& p) {
    Rat s(0);
    for (std::size_t i = 0; i < p.size(); ++i) s += cross(p[i], p[(i + 1) % p.size()]);
    if (s < 0) s = -s;
    return s / 2;
}

// keep the part of poly with cross(b-a, x-a) >= 0 (left of ab)
Poly clip_left(const Poly& poly, const RatPoint& a, const RatPoint& b) {
    Poly out;
    const std::size_t n = poly.size();
    RatPoint d = b - a;
    std::vector<Rat> side(n);
    for (std::size_t i = 0; i < n; ++i) side[i] = cross(d, poly[i] - a);
    for (std::size_t i = 0; i < n; ++i) {
        const RatPoint& cur = poly[i];
        const RatPoint& nxt = poly[(i + 1) % n];
        const Rat& sc = side[i];
        const Rat& sn = side[(i + 1) % n];
        if (sc >= 0) out.push_back(cur);
        if ((sc > 0 && sn < 0) || (sc < 0 && sn > 0)) {
            Rat t = sc / (sc - sn);
            out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
        }
    }
    if (out.size() < 3 || poly_area(out) == 0) out.clear();
    return out;
}

// bucketed complex of disjoint convex cells supporting triangle subtraction
class CellComplex {
public:
    explicit CellComplex(int grid) : grid_(grid), buckets_(static_cast<std::size_t>(grid) * grid) {}

    void insert(Poly&& p) {
        if (p.size() < 3 || poly_area(p) == 0) return;
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (const auto& v : p) {
            double vx = to_d(v.x), vy = to_d(v.y);
            x0 = std::min(x0, vx);
            x1 = std::max(x1, vx);
            y0 = std::min(y0, vy);
            y1 = std::max(y1, vy);
        }
        std::int32_t id = static_cast<std::int32_t>(polys_.size());
        polys_.push_back(std::move(p));
        boxes_.push_back({x0 - kBoxEps, x1 + kBoxEps, y0 - kBoxEps, y1 + kBoxEps});
        alive_.push_back(1);
        stamp_.push_back(0);
        for (int gy = cell_of(y0); gy <= cell_of(y1); ++gy)
            for (int gx = cell_of(x0); gx <= cell_of(x1); ++gx)
                buckets_[static_cast<std::size_t>(gy) * static_cast<std::size_t>(grid_) +
                         static_cast<std::size_t>(gx)]
                    .push_back(id);
    }

    void subtract(const std::array<RatPoint, 3>& tri, double tx0, double tx1, double ty0,
                  double ty1) {
        std::array<RatPoint, 3> t = tri;
        if (tri_area2(t) < 0) std::swap(t[1], t[2]);
        ++op_;
        std::vector<std::int32_t> victims;
        for (int gy = cell_of(ty0); gy <= cell_of(ty1); ++gy)
            for (int gx = cell_of(tx0); gx <= cell_of(tx1); ++gx)
                for (auto id : buckets_[static_cast<std::size_t>(gy) * static_cast<std::size_t>(grid_) +
                                        static_cast<std::size_t>(gx)]) {
                    if (!alive_[static_cast<std::size_t>(id)] || stamp_[static_cast<std::size_t>(id)] == op_)
                        continue;
                    stamp_[static_cast<std::size_t>(id)] = op_;
                    const auto& bb = boxes_[static_cast<std::size_t>(id)];
                    if (bb[1] < tx0 || bb[0] > tx1 || bb[3] < ty0 || bb[2] > ty1) continue;
                    victims.push_back(id);
                }
        for (auto id : victims) {
            Poly rem = std::move(polys_[static_cast<std::size_t>(id)]);
            alive_[static_cast<std::size_t>(id)] = 0;
            bool whole = true;
            for (int k = 0; k < 3 && !rem.empty(); ++k) {
                const RatPoint& a = t[static_cast<std::size_t>(k)];
                const RatPoint& b = t[static_cast<std::size_t>((k + 1) % 3)];
                Poly outside = clip_left(rem, b, a);  // strictly right of ab survives
                if (!outside.empty()) {
                    whole = false;
                    insert(std::move(outside));
                }
                rem = clip_left(rem, a, b);
            }
            // rem = cell ∩ triangle is covered and dropped
            (void)whole;
        }
    }

    Rat total_area() const {
        Rat a(0);
        for (std::size_t i = 0; i < polys_.size(); ++i)
            if (alive_[i]) a += poly_area(polys_[i]);
        return a;
    }

private:
    int cell_of(double v) const {
        int c = static_cast<int>(v * grid_);
        return std::clamp(c, 0, grid_ - 1);
    }
    int grid_;
    std::uint32_t op_ = 0;
    std::vector<Poly> polys_;
    std::vector<std::array<double, 4>> boxes_;
    std::vector<std::uint8_t> alive_;
    std::vector<std::uint32_t> stamp_;
    std::vector<std::vector<std::int32_t>> buckets_;
};

}  // namespace

std::vector<Rat> ownership_areas(const SuperSolution& ss) {
    struct Item {
        int layer;
        const TriangleMap* tm;
    };
    std::vector<Item> order;
    order.push_back({0, &ss.base()});
    for (int li = 1; li <= ss.depth(); ++li)
        for (const auto& tm : ss.w_layers()[static_cast<std::size_t>(li - 1)])
            order.push_back({li, &tm});
    for (const auto& tm : ss.z_layer()) order.push_back({ss.depth() + 1, &tm});

    std::vector<Rat> areas(order.size());
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const auto& item = order[oi];
        double px0, px1, py0, py1;
        CellComplex cc(item.layer == 0 ? 64 : 8);
        if (item.layer == 0) {
            cc.insert({c(0, 0), c(1, 0), c(1, 1), c(0, 1)});
            px0 = py0 = 0 - kBoxEps;
            px1 = py1 = 1 + kBoxEps;
        } else {
            Poly p = {item.tm->dom[0], item.tm->dom[1], item.tm->dom[2]};
            if (tri_area2(item.tm->dom) < 0) std::swap(p[1], p[2]);
            cc.insert(std::move(p));
            px0 = item.tm->bx0;
            px1 = item.tm->bx1;
            py0 = item.tm->by0;
            py1 = item.tm->by1;
        }
        for (int lj = item.layer + 1; lj <= ss.depth() + 1; ++lj) {
            const auto& tris = lj == ss.depth() + 1 ? ss.z_layer()
                                                    : ss.w_layers()[static_cast<std::size_t>(lj - 1)];
            for (const auto& tm : tris) {
                if (tm.bx1 < px0 || tm.bx0 > px1 || tm.by1 < py0 || tm.by0 > py1) continue;
                cc.subtract(tm.dom, tm.bx0, tm.bx1, tm.by0, tm.by1);
            }
        }
        areas[oi] = cc.total_area();
    }
    return areas;
}

}  // namespace sandpile
