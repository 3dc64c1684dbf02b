#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sandpile/field.hpp"
#include "sandpile/rational.hpp"

namespace sandpile {

/// Word over {1,2,3}; its length is the recursion depth of the patch.
using IfsWord = std::string;

enum class PatchFamily { Base, W, Z };

/// Affine map between triangles, defined by vertex interpolation.
/// The linear part of every map in the construction is symmetric (it is a
/// Hessian candidate); the constructor checks this.
struct TriangleMap {
    std::array<RatPoint, 3> dom;
    std::array<RatPoint, 3> img;
    IfsWord word;
    PatchFamily family = PatchFamily::Z;

    RatMat2 lin;   // gradient of the interpolation map
    RatPoint off;  // constant part
    double bx0 = 0, bx1 = 0, by0 = 0, by1 = 0;  // conservative domain bbox

    TriangleMap() = default;
    TriangleMap(std::array<RatPoint, 3> d, std::array<RatPoint, 3> i, IfsWord w, PatchFamily f);

    bool contains(const RatPoint& p) const;  // closed triangle, exact
    RatPoint map(const RatPoint& p) const { return lin.apply(p) + off; }
    Rat area() const;  // absolute triangle area
};

/// Barycentric interpolation of z_k -> a_k evaluated at x; x must lie in the
/// closed triangle spanned by z.
RatPoint interpolate(const std::array<RatPoint, 3>& z, const std::array<RatPoint, 3>& a,
                     const RatPoint& x);

/// Identifies the patch owning a point of the closed unit square.
struct PatchRef {
    int layer = 0;   // 0 = base, 1..depth = w layers of word length layer-1, depth+1 = z layer
    int index = -1;  // position inside the layer, -1 for base
};

/// Piecewise-affine gradient field on (0,1)^2, assembled from a base map,
/// w-family layers of word length 0..depth-1 and the z-family layer at
/// word length depth. Later layers overwrite earlier ones; inside one layer
/// triangles meet only along edges where the maps agree, and the tie goes to
/// the lexicographically largest word.
class SuperSolution {
public:
    explicit SuperSolution(int depth);

    int depth() const { return depth_; }
    const TriangleMap& base() const { return base_; }
    const std::vector<std::vector<TriangleMap>>& w_layers() const { return w_layers_; }
    const std::vector<TriangleMap>& z_layer() const { return z_layer_; }

    int layer_count() const { return depth_ + 2; }
    const TriangleMap& patch(const PatchRef& r) const;

    /// Owner of a point of the closed unit square (after folding).
    PatchRef owner(const RatPoint& folded) const;

    /// Gradient of the extended function at x: zero outside [-1,1]^2, else
    /// the owning patch map at the folded representative plus (x1, 0).
    RatPoint gradient_at(const RatPoint& x) const;

    /// Exact value by integrating the gradient along the horizontal segment
    /// from (1, x2) to x after folding; zero outside [-1,1]^2.
    Rat value_at(const RatPoint& x) const;

    /// Values at several abscissas of one row: xs must be sorted strictly
    /// descending within [0,1]; y in [0,1]. Shares one integration pass.
    std::vector<Rat> value_row(const Rat& y, const std::vector<Rat>& xs) const;

    /// n^2 * value(p/n) at each lattice point of the window, as doubles.
    RealField sample_field(std::int64_t n, const Window& window, int threads = 1) const;

private:
    int depth_;
    TriangleMap base_;
    std::vector<std::vector<TriangleMap>> w_layers_;
    std::vector<TriangleMap> z_layer_;

    struct LayerIndex {
        int grid = 1;
        std::vector<std::vector<std::int32_t>> buckets;
    };
    std::vector<LayerIndex> index_;  // one per non-base layer (w layers then z)

    struct Edge {
        RatPoint a, b;
        double ylo, yhi;
        std::int32_t layer;
        std::int32_t tri;
    };
    std::vector<Edge> edges_;

    void build_index();
    const std::vector<TriangleMap>& layer(int layer_id) const;
};

SuperSolution ifs_generate(int depth);

/// One quadratic piece of the assembled function: on its region the value is
/// x.P x/2 + b.x + c. `area` is the raw polygon area of the patch domain.
struct QuadraticPiece {
    PatchFamily family = PatchFamily::Z;
    IfsWord word;
    std::vector<RatPoint> vertices;  // triangle, or the square for the base
    RatMat2 P;
    RatPoint b;
    Rat c;
    Rat area;
    bool gamma_plus_candidate = false;  // w family
};

/// All pieces: base, then w layers by word length, then the z layer,
/// lexicographic inside a layer. with_values controls whether c is
/// reconstructed (one value evaluation per piece).
std::vector<QuadraticPiece> pieces(const SuperSolution& ss, bool with_values = true);

/// Exact area of the region each piece actually owns (its polygon minus all
/// later-layer triangles), aligned with the order of pieces(). The ownership
/// areas partition the unit square, so they sum to exactly 1.
std::vector<Rat> ownership_areas(const SuperSolution& ss);

}  // namespace sandpile
