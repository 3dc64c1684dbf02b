#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "sandpile/continuum.hpp"
#include "sandpile/field.hpp"

namespace sandpile {

using Rgb = std::array<std::uint8_t, 3>;

/// Total palette: explicit colors for a few values, black elsewhere.
struct Palette {
    std::map<std::int64_t, Rgb> colors;
    Rgb fallback{0, 0, 0};

    static Palette sandpile();  // -1 blue, 0 cyan, 1 yellow, 2 red

    Rgb at(std::int64_t v) const {
        auto it = colors.find(v);
        return it == colors.end() ? fallback : it->second;
    }
};

/// One pixel per cell, rows in increasing y (y grows downward in the image).
std::vector<std::uint8_t> render_field_ppm(const IntField& field, const Palette& palette,
                                           int threads = 1);

/// Grayscale with affine value scaling; the scaling is documented in a
/// comment line of the PGM header.
std::vector<std::uint8_t> render_field_pgm(const IntField& field, int threads = 1);

/// resolution x resolution raster of (0,1)^2; each pixel is colored by the
/// rounded Hessian trace of the patch owning its center. Row 0 is the top of
/// the square (y decreasing with image row).
std::vector<std::uint8_t> render_pieces_ppm(const SuperSolution& ss, int resolution,
                                            const Palette& palette, int threads = 1);

}  // namespace sandpile
