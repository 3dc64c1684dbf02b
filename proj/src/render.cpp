#include "sandpile/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sandpile/parallel.hpp"

namespace sandpile {

Palette Palette::sandpile() {
    Palette p;
    p.colors[-1] = {0, 0, 255};
    p.colors[0] = {0, 255, 255};
    p.colors[1] = {255, 255, 0};
    p.colors[2] = {255, 0, 0};
    return p;
}

std::vector<std::uint8_t> render_field_ppm(const IntField& field, const Palette& palette,
                                           int threads) {
    const Window& w = field.window();
    std::string header = "P6\n" + std::to_string(w.width) + " " + std::to_string(w.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    std::size_t base = out.size();
    out.resize(base + w.cells() * 3);
    parallel_for(static_cast<std::size_t>(w.height), threads, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
            std::int64_t y = w.y0 + static_cast<std::int64_t>(r);
            for (std::int64_t x = w.x0; x < w.x0 + w.width; ++x) {
                Rgb c = palette.at(field.at({x, y}));
                std::size_t o = base + (r * static_cast<std::size_t>(w.width) +
                                        static_cast<std::size_t>(x - w.x0)) * 3;
                out[o] = c[0];
                out[o + 1] = c[1];
                out[o + 2] = c[2];
            }
        }
    });
    return out;
}

std::vector<std::uint8_t> render_field_pgm(const IntField& field, int threads) {
    const Window& w = field.window();
    std::int64_t lo = field.values()[0], hi = lo;
    for (auto v : field.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::string header = "P5\n# gray = round(255*(v-" + std::to_string(lo) + ")/" +
                         std::to_string(std::max<std::int64_t>(hi - lo, 1)) + ")\n" +
                         std::to_string(w.width) + " " + std::to_string(w.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    std::size_t base = out.size();
    out.resize(base + w.cells());
    double span = hi > lo ? static_cast<double>(hi - lo) : 1.0;
    parallel_for(static_cast<std::size_t>(w.height), threads, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
            std::int64_t y = w.y0 + static_cast<std::int64_t>(r);
            for (std::int64_t x = w.x0; x < w.x0 + w.width; ++x) {
                double g = 255.0 * (static_cast<double>(field.at({x, y}) - lo)) / span;
                out[base + r * static_cast<std::size_t>(w.width) + static_cast<std::size_t>(x - w.x0)] =
                    static_cast<std::uint8_t>(std::lround(g));
            }
        }
    });
    return out;
}

std::vector<std::uint8_t> render_pieces_ppm(const SuperSolution& ss, int resolution,
                                            const Palette& palette, int threads) {
    if (resolution < 16) throw std::domain_error("render_pieces: resolution must be >= 16");
    std::string header =
        "P6\n" + std::to_string(resolution) + " " + std::to_string(resolution) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    std::size_t base = out.size();
    out.resize(base + static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution) * 3);
    const std::int64_t res = resolution;
    parallel_for(static_cast<std::size_t>(resolution), threads, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
            // image row 0 at the top of the square
            Rat y(2 * (res - 1 - static_cast<std::int64_t>(r)) + 1, 2 * res);
            for (std::int64_t i = 0; i < res; ++i) {
                Rat x(2 * i + 1, 2 * res);
                const TriangleMap& tm = ss.patch(ss.owner({x, y}));
                Rat tr = tm.lin.trace() + 1;  // trace of the piece Hessian
                // round half away from zero, exactly
                BigInt num = boost::multiprecision::numerator(tr);
                BigInt den = boost::multiprecision::denominator(tr);
                BigInt twice = 2 * num;
                BigInt shifted = twice >= 0 ? BigInt(twice + den) : BigInt(twice - den);
                BigInt rounded = shifted / (2 * den);
                Rgb c = palette.at(rounded.convert_to<std::int64_t>());
                std::size_t o = base + (r * static_cast<std::size_t>(res) + static_cast<std::size_t>(i)) * 3;
                out[o] = c[0];
                out[o + 1] = c[1];
                out[o + 2] = c[2];
            }
        }
    });
    return out;
}

}  // namespace sandpile
