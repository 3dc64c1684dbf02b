#pragma once

#include <cstdint>
#include <compare>
#include <stdexcept>

namespace sandpile {

struct LatticePoint {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend constexpr bool operator==(const LatticePoint&, const LatticePoint&) = default;
    friend constexpr auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

constexpr LatticePoint operator+(LatticePoint a, LatticePoint b) { return {a.x + b.x, a.y + b.y}; }
constexpr LatticePoint operator-(LatticePoint a, LatticePoint b) { return {a.x - b.x, a.y - b.y}; }

/// Axis-aligned half-open lattice box [x0, x0+width) x [y0, y0+height).
struct Window {
    std::int64_t x0 = 0;
    std::int64_t y0 = 0;
    std::int64_t width = 1;
    std::int64_t height = 1;

    Window() = default;
    Window(std::int64_t x0_, std::int64_t y0_, std::int64_t w, std::int64_t h)
        : x0(x0_), y0(y0_), width(w), height(h) {
        if (w < 1 || h < 1) throw std::domain_error("Window: width and height must be >= 1");
    }

    bool contains(LatticePoint p) const {
        return p.x >= x0 && p.x < x0 + width && p.y >= y0 && p.y < y0 + height;
    }
    bool contains(const Window& w) const {
        return w.x0 >= x0 && w.y0 >= y0 && w.x0 + w.width <= x0 + width &&
               w.y0 + w.height <= y0 + height;
    }
    std::size_t cells() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    std::size_t index(LatticePoint p) const {
        return static_cast<std::size_t>(p.y - y0) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(p.x - x0);
    }

    friend bool operator==(const Window&, const Window&) = default;
};

}  // namespace sandpile
