#include "sandpile/field.hpp"

namespace sandpile {

std::int64_t laplacian_at(const IntField& field, LatticePoint p) {
    return field.at({p.x + 1, p.y}) + field.at({p.x - 1, p.y}) + field.at({p.x, p.y + 1}) +
           field.at({p.x, p.y - 1}) - 4 * field.at(p);
}

IntField laplacian_field(const IntField& field, const Window& window) {
    if (!field.window().contains(window))
        throw std::domain_error("laplacian_field: window not contained in field window");
    IntField out(window);
    for (std::int64_t y = window.y0; y < window.y0 + window.height; ++y)
        for (std::int64_t x = window.x0; x < window.x0 + window.width; ++x)
            out.set({x, y}, laplacian_at(field, {x, y}));
    return out;
}

IntField shift_cutoff(const IntField& field, std::int64_t alpha) {
    const Window& w = field.window();
    IntField out(w);
    for (std::int64_t y = w.y0; y < w.y0 + w.height; ++y)
        for (std::int64_t x = w.x0; x < w.x0 + w.width; ++x) {
            // x*(x+1) is even for every integer, so the division is exact.
            std::int64_t q = x * (x + 1) / 2;
            out.set({x, y}, field.at({x, y}) + alpha * q);
        }
    return out;
}

}  // namespace sandpile
