#pragma once

#include <cstdint>
#include <vector>

#include "sandpile/geometry.hpp"

namespace sandpile {

/// Integer-valued lattice function stored on a bounded window.
/// Reads outside the window yield exactly 0; this is the boundary
/// convention used everywhere (zero exterior).
class IntField {
public:
    IntField() : win_(), values_(1, 0) {}
    explicit IntField(Window w) : win_(w), values_(w.cells(), 0) {}
    IntField(Window w, std::vector<std::int64_t> values) : win_(w), values_(std::move(values)) {
        if (values_.size() != win_.cells())
            throw std::domain_error("IntField: value count does not match window");
    }

    const Window& window() const { return win_; }

    std::int64_t at(LatticePoint p) const {
        return win_.contains(p) ? values_[win_.index(p)] : 0;
    }
    void set(LatticePoint p, std::int64_t v) {
        if (!win_.contains(p)) throw std::domain_error("IntField::set: point outside window");
        values_[win_.index(p)] = v;
    }

    std::vector<std::int64_t>& values() { return values_; }
    const std::vector<std::int64_t>& values() const { return values_; }

    friend bool operator==(const IntField&, const IntField&) = default;

private:
    Window win_;
    std::vector<std::int64_t> values_;
};

/// Same layout with double payload (continuum samples).
class RealField {
public:
    RealField() : win_(), values_(1, 0.0) {}
    explicit RealField(Window w) : win_(w), values_(w.cells(), 0.0) {}
    RealField(Window w, std::vector<double> values) : win_(w), values_(std::move(values)) {
        if (values_.size() != win_.cells())
            throw std::domain_error("RealField: value count does not match window");
    }

    const Window& window() const { return win_; }
    double at(LatticePoint p) const { return win_.contains(p) ? values_[win_.index(p)] : 0.0; }
    void set(LatticePoint p, double v) {
        if (!win_.contains(p)) throw std::domain_error("RealField::set: point outside window");
        values_[win_.index(p)] = v;
    }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    friend bool operator==(const RealField&, const RealField&) = default;

private:
    Window win_;
    std::vector<double> values_;
};

/// Five-point Laplacian, exact: sum of the four neighbor values minus 4u(p).
std::int64_t laplacian_at(const IntField& field, LatticePoint p);

/// Pointwise Laplacian over `window`, which must be contained in field.window().
IntField laplacian_field(const IntField& field, const Window& window);

/// u + alpha*q with q(x) = x1*(x1+1)/2, sampled on field.window().
/// q is integer on the lattice and has constant Laplacian 1, so the output
/// Laplacian is the input Laplacian plus alpha at stencil-interior points.
IntField shift_cutoff(const IntField& field, std::int64_t alpha);

}  // namespace sandpile
