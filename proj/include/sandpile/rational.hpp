#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <string>

namespace sandpile {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat make_rat(std::int64_t num, std::int64_t den = 1) { return Rat(num, den); }

std::string rat_to_string(const Rat& r);       // "p" or "p/q", q > 0, reduced
Rat rat_from_string(const std::string& s);     // accepts both forms

inline double rat_to_double(const Rat& r) { return r.template convert_to<double>(); }

/// Point of the rational plane; doubles as a complex number where needed.
struct RatPoint {
    Rat x;
    Rat y;

    friend bool operator==(const RatPoint&, const RatPoint&) = default;
};

inline RatPoint operator+(const RatPoint& a, const RatPoint& b) { return {a.x + b.x, a.y + b.y}; }
inline RatPoint operator-(const RatPoint& a, const RatPoint& b) { return {a.x - b.x, a.y - b.y}; }
inline RatPoint operator*(const Rat& s, const RatPoint& p) { return {s * p.x, s * p.y}; }

/// Complex product under the usual identification of the plane with C.
inline RatPoint cmul(const RatPoint& a, const RatPoint& b) {
    return {a.x * b.x - a.y * b.y, a.x * b.y + a.y * b.x};
}
inline RatPoint conj(const RatPoint& a) { return {a.x, -a.y}; }

inline Rat dot(const RatPoint& a, const RatPoint& b) { return a.x * b.x + a.y * b.y; }
inline Rat cross(const RatPoint& a, const RatPoint& b) { return a.x * b.y - a.y * b.x; }

/// 2x2 rational matrix, row-major.
struct RatMat2 {
    std::array<Rat, 4> m{};  // m[0] m[1] / m[2] m[3]

    Rat& operator()(int r, int c) { return m[static_cast<std::size_t>(2 * r + c)]; }
    const Rat& operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }

    RatPoint apply(const RatPoint& p) const {
        return {m[0] * p.x + m[1] * p.y, m[2] * p.x + m[3] * p.y};
    }
    Rat trace() const { return m[0] + m[3]; }
    bool symmetric() const { return m[1] == m[2]; }

    friend bool operator==(const RatMat2&, const RatMat2&) = default;
};

}  // namespace sandpile
