#ifndef ABL_DUAL_HPP
#define ABL_DUAL_HPP

#include <cmath>

#include "abl/vec.hpp"

namespace abl {

// First-order dual number: carries a value and its derivative with respect
// to one parameter (here always the bubble scale lambda).  Bubble fields are
// algebraic in lambda, so propagating duals through the chart formulas gives
// exact lambda-derivatives with no finite differencing.
struct Dual {
    double v = 0;  // value
    double d = 0;  // derivative

    Dual() = default;
    Dual(double v_) : v(v_), d(0) {}
    Dual(double v_, double d_) : v(v_), d(d_) {}

    static Dual variable(double v_) { return {v_, 1.0}; }

    Dual operator-() const { return {-v, -d}; }
    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
};

inline Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(const Dual& a, const Dual& b) {
    double inv = 1.0 / b.v;
    return {a.v * inv, (a.d - a.v * b.d * inv) * inv};
}
inline Dual operator+(const Dual& a, double b) { return {a.v + b, a.d}; }
inline Dual operator+(double a, const Dual& b) { return {a + b.v, b.d}; }
inline Dual operator-(const Dual& a, double b) { return {a.v - b, a.d}; }
inline Dual operator-(double a, const Dual& b) { return {a - b.v, -b.d}; }
inline Dual operator*(const Dual& a, double b) { return {a.v * b, a.d * b}; }
inline Dual operator*(double a, const Dual& b) { return {a * b.v, a * b.d}; }
inline Dual operator/(const Dual& a, double b) { return {a.v / b, a.d / b}; }
inline Dual operator/(double a, const Dual& b) {
    double inv = 1.0 / b.v;
    return {a * inv, -a * b.d * inv * inv};
}

inline Dual sqrt(const Dual& a) {
    double s = std::sqrt(a.v);
    return {s, a.d / (2 * s)};
}
inline Dual exp(const Dual& a) {
    double e = std::exp(a.v);
    return {e, a.d * e};
}
inline Dual log(const Dual& a) { return {std::log(a.v), a.d / a.v}; }
inline Dual pow(const Dual& a, double p) {
    double f = std::pow(a.v, p);
    return {f, p * std::pow(a.v, p - 1) * a.d};
}

inline double value(double x) { return x; }
inline double value(const Dual& x) { return x.v; }
inline double deriv(double) { return 0; }
inline double deriv(const Dual& x) { return x.d; }

template <>
inline constexpr bool is_scalar_like_v<Dual> = true;
template <>
inline constexpr bool is_scalar_like_v<Dual&> = true;
template <>
inline constexpr bool is_scalar_like_v<const Dual&> = true;

}  // namespace abl

#endif
