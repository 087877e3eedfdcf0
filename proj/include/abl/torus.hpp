#ifndef ABL_TORUS_HPP
#define ABL_TORUS_HPP

#include <cmath>
#include <stdexcept>

#include "abl/vec.hpp"

namespace abl {

// The unit-area square flat torus R^2 / Z^2 and its chart constants.
//   iota      : half the injectivity radius (inj = 1/2, so iota = 1/4)
//   r_cut     : cutoff radius, 4 r = iota
//   rho_chart : chart radius, rho = 2 iota
struct FlatTorus {
    static constexpr double side = 1.0;
    static constexpr double area = 1.0;
    static constexpr double iota = 0.25;
    static constexpr double r_cut = 0.0625;
    static constexpr double rho_chart = 0.5;
};

static_assert(4 * FlatTorus::r_cut == FlatTorus::iota);
static_assert(FlatTorus::rho_chart == 2 * FlatTorus::iota);

// A point of the fundamental domain [0,1)^2.
struct TorusPoint {
    double x = 0, y = 0;

    TorusPoint() = default;
    TorusPoint(double x_, double y_) : x(x_), y(y_) {}
};

namespace detail {
inline double mod1(double t) {
    double r = t - std::floor(t);
    if (r >= 1.0) r -= 1.0;  // floor rounding at exact integers
    return r;
}

// representative of t mod 1 in [-1/2, 1/2); ties at 1/2 go to +1/2
inline double centered_mod1(double t) {
    double r = mod1(t);
    if (r > 0.5) r -= 1.0;
    return r;
}
}  // namespace detail

inline TorusPoint wrap(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw std::invalid_argument("wrap: non-finite coordinates");
    return {detail::mod1(x), detail::mod1(y)};
}

inline TorusPoint wrap(const Vec2& p) { return wrap(p.x, p.y); }

// Euclidean translation chart F_a: the representative of p - a nearest the
// origin.  Ties at distance 1/2 resolve to the nonnegative coordinate.
inline Vec2 chart(const TorusPoint& a, const TorusPoint& p) {
    return {detail::centered_mod1(p.x - a.x), detail::centered_mod1(p.y - a.y)};
}

inline double torus_dist(const TorusPoint& p, const TorusPoint& q) {
    return norm(chart(q, p));
}

inline TorusPoint translate(const TorusPoint& p, const Vec2& v) {
    return wrap(p.x + v.x, p.y + v.y);
}

}  // namespace abl

#endif
