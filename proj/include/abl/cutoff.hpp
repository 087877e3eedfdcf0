#ifndef ABL_CUTOFF_HPP
#define ABL_CUTOFF_HPP

#include <cmath>

#include "abl/torus.hpp"

namespace abl {

// exp(-1/t) smoothstep machinery.  h(t) = exp(-1/t) for t > 0, else 0; the
// step S(t) = h(t) / (h(t) + h(1-t)) rises 0 -> 1 on [0,1] with all
// derivatives vanishing at both ends.
namespace detail {
struct StepVal {
    double s, s1, s2;  // value, first, second derivative
};

inline StepVal smoothstep(double t) {
    if (t <= 1e-3) return {0, 0, 0};
    if (t >= 1 - 1e-3) return {1, 0, 0};
    double ha = std::exp(-1.0 / t);
    double hb = std::exp(-1.0 / (1 - t));
    double ha1 = ha / (t * t);
    double hb1 = -hb / ((1 - t) * (1 - t));
    double ha2 = ha * (1.0 / (t * t * t * t) - 2.0 / (t * t * t));
    double hb2 = hb * (1.0 / std::pow(1 - t, 4) - 2.0 / std::pow(1 - t, 3));
    double w = ha + hb, w1 = ha1 + hb1, w2 = ha2 + hb2;
    double s = ha / w;
    double s1 = (ha1 * w - ha * w1) / (w * w);
    double s2 = (ha2 * w - ha * w2) / (w * w) - 2 * w1 * s1 / w;
    return {s, s1, s2};
}
}  // namespace detail

// Radial cutoff phi: 1 on [0, lo], 0 beyond hi, C-infinity in between, with
// [lo, hi] = [r, 2r] by default.
struct Cutoff {
    double lo = FlatTorus::r_cut;
    double hi = 2 * FlatTorus::r_cut;

    double operator()(double s) const {
        if (s <= lo) return 1.0;
        if (s >= hi) return 0.0;
        return 1.0 - detail::smoothstep((s - lo) / (hi - lo)).s;
    }
    double d1(double s) const {
        if (s <= lo || s >= hi) return 0.0;
        return -detail::smoothstep((s - lo) / (hi - lo)).s1 / (hi - lo);
    }
    double d2(double s) const {
        if (s <= lo || s >= hi) return 0.0;
        return -detail::smoothstep((s - lo) / (hi - lo)).s2 / ((hi - lo) * (hi - lo));
    }
};

// Radial partition switch for composite integrals: 0 on [0, s0], 1 beyond
// s1, smooth in between.  The grid side of a composite rule integrates
// f * switch, the polar side f * (1 - switch).
struct RadialSwitch {
    double s0, s1;

    double operator()(double s) const {
        if (s <= s0) return 0.0;
        if (s >= s1) return 1.0;
        return detail::smoothstep((s - s0) / (s1 - s0)).s;
    }
};

}  // namespace abl

#endif
