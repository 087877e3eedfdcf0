#ifndef ABL_GREENS_HPP
#define ABL_GREENS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "abl/torus.hpp"
#include "abl/vec.hpp"

namespace abl {

// Value and partial derivatives (to third order) of a scalar function of a
// 2D offset.  d2 = {f11, f12, f22}, d3 = {f111, f112, f122, f222}.
struct Derivs2 {
    double f = 0;
    double d1[2] = {0, 0};
    double d2[3] = {0, 0, 0};
    double d3[4] = {0, 0, 0, 0};

    Vec2 grad() const { return {d1[0], d1[1]}; }
    double lap() const { return d2[0] + d2[2]; }
};

namespace ewald_detail {

inline constexpr double kEulerGamma = 0.57721566490153286060651209;

// E1(x) = int_x^inf e^-t / t dt
inline double expint_e1(double x) {
    if (x <= 0) throw std::domain_error("expint_e1: x must be positive");
    if (x <= 1.0) {
        double sum = 0, term = 1;
        for (int j = 1; j <= 30; ++j) {
            term *= -x / j;
            double add = -term / j;
            sum += add;
            if (std::abs(add) < 1e-18) break;
        }
        return -kEulerGamma - std::log(x) + sum;
    }
    // modified Lentz continued fraction
    double b = x + 1, c = 1e308, d = 1 / b, h = d;
    for (int i = 1; i <= 200; ++i) {
        double a = -double(i) * i;
        b += 2;
        d = 1 / (a * d + b);
        c = b + a / c;
        double del = c * d;
        h *= del;
        if (std::abs(del - 1) < 1e-16) break;
    }
    return h * std::exp(-x);
}

// phi0(t) = E1(t) + log t and derivatives; entire, series near 0.
inline double phi0(double t) {
    if (t < 0.5) {
        double sum = -kEulerGamma, term = 1;
        for (int j = 1; j <= 24; ++j) {
            term *= -t / j;
            sum += -term / j;
        }
        return sum;
    }
    return expint_e1(t) + std::log(t);
}
inline double phi0p(double t) {
    if (t < 1e-3) return 1 - t / 2 + t * t / 6 - t * t * t / 24;
    return (1 - std::exp(-t)) / t;
}
inline double phi0pp(double t) {
    if (t < 1e-3) return -0.5 + t / 3 - t * t / 8 + t * t * t / 30;
    return (std::exp(-t) * (t + 1) - 1) / (t * t);
}
inline double phi0ppp(double t) {
    if (t < 1e-3) return 1.0 / 3 - t / 4 + t * t / 10;
    return (2 - std::exp(-t) * (t * t + 2 * t + 2)) / (t * t * t);
}

// Radial accumulation: given f as a function of u = |x|^2 with derivatives
// (fv, fu, fuu, fuuu) at the offset x, add the Cartesian derivatives.
inline void accumulate_radial(Derivs2& out, const Vec2& x, int order, double fv, double fu,
                              double fuu, double fuuu) {
    out.f += fv;
    if (order < 1) return;
    out.d1[0] += 2 * x.x * fu;
    out.d1[1] += 2 * x.y * fu;
    if (order < 2) return;
    out.d2[0] += 2 * fu + 4 * x.x * x.x * fuu;
    out.d2[1] += 4 * x.x * x.y * fuu;
    out.d2[2] += 2 * fu + 4 * x.y * x.y * fuu;
    if (order < 3) return;
    out.d3[0] += 12 * x.x * fuu + 8 * x.x * x.x * x.x * fuuu;
    out.d3[1] += 4 * x.y * fuu + 8 * x.x * x.x * x.y * fuuu;
    out.d3[2] += 4 * x.x * fuu + 8 * x.x * x.y * x.y * fuuu;
    out.d3[3] += 12 * x.y * fuu + 8 * x.y * x.y * x.y * fuuu;
}

}  // namespace ewald_detail

// Ewald evaluator for the torus Green's function solving
//   -Delta G = 2 pi (delta_0 - 1),   mean(G) = 0,
// its regular part H(w) = G(w) + log|w| near the diagonal, and the paper's
// invariant jay = -(H_11 + H_22)(0), which equals -2 pi on the unit torus.
//
// Splitting: G(w) = 1/2 sum_n E1(eta^2 |w+n|^2)
//                   + sum_{k != 0} e^{-pi^2|k|^2/eta^2} cos(2 pi k.w) / (2 pi |k|^2)
//                   - pi / (2 eta^2).
// Both sums are truncated where terms drop below the configured floor; the
// -log|w| cancellation in H is done symbolically against the n = 0 term.
class GreensTorus {
  public:
    explicit GreensTorus(double eta = 2.0, double term_floor = 1e-15) : eta_(eta) {
        if (!(eta > 0)) throw std::invalid_argument("GreensTorus: eta must be positive");
        // exponent budget: floor on the raw Gaussian factor, with margin for
        // polynomial derivative growth
        double T = -std::log(term_floor) + 12.0;
        real_cut_ = std::sqrt(T) / eta;
        img_range_ = static_cast<int>(std::ceil(real_cut_ + 0.75));
        double kmax = eta * std::sqrt(T) / M_PI;
        int K = static_cast<int>(std::ceil(kmax));
        for (int k1 = 0; k1 <= K; ++k1)
            for (int k2 = (k1 == 0 ? 1 : -K); k2 <= K; ++k2) {
                double kk = double(k1) * k1 + double(k2) * k2;
                if (kk == 0 || kk > kmax * kmax) continue;
                double c = std::exp(-M_PI * M_PI * kk / (eta * eta)) / (2 * M_PI * kk);
                modes_.push_back({double(k1), double(k2), 2.0 * c});
            }
        const_term_ = -M_PI / (2 * eta * eta);
    }

    double eta() const { return eta_; }

    // Regular part H(w) = G(w) + log|w|; w must be the nearest-image
    // representative, |w| < 1/2.  Smooth across w = 0.
    Derivs2 regular_part(const Vec2& w, int order = 2) const {
        using namespace ewald_detail;
        if (std::abs(w.x) > 0.5 + 1e-12 || std::abs(w.y) > 0.5 + 1e-12)
            throw std::domain_error("regular_part: offset outside the nearest-image cell");
        Derivs2 out;
        double e2 = eta_ * eta_;
        // n = 0: m(u) = phi0(eta^2 u)/2 - log(eta)
        {
            double u = norm2(w), t = e2 * u;
            double fv = 0.5 * phi0(t) - std::log(eta_);
            double fu = 0.5 * e2 * phi0p(t);
            double fuu = 0.5 * e2 * e2 * phi0pp(t);
            double fuuu = 0.5 * e2 * e2 * e2 * phi0ppp(t);
            accumulate_radial(out, w, order, fv, fu, fuu, fuuu);
        }
        add_images_except_origin(out, w, order);
        add_fourier(out, w, order);
        out.f += const_term_;
        return out;
    }

    // Full Green's function derivatives at an arbitrary offset away from the
    // lattice (all images screened, no log extraction).
    Derivs2 green_derivs(const Vec2& w, int order = 2) const {
        using namespace ewald_detail;
        Derivs2 out;
        double e2 = eta_ * eta_;
        for (int n1 = -img_range_; n1 <= img_range_; ++n1)
            for (int n2 = -img_range_; n2 <= img_range_; ++n2) {
                Vec2 x{w.x + n1, w.y + n2};
                double u = norm2(x);
                if (u > real_cut_ * real_cut_) continue;
                if (u < 1e-24) throw std::domain_error("green_derivs: singular at a lattice point");
                double g = std::exp(-e2 * u);
                double fv = 0.5 * expint_e1(e2 * u);
                double fu = -g / (2 * u);
                double fuu = g * (e2 * u + 1) / (2 * u * u);
                double fuuu = -g * (e2 * e2 * u * u + 2 * e2 * u + 2) / (2 * u * u * u);
                accumulate_radial(out, x, order, fv, fu, fuu, fuuu);
            }
        add_fourier(out, w, order);
        out.f += const_term_;
        return out;
    }

    double green(const Vec2& w) const { return green_derivs(w, 0).f; }
    Vec2 grad_green(const Vec2& w) const { return green_derivs(w, 1).grad(); }

    // grad_y J_a(x, 0) in the chart at a; independent of a on the torus.
    Vec2 grad_y_J(const Vec2& x) const {
        Derivs2 h = regular_part(x, 1);
        return {-h.d1[0], -h.d1[1]};
    }

    // jay(a) = d_x1 d_y1 J_a(0,0) + d_x2 d_y2 J_a(0,0) = -(Delta H)(0).
    double jay(const TorusPoint& = {}) const {
        Derivs2 h = regular_part({0, 0}, 2);
        return -h.lap();
    }

    // The same invariant through the holomorphic one-form definition:
    // -2 pi c_1 |phi(a)|^2 with the single L2-normalized one-form on the
    // unit-area torus, |phi|^2 = 1.
    static double jay_one_form(int genus = 1) {
        if (genus != 1) throw std::invalid_argument("unsupported genus: only the torus (c_1 = 1) is implemented");
        return -2 * M_PI * 1.0 * 1.0;
    }

    Vec2 grad_jay(const TorusPoint& = {}) const {
        Derivs2 h = regular_part({0, 0}, 3);
        return {-(h.d3[0] + h.d3[2]), -(h.d3[1] + h.d3[3])};
    }

  private:
    void add_images_except_origin(Derivs2& out, const Vec2& w, int order) const {
        using namespace ewald_detail;
        double e2 = eta_ * eta_;
        for (int n1 = -img_range_; n1 <= img_range_; ++n1)
            for (int n2 = -img_range_; n2 <= img_range_; ++n2) {
                if (n1 == 0 && n2 == 0) continue;
                Vec2 x{w.x + n1, w.y + n2};
                double u = norm2(x);
                if (u > real_cut_ * real_cut_) continue;
                double g = std::exp(-e2 * u);
                double fv = 0.5 * expint_e1(e2 * u);
                double fu = -g / (2 * u);
                double fuu = g * (e2 * u + 1) / (2 * u * u);
                double fuuu = -g * (e2 * e2 * u * u + 2 * e2 * u + 2) / (2 * u * u * u);
                accumulate_radial(out, x, order, fv, fu, fuu, fuuu);
            }
    }

    void add_fourier(Derivs2& out, const Vec2& w, int order) const {
        double tp = 2 * M_PI;
        for (const Mode& m : modes_) {
            double ph = tp * (m.k1 * w.x + m.k2 * w.y);
            double c = std::cos(ph), s = std::sin(ph);
            out.f += m.c * c;
            if (order < 1) continue;
            out.d1[0] += -m.c * tp * m.k1 * s;
            out.d1[1] += -m.c * tp * m.k2 * s;
            if (order < 2) continue;
            double t2 = tp * tp * m.c * c;
            out.d2[0] -= t2 * m.k1 * m.k1;
            out.d2[1] -= t2 * m.k1 * m.k2;
            out.d2[2] -= t2 * m.k2 * m.k2;
            if (order < 3) continue;
            double t3 = tp * tp * tp * m.c * s;
            out.d3[0] += t3 * m.k1 * m.k1 * m.k1;
            out.d3[1] += t3 * m.k1 * m.k1 * m.k2;
            out.d3[2] += t3 * m.k1 * m.k2 * m.k2;
            out.d3[3] += t3 * m.k2 * m.k2 * m.k2;
        }
    }

    struct Mode {
        double k1, k2, c;  // c carries the +-k pairing factor
    };

    double eta_;
    double real_cut_ = 0;
    int img_range_ = 0;
    double const_term_ = 0;
    std::vector<Mode> modes_;
};

}  // namespace abl

#endif
