#ifndef ABL_BUBBLE_HPP
#define ABL_BUBBLE_HPP

#include <array>
#include <cmath>
#include <stdexcept>

#include "abl/cutoff.hpp"
#include "abl/dual.hpp"
#include "abl/greens.hpp"
#include "abl/torus.hpp"
#include "abl/vec.hpp"

namespace abl {

// Scales below this are rejected when constructing adapted bubbles: the
// normalization P(z_tilde) stays safely away from 0 (min |z_tilde| > 1/2 is
// asserted on construction) and the asymptotic expansions are meaningful.
inline constexpr double kLambdaMin = 4.0;

// A point of the moduli space: scale, gluing center, target rotation.
struct BubbleParams {
    double lambda = 20.0;
    TorusPoint a{};
    Mat3 R = Mat3::identity();

    void validate() const {
        if (!(lambda > 1.0)) throw std::invalid_argument("BubbleParams: lambda must exceed 1");
        if (orthogonality_defect(R) > 1e-12)
            throw std::invalid_argument("BubbleParams: R is not orthogonal");
        if (std::abs(std::abs(R.det()) - 1.0) > 1e-10)
            throw std::invalid_argument("BubbleParams: |det R| != 1");
    }
};

// Inverse stereographic projection from the south pole, scaled:
// pi_lambda(x) = ( 2 lambda x / (1 + lambda^2 |x|^2),
//                  (1 - lambda^2 |x|^2) / (1 + lambda^2 |x|^2) ).
template <class S>
Vec3<S> inv_stereo_scaled(const S& lam, const Vec2& x) {
    S W = 1.0 + lam * lam * norm2(x);
    return {2.0 * x.x * lam / W, 2.0 * x.y * lam / W, 2.0 / W - 1.0};
}

inline Vec3d inv_stereo(const Vec2& x) { return inv_stereo_scaled(1.0, x); }

// Nearest-point projection differential on the sphere and its curvature
// term: dP(u)[X] = X - (X.u) u, A(u)(V,W) = -u (V.W).
template <class S>
Vec3<S> project_dP(const Vec3<S>& u, const Vec3<S>& X) {
    return X - dot(X, u) * u;
}

inline Vec3d second_fundamental(const Vec3d& u, const Vec3d& V, const Vec3d& W) {
    return -dot(V, W) * u;
}

// Jet of a 3-vector field at a point: value, first and (optionally) second
// spatial derivatives.  Slots: f, f_1, f_2, f_11, f_12, f_22.
template <class S>
struct Jet2 {
    std::array<Vec3<S>, 6> c{};
    int order = 1;

    Vec3<S>& f() { return c[0]; }
    const Vec3<S>& f() const { return c[0]; }
    Vec3<S>& d(int k) { return c[1 + k]; }
    const Vec3<S>& d(int k) const { return c[1 + k]; }
    Vec3<S>& dd(int j, int k) { return c[3 + j + k]; }
    const Vec3<S>& dd(int j, int k) const { return c[3 + j + k]; }
};

namespace bubble_core {

// pi_lambda jet in the chart
template <class S>
Jet2<S> stereo_jet(const S& lam, const Vec2& x, int order) {
    Jet2<S> out;
    out.order = order;
    double u = norm2(x);
    S l2 = lam * lam;
    S W = 1.0 + l2 * u;
    S iW = 1.0 / W, iW2 = iW * iW;
    out.f() = {2.0 * x.x * lam * iW, 2.0 * x.y * lam * iW, 2.0 * iW - 1.0};
    if (order < 1) return out;
    S l3 = l2 * lam;
    for (int k = 0; k < 2; ++k) {
        Vec3<S>& d = out.d(k);
        for (int i = 0; i < 2; ++i)
            d[i] = 2.0 * lam * ((i == k ? 1.0 : 0.0) * iW) - 4.0 * l3 * x[i] * x[k] * iW2;
        d[2] = -4.0 * l2 * x[k] * iW2;
    }
    if (order < 2) return out;
    S iW3 = iW2 * iW;
    for (int j = 0; j < 2; ++j)
        for (int k = j; k < 2; ++k) {
            Vec3<S>& dd = out.dd(j, k);
            for (int i = 0; i < 2; ++i) {
                double sym = (i == k ? x[j] : 0.0) + (i == j ? x[k] : 0.0) + (k == j ? x[i] : 0.0);
                dd[i] = -4.0 * l3 * sym * iW2 + 16.0 * l3 * l2 * x[i] * x[j] * x[k] * iW3;
            }
            dd[2] = -4.0 * l2 * (j == k ? 1.0 : 0.0) * iW2 + 16.0 * l2 * l2 * x[j] * x[k] * iW3;
        }
    return out;
}

// jet of v(x) = x / |x|^2
inline Jet2<double> point_tail_jet(const Vec2& x, int order) {
    Jet2<double> out;
    out.order = order;
    double u = norm2(x), iu = 1 / u, iu2 = iu * iu, iu3 = iu2 * iu;
    out.f() = {x.x * iu, x.y * iu, 0};
    if (order < 1) return out;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            out.d(k)[i] = (i == k ? iu : 0.0) - 2 * x[i] * x[k] * iu2;
    if (order < 2) return out;
    for (int j = 0; j < 2; ++j)
        for (int k = j; k < 2; ++k)
            for (int i = 0; i < 2; ++i) {
                double sym = (i == k ? x[j] : 0.0) + (i == j ? x[k] : 0.0) + (k == j ? x[i] : 0.0);
                out.dd(j, k)[i] = -2 * sym * iu2 + 8 * x[i] * x[j] * x[k] * iu3;
            }
    return out;
}

// jet of the gradient field (first two components) of a Derivs2 record,
// i.e. w(x) = grad f with f given to third order.
inline Jet2<double> grad_jet(const Derivs2& d, int order) {
    Jet2<double> out;
    out.order = order;
    out.f() = {d.d1[0], d.d1[1], 0};
    if (order < 1) return out;
    out.d(0) = {d.d2[0], d.d2[1], 0};
    out.d(1) = {d.d2[1], d.d2[2], 0};
    if (order < 2) return out;
    out.dd(0, 0) = {d.d3[0], d.d3[1], 0};
    out.dd(0, 1) = {d.d3[1], d.d3[2], 0};
    out.dd(1, 1) = {d.d3[2], d.d3[3], 0};
    return out;
}

// Unnormalized adapted bubble z_tilde in the chart at a:
//   phi (pi_lambda + j) + (1 - phi) ((2/lambda)(x/|x|^2 - grad H + grad H(0)), -1)
// with j = ((2/lambda)(grad H(0) - grad H(x)), 0).  H enters through its
// derivative jet `h`; gh0 is grad H(0) (identically zero on the torus but the
// subtraction is kept).
template <class S>
Jet2<S> ztilde_chart_jet(const S& lam, const Vec2& x, const Derivs2& h, const Vec2& gh0,
                         const Cutoff& phi, int order) {
    S c = 2.0 / lam;
    Jet2<S> pi = stereo_jet(lam, x, order);
    Jet2<double> gh = grad_jet(h, order);

    // inner field A = pi + j and tail B; assembled as q = B + phi (A - B)
    double s = std::sqrt(norm2(x));
    double f = phi(s);
    Jet2<S> out;
    out.order = order;

    // j-part common to both branches: (c (gh0 - grad H), 0)
    auto jpart = [&](int slot) -> Vec3<S> {
        Vec3<S> r = (-1.0) * c * Vec3<S>{S(gh.c[slot].x), S(gh.c[slot].y), S(0)};
        if (slot == 0) {
            r.x += c * gh0.x;
            r.y += c * gh0.y;
        }
        return r;
    };

    bool need_tail = f < 1.0;
    Jet2<double> pt;
    if (need_tail) pt = point_tail_jet(x, order);

    // difference D = A - B = pi - (c x/|x|^2, -1); q = B + phi D
    auto diff_slot = [&](int slot) -> Vec3<S> {
        Vec3<S> d = pi.c[slot];
        if (need_tail) {
            d.x -= c * pt.c[slot].x;
            d.y -= c * pt.c[slot].y;
        }
        if (slot == 0) d.z += 1.0;  // minus the tail's third component
        return d;
    };
    auto tail_slot = [&](int slot) -> Vec3<S> {
        Vec3<S> b = jpart(slot);
        if (need_tail) {
            b.x += c * pt.c[slot].x;
            b.y += c * pt.c[slot].y;
        }
        if (slot == 0) b.z = S(-1.0);
        return b;
    };

    if (!need_tail) {
        // plateau: q = pi + j exactly
        for (int slot = 0; slot < (order >= 2 ? 6 : (order >= 1 ? 3 : 1)); ++slot)
            out.c[slot] = pi.c[slot] + jpart(slot);
        return out;
    }

    double f1 = phi.d1(s), f2 = phi.d2(s);
    Vec3<S> D = diff_slot(0);
    out.f() = tail_slot(0) + f * D;
    if (order >= 1) {
        for (int k = 0; k < 2; ++k) {
            double dk_s = s > 0 ? x[k] / s : 0.0;
            out.d(k) = tail_slot(1 + k) + f * diff_slot(1 + k) + (f1 * dk_s) * D;
        }
    }
    if (order >= 2) {
        for (int j = 0; j < 2; ++j)
            for (int k = j; k < 2; ++k) {
                double sj = x[j] / s, sk = x[k] / s;
                double phi_jk = f2 * sj * sk + f1 * ((j == k ? 1.0 : 0.0) / s - x[j] * x[k] / (s * s * s));
                out.dd(j, k) = tail_slot(3 + j + k) + f * diff_slot(3 + j + k) +
                               (f1 * sk) * diff_slot(1 + j) + (f1 * sj) * diff_slot(1 + k) +
                               phi_jk * D;
            }
    }
    return out;
}

// Far branch (distance >= iota from the center): ((2/lambda)(-grad G + grad
// H(0)), -1) with G's derivative jet at the torus offset.
template <class S>
Jet2<S> ztilde_far_jet(const S& lam, const Derivs2& g, const Vec2& gh0, int order) {
    S c = 2.0 / lam;
    Jet2<double> gg = grad_jet(g, order);
    Jet2<S> out;
    out.order = order;
    int slots = order >= 2 ? 6 : (order >= 1 ? 3 : 1);
    for (int slot = 0; slot < slots; ++slot) {
        out.c[slot] = (-1.0) * c * Vec3<S>{S(gg.c[slot].x), S(gg.c[slot].y), S(0)};
        if (slot == 0) {
            out.c[slot].x += c * gh0.x;
            out.c[slot].y += c * gh0.y;
            out.c[slot].z = S(-1.0);
        }
    }
    return out;
}

// Normalize a jet: z = q/|q| with first and second derivatives.
template <class S>
Jet2<S> normalize_jet(const Jet2<S>& q, int order) {
    using std::sqrt;  // keep the double overload visible next to abl::sqrt(Dual)
    Jet2<S> out;
    out.order = order;
    S n2 = dot(q.f(), q.f());
    S n = sqrt(n2);
    S in = 1.0 / n, in3 = in / n2;
    out.f() = q.f() * in;
    if (order < 1) return out;
    S g[2];
    for (int k = 0; k < 2; ++k) {
        g[k] = dot(q.f(), q.d(k));
        out.d(k) = q.d(k) * in - q.f() * (g[k] * in3);
    }
    if (order < 2) return out;
    S in5 = in3 / n2;
    for (int j = 0; j < 2; ++j)
        for (int k = j; k < 2; ++k) {
            S h = dot(q.d(j), q.d(k)) + dot(q.f(), q.dd(j, k));
            out.dd(j, k) = q.dd(j, k) * in -
                           (q.d(j) * g[k] + q.d(k) * g[j] + q.f() * h) * in3 +
                           q.f() * (3.0 * g[j] * g[k] * in5);
        }
    return out;
}

template <class S>
Jet2<S> rotate_jet(const Mat3& R, const Jet2<S>& q) {
    Jet2<S> out;
    out.order = q.order;
    int slots = q.order >= 2 ? 6 : (q.order >= 1 ? 3 : 1);
    for (int slot = 0; slot < slots; ++slot) out.c[slot] = R * q.c[slot];
    return out;
}

}  // namespace bubble_core

// Evaluator for one adapted bubble z = R P(z_tilde_{lambda,a}).  All
// evaluations are pure; the object is immutable after construction and safe
// to share across threads.
class AdaptedBubble {
  public:
    AdaptedBubble(const GreensTorus& greens, const BubbleParams& params)
        : g_(&greens), p_(params) {
        p_.validate();
        if (!(p_.lambda >= kLambdaMin))
            throw std::invalid_argument("AdaptedBubble: lambda below the constructive minimum 4");
        gh0_ = g_->regular_part({0, 0}, 1).grad();
        // |z_tilde| stays above 1/2: coarse radial/angular sweep
        double mn = 1e300;
        for (int ir = 0; ir <= 40; ++ir)
            for (int it = 0; it < 8; ++it) {
                double s = FlatTorus::iota * (ir + 0.5) / 41.0;
                double th = 2 * M_PI * (it + 0.37) / 8;
                Vec3d zt = z_tilde_chart({s * std::cos(th), s * std::sin(th)});
                mn = std::min(mn, norm(zt));
            }
        if (mn <= 0.5)
            throw std::runtime_error("AdaptedBubble: |z_tilde| dipped below 1/2 (lambda too small)");
    }

    const BubbleParams& params() const { return p_; }
    const GreensTorus& greens() const { return *g_; }
    const Cutoff& cutoff() const { return phi_; }
    Vec2 grad_h0() const { return gh0_; }

    bool in_chart(const TorusPoint& p) const { return torus_dist(p, p_.a) < FlatTorus::iota; }

    // unnormalized field (unrotated)
    Vec3d z_tilde(const TorusPoint& p) const {
        Vec2 x = chart(p_.a, p);
        if (norm(x) < FlatTorus::iota) return z_tilde_chart(x);
        Derivs2 gd = g_->green_derivs(x, 1);
        return bubble_core::ztilde_far_jet(p_.lambda, gd, gh0_, 0).f();
    }

    Vec3d z(const TorusPoint& p) const { return jet(p, 0).f(); }

    // value + spatial derivatives, rotated
    Jet2<double> jet(const TorusPoint& p, int order) const {
        Vec2 x = chart(p_.a, p);
        Jet2<double> q;
        if (norm(x) < FlatTorus::iota) {
            Derivs2 h = g_->regular_part(x, order + 1);
            q = bubble_core::ztilde_chart_jet(p_.lambda, x, h, gh0_, phi_, order);
        } else {
            Derivs2 gd = g_->green_derivs(x, order + 1);
            q = bubble_core::ztilde_far_jet(p_.lambda, gd, gh0_, order);
        }
        return bubble_core::rotate_jet(p_.R, bubble_core::normalize_jet(q, order));
    }

    // value + spatial derivatives with the lambda-derivative carried in dual
    // components
    Jet2<Dual> jet_dual(const TorusPoint& p, int order) const {
        Vec2 x = chart(p_.a, p);
        Dual lam = Dual::variable(p_.lambda);
        Jet2<Dual> q;
        if (norm(x) < FlatTorus::iota) {
            Derivs2 h = g_->regular_part(x, order + 1);
            q = bubble_core::ztilde_chart_jet(lam, x, h, gh0_, phi_, order);
        } else {
            Derivs2 gd = g_->green_derivs(x, order + 1);
            q = bubble_core::ztilde_far_jet(lam, gd, gh0_, order);
        }
        return bubble_core::rotate_jet(p_.R, bubble_core::normalize_jet(q, order));
    }

    Vec3d d_lambda_z(const TorusPoint& p) const {
        Jet2<Dual> j = jet_dual(p, 0);
        return {j.f().x.d, j.f().y.d, j.f().z.d};
    }

    // translation derivative: nabla_A z = -A^k d_k z on the flat torus
    Vec3d d_center_z(const TorusPoint& p, const Vec2& A) const {
        Jet2<double> j = jet(p, 1);
        return -(A.x * j.d(0) + A.y * j.d(1));
    }

    double rho(const TorusPoint& p) const {
        double d = torus_dist(p, p_.a);
        double l = p_.lambda;
        double dd = d < FlatTorus::iota ? d : FlatTorus::iota;
        return l / (1 + l * l * dd * dd);
    }

  private:
    Vec3d z_tilde_chart(const Vec2& x) const {
        Derivs2 h = g_->regular_part(x, 1);
        return bubble_core::ztilde_chart_jet(p_.lambda, x, h, gh0_, phi_, 0).f();
    }

    const GreensTorus* g_;
    BubbleParams p_;
    Cutoff phi_;
    Vec2 gh0_;
};

}  // namespace abl

#endif
