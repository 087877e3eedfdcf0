#ifndef ABL_ENERGY_HPP
#define ABL_ENERGY_HPP

#include <cmath>
#include <stdexcept>

#include "abl/bubble.hpp"
#include "abl/spectral.hpp"

namespace abl {

// --- sphere-valued grid fields -------------------------------------------

inline double max_norm(const Field3& u) {
    double m = 0;
    for (const auto& v : u.v) m = std::max(m, norm(v));
    return m;
}

inline void require_unit(const Field3& u, double tol = 1e-10) {
    for (const auto& v : u.v)
        if (std::abs(norm(v) - 1.0) > tol)
            throw std::invalid_argument("field is not unit-norm at some node");
}

// Tangency gate: max |V.u| <= tol * max |V|.  Violations are caller bugs and
// are reported, never silently projected away.
inline void require_tangent(const Field3& u, const Field3& V, double tol = 1e-8) {
    double mv = max_norm(V);
    if (mv == 0) return;
    for (std::size_t k = 0; k < u.size(); ++k)
        if (std::abs(dot(u.v[k], V.v[k])) > tol * mv)
            throw std::invalid_argument("field is not tangent to the map");
}

inline Field3 pointwise_project(const Field3& u, const Field3& X) {
    Field3 out(u.n);
    parallel_for(u.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) out.v[k] = project_dP(u.v[k], X.v[k]);
    });
    return out;
}

inline Field3 normalize_field(const Field3& u) {
    Field3 out(u.n);
    parallel_for(u.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) out.v[k] = u.v[k] * (1.0 / norm(u.v[k]));
    });
    return out;
}

// --- alpha-energy and variations ------------------------------------------

inline double e_alpha(const Grad3& g, double alpha) {
    double s = parallel_sum(g.d1.size(), [&](std::size_t k) {
        double g2 = norm2(g.d1.v[k]) + norm2(g.d2.v[k]);
        return std::pow(2.0 + g2, alpha);
    });
    return 0.5 * s / g.d1.size();
}

inline double e_alpha(const Field3& u, double alpha) {
    if (!(alpha > 0) || alpha > 2.0)
        throw std::invalid_argument("e_alpha: alpha must lie in (0, 2]");
    return e_alpha(grad3(u), alpha);
}

inline double dirichlet(const Field3& u) {
    Grad3 g = grad3(u);
    double s = parallel_sum(u.size(), [&](std::size_t k) {
        return norm2(g.d1.v[k]) + norm2(g.d2.v[k]);
    });
    return 0.5 * s / u.size();
}

// first variation  alpha int (2+|grad u|^2)^{alpha-1} grad u . grad V
inline double d_e_alpha(const Field3& u, const Field3& V, double alpha) {
    require_tangent(u, V);
    Grad3 gu = grad3(u), gv = grad3(V);
    double s = parallel_sum(u.size(), [&](std::size_t k) {
        double g2 = norm2(gu.d1.v[k]) + norm2(gu.d2.v[k]);
        double cross = dot(gu.d1.v[k], gv.d1.v[k]) + dot(gu.d2.v[k], gv.d2.v[k]);
        return std::pow(2.0 + g2, alpha - 1) * cross;
    });
    return alpha * s / u.size();
}

// second variation (round-sphere target)
inline double d2_e_alpha(const Field3& u, const Field3& V, const Field3& W, double alpha) {
    require_tangent(u, V);
    require_tangent(u, W);
    Grad3 gu = grad3(u), gv = grad3(V), gw = grad3(W);
    double s = parallel_sum(u.size(), [&](std::size_t k) {
        double g2 = norm2(gu.d1.v[k]) + norm2(gu.d2.v[k]);
        double S1 = std::pow(2.0 + g2, alpha - 1);
        double vw = dot(gv.d1.v[k], gw.d1.v[k]) + dot(gv.d2.v[k], gw.d2.v[k]);
        double uv = dot(gu.d1.v[k], gv.d1.v[k]) + dot(gu.d2.v[k], gv.d2.v[k]);
        double uw = dot(gu.d1.v[k], gw.d1.v[k]) + dot(gu.d2.v[k], gw.d2.v[k]);
        return alpha * S1 * (vw - g2 * dot(V.v[k], W.v[k])) +
               2 * alpha * (alpha - 1) * S1 / (2.0 + g2) * uv * uw;
    });
    return s / u.size();
}

// alpha-tension (Euler-Lagrange residual), tangent by construction:
//   dP(u)[ Delta u + (alpha-1) grad log(2+|grad u|^2) . grad u ]
inline Field3 tension_alpha(const Field3& u, double alpha) {
    require_unit(u);
    Grad3 gu = grad3(u);
    Field3 lap = laplacian3(u);
    ScalarField L(u.n);
    parallel_for(u.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k)
            L.v[k] = std::log(2.0 + norm2(gu.d1.v[k]) + norm2(gu.d2.v[k]));
    });
    GridField<Vec2> gL = grad(L);
    Field3 out(u.n);
    parallel_for(u.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            Vec3d t = lap.v[k] + (alpha - 1) * (gL.v[k].x * gu.d1.v[k] + gL.v[k].y * gu.d2.v[k]);
            out.v[k] = project_dP(u.v[k], t);
        }
    });
    return out;
}

// L2 gradient: G = -alpha dP(u)[ div( (2+|grad u|^2)^{alpha-1} grad u ) ].
// No truncation on the flux: this is the exact gradient of the discrete
// energy, so descent can drive the residual to rounding level.  (A 2/3-rule
// cut on the flux leaves a residual floor at the flux tail near n/3, far
// above the solver tolerance; aliasing is controlled by resolution instead,
// n >= 20 sqrt(2 pi/(alpha-1)).)
inline Field3 grad_l2(const Field3& u, double alpha, const Grad3* gu_pre = nullptr) {
    Grad3 gu_local;
    const Grad3& gu = gu_pre ? *gu_pre : (gu_local = grad3(u), gu_local);
    Field3 f1(u.n), f2(u.n);
    parallel_for(u.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            double g2 = norm2(gu.d1.v[k]) + norm2(gu.d2.v[k]);
            double S = std::pow(2.0 + g2, alpha - 1);
            f1.v[k] = S * gu.d1.v[k];
            f2.v[k] = S * gu.d2.v[k];
        }
    });
    Field3 divf = divergence3(f1, f2, /*dealias=*/false);
    Field3 out(u.n);
    parallel_for(u.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k)
            out.v[k] = project_dP(u.v[k], (-alpha) * divf.v[k]);
    });
    return out;
}

// topological degree (1/4pi) int u . (d1 u x d2 u); the raw integral must sit
// within 0.1 of an integer, otherwise the field is under-resolved.
inline int degree(const Field3& u, double* raw_out = nullptr) {
    Grad3 g = grad3(u);
    double raw = parallel_sum(u.size(), [&](std::size_t k) {
        return dot(u.v[k], cross(g.d1.v[k], g.d2.v[k]));
    }) / (4 * M_PI * u.size());
    if (raw_out) *raw_out = raw;
    double nearest = std::round(raw);
    if (std::abs(raw - nearest) > 0.1)
        throw std::runtime_error("degree: raw integral too far from an integer (under-resolved field)");
    return static_cast<int>(nearest);
}

struct EnergyReport {
    double e_alpha = 0;
    double dirichlet = 0;
    double grad_norm_l2 = 0;
    double max_grad = 0;
    int degree = 0;
};

inline EnergyReport energy_report(const Field3& u, double alpha) {
    require_unit(u, 1e-8);
    EnergyReport r;
    r.e_alpha = e_alpha(u, alpha);
    r.dirichlet = dirichlet(u);
    r.grad_norm_l2 = l2_norm(grad_l2(u, alpha));
    Grad3 g = grad3(u);
    for (std::size_t k = 0; k < u.size(); ++k)
        r.max_grad = std::max(r.max_grad, std::sqrt(norm2(g.d1.v[k]) + norm2(g.d2.v[k])));
    r.degree = degree(u);
    return r;
}

// --- bubble-weighted metric on grid fields --------------------------------

inline ScalarField rho_squared_field(const AdaptedBubble& b, int n) {
    ScalarField out(n);
    parallel_for(out.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            double r = b.rho(out.node(k));
            out.v[k] = r * r;
        }
    });
    return out;
}

inline double z_inner(const Field3& V, const Grad3& gV, const Field3& W, const Grad3& gW,
                      const ScalarField& rho2) {
    if (V.n != W.n || V.n != rho2.n) throw std::invalid_argument("z_inner: grid mismatch");
    return parallel_sum(V.size(), [&](std::size_t k) {
        return dot(gV.d1.v[k], gW.d1.v[k]) + dot(gV.d2.v[k], gW.d2.v[k]) +
               rho2.v[k] * dot(V.v[k], W.v[k]);
    }) / V.size();
}

inline double z_inner(const Field3& V, const Field3& W, const ScalarField& rho2) {
    return z_inner(V, grad3(V), W, grad3(W), rho2);
}

inline double z_norm(const Field3& V, const ScalarField& rho2) {
    return std::sqrt(z_inner(V, V, rho2));
}

}  // namespace abl

#endif
