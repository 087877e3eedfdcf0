#ifndef ABL_PROJECTION_HPP
#define ABL_PROJECTION_HPP

#include <array>
#include <cmath>
#include <functional>

#include "abl/energy.hpp"
#include "abl/tables.hpp"

namespace abl {

struct ProjectionResult {
    BubbleParams params;
    double distance = 0;       // || u - z ||_z at the minimizer
    double gap_linf = 0;       // || u - z ||_inf
    double gap_grad_linf = 0;  // || grad u - grad z ||_inf
    bool converged = false;
    int iterations = 0;
    bool multiple_minima = false;
};

namespace proj_detail {

// squared bubble-weighted distance || u - z ||^2_{z-candidate}
inline double distance2(const Field3& u, const Grad3& gu, const Field3& z, const Grad3& gz,
                        const ScalarField& rho2) {
    return parallel_sum(u.size(), [&](std::size_t k) {
        Vec3d dv = u.v[k] - z.v[k];
        Vec3d d1 = gu.d1.v[k] - gz.d1.v[k];
        Vec3d d2 = gu.d2.v[k] - gz.d2.v[k];
        return norm2(d1) + norm2(d2) + rho2.v[k] * norm2(dv);
    }) / u.size();
}

struct Simplex {
    using Point = std::array<double, 6>;
    std::vector<std::pair<double, Point>> verts;

    void sort() {
        std::sort(verts.begin(), verts.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }
};

// standard Nelder-Mead on 6 parameters; returns evaluation count
template <class F>
int nelder_mead(F&& f, std::array<double, 6>& x, const std::array<double, 6>& scale,
                int max_iter, double frel_tol) {
    Simplex s;
    s.verts.reserve(7);
    s.verts.push_back({f(x), x});
    int evals = 1;
    for (int i = 0; i < 6; ++i) {
        auto p = x;
        p[i] += scale[i];
        s.verts.push_back({f(p), p});
        ++evals;
    }
    for (int it = 0; it < max_iter; ++it) {
        s.sort();
        double fbest = s.verts.front().first, fworst = s.verts.back().first;
        if (std::abs(fworst - fbest) <= frel_tol * (std::abs(fbest) + 1e-300) + 1e-300) break;
        std::array<double, 6> centroid{};
        for (int v = 0; v < 6; ++v)
            for (int i = 0; i < 6; ++i) centroid[i] += s.verts[v].second[i] / 6.0;
        auto blend = [&](double t) {
            std::array<double, 6> p;
            for (int i = 0; i < 6; ++i)
                p[i] = centroid[i] + t * (s.verts.back().second[i] - centroid[i]);
            return p;
        };
        auto refl = blend(-1.0);
        double fr = f(refl);
        ++evals;
        if (fr < fbest) {
            auto expa = blend(-2.0);
            double fe = f(expa);
            ++evals;
            s.verts.back() = fe < fr ? std::make_pair(fe, expa) : std::make_pair(fr, refl);
        } else if (fr < s.verts[5].first) {
            s.verts.back() = {fr, refl};
        } else {
            auto contr = blend(fr < fworst ? -0.5 : 0.5);
            double fc = f(contr);
            ++evals;
            if (fc < std::min(fr, fworst)) {
                s.verts.back() = {fc, contr};
            } else {
                for (int v = 1; v < 7; ++v) {
                    for (int i = 0; i < 6; ++i)
                        s.verts[v].second[i] =
                            0.5 * (s.verts[v].second[i] + s.verts[0].second[i]);
                    s.verts[v].first = f(s.verts[v].second);
                    ++evals;
                }
            }
        }
    }
    s.sort();
    x = s.verts.front().second;
    return evals;
}

}  // namespace proj_detail

// Weighted orthogonal Procrustes: the rotation maximizing <u, R z>_z, with
// the determinant sign matched to the degree of u.
inline Mat3 procrustes_R(const Field3& u, const Grad3& gu, const Field3& z_unrot,
                         const Grad3& gz, const ScalarField& rho2, int deg_u) {
    Mat3 M;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            M(a, b) = parallel_sum(u.size(), [&](std::size_t k) {
                return gu.d1.v[k][a] * gz.d1.v[k][b] + gu.d2.v[k][a] * gz.d2.v[k][b] +
                       rho2.v[k] * u.v[k][a] * z_unrot.v[k][b];
            }) / u.size();
        }
    return polar_orthogonal(M, deg_u >= 0 ? 1 : -1);
}

// Scale/center/rotation initial guess from the gradient peak: |grad z|(a)
// is approximately 2 sqrt(2) lambda at the center.
inline BubbleParams init_guess(const Field3& u, const Grad3& gu, const BubbleSampler& sampler) {
    double best = 0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        double g2 = norm2(gu.d1.v[k]) + norm2(gu.d2.v[k]);
        if (g2 > best) {
            best = g2;
            best_k = k;
        }
    }
    double max_grad = std::sqrt(best);
    if (max_grad <= 10.0)
        throw std::runtime_error("init_guess: no concentration detected (max |grad u| <= 10)");
    BubbleParams p;
    p.lambda = max_grad / (2 * std::sqrt(2.0));
    p.a = u.node(best_k);
    p.R = Mat3::identity();
    Field3 z;
    Grad3 gz;
    sampler.sample(p, u.n, z, &gz);
    ScalarField rho2 = sampler.rho2(p, u.n);
    p.R = procrustes_R(u, gu, z, gz, rho2, degree(u));
    return p;
}

// Closest-point projection of u onto the adapted-bubble family in the
// candidate-weighted norm: derivative-free simplex descent on
// (log lambda, a, omega) with an exact Procrustes refresh of the base
// rotation between rounds, followed by a per-coordinate quadratic polish.
inline ProjectionResult project_to_Z(const Field3& u, const BubbleSampler& sampler,
                                     const BubbleParams* start = nullptr, int max_nm_iters = 500) {
    Grad3 gu = grad3(u);
    int deg_u = degree(u);
    BubbleParams p0 = start ? *start : init_guess(u, gu, sampler);

    Mat3 R_base = p0.R;
    int total_evals = 0;
    auto objective = [&](const std::array<double, 6>& x) {
        BubbleParams p;
        p.lambda = std::exp(x[0]);
        if (p.lambda < kLambdaMin || p.lambda > 1e4) return 1e30;
        p.a = wrap(x[1], x[2]);
        Vec3d w{x[3], x[4], x[5]};
        if (norm(w) > M_PI) return 1e30;
        p.R = R_base * rotation_exp(w);
        Field3 z;
        Grad3 gz;
        sampler.sample(p, u.n, z, &gz);
        ++total_evals;
        return proj_detail::distance2(u, gu, z, gz, sampler.rho2(p, u.n));
    };

    std::array<double, 6> x{std::log(p0.lambda), p0.a.x, p0.a.y, 0, 0, 0};
    double fbest = 0;
    for (int round = 0; round < 4; ++round) {
        // exact inner rotation refresh at the current (lambda, a)
        BubbleParams pc;
        pc.lambda = std::exp(x[0]);
        pc.a = wrap(x[1], x[2]);
        pc.R = Mat3::identity();
        Field3 z;
        Grad3 gz;
        sampler.sample(pc, u.n, z, &gz);
        R_base = procrustes_R(u, gu, z, gz, sampler.rho2(pc, u.n), deg_u);
        x[3] = x[4] = x[5] = 0;
        double lam = std::exp(x[0]);
        std::array<double, 6> scale{0.04, 0.5 / lam, 0.5 / lam, 0.02, 0.02, 0.02};
        for (double& s : scale) s *= std::pow(0.25, round);
        proj_detail::nelder_mead(objective, x, scale, max_nm_iters / 4, 1e-14);
        // quadratic polish, one pass per coordinate
        fbest = objective(x);
        for (int i = 0; i < 6; ++i) {
            double h = scale[i] * 0.05;
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            double fp = objective(xp), fm = objective(xm);
            double denom = fp - 2 * fbest + fm;
            if (denom > 0) {
                double step = 0.5 * h * (fm - fp) / denom;
                auto xn = x;
                xn[i] += std::max(-2 * h, std::min(2 * h, step));
                double fn = objective(xn);
                if (fn < fbest) {
                    x = xn;
                    fbest = fn;
                }
            } else if (fp < fbest || fm < fbest) {
                x = fp < fm ? xp : xm;
                fbest = std::min(fp, fm);
            }
        }
    }

    ProjectionResult res;
    res.params.lambda = std::exp(x[0]);
    res.params.a = wrap(x[1], x[2]);
    res.params.R = R_base * rotation_exp({x[3], x[4], x[5]});
    res.iterations = total_evals;

    // first-order stationarity along each coordinate
    fbest = objective(x);
    bool stationary = true;
    for (int i = 0; i < 6; ++i) {
        double h = 1e-5 * (i == 0 ? 1.0 : 1.0);
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        double deriv = (objective(xp) - objective(xm)) / (2 * h);
        if (std::abs(deriv) * h > 1e-6 * (fbest + 1e-12) + 1e-13) stationary = false;
    }
    res.converged = stationary;

    Field3 z;
    Grad3 gz;
    sampler.sample(res.params, u.n, z, &gz);
    res.distance = std::sqrt(proj_detail::distance2(u, gu, z, gz, sampler.rho2(res.params, u.n)));
    for (std::size_t k = 0; k < u.size(); ++k) {
        res.gap_linf = std::max(res.gap_linf, norm(u.v[k] - z.v[k]));
        double g1 = norm2(gu.d1.v[k] - gz.d1.v[k]) + norm2(gu.d2.v[k] - gz.d2.v[k]);
        res.gap_grad_linf = std::max(res.gap_grad_linf, std::sqrt(g1));
    }
    return res;
}

// Theorem-level defect |(alpha-1) + lambda^{-2} J(a)| and its ratio to the
// (alpha-1)^{3/2} |log(alpha-1)| scale.
inline double theorem1_defect(const GreensTorus& greens, const ProjectionResult& pr, double alpha,
                              double* normalized = nullptr) {
    double jay = greens.jay(pr.params.a);
    double defect = std::abs((alpha - 1) + jay / (pr.params.lambda * pr.params.lambda));
    if (normalized) {
        double am1 = alpha - 1;
        *normalized = defect / (std::pow(am1, 1.5) * std::abs(std::log(am1)));
    }
    return defect;
}

}  // namespace abl

#endif
