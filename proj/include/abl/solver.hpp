#ifndef ABL_SOLVER_HPP
#define ABL_SOLVER_HPP

#include <cmath>
#include <string>
#include <vector>

#include "abl/zfields.hpp"

namespace abl {

struct SolverConfig {
    int n = 1024;
    double alpha = 1.01;
    double tau0 = 1e-3;           // initial trial step
    double shrink = 0.5;          // backtracking factor
    double c1 = 1e-4;             // sufficient-decrease constant
    double tol_residual = 1e-6;   // L2 norm of grad_l2
    int max_iters = 200000;
    bool precondition = true;
    int check_every = 50;         // degree monitoring cadence
    int checkpoint_every = 0;     // iterations between checkpoints, 0 = off
    std::string checkpoint_prefix;

    void validate() const {
        if (!(tol_residual > 0)) throw std::invalid_argument("SolverConfig: tol must be positive");
        if (!(alpha > 1.0 && alpha <= 2.0))
            throw std::invalid_argument("SolverConfig: alpha must lie in (1, 2]");
        double needed = 20.0 * std::sqrt(2 * M_PI / (alpha - 1));
        if (n < needed)
            throw std::invalid_argument("SolverConfig: grid too coarse for the expected bubble (n >= 20 sqrt(2 pi/(alpha-1)))");
    }
};

struct SolveRecord {
    double alpha = 0;
    int iterations = 0;
    double e_alpha_final = 0;
    double e_alpha_initial = 0;
    double residual = 0;
    int degree = 0;
    bool converged = false;
    double max_grad = 0;
    double sup_density = 0;  // sup (2+|grad u|^2)^{alpha-1}
};

struct StepResult {
    double tau = 0;
    double energy_drop = 0;
    bool moved = false;
};

namespace solver_detail {

struct WorkState {
    Grad3 gu;       // gradient of the current iterate
    double energy;  // its alpha-energy
    bool fresh = false;
};

inline Field3 displaced(const Field3& u, const Field3& D, double tau) {
    Field3 w(u.n);
    parallel_for(u.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            Vec3d q = u.v[k] + tau * D.v[k];
            w.v[k] = q * (1.0 / norm(q));
        }
    });
    return w;
}

struct StepOutcome {
    double tau = 0;
    double energy_drop = 0;
    bool moved = false;
};

// Monotone Armijo backtracking along the tangent direction D (slope < 0),
// with a rounding-noise floor on the acceptable decrease.
inline StepOutcome line_search(Field3& u, double alpha, const SolverConfig& cfg, WorkState& ws,
                               const Field3& D, double slope, double& tau_trial) {
    double noise = 8 * 2.2e-16 * (std::abs(ws.energy) + 1.0);
    double tau = tau_trial;
    while (tau >= 1e-14) {
        Field3 w = displaced(u, D, tau);
        Grad3 gw = grad3(w);
        double ew = e_alpha(gw, alpha);
        if (ew <= ws.energy + std::max(cfg.c1 * tau * slope, -noise) + noise) {
            double drop = ws.energy - ew;
            u = std::move(w);
            ws.gu = std::move(gw);
            ws.energy = ew;
            tau_trial = tau * 2;
            return {tau, drop, true};
        }
        tau *= cfg.shrink;
    }
    throw std::runtime_error("descend_step: backtracking exhausted (tau < 1e-14)");
}

}  // namespace solver_detail

// Sobolev preconditioner: (-Delta + 1)^{-1} applied spectrally, re-projected
// pointwise tangent.
inline Field3 precondition(const Field3& u, const Field3& V) {
    return pointwise_project(u, helmholtz_inverse3(V));
}

// One backtracking descent step.  u is updated in place when the step
// succeeds; tau_trial carries the warm-started step size across calls.
// The L2 gradient may be passed in when the caller already has it.
inline StepResult descend_step(Field3& u, double alpha, const SolverConfig& cfg,
                               solver_detail::WorkState& ws, double& tau_trial,
                               double* residual_out = nullptr, const Field3* G_pre = nullptr) {
    if (!ws.fresh) {
        ws.gu = grad3(u);
        ws.energy = e_alpha(ws.gu, alpha);
        ws.fresh = true;
    }
    Field3 G_local;
    const Field3& G = G_pre ? *G_pre : (G_local = grad_l2(u, alpha, &ws.gu), G_local);
    if (residual_out) *residual_out = l2_norm(G);
    Field3 D = cfg.precondition ? precondition(u, G) : G;
    parallel_for(D.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) D.v[k] = -D.v[k];
    });
    double slope = integrate_dot(G, D);  // negative descent rate
    if (slope >= 0) return {0, 0, false};
    solver_detail::StepOutcome out = solver_detail::line_search(u, alpha, cfg, ws, D, slope, tau_trial);
    return {out.tau, out.energy_drop, out.moved};
}

// Preconditioned projected gradient descent on E_alpha with degree
// monitoring.  The iterate stays unit-norm by nodewise renormalization; step
// sizes come from a Barzilai-Borwein secant estimate in the preconditioned
// metric, safeguarded by the monotone backtracking of descend_step.
inline SolveRecord solve(Field3& u, const SolverConfig& cfg,
                         std::vector<double>* residual_history = nullptr) {
    cfg.validate();
    require_unit(u, 1e-8);
    SolveRecord rec;
    rec.alpha = cfg.alpha;
    int deg0 = degree(u);
    rec.degree = deg0;
    solver_detail::WorkState ws;
    ws.gu = grad3(u);
    ws.energy = e_alpha(ws.gu, cfg.alpha);
    ws.fresh = true;
    rec.e_alpha_initial = ws.energy;
    double tau_trial = cfg.tau0;
    double res = 0;
    Field3 P_prev;     // preconditioned gradient of the previous iterate
    double tau_used = 0;

    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        // residual gate first: a converged iterate takes no further step
        Field3 G = grad_l2(u, cfg.alpha, &ws.gu);
        res = l2_norm(G);
        if (residual_history) residual_history->push_back(res);
        if (res <= cfg.tol_residual) {
            rec.converged = true;
            break;
        }
        Field3 P = cfg.precondition ? precondition(u, G) : G;
        if (tau_used > 0 && P_prev.n == u.n) {
            // BB2 secant step: s = -tau_used P_prev, y = P - P_prev
            double sy = 0, yy = 0;
            for (std::size_t k = 0; k < u.size(); ++k) {
                Vec3d y = P.v[k] - P_prev.v[k];
                sy += dot(P_prev.v[k], y) * (-tau_used);
                yy += dot(y, y);
            }
            if (sy > 0 && yy > 0) tau_trial = std::min(std::max(sy / yy, 1e-10), 1e4);
        }
        Field3 D(u.n);
        parallel_for(D.size(), [&](std::size_t k0, std::size_t k1) {
            for (std::size_t k = k0; k < k1; ++k) D.v[k] = -P.v[k];
        });
        double slope = integrate_dot(G, D);
        if (slope >= 0) break;
        solver_detail::StepOutcome st = solver_detail::line_search(u, cfg.alpha, cfg, ws, D, slope, tau_trial);
        if (!st.moved) break;  // stationary to machine precision
        tau_used = st.tau;
        P_prev = std::move(P);
        if (cfg.check_every > 0 && (it + 1) % cfg.check_every == 0) {
            if (degree(u) != deg0)
                throw std::runtime_error("solve: degree changed during descent (under-resolved run)");
        }
        if (cfg.checkpoint_every > 0 && (it + 1) % cfg.checkpoint_every == 0 &&
            !cfg.checkpoint_prefix.empty()) {
            save_grid_binary(u, cfg.checkpoint_prefix + "_iter" + std::to_string(it + 1) + ".bin");
        }
    }
    rec.iterations = it;
    rec.residual = res;
    rec.e_alpha_final = ws.energy;
    rec.degree = degree(u);
    if (rec.degree != deg0) throw std::runtime_error("solve: degree changed during descent");

    Grad3 g = grad3(u);
    for (std::size_t k = 0; k < u.size(); ++k) {
        double g2 = norm2(g.d1.v[k]) + norm2(g.d2.v[k]);
        rec.max_grad = std::max(rec.max_grad, std::sqrt(g2));
        rec.sup_density = std::max(rec.sup_density, std::pow(2.0 + g2, cfg.alpha - 1));
    }
    return rec;
}

}  // namespace abl

#endif
