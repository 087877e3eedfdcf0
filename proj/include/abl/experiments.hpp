#ifndef ABL_EXPERIMENTS_HPP
#define ABL_EXPERIMENTS_HPP

#include <fstream>
#include <memory>

#include <json.hpp>

#include "abl/expansion.hpp"
#include "abl/projection.hpp"
#include "abl/solver.hpp"

namespace abl {

// Everything a solver run reports: descent statistics, the projection onto
// the bubble family, and the Theorem-level scale-law defect.
struct RunRecord {
    SolveRecord solve;
    ProjectionResult proj;
    double theorem1_defect = 0;
    double theorem1_ratio = 0;     // defect / (a-1)^{3/2} |log(a-1)|
    double scale_ratio = 0;        // lambda(u) sqrt((alpha-1)/(2 pi))
    double init_lambda = 0;
};

inline nlohmann::json to_json(const RunRecord& r) {
    nlohmann::json j;
    j["alpha"] = r.solve.alpha;
    j["iterations"] = r.solve.iterations;
    j["converged"] = r.solve.converged;
    j["residual"] = r.solve.residual;
    j["e_alpha_initial"] = r.solve.e_alpha_initial;
    j["e_alpha_final"] = r.solve.e_alpha_final;
    j["degree"] = r.solve.degree;
    j["max_grad"] = r.solve.max_grad;
    j["sup_density"] = r.solve.sup_density;
    j["init_lambda"] = r.init_lambda;
    j["lambda"] = r.proj.params.lambda;
    j["center"] = {r.proj.params.a.x, r.proj.params.a.y};
    j["distance_z"] = r.proj.distance;
    j["gap_linf"] = r.proj.gap_linf;
    j["gap_grad_linf"] = r.proj.gap_grad_linf;
    j["projection_converged"] = r.proj.converged;
    j["theorem1_defect"] = r.theorem1_defect;
    j["theorem1_ratio"] = r.theorem1_ratio;
    j["scale_ratio"] = r.scale_ratio;
    return j;
}

// Shared heavyweight context for experiments: the Ewald evaluator plus the
// interpolation tables behind the fast samplers.
struct Lab {
    GreensTorus greens;
    std::shared_ptr<const GreenTables> tables;
    BubbleSampler sampler;

    explicit Lab(double eta = 2.0)
        : greens(eta),
          tables(std::make_shared<GreenTables>(greens)),
          sampler(greens, tables) {}
};

// One full experiment: descend from an adapted-bubble initial datum, project
// the minimizer back onto the family, evaluate the scale law.
inline RunRecord run_solve_experiment(Lab& lab, double alpha, int n, double init_lambda,
                                      const TorusPoint& a = {0.5, 0.5},
                                      const Mat3& R = Mat3::identity(),
                                      SolverConfig* base_cfg = nullptr, Field3* u_out = nullptr,
                                      const Field3* u_init = nullptr) {
    SolverConfig cfg = base_cfg ? *base_cfg : SolverConfig{};
    cfg.n = n;
    cfg.alpha = alpha;
    RunRecord rec;
    rec.init_lambda = init_lambda;
    Field3 u;
    if (u_init) {
        u = *u_init;
    } else {
        BubbleParams p0{init_lambda, a, R};
        lab.sampler.sample(p0, n, u);
    }
    rec.solve = solve(u, cfg);
    rec.proj = project_to_Z(u, lab.sampler);
    rec.theorem1_defect = theorem1_defect(lab.greens, rec.proj, alpha, &rec.theorem1_ratio);
    rec.scale_ratio = rec.proj.params.lambda * std::sqrt((alpha - 1) / (2 * M_PI));
    if (u_out) *u_out = std::move(u);
    return rec;
}

struct SweepResult {
    std::vector<RunRecord> runs;
    double fitted_slope = 0;  // d log lambda(u) / d log (alpha-1)
};

// Descend at each alpha from a fresh bubble initial datum, fit the scale law
// exponent across the sweep.
inline SweepResult alpha_sweep(Lab& lab, const std::vector<double>& alphas, int n,
                               SolverConfig* base_cfg = nullptr) {
    SweepResult out;
    std::vector<double> am1, lam;
    for (double alpha : alphas) {
        double target = std::sqrt(2 * M_PI / (alpha - 1));
        RunRecord r = run_solve_experiment(lab, alpha, n, 0.6 * target);
        if (!r.solve.converged) throw std::runtime_error("alpha_sweep: solve failed to converge");
        am1.push_back(alpha - 1);
        lam.push_back(r.proj.params.lambda);
        out.runs.push_back(std::move(r));
    }
    out.fitted_slope = loglog_fit(am1, lam).slope;
    return out;
}

// Degree-zero branch: descent from a slightly perturbed constant map must
// stay degree zero with bounded gradients (no bubbling).
struct DegreeZeroRecord {
    SolveRecord solve;
    double final_max_grad = 0;
};

inline DegreeZeroRecord degree_zero_experiment(Lab& lab, double alpha, int n, double noise = 0.2,
                                               std::uint64_t seed = 2024, int kmax = 3) {
    std::mt19937_64 rng(seed);
    Field3 u(n);
    Field3 pert = random_bandlimited3(n, kmax, rng);
    for (std::size_t k = 0; k < u.size(); ++k) {
        Vec3d base{0, 0, 1};
        u.v[k] = base + noise * project_dP(base, pert.v[k]);
    }
    u = normalize_field(u);
    SolverConfig cfg;
    cfg.n = n;
    cfg.alpha = alpha;
    DegreeZeroRecord rec;
    rec.solve = solve(u, cfg);
    rec.final_max_grad = rec.solve.max_grad;
    if (rec.solve.degree != 0) throw std::runtime_error("degree_zero_experiment: degree escaped");
    return rec;
}

}  // namespace abl

#endif
