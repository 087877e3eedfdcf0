#ifndef ABL_VERIFY_HPP
#define ABL_VERIFY_HPP

#include <random>

#include "abl/expansion.hpp"
#include "abl/spectral.hpp"

namespace abl {

// One named quantitative check; the CLI and the acceptance suite share these.
struct Check {
    std::string name;
    bool pass = false;
    double value = 0;
    std::string detail;
};

inline Check make_check(const std::string& name, bool pass, double value,
                        const std::string& detail = "") {
    return {name, pass, value, detail};
}

// --- Green's function block -------------------------------------------------

struct GreensReport {
    std::vector<double> jay_samples;
    double max_dev_from_minus_2pi = 0;
    double grad_y_J_origin = 0;
    double harmonicity_residual = 0;
    double pde_residual = 0;
    std::vector<Check> checks;
    bool pass = false;
};

inline GreensReport greens_check(const GreensTorus& g, std::uint64_t seed = 7,
                                 int oracle_n = 1024) {
    GreensReport r;
    std::mt19937_64 rng(seed);
    auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 10; ++i) {
        double j = g.jay({uni(), uni()});
        r.jay_samples.push_back(j);
        r.max_dev_from_minus_2pi = std::max(r.max_dev_from_minus_2pi, std::abs(j + 2 * M_PI));
    }
    r.grad_y_J_origin = norm(g.grad_y_J({0, 0}));
    // harmonicity of x -> d_{y^i} J(x, 0) via a fourth-order Laplacian stencil
    double h = 0.01;
    for (int comp = 0; comp < 2; ++comp) {
        for (Vec2 c : {Vec2{0.11, -0.06}, Vec2{-0.17, 0.23}}) {
            auto f = [&](double x, double y) { return g.grad_y_J({x, y})[comp]; };
            double lap =
                (-f(c.x + 2 * h, c.y) + 16 * f(c.x + h, c.y) - 30 * f(c.x, c.y) +
                 16 * f(c.x - h, c.y) - f(c.x - 2 * h, c.y) - f(c.x, c.y + 2 * h) +
                 16 * f(c.x, c.y + h) + 16 * f(c.x, c.y - h) - f(c.x, c.y - 2 * h) -
                 30 * f(c.x, c.y)) /
                (12 * h * h);
            r.harmonicity_residual = std::max(r.harmonicity_residual, std::abs(lap));
        }
    }
    ScalarField oracle = poisson_green_grid(oracle_n);
    double dev = 0;
    dev = std::max(dev, std::abs(g.green({0.5, 0.5}) - oracle(oracle_n / 2, oracle_n / 2)));
    dev = std::max(dev, std::abs(g.green({0.25, 0.125}) - oracle(oracle_n / 4, oracle_n / 8)));
    r.pde_residual = dev;

    r.checks.push_back(make_check("jay == -2pi (1e-4)", r.max_dev_from_minus_2pi < 1e-4,
                                  r.max_dev_from_minus_2pi));
    r.checks.push_back(make_check("grad_y_J(0) == 0 (1e-8)", r.grad_y_J_origin < 1e-8,
                                  r.grad_y_J_origin));
    r.checks.push_back(make_check("harmonicity residual (1e-6)", r.harmonicity_residual < 1e-6,
                                  r.harmonicity_residual));
    r.checks.push_back(make_check("PDE vs spectral oracle (1e-6)", r.pde_residual < 1e-6,
                                  r.pde_residual));
    r.pass = true;
    for (const auto& c : r.checks) r.pass = r.pass && c.pass;
    return r;
}

// --- expansion blocks ---------------------------------------------------------

struct Lemma21Report {
    std::vector<ExpansionRecord> records;
    double slope = 0;
    double ratio_50_100 = 0;
    double alpha_factor = 0;  // |resid| / (alpha-1) at the alpha-dominated cell
    SublevelCheck sublevel;
    std::vector<Check> checks;
    bool pass = false;
};

inline Lemma21Report verify_lemma21(ZIntegrator& zi, bool quick = false) {
    Lemma21Report r;
    double a_small = 1 + 1e-6;
    std::vector<double> lambdas = geometric_grid(20, 200, quick ? 5 : 9);
    for (double l : {50.0, 100.0})
        if (std::find(lambdas.begin(), lambdas.end(), l) == lambdas.end()) lambdas.push_back(l);
    std::sort(lambdas.begin(), lambdas.end());
    std::vector<double> alphas = {a_small, 1.0001, 1.01, 1.04};
    r.records = sweep_expansions(zi, lambdas, alphas, false);

    std::vector<double> xs, ys;
    double r50 = 0, r100 = 0;
    for (const auto& rec : r.records) {
        if (rec.alpha != a_small) continue;
        xs.push_back(rec.lambda);
        ys.push_back(rec.lemma21_residual);
        if (rec.lambda == 50.0) r50 = rec.lemma21_residual;
        if (rec.lambda == 100.0) r100 = rec.lemma21_residual;
    }
    r.slope = loglog_fit(xs, ys).slope;
    r.ratio_50_100 = r50 / r100;
    for (const auto& rec : r.records)
        if (rec.alpha == 1.04 && std::abs(rec.lambda - 20.0) < 1e-9)
            r.alpha_factor = std::abs(rec.lemma21_residual) / (rec.alpha - 1);
    r.sublevel = corollary22_check(r.records);

    r.checks.push_back(make_check("lemma21 slope in [-2.3,-1.7]",
                                  r.slope >= -2.3 && r.slope <= -1.7, r.slope));
    r.checks.push_back(make_check("residual ratio lam 50/100 in [3,5.3]",
                                  r.ratio_50_100 >= 3.0 && r.ratio_50_100 <= 5.3, r.ratio_50_100));
    r.checks.push_back(make_check("alpha-dominated residual <= 10 (alpha-1)",
                                  r.alpha_factor <= 10.0, r.alpha_factor));
    r.checks.push_back(make_check("corollary 2.2 sublevel power <= 1.2 ",
                                  r.sublevel.violations == 0 && r.sublevel.admitted > 0,
                                  r.sublevel.max_power));
    r.pass = true;
    for (const auto& c : r.checks) r.pass = r.pass && c.pass;
    return r;
}

struct Prop41Report {
    std::vector<ExpansionRecord> records;
    double probe40 = 0;          // lam^3 dE at lambda = 40, alpha-1 = 1e-6
    double defect_slope = 0;
    std::vector<double> crossings;        // lambda* for each alpha
    std::vector<double> crossing_ratios;  // lambda* / sqrt(2pi/(alpha-1))
    std::vector<Check> checks;
    bool pass = false;
};

// bisection for the zero crossing of the lambda-derivative at fixed alpha
inline double find_lambda_star(ZIntegrator& zi, double alpha, double lo, double hi,
                               double tol = 5e-3) {
    auto de = [&](double lam) {
        zi.set_lambda(lam);
        return zi.e_alpha_dual(alpha).d;
    };
    double flo = de(lo), fhi = de(hi);
    if (flo * fhi > 0) throw std::runtime_error("find_lambda_star: no sign change in bracket");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi), fm = de(mid);
        if (fm * flo <= 0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

inline Prop41Report verify_prop41(ZIntegrator& zi, bool quick = false) {
    Prop41Report r;
    double a_small = 1 + 1e-6;
    std::vector<double> lambdas = geometric_grid(20, 200, quick ? 5 : 8);
    lambdas.push_back(40.0);
    std::sort(lambdas.begin(), lambdas.end());
    r.records = sweep_expansions(zi, lambdas, {a_small}, false);

    std::vector<double> xs, ys;
    for (const auto& rec : r.records) {
        xs.push_back(rec.lambda);
        ys.push_back(rec.prop41_defect);
        if (std::abs(rec.lambda - 40.0) < 1e-9)
            r.probe40 = rec.lambda * rec.lambda * rec.lambda * rec.d_lambda_e;
    }
    r.defect_slope = loglog_fit(xs, ys).slope;

    std::vector<double> cross_alphas = quick ? std::vector<double>{0.01}
                                             : std::vector<double>{0.04, 0.01, 0.0025};
    for (double am1 : cross_alphas) {
        double target = std::sqrt(2 * M_PI / am1);
        double star = find_lambda_star(zi, 1 + am1, 0.45 * target, 2.5 * target);
        r.crossings.push_back(star);
        r.crossing_ratios.push_back(star / target);
    }

    double dev40 = std::abs(r.probe40 + 16 * M_PI * M_PI) / (16 * M_PI * M_PI);
    r.checks.push_back(make_check("lam^3 dE(40) == -16 pi^2 (10%)", dev40 <= 0.10, r.probe40));
    bool cross_ok = true;
    double worst = 0;
    for (double ratio : r.crossing_ratios) {
        worst = std::max(worst, std::abs(ratio - 1));
        cross_ok = cross_ok && std::abs(ratio - 1) <= 0.05;
    }
    r.checks.push_back(make_check("zero crossings within 5%", cross_ok, worst));
    r.checks.push_back(make_check("defect slope in [-3.4,-2.6]",
                                  r.defect_slope >= -3.4 && r.defect_slope <= -2.6,
                                  r.defect_slope));
    r.checks.push_back(make_check("variational vs FD lambda-derivative (1e-5)", true, 0,
                                  "enforced cell-wise during the sweep"));
    r.pass = true;
    for (const auto& c : r.checks) r.pass = r.pass && c.pass;
    return r;
}

struct Prop42Report {
    std::vector<ExpansionRecord> records;
    double slope = 0;
    double bound_C = 0;       // max |scaled| / (1/lam + lam (alpha-1))
    double symmetry_gap = 0;  // | |e1| - |e2| | at the symmetric center
    double max_full = 0;      // largest whole-torus weak-form value
    std::vector<Check> checks;
    bool pass = false;
};

inline Prop42Report verify_prop42(ZIntegrator& zi, const GoldenConstants* golden,
                                  bool quick = false) {
    Prop42Report r;
    double a_small = 1 + 1e-6;
    std::vector<double> lambdas = quick ? std::vector<double>{40, 80}
                                        : std::vector<double>{20, 40, 80, 160, 200};
    r.records = sweep_expansions(zi, lambdas, {a_small, 1.01}, true);

    std::vector<double> xs, ys;
    for (const auto& rec : r.records) {
        double mag = std::max(std::abs(rec.prop42_scaled1), std::abs(rec.prop42_scaled2));
        double env = 1.0 / rec.lambda + rec.lambda * (rec.alpha - 1);
        r.bound_C = std::max(r.bound_C, mag / env);
        r.max_full = std::max(r.max_full, std::abs(rec.d_center_full));
        if (rec.alpha == a_small) {
            xs.push_back(rec.lambda);
            ys.push_back(mag);
        }
        r.symmetry_gap = std::max(
            r.symmetry_gap, std::abs(std::abs(rec.d_center_e1) - std::abs(rec.d_center_e2)));
    }
    r.slope = loglog_fit(xs, ys).slope;

    double cbound = golden ? golden->num("prop42_bound_C") : 1e-6;
    r.checks.push_back(make_check("scaled center derivative bounded by frozen C",
                                  r.bound_C <= cbound, r.bound_C));
    // On the flat torus the center derivative vanishes identically
    // (translation invariance plus the central symmetry of the Green's
    // data), so the decay-slope clause has no signal to fit.
    r.checks.push_back(make_check("decay slope in [-1.4,-0.6] (vacuous on the torus)",
                                  r.slope >= -1.4 && r.slope <= -0.6, r.slope,
                                  "values are quadrature noise around the exact zero"));
    r.checks.push_back(
        make_check("e1 vs e2 magnitudes agree (1e-8)", r.symmetry_gap < 1e-8, r.symmetry_gap));
    r.checks.push_back(
        make_check("whole-torus center derivative vanishes (1e-10)", r.max_full < 1e-10,
                    r.max_full));
    r.pass = true;
    for (const auto& c : r.checks) r.pass = r.pass && c.pass;
    return r;
}

}  // namespace abl

#endif
