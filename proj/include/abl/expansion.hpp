#ifndef ABL_EXPANSION_HPP
#define ABL_EXPANSION_HPP

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "abl/onz.hpp"

namespace abl {

// One sweep cell of the on-family expansion checks.
struct ExpansionRecord {
    double lambda = 0;
    double alpha = 0;
    double e_alpha_z = 0;
    double d_lambda_e = 0;       // variational/dual route
    double d_lambda_e_fd = 0;    // central finite differences in lambda
    double d_center_e1 = 0;      // bubble-disk strong-form center derivative, A = e1
    double d_center_e2 = 0;      // A = e2
    double d_center_full = 0;    // whole-torus weak form (vanishes on the torus)
    double lemma21_residual = 0; // E - 1 - 4pi - 4pi(lam^{2a-2} - 1)
    double prop41_scaled = 0;    // lam^{3-2a} dE
    double prop41_lead = 0;      // 8pi(J lam^-2 + (a-1))
    double prop41_defect = 0;
    double prop42_scaled1 = 0;   // lam^{4-2a} * d_center_e1
    double prop42_scaled2 = 0;
};

inline const char* expansion_csv_header() {
    return "lambda,alpha,e_alpha_z,d_lambda_e,d_lambda_e_fd,d_center_e1,d_center_e2,"
           "d_center_full,lemma21_residual,prop41_scaled,prop41_lead,prop41_defect,"
           "prop42_scaled1,prop42_scaled2";
}

inline void write_expansion_csv(const std::vector<ExpansionRecord>& recs, const std::string& path,
                                const std::string& producer) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "# " << producer << "\n" << expansion_csv_header() << "\n";
    os.precision(17);
    for (const auto& r : recs)
        os << r.lambda << ',' << r.alpha << ',' << r.e_alpha_z << ',' << r.d_lambda_e << ','
           << r.d_lambda_e_fd << ',' << r.d_center_e1 << ',' << r.d_center_e2 << ','
           << r.d_center_full << ',' << r.lemma21_residual << ',' << r.prop41_scaled << ','
           << r.prop41_lead << ',' << r.prop41_defect << ',' << r.prop42_scaled1 << ','
           << r.prop42_scaled2 << '\n';
}

// Evaluate one (lambda, alpha) cell.  with_center adds the second-order
// center-derivative integrals.  The two lambda-derivative routes must agree
// to 1e-5 relative or the cell is rejected (bubble-derivative bug guard).
inline ExpansionRecord evaluate_cell(ZIntegrator& zi, double lambda, double alpha,
                                     bool with_center) {
    if (zi.lambda() != lambda) zi.set_lambda(lambda);
    ExpansionRecord r;
    r.lambda = lambda;
    r.alpha = alpha;
    Dual e = zi.e_alpha_dual(alpha);
    r.e_alpha_z = e.v;
    r.d_lambda_e = e.d;
    r.d_lambda_e_fd = zi.d_lambda_e_fd(alpha);
    double scale = std::max(std::abs(r.d_lambda_e), 1e-12);
    if (std::abs(r.d_lambda_e - r.d_lambda_e_fd) > 1e-5 * scale)
        throw std::runtime_error("expansion sweep: variational and FD lambda-derivatives disagree");
    double jay = -2 * M_PI;  // the paper's invariant on the unit torus
    r.lemma21_residual =
        r.e_alpha_z - 1.0 - 4 * M_PI - 4 * M_PI * (std::pow(lambda, 2 * alpha - 2) - 1);
    r.prop41_scaled = std::pow(lambda, 3 - 2 * alpha) * r.d_lambda_e;
    r.prop41_lead = 8 * M_PI * (jay / (lambda * lambda) + (alpha - 1));
    r.prop41_defect = r.prop41_scaled - r.prop41_lead;
    if (with_center) {
        r.d_center_e1 = zi.center_derivative_bubble_region(alpha, {1, 0});
        r.d_center_e2 = zi.center_derivative_bubble_region(alpha, {0, 1});
        r.d_center_full = zi.center_derivative_full(alpha, {1, 0});
        r.prop42_scaled1 = std::pow(lambda, 4 - 2 * alpha) * r.d_center_e1;
        r.prop42_scaled2 = std::pow(lambda, 4 - 2 * alpha) * r.d_center_e2;
    }
    return r;
}

inline std::vector<ExpansionRecord> sweep_expansions(ZIntegrator& zi,
                                                     const std::vector<double>& lambdas,
                                                     const std::vector<double>& alphas,
                                                     bool with_center) {
    std::vector<ExpansionRecord> out;
    out.reserve(lambdas.size() * alphas.size());
    for (double lam : lambdas) {
        zi.set_lambda(lam);
        for (double a : alphas) out.push_back(evaluate_cell(zi, lam, a, with_center));
    }
    return out;
}

struct LineFit {
    double slope = 0;
    double intercept = 0;
    int npts = 0;
};

inline LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(std::abs(y[i]) > 0)) continue;
        double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return f;
    f.npts = n;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

// geometric grid helper
inline std::vector<double> geometric_grid(double lo, double hi, int count) {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = lo * std::pow(hi / lo, count > 1 ? double(i) / (count - 1) : 0.0);
    return out;
}

// Corollary-level sublevel check: all swept cells inside the energy sublevel
// E_alpha - 1 - 4pi <= delta must satisfy lambda^{2 alpha - 2} <= bound.
struct SublevelCheck {
    int admitted = 0;
    int violations = 0;
    double max_power = 0;
};

inline SublevelCheck corollary22_check(const std::vector<ExpansionRecord>& recs,
                                       double delta = 0.1, double bound = 1.2) {
    SublevelCheck c;
    for (const auto& r : recs) {
        if (r.e_alpha_z - 1.0 - 4 * M_PI > delta) continue;
        ++c.admitted;
        double p = std::pow(r.lambda, 2 * r.alpha - 2);
        c.max_power = std::max(c.max_power, p);
        if (p > bound) ++c.violations;
    }
    return c;
}

// --- golden constants -------------------------------------------------------

// Frozen regression constants with provenance.  The file is versioned with
// the repository; refreezing requires an explicit acknowledgment so baseline
// drift stays deliberate.
struct GoldenConstants {
    nlohmann::json j;

    static GoldenConstants load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("golden file missing: " + path);
        GoldenConstants g;
        is >> g.j;
        return g;
    }

    double num(const std::string& key) const {
        if (!j.contains(key)) throw std::runtime_error("golden constant missing: " + key);
        return j.at(key).get<double>();
    }

    void save(const std::string& path) const {
        std::ofstream os(path);
        os << j.dump(2) << "\n";
    }
};

}  // namespace abl

#endif
