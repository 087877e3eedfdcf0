#include <doctest.h>

#include "abl/expansion.hpp"
#include "abl/zfields.hpp"

using namespace abl;

namespace {
GreensTorus& shared_greens() {
    static GreensTorus g(2.0);
    return g;
}
ZIntegrator& shared_zi() {
    static ZIntegrator zi(shared_greens(), 256);
    return zi;
}
}  // namespace

TEST_CASE("lambda-derivative: dual, first-variation and FD routes agree") {
    auto& zi = shared_zi();
    zi.set_lambda(40.0);
    double alpha = 1.01;
    Dual e = zi.e_alpha_dual(alpha);
    double var = zi.d_lambda_e_variational(alpha);
    double fd = zi.d_lambda_e_fd(alpha);
    CHECK(e.d == doctest::Approx(var).epsilon(1e-12));
    CHECK(e.d == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("lemma 2.1 residual: lambda^-2 scale with the known coefficient") {
    auto& zi = shared_zi();
    // at alpha -> 1 the residual is -4 pi J(a) / lambda^2 = 8 pi^2 / lambda^2
    zi.set_lambda(160.0);
    ExpansionRecord r = evaluate_cell(zi, 160.0, 1.0 + 1e-9, false);
    CHECK(r.lemma21_residual * 160.0 * 160.0 ==
          doctest::Approx(8 * M_PI * M_PI).epsilon(2e-3));
    // residual ratio between lambda = 50 and 100 close to 4
    zi.set_lambda(50.0);
    double r50 = evaluate_cell(zi, 50.0, 1 + 1e-6, false).lemma21_residual;
    zi.set_lambda(100.0);
    double r100 = evaluate_cell(zi, 100.0, 1 + 1e-6, false).lemma21_residual;
    CHECK(r50 / r100 > 3.0);
    CHECK(r50 / r100 < 5.3);
}

TEST_CASE("prop 4.1 leading term emerges at large lambda") {
    auto& zi = shared_zi();
    zi.set_lambda(160.0);
    ExpansionRecord r = evaluate_cell(zi, 160.0, 1 + 1e-6, false);
    // lam^3 dE within 1% of 8 pi J at lambda = 160
    double val = r.lambda * r.lambda * r.lambda * r.d_lambda_e;
    CHECK(std::abs(val + 16 * M_PI * M_PI) / (16 * M_PI * M_PI) < 0.01);
}

TEST_CASE("center derivative vanishes on the torus, both forms") {
    auto& zi = shared_zi();
    zi.set_lambda(30.0);
    ExpansionRecord r = evaluate_cell(zi, 30.0, 1.001, true);
    CHECK(std::abs(r.d_center_e1) < 1e-12);
    CHECK(std::abs(r.d_center_e2) < 1e-12);
    CHECK(std::abs(r.d_center_full) < 1e-12);
    CHECK(std::abs(std::abs(r.d_center_e1) - std::abs(r.d_center_e2)) < 1e-12);
}

TEST_CASE("records are invariant under rotation and center moves (grid route)") {
    auto& g = shared_greens();
    int n = 256;
    double alpha = 1.01;
    AdaptedBubble b1(g, BubbleParams{14.0, {0.5, 0.5}, Mat3::identity()});
    AdaptedBubble b2(g, BubbleParams{14.0, {0.21, 0.68}, rotation_exp({0.3, 1.2, -0.5})});
    double e1 = e_alpha(sample_z(b1, n), alpha);
    double e2 = e_alpha(sample_z(b2, n), alpha);
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-6));  // torus homogeneity + O(3) invariance
}

TEST_CASE("corollary 2.2 sublevel arithmetic") {
    std::vector<ExpansionRecord> recs;
    ExpansionRecord a;
    a.lambda = 25;
    a.alpha = 1.01;
    a.e_alpha_z = 1 + 4 * M_PI + 0.05;  // inside the sublevel
    recs.push_back(a);
    ExpansionRecord bblow;
    bblow.lambda = 1e4;
    bblow.alpha = 1.01;
    bblow.e_alpha_z = 1 + 4 * M_PI + 3.0;  // excluded by the energy sublevel
    recs.push_back(bblow);
    SublevelCheck c = corollary22_check(recs);
    CHECK(c.admitted == 1);
    CHECK(c.violations == 0);
    CHECK(c.max_power == doctest::Approx(std::pow(25.0, 0.02)).epsilon(1e-12));
    CHECK(std::pow(25.0, 0.02) < 1.2);
}

TEST_CASE("golden constants round trip and reject missing keys") {
    GoldenConstants gc;
    gc.j["prop42_bound_C"] = 1.25e-4;
    gc.save("tmp_golden.json");
    GoldenConstants in = GoldenConstants::load("tmp_golden.json");
    CHECK(in.num("prop42_bound_C") == doctest::Approx(1.25e-4));
    CHECK_THROWS(in.num("nope"));
    CHECK_THROWS(GoldenConstants::load("missing_golden.json"));
}
