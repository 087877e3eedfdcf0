#include <doctest.h>

#include <cmath>
#include <random>

#include "abl/spectral.hpp"

using namespace abl;

namespace {

ScalarField sample(int n, double (*f)(double, double)) {
    ScalarField g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = f(double(i) / n, double(j) / n);
    return g;
}

// random band-limited real field with modes up to kmax
ScalarField random_bandlimited(int n, int kmax, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1, 1);
    ScalarField f(n);
    for (int k1 = -kmax; k1 <= kmax; ++k1)
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            double a = uni(rng), b = uni(rng);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double ph = 2 * M_PI * (k1 * double(i) / n + k2 * double(j) / n);
                    f(i, j) += a * std::cos(ph) + b * std::sin(ph);
                }
        }
    return f;
}

}  // namespace

TEST_CASE("gradient is exact on resolved trigonometric modes") {
    int n = 64;
    ScalarField f = sample(n, [](double x, double) { return std::sin(2 * M_PI * x); });
    auto g = grad(f);
    double err = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double want = 2 * M_PI * std::cos(2 * M_PI * double(i) / n);
            err = std::max(err, std::abs(g(i, j).x - want));
            err = std::max(err, std::abs(g(i, j).y));
        }
    CHECK(err < 1e-10);
}

TEST_CASE("gradient of a mixed mode is the mode-wise derivative") {
    int n = 32;
    ScalarField f = sample(n, [](double x, double y) {
        return std::cos(2 * M_PI * (3 * x + 5 * y));
    });
    auto g = grad(f);
    double err = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = -std::sin(2 * M_PI * (3.0 * i / n + 5.0 * j / n)) * 2 * M_PI;
            err = std::max(err, std::abs(g(i, j).x - 3 * s));
            err = std::max(err, std::abs(g(i, j).y - 5 * s));
        }
    CHECK(err < 1e-10);
}

TEST_CASE("gradient and laplacian annihilate constants exactly") {
    int n = 16;
    ScalarField f(n);
    for (auto& v : f.v) v = 3.7;
    auto g = grad(f);
    auto l = laplacian(f);
    for (std::size_t k = 0; k < f.size(); ++k) {
        CHECK(g.v[k].x == 0.0);
        CHECK(g.v[k].y == 0.0);
        CHECK(std::abs(l.v[k]) < 1e-12);
    }
}

TEST_CASE("laplacian multiplier and div(grad) consistency") {
    int n = 128;
    ScalarField f = sample(n, [](double x, double) { return std::sin(2 * M_PI * x); });
    auto l = laplacian(f);
    double err = 0;
    for (std::size_t k = 0; k < f.size(); ++k)
        err = std::max(err, std::abs(l.v[k] + 4 * M_PI * M_PI * f.v[k]));
    CHECK(err < 1e-9);

    std::mt19937_64 rng(5);
    ScalarField h = random_bandlimited(n, 6, rng);
    auto dg = divergence(grad(h));
    auto lh = laplacian(h);
    double err2 = 0;
    for (std::size_t k = 0; k < h.size(); ++k) err2 = std::max(err2, std::abs(dg.v[k] - lh.v[k]));
    CHECK(err2 < 1e-9);
}

TEST_CASE("integrate: constants, odd modes, grid refinement on a bump") {
    ScalarField c(32);
    for (auto& v : c.v) v = -2.25;
    CHECK(integrate(c) == doctest::Approx(-2.25).epsilon(1e-15));

    ScalarField s = sample(64, [](double x, double) { return std::sin(2 * M_PI * x); });
    CHECK(std::abs(integrate(s)) < 1e-14);

    auto bump = [](double x, double y) {
        double dx = x - 0.5, dy = y - 0.5;
        return std::exp(-(dx * dx + dy * dy) / (2 * 0.05 * 0.05));
    };
    double i256 = integrate(sample(256, bump));
    double i512 = integrate(sample(512, bump));
    CHECK(std::abs(i256 - i512) < 1e-8);
}

TEST_CASE("integration by parts: grad against laplacian") {
    int n = 64;
    std::mt19937_64 rng(17);
    ScalarField f = random_bandlimited(n, 5, rng);
    ScalarField g = random_bandlimited(n, 5, rng);
    auto gf = grad(f), gg = grad(g);
    ScalarField prod(n), lap_side(n);
    auto lf = laplacian(f);
    for (std::size_t k = 0; k < f.size(); ++k) {
        prod.v[k] = dot(gf.v[k], gg.v[k]);
        lap_side.v[k] = -lf.v[k] * g.v[k];
    }
    CHECK(integrate(prod) == doctest::Approx(integrate(lap_side)).epsilon(1e-9));
}

TEST_CASE("helmholtz inverse solves (-Delta + 1) v = f") {
    int n = 64;
    std::mt19937_64 rng(23);
    ScalarField f = random_bandlimited(n, 5, rng);
    ScalarField v = helmholtz_inverse(f);
    auto lv = laplacian(v);
    double err = 0;
    for (std::size_t k = 0; k < f.size(); ++k)
        err = std::max(err, std::abs(-lv.v[k] + v.v[k] - f.v[k]));
    CHECK(err < 1e-9);
}

TEST_CASE("dealias truncates high modes and keeps low ones") {
    int n = 32;
    ScalarField lo = sample(n, [](double x, double) { return std::cos(2 * M_PI * 3 * x); });
    ScalarField hi = sample(n, [](double x, double) { return std::cos(2 * M_PI * 14 * x); });
    ScalarField f(n);
    for (std::size_t k = 0; k < f.size(); ++k) f.v[k] = lo.v[k] + hi.v[k];
    ScalarField d = dealias23(f);
    double err = 0;
    for (std::size_t k = 0; k < f.size(); ++k) err = std::max(err, std::abs(d.v[k] - lo.v[k]));
    CHECK(err < 1e-12);
}
