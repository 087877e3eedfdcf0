#include <doctest.h>

#include <cmath>
#include <random>

#include "abl/cutoff.hpp"
#include "abl/grid_field.hpp"
#include "abl/torus.hpp"

using namespace abl;

TEST_CASE("wrap reduces mod 1") {
    TorusPoint p = wrap(1.3, -0.2);
    CHECK(p.x == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(p.y == doctest::Approx(0.8).epsilon(1e-14));
    TorusPoint o = wrap(0.0, 0.0);
    CHECK(o.x == 0.0);
    CHECK(o.y == 0.0);
    TorusPoint h = wrap(0.5, 0.5);
    CHECK(h.x == 0.5);
    CHECK(h.y == 0.5);
    CHECK_THROWS_AS(wrap(std::nan(""), 0.0), std::invalid_argument);
}

TEST_CASE("chart picks the nearest representative") {
    Vec2 x = chart({0.9, 0.0}, {0.05, 0.0});
    CHECK(x.x == doctest::Approx(0.15).epsilon(1e-14));
    CHECK(x.y == doctest::Approx(0.0));

    Vec2 zero = chart({0.3, 0.7}, {0.3, 0.7});
    CHECK(zero.x == 0.0);
    CHECK(zero.y == 0.0);

    // tie at distance 1/2: nonnegative representative, same length either way
    Vec2 t = chart({0.0, 0.0}, {0.5, 0.25});
    CHECK(t.x == 0.5);
    CHECK(norm(t) == doctest::Approx(std::sqrt(0.3125)).epsilon(1e-14));
}

TEST_CASE("torus_dist basics") {
    CHECK(torus_dist({0, 0}, {0.9, 0}) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(torus_dist({0, 0}, {0.5, 0.5}) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(torus_dist({0.37, 0.81}, {0.37, 0.81}) == 0.0);
    // symmetry and the diameter bound
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0, 1);
    for (int i = 0; i < 200; ++i) {
        TorusPoint p{uni(rng), uni(rng)}, q{uni(rng), uni(rng)};
        double d1 = torus_dist(p, q), d2 = torus_dist(q, p);
        CHECK(d1 == doctest::Approx(d2).epsilon(1e-14));
        CHECK(d1 <= std::sqrt(0.5) + 1e-14);
    }
}

TEST_CASE("chart inverts wrap near the center") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0, 1);
    for (int i = 0; i < 200; ++i) {
        TorusPoint a{uni(rng), uni(rng)};
        Vec2 off{0.5 * (uni(rng) - 0.5), 0.5 * (uni(rng) - 0.5)};  // |off_i| < 1/4
        TorusPoint p = translate(a, off);
        Vec2 x = chart(a, p);
        CHECK(x.x == doctest::Approx(off.x).epsilon(1e-12));
        CHECK(x.y == doctest::Approx(off.y).epsilon(1e-12));
        CHECK(norm(x) == doctest::Approx(torus_dist(p, a)).epsilon(1e-12));
    }
}

TEST_CASE("flat torus constants") {
    CHECK(FlatTorus::area == 1.0);
    CHECK(4 * FlatTorus::r_cut == FlatTorus::iota);
    CHECK(FlatTorus::rho_chart == 2 * FlatTorus::iota);
}

TEST_CASE("cutoff profile: plateau, support, smooth joins") {
    Cutoff phi;
    const double r = phi.lo;
    CHECK(phi(0) == 1.0);
    CHECK(phi(r) == 1.0);
    CHECK(phi(2 * r) == 0.0);
    CHECK(phi(3 * r) == 0.0);
    double mid = phi(1.5 * r);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    // monotone nonincreasing
    double prev = 1.0;
    for (int i = 0; i <= 400; ++i) {
        double s = 2.5 * r * i / 400;
        double v = phi(s);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
    // derivative consistency against finite differences across the joins
    for (double s : {1.02 * r, 1.3 * r, 1.7 * r, 1.97 * r}) {
        double h = 1e-6 * r;
        double fd1 = (phi(s + h) - phi(s - h)) / (2 * h);
        double fd2 = (phi(s + h) - 2 * phi(s) + phi(s - h)) / (h * h);
        CHECK(phi.d1(s) == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(phi.d2(s) == doctest::Approx(fd2).epsilon(1e-4));
    }
    // C^2 continuity across s = r and s = 2r: second derivative tends to 0
    CHECK(std::abs(phi.d2(r * (1 + 1e-4))) < 1e-6);
    CHECK(std::abs(phi.d2(r * (2 - 1e-4))) < 1e-6);
}

TEST_CASE("grid field round trips through binary and rejects bad sizes") {
    CHECK_THROWS_AS(ScalarField(7), std::invalid_argument);
    CHECK_THROWS_AS(ScalarField(48), std::invalid_argument);

    Field3 f(8);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-1, 1);
    for (auto& v : f.v) v = {uni(rng), uni(rng), uni(rng)};
    save_grid_binary(f, "tmp_field3.bin");
    Field3 g = load_grid_binary<Vec3d>("tmp_field3.bin");
    REQUIRE(g.n == f.n);
    for (std::size_t k = 0; k < f.size(); ++k) {
        CHECK(g.v[k].x == f.v[k].x);
        CHECK(g.v[k].y == f.v[k].y);
        CHECK(g.v[k].z == f.v[k].z);
    }
    CHECK_THROWS(load_grid_binary<double>("tmp_field3.bin"));  // component mismatch
}
