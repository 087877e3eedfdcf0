#ifndef ABL_ZFIELDS_HPP
#define ABL_ZFIELDS_HPP

#include <array>
#include <random>

#include "abl/energy.hpp"

namespace abl {

// --- grid sampling of adapted bubbles -------------------------------------

inline Field3 sample_z(const AdaptedBubble& b, int n) {
    Field3 out(n);
    parallel_for(out.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) out.v[k] = b.z(out.node(k));
    });
    return out;
}

// z together with its analytic first derivatives
inline void sample_z_jet(const AdaptedBubble& b, int n, Field3& z, Grad3& gz) {
    z = Field3(n);
    gz.d1 = Field3(n);
    gz.d2 = Field3(n);
    parallel_for(z.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            Jet2<double> j = b.jet(z.node(k), 1);
            z.v[k] = j.f();
            gz.d1.v[k] = j.d(0);
            gz.d2.v[k] = j.d(1);
        }
    });
}

inline Field3 sample_d_lambda_z(const AdaptedBubble& b, int n) {
    Field3 out(n);
    parallel_for(out.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) out.v[k] = b.d_lambda_z(out.node(k));
    });
    return out;
}

// Tangent frame of the moduli space at z: scale, two translations, three
// ambient rotation generators (already tangent since Omega is skew).
inline std::array<Field3, 6> tangent_basis_Z(const AdaptedBubble& b, int n) {
    std::array<Field3, 6> T;
    Field3 z;
    Grad3 gz;
    sample_z_jet(b, n, z, gz);
    T[0] = sample_d_lambda_z(b, n);
    for (int k = 0; k < 6; ++k)
        if (k != 0) T[k] = Field3(n);
    parallel_for(z.size(), [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            T[1].v[k] = -gz.d1.v[k];  // nabla_{e1} z
            T[2].v[k] = -gz.d2.v[k];  // nabla_{e2} z
            const Vec3d& u = z.v[k];
            T[3].v[k] = {0, -u.z, u.y};   // e1 x u
            T[4].v[k] = {u.z, 0, -u.x};   // e2 x u
            T[5].v[k] = {-u.y, u.x, 0};   // e3 x u
        }
    });
    return T;
}

// --- deterministic random fields ------------------------------------------

// mt19937_64 is fully pinned by the standard; the uniform/normal transforms
// below avoid library distributions so outputs are reproducible everywhere.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double normal01(std::mt19937_64& rng) {
    double u1 = uniform01(rng), u2 = uniform01(rng);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
}

// Random real band-limited 3-vector field with modes |k_i| <= kmax.
inline Field3 random_bandlimited3(int n, int kmax, std::mt19937_64& rng) {
    Field3 out(n);
    for (int c = 0; c < 3; ++c) {
        std::vector<cplx> a(out.size(), 0.0);
        for (int k1 = -kmax; k1 <= kmax; ++k1)
            for (int k2 = -kmax; k2 <= kmax; ++k2) {
                if (k1 < 0 || (k1 == 0 && k2 < 0)) continue;  // hermitian half
                double re = normal01(rng), im = normal01(rng);
                if (k1 == 0 && k2 == 0) im = 0;
                int i1 = (k1 + n) % n, j1 = (k2 + n) % n;
                int i2 = (n - k1) % n, j2 = (n - k2) % n;
                a[static_cast<std::size_t>(i1) * n + j1] += cplx(re, im) * 0.5;
                a[static_cast<std::size_t>(i2) * n + j2] += cplx(re, -im) * 0.5;
            }
        for (auto& x : a) x *= double(n) * n;  // inverse FFT carries 1/n^2
        fft2(a, n, true);
        for (std::size_t k = 0; k < out.size(); ++k) out.v[k][c] = a[k].real();
    }
    return out;
}

// --- small dense solver for Gram systems -----------------------------------

template <int N>
std::array<double, N> solve_dense(std::array<std::array<double, N>, N> A,
                                  std::array<double, N> b) {
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-14)
            throw std::runtime_error("solve_dense: degenerate Gram matrix");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < N; ++r) {
            double f = A[r][col] / A[col][col];
            for (int c2 = col; c2 < N; ++c2) A[r][c2] -= f * A[col][c2];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (int r = N - 1; r >= 0; --r) {
        double s = b[r];
        for (int c2 = r + 1; c2 < N; ++c2) s -= A[r][c2] * x[c2];
        x[r] = s / A[r][r];
    }
    return x;
}

// --- sampled lower bound for the normal Hessian ----------------------------

struct HessianGapResult {
    double min_quotient = 0;
    std::vector<double> quotients;
    double gram_condition = 0;  // ratio of extreme diagonal pivots (coarse)
};

// Minimum Rayleigh quotient d2 E_alpha(z)[V,V] / ||V||_z^2 over random
// band-limited tangent probes orthogonalized against T_z Z in <.,.>_z.
inline HessianGapResult hessian_gap(const GreensTorus& greens, const BubbleParams& params,
                                    double alpha, int samples, int n, int kmax = 8,
                                    std::uint64_t seed = 12345) {
    if (samples < 1) throw std::invalid_argument("hessian_gap: need at least one sample");
    AdaptedBubble b(greens, params);
    Field3 z;
    Grad3 gz;
    sample_z_jet(b, n, z, gz);
    ScalarField rho2 = rho_squared_field(b, n);

    auto basis = tangent_basis_Z(b, n);
    std::array<Grad3, 6> gb;
    for (int i = 0; i < 6; ++i) gb[i] = grad3(basis[i]);
    std::array<std::array<double, 6>, 6> G{};
    for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j)
            G[i][j] = G[j][i] = z_inner(basis[i], gb[i], basis[j], gb[j], rho2);
    double dmax = 0, dmin = 1e300;
    for (int i = 0; i < 6; ++i) {
        dmax = std::max(dmax, G[i][i]);
        dmin = std::min(dmin, G[i][i]);
    }

    HessianGapResult res;
    res.gram_condition = dmax / dmin;
    res.min_quotient = 1e300;
    std::mt19937_64 rng(seed);
    for (int s = 0; s < samples; ++s) {
        Field3 V = pointwise_project(z, random_bandlimited3(n, kmax, rng));
        Grad3 gV = grad3(V);
        std::array<double, 6> rhs{};
        for (int i = 0; i < 6; ++i) rhs[i] = z_inner(V, gV, basis[i], gb[i], rho2);
        auto c = solve_dense<6>(G, rhs);
        parallel_for(V.size(), [&](std::size_t k0, std::size_t k1) {
            for (std::size_t k = k0; k < k1; ++k)
                for (int i = 0; i < 6; ++i) {
                    V.v[k] -= c[i] * basis[i].v[k];
                    gV.d1.v[k] -= c[i] * gb[i].d1.v[k];
                    gV.d2.v[k] -= c[i] * gb[i].d2.v[k];
                }
        });
        double nn = z_inner(V, gV, V, gV, rho2);
        if (nn <= 0) continue;
        double q = d2_e_alpha(z, V, V, alpha) / nn;
        res.quotients.push_back(q);
        res.min_quotient = std::min(res.min_quotient, q);
    }
    return res;
}

}  // namespace abl

#endif
