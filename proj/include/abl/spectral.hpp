#ifndef ABL_SPECTRAL_HPP
#define ABL_SPECTRAL_HPP

#include <array>
#include <cmath>

#include "abl/fft.hpp"
#include "abl/grid_field.hpp"
#include "abl/parallel.hpp"

namespace abl {

// Fourier-side helpers.  Node (i,j) at (i/n, j/n); mode k = (k1, k2) with
// k1 = wavenumber along the first (row) index.  Derivative multiplier is
// 2*pi*i*k with the Nyquist line zeroed (odd real derivative convention).
namespace spectral {

inline int signed_wavenumber(int idx, int n) { return idx <= n / 2 - 1 ? idx : idx - n; }

inline std::vector<cplx> to_spectrum(const ScalarField& f) {
    std::vector<cplx> a(f.size());
    parallel_for(f.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) a[k] = f.v[k];
    });
    fft2(a, f.n, false);
    return a;
}

inline ScalarField to_field(std::vector<cplx> a, int n) {
    fft2(a, n, true);
    ScalarField f(n);
    parallel_for(f.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) f.v[k] = a[k].real();
    });
    return f;
}

// spectrum of all 3 components of a vector field
inline std::array<std::vector<cplx>, 3> to_spectrum3(const Field3& u) {
    std::array<std::vector<cplx>, 3> s;
    for (int c = 0; c < 3; ++c) {
        s[c].resize(u.size());
        parallel_for(u.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) s[c][k] = u.v[k][c];
        });
        fft2(s[c], u.n, false);
    }
    return s;
}

inline Field3 to_field3(std::array<std::vector<cplx>, 3> s, int n) {
    Field3 u(n);
    for (int c = 0; c < 3; ++c) {
        fft2(s[c], n, true);
        parallel_for(u.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) u.v[k][c] = s[c][k].real();
        });
    }
    return u;
}

// Copy-and-multiply variant writing into a second buffer.
template <class F>
void copy_multiplied(const std::vector<cplx>& src, std::vector<cplx>& dst, int n, F&& mult) {
    parallel_for(n, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            int k1 = signed_wavenumber(static_cast<int>(i), n);
            bool nyq_i = static_cast<int>(i) == n / 2;
            for (int j = 0; j < n; ++j) {
                int k2 = signed_wavenumber(j, n);
                dst[i * n + j] = src[i * n + j] * mult(k1, k2, nyq_i || j == n / 2);
            }
        }
    });
}

// Multiply a spectrum by f(k1, k2, on_nyquist) in place.  k1, k2 are the
// signed wavenumbers with the Nyquist line mapped to -n/2; odd (derivative)
// multipliers must return 0 when on_nyquist is set, even multipliers may use
// the wavenumbers as they are.
template <class F>
void apply_multiplier(std::vector<cplx>& a, int n, F&& mult) {
    parallel_for(n, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            int k1 = signed_wavenumber(static_cast<int>(i), n);
            bool nyq_i = static_cast<int>(i) == n / 2;
            for (int j = 0; j < n; ++j) {
                int k2 = signed_wavenumber(j, n);
                a[i * n + j] *= mult(k1, k2, nyq_i || j == n / 2);
            }
        }
    });
}

}  // namespace spectral

// --- public operations on scalar fields ---------------------------------

inline GridField<Vec2> grad(const ScalarField& f) {
    auto a = spectral::to_spectrum(f);
    auto b = a;
    spectral::apply_multiplier(a, f.n, [](int k1, int, bool nyq) { return nyq ? cplx(0) : cplx(0, 2 * M_PI * k1); });
    spectral::apply_multiplier(b, f.n, [](int, int k2, bool nyq) { return nyq ? cplx(0) : cplx(0, 2 * M_PI * k2); });
    ScalarField d1 = spectral::to_field(std::move(a), f.n);
    ScalarField d2 = spectral::to_field(std::move(b), f.n);
    GridField<Vec2> g(f.n);
    parallel_for(g.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) g.v[k] = {d1.v[k], d2.v[k]};
    });
    return g;
}

inline ScalarField laplacian(const ScalarField& f) {
    auto a = spectral::to_spectrum(f);
    spectral::apply_multiplier(a, f.n, [](int k1, int k2, bool) {
        return cplx(-4 * M_PI * M_PI * (double(k1) * k1 + double(k2) * k2), 0);
    });
    return spectral::to_field(std::move(a), f.n);
}

inline ScalarField divergence(const GridField<Vec2>& g) {
    ScalarField c1(g.n), c2(g.n);
    parallel_for(g.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            c1.v[k] = g.v[k].x;
            c2.v[k] = g.v[k].y;
        }
    });
    auto a = spectral::to_spectrum(c1);
    auto b = spectral::to_spectrum(c2);
    spectral::apply_multiplier(a, g.n, [](int k1, int, bool nyq) { return nyq ? cplx(0) : cplx(0, 2 * M_PI * k1); });
    spectral::apply_multiplier(b, g.n, [](int, int k2, bool nyq) { return nyq ? cplx(0) : cplx(0, 2 * M_PI * k2); });
    parallel_for(a.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) a[k] += b[k];
    });
    return spectral::to_field(std::move(a), g.n);
}

// Periodic trapezoid rule = mean * area (area = 1).
inline double integrate(const ScalarField& f) {
    double s = parallel_sum(f.size(), [&](std::size_t k) { return f.v[k]; });
    return s / f.size();
}

// 2/3-rule de-aliasing: zero every mode with max(|k1|,|k2|) > n/3.
inline void dealias23(std::vector<cplx>& a, int n) {
    int kc = n / 3;
    spectral::apply_multiplier(a, n, [kc](int k1, int k2, bool nyq) {
        return (nyq || std::abs(k1) > kc || std::abs(k2) > kc) ? 0.0 : 1.0;
    });
}

inline ScalarField dealias23(const ScalarField& f) {
    auto a = spectral::to_spectrum(f);
    dealias23(a, f.n);
    return spectral::to_field(std::move(a), f.n);
}

// Solve (-Delta + 1) v = f spectrally.
inline ScalarField helmholtz_inverse(const ScalarField& f) {
    auto a = spectral::to_spectrum(f);
    spectral::apply_multiplier(a, f.n, [](int k1, int k2, bool) {
        return 1.0 / (1.0 + 4 * M_PI * M_PI * (double(k1) * k1 + double(k2) * k2));
    });
    return spectral::to_field(std::move(a), f.n);
}

// Zero-mean solution of -Delta g = 2 pi (delta_h - 1) with the discrete
// delta n^2 * indicator at node (0,0): the grid oracle for the Green's
// function.
inline ScalarField poisson_green_grid(int n) {
    ScalarField rhs(n);
    rhs(0, 0) = 2 * M_PI * (double(n) * n);
    auto a = spectral::to_spectrum(rhs);
    spectral::apply_multiplier(a, n, [](int k1, int k2, bool) {
        double k2n = 4 * M_PI * M_PI * (double(k1) * k1 + double(k2) * k2);
        return k2n == 0 ? 0.0 : 1.0 / k2n;
    });
    // constant background -2 pi cancels against the k = 0 projection
    return spectral::to_field(std::move(a), n);
}

// --- vector-field wrappers ----------------------------------------------

struct Grad3 {
    Field3 d1, d2;  // partial derivatives along x1 and x2
};

namespace spectral {

// strided component extraction / insertion for Vec3d fields
inline std::array<std::vector<double>, 3> split3(const Field3& u) {
    std::array<std::vector<double>, 3> c;
    for (int i = 0; i < 3; ++i) c[i].resize(u.size());
    parallel_for(u.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            c[0][k] = u.v[k].x;
            c[1][k] = u.v[k].y;
            c[2][k] = u.v[k].z;
        }
    });
    return c;
}

// forward spectra of the three components (two-for-one packing: 2 FFTs)
inline std::array<std::vector<cplx>, 3> forward3(const Field3& u) {
    auto c = split3(u);
    std::array<std::vector<cplx>, 3> s;
    fft2_two_real(c[0].data(), c[1].data(), u.n, s[0], s[1]);
    std::vector<cplx> unused;
    fft2_two_real(c[2].data(), nullptr, u.n, s[2], unused);
    return s;
}

// inverse of three hermitian spectra into one Field3 (2 FFTs)
inline Field3 inverse3(const std::array<std::vector<cplx>, 3>& s, int n) {
    std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<double> x(nn), y(nn), z(nn);
    ifft2_two_real(s[0], &s[1], n, x.data(), y.data());
    ifft2_two_real(s[2], nullptr, n, z.data(), nullptr);
    Field3 out(n);
    parallel_for(nn, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) out.v[k] = {x[k], y[k], z[k]};
    });
    return out;
}

}  // namespace spectral

inline Grad3 grad3(const Field3& u) {
    int n = u.n;
    auto s = spectral::forward3(u);
    std::array<std::vector<cplx>, 3> d1;
    for (int c = 0; c < 3; ++c) {
        d1[c] = detail::BufferPool::acquire(s[c].size());
        spectral::copy_multiplied(s[c], d1[c], n, [](int k1, int, bool nyq) {
            return nyq ? cplx(0) : cplx(0, 2 * M_PI * k1);
        });
        spectral::apply_multiplier(s[c], n, [](int, int k2, bool nyq) {
            return nyq ? cplx(0) : cplx(0, 2 * M_PI * k2);
        });
    }
    Grad3 g{spectral::inverse3(d1, n), spectral::inverse3(s, n)};
    for (int c = 0; c < 3; ++c) {
        detail::BufferPool::release(std::move(d1[c]));
        detail::BufferPool::release(std::move(s[c]));
    }
    return g;
}

inline Field3 laplacian3(const Field3& u) {
    auto s = spectral::forward3(u);
    for (int c = 0; c < 3; ++c)
        spectral::apply_multiplier(s[c], u.n, [](int k1, int k2, bool) {
            return cplx(-4 * M_PI * M_PI * (double(k1) * k1 + double(k2) * k2), 0);
        });
    return spectral::inverse3(s, u.n);
}

// divergence of a 3-component flux pair (F1, F2) -> Field3, with optional
// 2/3 de-aliasing and optional (-Delta + 1)^{-1} smoothing applied in the
// same spectral pass.
inline Field3 divergence3(const Field3& f1, const Field3& f2, bool dealias,
                          bool helmholtz = false) {
    int n = f1.n;
    auto a = spectral::forward3(f1);
    auto b = spectral::forward3(f2);
    int kc = n / 3;
    for (int c = 0; c < 3; ++c) {
        spectral::apply_multiplier(a[c], n, [&](int k1, int k2, bool nyq) -> cplx {
            if (nyq || (dealias && (std::abs(k1) > kc || std::abs(k2) > kc))) return 0.0;
            cplx m(0, 2 * M_PI * k1);
            if (helmholtz) m /= 1.0 + 4 * M_PI * M_PI * (double(k1) * k1 + double(k2) * k2);
            return m;
        });
        spectral::apply_multiplier(b[c], n, [&](int k1, int k2, bool nyq) -> cplx {
            if (nyq || (dealias && (std::abs(k1) > kc || std::abs(k2) > kc))) return 0.0;
            cplx m(0, 2 * M_PI * k2);
            if (helmholtz) m /= 1.0 + 4 * M_PI * M_PI * (double(k1) * k1 + double(k2) * k2);
            return m;
        });
        parallel_for(a[c].size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) a[c][k] += b[c][k];
        });
    }
    return spectral::inverse3(a, n);
}

inline Field3 helmholtz_inverse3(const Field3& u) {
    auto s = spectral::forward3(u);
    for (int c = 0; c < 3; ++c)
        spectral::apply_multiplier(s[c], u.n, [](int k1, int k2, bool) {
            return 1.0 / (1.0 + 4 * M_PI * M_PI * (double(k1) * k1 + double(k2) * k2));
        });
    return spectral::inverse3(s, u.n);
}

inline double integrate_dot(const Field3& a, const Field3& b) {
    double s = parallel_sum(a.size(), [&](std::size_t k) { return dot(a.v[k], b.v[k]); });
    return s / a.size();
}

inline double l2_norm(const Field3& a) { return std::sqrt(integrate_dot(a, a)); }

}  // namespace abl

#endif
