#ifndef ABL_FFT_HPP
#define ABL_FFT_HPP

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "abl/parallel.hpp"

namespace abl {

using cplx = std::complex<double>;

// Iterative radix-2 complex FFT with cached twiddle/bit-reversal tables.
// Sizes are powers of two.  2D transforms run rows, transpose, rows,
// transpose; row batches are spread across the worker threads.
class Fft {
  public:
    explicit Fft(int n) : n_(n) {
        if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("Fft: size must be a power of two");
        rev_.resize(n);
        int lg = 0;
        while ((1 << lg) < n) ++lg;
        for (int i = 0; i < n; ++i) {
            int r = 0;
            for (int b = 0; b < lg; ++b)
                if (i & (1 << b)) r |= 1 << (lg - 1 - b);
            rev_[i] = r;
        }
        tw_.resize(n / 2);
        for (int i = 0; i < n / 2; ++i) {
            double ang = -2.0 * M_PI * i / n;
            tw_[i] = {std::cos(ang), std::sin(ang)};
        }
    }

    int size() const { return n_; }

    // In-place transform of one row; inverse includes the 1/n factor.
    void transform(cplx* a, bool inverse) const {
        const int n = n_;
        for (int i = 0; i < n; ++i) {
            int r = rev_[i];
            if (i < r) std::swap(a[i], a[r]);
        }
        for (int len = 2; len <= n; len <<= 1) {
            int half = len >> 1, step = n / len;
            for (int i = 0; i < n; i += len) {
                const cplx* w = tw_.data();
                for (int j = 0; j < half; ++j, w += step) {
                    cplx tw = inverse ? std::conj(*w) : *w;
                    cplx u = a[i + j];
                    cplx t = a[i + j + half] * tw;
                    a[i + j] = u + t;
                    a[i + j + half] = u - t;
                }
            }
        }
        if (inverse) {
            double s = 1.0 / n;
            for (int i = 0; i < n; ++i) a[i] *= s;
        }
    }

    static const Fft& plan(int n) {
        static std::map<int, std::unique_ptr<Fft>> cache;
        static std::mutex mu;
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it == cache.end()) it = cache.emplace(n, std::make_unique<Fft>(n)).first;
        return *it->second;
    }

  private:
    int n_;
    std::vector<int> rev_;
    std::vector<cplx> tw_;
};

namespace detail {
inline void transpose_square(std::vector<cplx>& a, int n) {
    // pair row p with row n-1-p so the triangular work is balanced
    parallel_for((n + 1) / 2, [&](std::size_t p0, std::size_t p1) {
        for (std::size_t p = p0; p < p1; ++p) {
            std::size_t rows[2] = {p, static_cast<std::size_t>(n) - 1 - p};
            int cnt = rows[0] == rows[1] ? 1 : 2;
            for (int t = 0; t < cnt; ++t) {
                std::size_t i = rows[t];
                for (std::size_t j = i + 1; j < static_cast<std::size_t>(n); ++j)
                    std::swap(a[i * n + j], a[j * n + i]);
            }
        }
    });
}

// Reusable scratch buffers: spectral operations run on the main thread (the
// parallelism lives inside each transform), so a simple free list suffices.
class BufferPool {
  public:
    static std::vector<cplx> acquire(std::size_t n) {
        auto& fl = free_list();
        for (std::size_t i = 0; i < fl.size(); ++i)
            if (fl[i].size() == n) {
                std::vector<cplx> out = std::move(fl[i]);
                fl.erase(fl.begin() + i);
                return out;
            }
        return std::vector<cplx>(n);
    }
    static void release(std::vector<cplx>&& b) {
        auto& fl = free_list();
        if (fl.size() < 12) fl.push_back(std::move(b));
    }

  private:
    static std::vector<std::vector<cplx>>& free_list() {
        static thread_local std::vector<std::vector<cplx>> fl;
        return fl;
    }
};
}  // namespace detail

// In-place 2D FFT of an n x n row-major complex array.
inline void fft2(std::vector<cplx>& a, int n, bool inverse) {
    const Fft& plan = Fft::plan(n);
    auto rows = [&](std::vector<cplx>& buf) {
        parallel_for(n, [&](std::size_t i0, std::size_t i1) {
            for (std::size_t i = i0; i < i1; ++i) plan.transform(buf.data() + i * n, inverse);
        });
    };
    rows(a);
    detail::transpose_square(a, n);
    rows(a);
    detail::transpose_square(a, n);
}

// Two real fields transformed by one complex FFT (pack f + i g, split by
// hermitian symmetry).  g may be null.
inline void fft2_two_real(const double* f, const double* g, int n, std::vector<cplx>& F,
                          std::vector<cplx>& G) {
    std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<cplx> a = detail::BufferPool::acquire(nn);
    parallel_for(nn, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) a[k] = {f[k], g ? g[k] : 0.0};
    });
    fft2(a, n, false);
    F.resize(nn);
    if (g) G.resize(nn);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            std::size_t im = (n - i) % n;
            for (int j = 0; j < n; ++j) {
                std::size_t jm = (n - j) % n;
                cplx ak = a[i * n + j], amk = std::conj(a[im * n + jm]);
                F[i * n + j] = 0.5 * (ak + amk);
                if (g) G[i * n + j] = cplx(0, -0.5) * (ak - amk);
            }
        }
    });
    detail::BufferPool::release(std::move(a));
}

// Inverse of two hermitian spectra into two real fields in one complex FFT.
// G/g may be null.
inline void ifft2_two_real(const std::vector<cplx>& F, const std::vector<cplx>* G, int n,
                           double* f, double* g) {
    std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<cplx> a = detail::BufferPool::acquire(nn);
    parallel_for(nn, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k)
            a[k] = G ? F[k] + cplx(0, 1) * (*G)[k] : F[k];
    });
    fft2(a, n, true);
    parallel_for(nn, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            f[k] = a[k].real();
            if (g) g[k] = a[k].imag();
        }
    });
    detail::BufferPool::release(std::move(a));
}

}  // namespace abl

#endif
