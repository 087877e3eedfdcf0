#ifndef ABL_TABLES_HPP
#define ABL_TABLES_HPP

#include <memory>

#include "abl/bubble.hpp"
#include "abl/parallel.hpp"

namespace abl {

// Bicubic (Catmull-Rom) lookup tables for the Green's data used in bubble
// sampling: the regular part H on the chart square and the full Green's
// function G on the torus (away from the source).  Both store value-free
// derivative blocks (f1, f2, f11, f12, f22); third derivatives are not
// tabulated since samplers need jets of z only to first order.
class GreenTables {
  public:
    explicit GreenTables(const GreensTorus& g, int chart_nodes = 561, int torus_nodes = 1024)
        : chart_n_(chart_nodes), torus_n_(torus_nodes) {
        chart_h_ = 2 * chart_max_ / (chart_n_ - 1);
        chart_.resize(static_cast<std::size_t>(chart_n_) * chart_n_);
        parallel_for(static_cast<std::size_t>(chart_n_), [&](std::size_t i0, std::size_t i1) {
            for (std::size_t i = i0; i < i1; ++i)
                for (int j = 0; j < chart_n_; ++j) {
                    Vec2 x{-chart_max_ + chart_h_ * i, -chart_max_ + chart_h_ * j};
                    Derivs2 d = g.regular_part(x, 2);
                    store(chart_[i * chart_n_ + j], d);
                }
        });
        torus_.resize(static_cast<std::size_t>(torus_n_) * torus_n_);
        parallel_for(static_cast<std::size_t>(torus_n_), [&](std::size_t i0, std::size_t i1) {
            for (std::size_t i = i0; i < i1; ++i)
                for (int j = 0; j < torus_n_; ++j) {
                    Vec2 w{double(i) / torus_n_, double(j) / torus_n_};
                    double d = torus_dist({w.x, w.y}, {0, 0});
                    Rec& r = torus_[i * torus_n_ + j];
                    if (d < 0.12) {  // never queried this close to the source
                        r = {};
                        continue;
                    }
                    store(r, g.green_derivs(w, 2));
                }
        });
    }

    // regular part derivatives on the chart square (|x| coordinates < 0.28)
    Derivs2 regular_part(const Vec2& x) const {
        double fi = (x.x + chart_max_) / chart_h_;
        double fj = (x.y + chart_max_) / chart_h_;
        return interp(chart_.data(), chart_n_, fi, fj, /*periodic=*/false);
    }

    // Green's function derivatives at a torus offset with d(w, 0) >= 0.2
    Derivs2 green(const Vec2& w) const {
        double fi = (w.x - std::floor(w.x)) * torus_n_;
        double fj = (w.y - std::floor(w.y)) * torus_n_;
        return interp(torus_.data(), torus_n_, fi, fj, /*periodic=*/true);
    }

  private:
    struct Rec {
        double v[5] = {0, 0, 0, 0, 0};  // f1 f2 f11 f12 f22
    };

    static void store(Rec& r, const Derivs2& d) {
        r.v[0] = d.d1[0];
        r.v[1] = d.d1[1];
        r.v[2] = d.d2[0];
        r.v[3] = d.d2[1];
        r.v[4] = d.d2[2];
    }

    static double cr_weight(double t, int k) {
        // Catmull-Rom basis for sample offsets -1, 0, 1, 2
        switch (k) {
            case 0: return 0.5 * (-t * t * t + 2 * t * t - t);
            case 1: return 0.5 * (3 * t * t * t - 5 * t * t + 2);
            case 2: return 0.5 * (-3 * t * t * t + 4 * t * t + t);
            default: return 0.5 * (t * t * t - t * t);
        }
    }

    Derivs2 interp(const Rec* data, int n, double fi, double fj, bool periodic) const {
        int i0 = static_cast<int>(std::floor(fi)), j0 = static_cast<int>(std::floor(fj));
        double ti = fi - i0, tj = fj - j0;
        if (!periodic && (i0 < 1 || j0 < 1 || i0 > n - 3 || j0 > n - 3))
            throw std::domain_error("GreenTables: chart query outside the tabulated square");
        double acc[5] = {0, 0, 0, 0, 0};
        for (int a = -1; a <= 2; ++a) {
            double wa = cr_weight(ti, a + 1);
            int ia = periodic ? ((i0 + a) % n + n) % n : i0 + a;
            for (int bdx = -1; bdx <= 2; ++bdx) {
                double wb = wa * cr_weight(tj, bdx + 1);
                int jb = periodic ? ((j0 + bdx) % n + n) % n : j0 + bdx;
                const Rec& r = data[static_cast<std::size_t>(ia) * n + jb];
                for (int c = 0; c < 5; ++c) acc[c] += wb * r.v[c];
            }
        }
        Derivs2 out;
        out.d1[0] = acc[0];
        out.d1[1] = acc[1];
        out.d2[0] = acc[2];
        out.d2[1] = acc[3];
        out.d2[2] = acc[4];
        return out;
    }

    static constexpr double chart_max_ = 0.28;
    int chart_n_, torus_n_;
    double chart_h_ = 0;
    std::vector<Rec> chart_, torus_;
};

// Fast grid sampler for adapted bubbles through the tables: z and its first
// derivatives at every node.  The same code path serves solver inits and the
// moduli projection, so fields built from identical parameters agree bit for
// bit.
class BubbleSampler {
  public:
    BubbleSampler(const GreensTorus& greens, std::shared_ptr<const GreenTables> tables)
        : g_(&greens), t_(std::move(tables)) {
        gh0_ = g_->regular_part({0, 0}, 1).grad();
    }

    const GreensTorus& greens() const { return *g_; }

    Jet2<double> jet(const BubbleParams& p, const TorusPoint& q, int order = 1) const {
        Vec2 x = chart(p.a, q);
        Jet2<double> raw;
        if (norm(x) < FlatTorus::iota) {
            Derivs2 h = t_->regular_part(x);
            raw = bubble_core::ztilde_chart_jet(p.lambda, x, h, gh0_, phi_, order);
        } else {
            Derivs2 gd = t_->green(x);
            raw = bubble_core::ztilde_far_jet(p.lambda, gd, gh0_, order);
        }
        return bubble_core::rotate_jet(p.R, bubble_core::normalize_jet(raw, order));
    }

    void sample(const BubbleParams& p, int n, Field3& z, Grad3* gz = nullptr) const {
        z = Field3(n);
        if (gz) {
            gz->d1 = Field3(n);
            gz->d2 = Field3(n);
        }
        parallel_for(z.size(), [&](std::size_t k0, std::size_t k1) {
            for (std::size_t k = k0; k < k1; ++k) {
                Jet2<double> j = jet(p, z.node(k), gz ? 1 : 0);
                z.v[k] = j.f();
                if (gz) {
                    gz->d1.v[k] = j.d(0);
                    gz->d2.v[k] = j.d(1);
                }
            }
        });
    }

    ScalarField rho2(const BubbleParams& p, int n) const {
        ScalarField out(n);
        parallel_for(out.size(), [&](std::size_t k0, std::size_t k1) {
            for (std::size_t k = k0; k < k1; ++k) {
                double d = torus_dist(out.node(k), p.a);
                double dd = d < FlatTorus::iota ? d : FlatTorus::iota;
                double r = p.lambda / (1 + p.lambda * p.lambda * dd * dd);
                out.v[k] = r * r;
            }
        });
        return out;
    }

  private:
    const GreensTorus* g_;
    std::shared_ptr<const GreenTables> t_;
    Cutoff phi_;
    Vec2 gh0_;
};

}  // namespace abl

#endif
