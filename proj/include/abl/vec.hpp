#ifndef ABL_VEC_HPP
#define ABL_VEC_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>

namespace abl {

// 2-vector over double: chart coordinates, torus offsets, directions.
struct Vec2 {
    double x = 0, y = 0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    double& operator[](int i) { return i == 0 ? x : y; }
    double operator[](int i) const { return i == 0 ? x : y; }

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm2(const Vec2& v) { return dot(v, v); }
inline double norm(const Vec2& v) { return std::sqrt(norm2(v)); }

struct Dual;  // forward declaration; full definition in dual.hpp

// scalar-like types allowed to multiply vectors
template <class S>
inline constexpr bool is_scalar_like_v = std::is_arithmetic_v<std::decay_t<S>>;

// 3-vector templated on the scalar type so the same field formulas run on
// plain doubles and on dual numbers carrying a lambda-derivative.
template <class T>
struct Vec3 {
    T x{}, y{}, z{};

    Vec3() = default;
    Vec3(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}

    T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

    template <class S, class = std::enable_if_t<is_scalar_like_v<S>>>
    auto operator*(const S& s) const -> Vec3<decltype(x * s)> {
        return {x * s, y * s, z * s};
    }
};

template <class T, class S, class = std::enable_if_t<is_scalar_like_v<S>>>
inline auto operator*(const S& s, const Vec3<T>& v) -> Vec3<decltype(s * v.x)> {
    return {s * v.x, s * v.y, s * v.z};
}

template <class T, class S>
inline auto dot(const Vec3<T>& a, const Vec3<S>& b) -> decltype(a.x * b.x) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class T>
inline Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <class T>
inline T norm2(const Vec3<T>& v) { return dot(v, v); }

using Vec3d = Vec3<double>;

inline double norm(const Vec3d& v) { return std::sqrt(norm2(v)); }

// Dense 3x3 matrix, row-major. Rotations, Procrustes, tangent-space algebra.
struct Mat3 {
    std::array<double, 9> m{};

    static Mat3 identity() {
        Mat3 r;
        r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return r;
    }

    double& operator()(int i, int j) { return m[3 * i + j]; }
    double operator()(int i, int j) const { return m[3 * i + j]; }

    Vec3d row(int i) const { return {m[3 * i], m[3 * i + 1], m[3 * i + 2]}; }
    Vec3d col(int j) const { return {m[j], m[3 + j], m[6 + j]}; }

    Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
        return r;
    }
    Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] * s;
        return r;
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    template <class T>
    Vec3<T> operator*(const Vec3<T>& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }
};

// Rotation about axis omega by |omega| radians (Rodrigues).
inline Mat3 rotation_exp(const Vec3d& w) {
    double th = norm(w);
    Mat3 r = Mat3::identity();
    if (th < 1e-300) return r;
    Vec3d u = w * (1.0 / th);
    double c = std::cos(th), s = std::sin(th), q = 1 - c;
    r(0, 0) = c + u.x * u.x * q;
    r(0, 1) = u.x * u.y * q - u.z * s;
    r(0, 2) = u.x * u.z * q + u.y * s;
    r(1, 0) = u.y * u.x * q + u.z * s;
    r(1, 1) = c + u.y * u.y * q;
    r(1, 2) = u.y * u.z * q - u.x * s;
    r(2, 0) = u.z * u.x * q - u.y * s;
    r(2, 1) = u.z * u.y * q + u.x * s;
    r(2, 2) = c + u.z * u.z * q;
    return r;
}

// Max entry-wise deviation of R^T R from the identity.
inline double orthogonality_defect(const Mat3& r) {
    Mat3 g = r.transposed() * r;
    double d = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) d = std::max(d, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return d;
}

// Polar factor of M (closest orthogonal matrix in Frobenius norm), via a
// one-sided Jacobi SVD.  det_sign = +-1 forces the determinant; 0 keeps the
// sign of det(M).
inline Mat3 polar_orthogonal(const Mat3& M, int det_sign = 0) {
    Mat3 U = M, V = Mat3::identity();
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                Vec3d up = U.col(p), uq = U.col(q);
                double apq = dot(up, uq), app = dot(up, up), aqq = dot(uq, uq);
                off = std::max(off, std::abs(apq));
                if (std::abs(apq) < 1e-15 * std::sqrt(app * aqq) + 1e-300) continue;
                double tau = (aqq - app) / (2 * apq);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
                double c = 1 / std::sqrt(1 + t * t), s = t * c;
                for (int i = 0; i < 3; ++i) {
                    double uip = U(i, p), uiq = U(i, q);
                    U(i, p) = c * uip - s * uiq;
                    U(i, q) = s * uip + c * uiq;
                    double vip = V(i, p), viq = V(i, q);
                    V(i, p) = c * vip - s * viq;
                    V(i, q) = s * vip + c * viq;
                }
            }
        if (off < 1e-15) break;
    }
    // columns of U are sigma_i * (left vectors); normalize
    double sig[3];
    int imin = 0;
    for (int j = 0; j < 3; ++j) {
        Vec3d uj = U.col(j);
        sig[j] = norm(uj);
        if (sig[j] < sig[imin]) imin = j;
        if (sig[j] < 1e-300) throw std::runtime_error("polar_orthogonal: rank-deficient matrix");
        for (int i = 0; i < 3; ++i) U(i, j) /= sig[j];
    }
    Mat3 R = U * V.transposed();
    int want = det_sign != 0 ? det_sign : (M.det() >= 0 ? 1 : -1);
    if ((R.det() >= 0 ? 1 : -1) != want) {
        // flip the left singular vector of the smallest singular value
        for (int i = 0; i < 3; ++i) U(i, imin) = -U(i, imin);
        R = U * V.transposed();
    }
    return R;
}

}  // namespace abl

#endif
