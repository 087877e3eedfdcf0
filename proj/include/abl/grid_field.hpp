#ifndef ABL_GRID_FIELD_HPP
#define ABL_GRID_FIELD_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "abl/torus.hpp"
#include "abl/vec.hpp"

namespace abl {

// Periodic n x n nodal field on the unit torus; node (i, j) sits at
// (i/n, j/n).  T is double (scalar field) or Vec3d (sphere-valued / tangent
// field).  n must be a power of two, n >= 8.
template <class T>
struct GridField {
    int n = 0;
    std::vector<T> v;

    GridField() = default;
    explicit GridField(int n_) : n(n_), v(static_cast<std::size_t>(n_) * n_, T{}) {
        check_resolution(n_);
    }

    static void check_resolution(int n_) {
        if (n_ < 8 || (n_ & (n_ - 1)) != 0)
            throw std::invalid_argument("GridField: resolution must be a power of two >= 8");
    }

    std::size_t size() const { return v.size(); }
    T& operator()(int i, int j) { return v[static_cast<std::size_t>(wrap_idx(i)) * n + wrap_idx(j)]; }
    const T& operator()(int i, int j) const {
        return v[static_cast<std::size_t>(wrap_idx(i)) * n + wrap_idx(j)];
    }
    T& at_flat(std::size_t k) { return v[k]; }
    const T& at_flat(std::size_t k) const { return v[k]; }

    int wrap_idx(int i) const {
        int m = i % n;
        return m < 0 ? m + n : m;
    }

    TorusPoint node(std::size_t k) const {
        int i = static_cast<int>(k / n), j = static_cast<int>(k % n);
        return {double(i) / n, double(j) / n};
    }
};

using ScalarField = GridField<double>;
using Field3 = GridField<Vec3d>;

namespace detail {
inline int components_of(const ScalarField&) { return 1; }
inline int components_of(const Field3&) { return 3; }
inline void put(std::vector<double>& out, double x) { out.push_back(x); }
inline void put(std::vector<double>& out, const Vec3d& x) {
    out.push_back(x.x);
    out.push_back(x.y);
    out.push_back(x.z);
}
inline void get(const double* in, double& x) { x = in[0]; }
inline void get(const double* in, Vec3d& x) { x = {in[0], in[1], in[2]}; }
}  // namespace detail

inline constexpr char kGridMagic[8] = {'A', 'B', 'L', 'G', 'R', 'I', 'D', '1'};

// Raw binary layout: 8-byte magic "ABLGRID1", u32 n, u32 components, then
// n*n*components little-endian 64-bit floats in row-major node order.
template <class T>
void save_grid_binary(const GridField<T>& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os.write(kGridMagic, 8);
    std::uint32_t n = static_cast<std::uint32_t>(f.n);
    std::uint32_t comp = static_cast<std::uint32_t>(detail::components_of(f));
    os.write(reinterpret_cast<const char*>(&n), 4);
    os.write(reinterpret_cast<const char*>(&comp), 4);
    std::vector<double> flat;
    flat.reserve(f.size() * comp);
    for (const T& x : f.v) detail::put(flat, x);
    os.write(reinterpret_cast<const char*>(flat.data()),
             static_cast<std::streamsize>(flat.size() * sizeof(double)));
    if (!os) throw std::runtime_error("write failed: " + path);
}

template <class T>
GridField<T> load_grid_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    std::uint32_t n = 0, comp = 0;
    is.read(magic, 8);
    is.read(reinterpret_cast<char*>(&n), 4);
    is.read(reinterpret_cast<char*>(&comp), 4);
    if (!is || std::memcmp(magic, kGridMagic, 8) != 0)
        throw std::runtime_error("not an ABLGRID1 file: " + path);
    GridField<T> f(static_cast<int>(n));
    std::uint32_t expect = static_cast<std::uint32_t>(detail::components_of(f));
    if (comp != expect)
        throw std::runtime_error("component count mismatch in " + path);
    std::vector<double> flat(f.size() * comp);
    is.read(reinterpret_cast<char*>(flat.data()),
            static_cast<std::streamsize>(flat.size() * sizeof(double)));
    if (!is) throw std::runtime_error("truncated grid file: " + path);
    for (std::size_t k = 0; k < f.size(); ++k) detail::get(flat.data() + k * comp, f.v[k]);
    return f;
}

// Flat CSV: one row per node, columns i, j, v...
template <class T>
void save_grid_csv(const GridField<T>& f, const std::string& path, const std::string& producer) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "# " << producer << "\n";
    int comp = detail::components_of(f);
    os << "i,j";
    for (int c = 0; c < comp; ++c) os << ",v" << c;
    os << "\n";
    os.precision(17);
    std::vector<double> row;
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j) {
            row.clear();
            detail::put(row, f(i, j));
            os << i << ',' << j;
            for (double x : row) os << ',' << x;
            os << '\n';
        }
}

}  // namespace abl

#endif
