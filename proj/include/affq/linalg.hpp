#ifndef AFFQ_LINALG_HPP
#define AFFQ_LINALG_HPP

// Fixed-size vector and matrix helpers for dimensions 2 and 3. Vector
// operations are generic over the scalar so they also act on jets.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

#include "affq/jet.hpp"

namespace affq {

template <int D>
using Vec = std::array<double, D>;

template <class S, int D>
using VecT = std::array<S, D>;

template <int D>
using Mat = std::array<std::array<double, D>, D>;

template <int D>
Mat<D> identity() {
    Mat<D> m{};
    for (int i = 0; i < D; ++i) m[i][i] = 1.0;
    return m;
}

template <class S, std::size_t D>
S dot(const std::array<S, D>& a, const std::array<S, D>& b) {
    S r = a[0] * b[0];
    for (std::size_t i = 1; i < D; ++i) r += a[i] * b[i];
    return r;
}

template <class S, std::size_t D>
std::array<S, D> operator+(std::array<S, D> a, const std::array<S, D>& b) {
    for (std::size_t i = 0; i < D; ++i) a[i] += b[i];
    return a;
}

template <class S, std::size_t D>
std::array<S, D> operator-(std::array<S, D> a, const std::array<S, D>& b) {
    for (std::size_t i = 0; i < D; ++i) a[i] -= b[i];
    return a;
}

template <class S, std::size_t D>
std::array<S, D> operator*(double s, std::array<S, D> a) {
    for (auto& x : a) x *= s;
    return a;
}

template <class S, std::size_t D>
std::array<S, D> scaled(std::array<S, D> a, const S& s) {
    for (auto& x : a) x = x * s;
    return a;
}

template <class S, std::size_t D>
S norm(const std::array<S, D>& a) {
    using std::sqrt;
    return sqrt(dot(a, a));
}

template <class S, std::size_t D>
std::array<S, D> normalized(const std::array<S, D>& a) {
    using std::sqrt;
    const S inv = 1.0 / sqrt(dot(a, a));
    return scaled(a, inv);
}

inline Vec<3> cross(const Vec<3>& a, const Vec<3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Matrix times a vector of any scalar type.
template <class S, int D>
VecT<S, D> apply(const Mat<D>& m, const VecT<S, D>& x) {
    VecT<S, D> r;
    for (int i = 0; i < D; ++i) {
        S acc = m[i][0] * x[0];
        for (int j = 1; j < D; ++j) acc += m[i][j] * x[j];
        r[i] = acc;
    }
    return r;
}

// Matrix helpers deduce the extent as std::size_t, the type std::array uses.
template <std::size_t D>
using SquareMat = std::array<std::array<double, D>, D>;

// Vec<D> as a parameter that does not take part in deduction, for function
// templates whose D is deduced from another argument.
template <int D>
using VecIn = std::type_identity_t<Vec<D>>;

template <std::size_t D>
SquareMat<D> operator*(const SquareMat<D>& a, const SquareMat<D>& b) {
    SquareMat<D> r{};
    for (std::size_t i = 0; i < D; ++i)
        for (std::size_t j = 0; j < D; ++j)
            for (std::size_t k = 0; k < D; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

template <std::size_t D>
SquareMat<D> transpose(const SquareMat<D>& a) {
    SquareMat<D> r{};
    for (std::size_t i = 0; i < D; ++i)
        for (std::size_t j = 0; j < D; ++j) r[i][j] = a[j][i];
    return r;
}

inline double det(const Mat<2>& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }
inline double det(const Mat<3>& a) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

// Cofactor matrix det(A) A^{-T}; maps area-weighted normals under x -> A x.
inline Mat<2> cofactor(const Mat<2>& a) { return {{{a[1][1], -a[1][0]}, {-a[0][1], a[0][0]}}}; }
inline Mat<3> cofactor(const Mat<3>& a) {
    Mat<3> c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
            const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            c[i][j] = a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1];
        }
    return c;
}

template <std::size_t D>
SquareMat<D> inverse(const SquareMat<D>& a) {
    const SquareMat<D> c = cofactor(a);
    const double d = det(a);
    SquareMat<D> r{};
    for (std::size_t i = 0; i < D; ++i)
        for (std::size_t j = 0; j < D; ++j) r[i][j] = c[j][i] / d;
    return r;
}

// I + (t - 1) v v^T: stretch by t along unit v, fixing the hyperplane v^perp.
template <int D>
Mat<D> orthogonal_affinity(const Vec<D>& v, double t) {
    Mat<D> m = identity<D>();
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) m[i][j] += (t - 1.0) * v[i] * v[j];
    return m;
}

// Orthonormal basis of the tangent space at unit u (columns of the frame).
template <int D>
std::array<Vec<D>, D - 1> tangent_frame(const Vec<D>& u);

template <>
inline std::array<Vec<2>, 1> tangent_frame<2>(const Vec<2>& u) {
    return {Vec<2>{-u[1], u[0]}};
}

template <>
inline std::array<Vec<3>, 2> tangent_frame<3>(const Vec<3>& u) {
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(u[i]) < std::abs(u[k])) k = i;
    Vec<3> e{};
    e[k] = 1.0;
    const Vec<3> a = normalized(cross(e, u));
    const Vec<3> b = cross(u, a);
    return {a, b};
}

// Orthonormal basis of the hyperplane orthogonal to unit v; the same
// construction as the tangent frame.
template <int D>
std::array<Vec<D>, D - 1> complement_basis(const Vec<D>& v) {
    return tangent_frame<D>(v);
}

// Eigenvalues (ascending) of a symmetric 2x2 matrix.
inline std::array<double, 2> symmetric_eigenvalues(double a, double b, double d) {
    const double mean = 0.5 * (a + d);
    const double diff = 0.5 * (a - d);
    const double rad = std::hypot(diff, b);
    return {mean - rad, mean + rad};
}

// Solves the symmetric system [[a, b], [b, d]] x = r; returns false if singular.
inline bool solve_symmetric2(double a, double b, double d, const std::array<double, 2>& r,
                             std::array<double, 2>& x) {
    const double det2 = a * d - b * b;
    const double scale = std::max({std::abs(a * d), std::abs(b * b), 1e-300});
    if (std::abs(det2) <= 1e-300 * scale || !std::isfinite(det2)) return false;
    x = {(d * r[0] - b * r[1]) / det2, (a * r[1] - b * r[0]) / det2};
    return true;
}

template <int D>
double angle_between(const Vec<D>& a, const Vec<D>& b) {
    // atan2 form is accurate for both tiny and near-pi angles.
    Vec<D> diff = a - b, sum = a + b;
    return 2.0 * std::atan2(norm(diff), norm(sum));
}

}  // namespace affq

#endif  // AFFQ_LINALG_HPP
