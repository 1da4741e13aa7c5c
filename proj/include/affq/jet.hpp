#ifndef AFFQ_JET_HPP
#define AFFQ_JET_HPP

// Second-order forward-mode jets. A Jet<N> carries the value, gradient and
// Hessian of a scalar with respect to N seeded input variables, so any
// function written generically over its scalar type yields exact first and
// second derivatives when evaluated on jets.

#include <array>
#include <cmath>
#include <type_traits>

namespace affq {

template <int N>
struct Jet {
    double v = 0.0;
    std::array<double, N> g{};
    std::array<double, N * N> h{};

    Jet() = default;
    Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly

    static Jet variable(double value, int index) {
        Jet j(value);
        j.g[index] = 1.0;
        return j;
    }

    double hess(int i, int j) const { return h[i * N + j]; }

    Jet& operator+=(const Jet& o) {
        v += o.v;
        for (int i = 0; i < N; ++i) g[i] += o.g[i];
        for (int i = 0; i < N * N; ++i) h[i] += o.h[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        v -= o.v;
        for (int i = 0; i < N; ++i) g[i] -= o.g[i];
        for (int i = 0; i < N * N; ++i) h[i] -= o.h[i];
        return *this;
    }
    Jet& operator*=(double s) {
        v *= s;
        for (auto& x : g) x *= s;
        for (auto& x : h) x *= s;
        return *this;
    }
    Jet& operator+=(double s) {
        v += s;
        return *this;
    }
    Jet& operator-=(double s) {
        v -= s;
        return *this;
    }
};

template <class T>
struct is_jet : std::false_type {};
template <int N>
struct is_jet<Jet<N>> : std::true_type {};

inline double value(double x) { return x; }
template <int N>
double value(const Jet<N>& x) {
    return x.v;
}

template <int N>
Jet<N> operator-(Jet<N> a) {
    a *= -1.0;
    return a;
}
template <int N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) {
    return a += b;
}
template <int N>
Jet<N> operator-(Jet<N> a, const Jet<N>& b) {
    return a -= b;
}
template <int N>
Jet<N> operator+(Jet<N> a, double b) {
    return a += b;
}
template <int N>
Jet<N> operator+(double a, Jet<N> b) {
    return b += a;
}
template <int N>
Jet<N> operator-(Jet<N> a, double b) {
    return a -= b;
}
template <int N>
Jet<N> operator-(double a, Jet<N> b) {
    b *= -1.0;
    return b += a;
}
template <int N>
Jet<N> operator*(Jet<N> a, double b) {
    return a *= b;
}
template <int N>
Jet<N> operator*(double a, Jet<N> b) {
    return b *= a;
}
template <int N>
Jet<N> operator/(Jet<N> a, double b) {
    return a *= (1.0 / b);
}

template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
    Jet<N> r;
    r.v = a.v * b.v;
    for (int i = 0; i < N; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            r.h[i * N + j] = a.h[i * N + j] * b.v + a.v * b.h[i * N + j] + a.g[i] * b.g[j] +
                             a.g[j] * b.g[i];
    return r;
}

// f(a) given f, f', f'' at a.v (chain rule to second order).
template <int N>
Jet<N> chain(const Jet<N>& a, double f0, double f1, double f2) {
    Jet<N> r;
    r.v = f0;
    for (int i = 0; i < N; ++i) r.g[i] = f1 * a.g[i];
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            r.h[i * N + j] = f1 * a.h[i * N + j] + f2 * a.g[i] * a.g[j];
    return r;
}

template <int N>
Jet<N> reciprocal(const Jet<N>& a) {
    const double inv = 1.0 / a.v;
    return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}
inline double reciprocal(double a) { return 1.0 / a; }

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
    return a * reciprocal(b);
}
template <int N>
Jet<N> operator/(double a, const Jet<N>& b) {
    return a * reciprocal(b);
}

template <int N>
Jet<N> sqrt(const Jet<N>& a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

template <int N>
Jet<N> rsqrt(const Jet<N>& a) {
    const double s = 1.0 / std::sqrt(a.v);
    return chain(a, s, -0.5 * s / a.v, 0.75 * s / (a.v * a.v));
}
inline double rsqrt(double a) { return 1.0 / std::sqrt(a); }

template <int N>
Jet<N> pow(const Jet<N>& a, double p) {
    const double f0 = std::pow(a.v, p);
    return chain(a, f0, p * f0 / a.v, p * (p - 1.0) * f0 / (a.v * a.v));
}

using std::sqrt;

}  // namespace affq

#endif  // AFFQ_JET_HPP
