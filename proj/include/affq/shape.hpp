#ifndef AFFQ_SHAPE_HPP
#define AFFQ_SHAPE_HPP

// Root radial functions. A Shape is a positive function on the unit sphere,
// the radial function of a star body about the shape's own origin. Inputs
// are unit vectors, possibly as jets that lie on the sphere identically, so
// each shape may use any smooth extension off the sphere.

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <typeindex>
#include <utility>
#include <vector>

#include "affq/jet.hpp"
#include "affq/linalg.hpp"
#include "affq/sphere_grid.hpp"

namespace affq {

template <int D>
class Shape {
public:
    virtual ~Shape() = default;

    virtual double radial(const VecT<double, D>& u) const = 0;
    virtual Jet<2> radial(const VecT<Jet<2>, D>& u) const = 0;
    virtual Jet<3> radial(const VecT<Jet<3>, D>& u) const = 0;

    // Per-shape memo of expensive grid evaluations, shared by every body
    // derived from this shape. Safe under concurrent access.
    template <class T, class Factory>
    std::shared_ptr<const T> cached(int key, Factory&& make) const {
        const auto k = std::make_pair(std::type_index(typeid(T)), key);
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            auto it = cache_.find(k);
            if (it != cache_.end()) return std::static_pointer_cast<const T>(it->second);
        }
        std::shared_ptr<const T> value = std::make_shared<const T>(make());
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto [it, inserted] = cache_.emplace(k, value);
        return std::static_pointer_cast<const T>(it->second);
    }

private:
    mutable std::mutex cache_mutex_;
    mutable std::map<std::pair<std::type_index, int>, std::shared_ptr<const void>> cache_;
};

template <int D, class Derived>
class ShapeBase : public Shape<D> {
public:
    double radial(const VecT<double, D>& u) const final { return self().eval(u); }
    Jet<2> radial(const VecT<Jet<2>, D>& u) const final { return self().eval(u); }
    Jet<3> radial(const VecT<Jet<3>, D>& u) const final { return self().eval(u); }

private:
    const Derived& self() const { return static_cast<const Derived&>(*this); }
};

// Ellipsoid (ellipse in dim 2) with the given semi-axes along the coordinate axes.
template <int D>
class EllipsoidShape : public ShapeBase<D, EllipsoidShape<D>> {
public:
    explicit EllipsoidShape(const Vec<D>& semi_axes) {
        for (int i = 0; i < D; ++i) inv_sq_[i] = 1.0 / (semi_axes[i] * semi_axes[i]);
    }

    template <class S>
    S eval(const VecT<S, D>& x) const {
        S q = inv_sq_[0] * (x[0] * x[0]);
        for (int i = 1; i < D; ++i) q += inv_sq_[i] * (x[i] * x[i]);
        return rsqrt(q);
    }

private:
    Vec<D> inv_sq_{};
};

// r(theta) = a0 + sum_k a_k cos(k theta) + b_k sin(k theta), with
// coefficients laid out as a0, a1, b1, a2, b2, ...
class FourierShape : public ShapeBase<2, FourierShape> {
public:
    explicit FourierShape(std::vector<double> coefficients) : c_(std::move(coefficients)) {}

    template <class S>
    S eval(const VecT<S, 2>& x) const {
        S r = S(c_[0]);
        const int order = static_cast<int>(c_.size() - 1) / 2;
        S ck = x[0], sk = x[1];
        for (int k = 1; k <= order; ++k) {
            r += c_[2 * k - 1] * ck + c_[2 * k] * sk;
            if (k < order) {
                S cn = x[0] * ck - x[1] * sk;
                S sn = x[0] * sk + x[1] * ck;
                ck = cn;
                sk = sn;
            }
        }
        return r;
    }

    const std::vector<double>& coefficients() const { return c_; }

private:
    std::vector<double> c_;
};

// Orthonormal real spherical harmonics without the Condon-Shortley phase:
// Y_l0 ~ P_l^0, Y_lm ~ P_l^m cos(m phi) and Y_l,-m ~ P_l^m sin(m phi) for m > 0.
// Coefficient of (l, m) lives at index l*l + l + m.
inline int harmonic_index(int l, int m) { return l * l + l + m; }

inline double harmonic_normalization(int l, int m) {
    double ratio = 1.0;  // (l-m)! / (l+m)!
    for (int k = l - m + 1; k <= l + m; ++k) ratio /= k;
    const double n = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * ratio);
    return m == 0 ? n : std::sqrt(2.0) * n;
}

// Evaluates sum_{l,m} c_lm Y_lm at x using homogeneous (solid-harmonic)
// recurrences in Cartesian coordinates, valid for any scalar type.
template <class S>
S evaluate_harmonics(const std::vector<double>& c, int degree, const VecT<S, 3>& x) {
    const S r2 = dot(x, x);
    const S& z = x[2];
    S result = S(0.0);
    S am = S(1.0), bm = S(0.0);  // Re/Im of (x + i y)^m
    double dfact = 1.0;          // (2m - 1)!!
    for (int m = 0; m <= degree; ++m) {
        if (m > 0) dfact *= (2.0 * m - 1.0);
        S qc = S(0.0), qs = S(0.0);
        bool any_c = false, any_s = false;
        S p_prev2 = S(0.0);
        S p_prev = S(dfact);
        for (int l = m; l <= degree; ++l) {
            S p;
            if (l == m) {
                p = p_prev;
            } else if (l == m + 1) {
                p = (2.0 * m + 1.0) * (z * p_prev);
                p_prev2 = p_prev;
                p_prev = p;
            } else {
                p = ((2.0 * l - 1.0) * (z * p_prev) - (l + m - 1.0) * (r2 * p_prev2)) / (l - m);
                p_prev2 = p_prev;
                p_prev = p;
            }
            const double n = harmonic_normalization(l, m);
            const double cc = c[harmonic_index(l, m)];
            if (cc != 0.0) {
                qc += (cc * n) * p;
                any_c = true;
            }
            if (m > 0) {
                const double cs = c[harmonic_index(l, -m)];
                if (cs != 0.0) {
                    qs += (cs * n) * p;
                    any_s = true;
                }
            }
        }
        if (any_c) result += (m == 0 ? qc : qc * am);
        if (any_s) result += qs * bm;
        S an = x[0] * am - x[1] * bm;
        S bn = x[0] * bm + x[1] * am;
        am = an;
        bm = bn;
    }
    return result;
}

class HarmonicShape : public ShapeBase<3, HarmonicShape> {
public:
    explicit HarmonicShape(std::vector<double> coefficients) : c_(std::move(coefficients)) {
        degree_ = static_cast<int>(std::lround(std::sqrt(static_cast<double>(c_.size())))) - 1;
    }

    template <class S>
    S eval(const VecT<S, 3>& x) const {
        return evaluate_harmonics(c_, degree_, x);
    }

    int degree() const { return degree_; }
    const std::vector<double>& coefficients() const { return c_; }

private:
    std::vector<double> c_;
    int degree_ = 0;
};

// Radial value, tangent gradient and ambient Hessian at unit u, taken from the
// zero-homogeneous extension r(x / |x|). On tangent vectors the Hessian equals
// the Riemannian Hessian of r on the sphere.
template <int D>
struct RadialJet {
    double value = 0.0;
    Vec<D> gradient{};
    Mat<D> hessian{};
};

template <int D>
VecT<Jet<D>, D> seeded_direction(const Vec<D>& u) {
    VecT<Jet<D>, D> x;
    for (int i = 0; i < D; ++i) x[i] = Jet<D>::variable(u[i], i);
    return normalized(x);
}

template <int D>
RadialJet<D> to_radial_jet(const Jet<D>& j) {
    RadialJet<D> r;
    r.value = j.v;
    for (int i = 0; i < D; ++i) {
        r.gradient[i] = j.g[i];
        for (int k = 0; k < D; ++k) r.hessian[i][k] = j.hess(i, k);
    }
    return r;
}

// Hessian restricted to the tangent frame at u.
template <int D>
std::array<std::array<double, D - 1>, D - 1> tangent_hessian(const Mat<D>& h,
                                                             const std::array<Vec<D>, D - 1>& e) {
    std::array<std::array<double, D - 1>, D - 1> r{};
    for (int a = 0; a < D - 1; ++a)
        for (int b = 0; b < D - 1; ++b) r[a][b] = dot(e[a], apply<double, D>(h, e[b]));
    return r;
}

}  // namespace affq

#endif  // AFFQ_SHAPE_HPP
