#ifndef AFFQ_BASIS_HPP
#define AFFQ_BASIS_HPP

// Critical orthonormal bases of the slope field f(v) = I'_v(1).
//
// At t = 1 the area derivative of K^v(t) is the integral of 1 - <v,n>^2 over
// the boundary, so for any orthonormal basis the derivatives sum to
// (n - 1) A and the slopes sum to zero. Sign-opposite orthogonal pairs
// therefore exist whenever f is not identically zero, and bisection along
// the arc between them finds a critical direction.

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "affq/body.hpp"
#include "affq/error.hpp"
#include "affq/isoperimetric.hpp"
#include "affq/linalg.hpp"

namespace affq {

constexpr double kDefaultBasisTolerance = 1e-6;

template <int D>
class SlopeField {
public:
    using Evaluator = std::function<double(const Vec<D>&)>;

    explicit SlopeField(const Body<D>& body, int resolution = kDefaultResolution<D>) {
        auto family = std::make_shared<AffineFamily<D>>(body, resolution);
        eval_ = [family](const Vec<D>& v) { return family->iso_derivative(v, 1.0); };
    }

    // Arbitrary field, for tests and for restricted searches.
    explicit SlopeField(Evaluator eval) : eval_(std::move(eval)) {}

    double operator()(const Vec<D>& v) const {
        check_direction<D>(v, "slope");
        {
            std::lock_guard<std::mutex> lock(mutex_);
            for (const auto& [w, f] : cache_)
                if (norm(w - v) <= 1e-12) return f;
        }
        const double f = eval_(v);
        std::lock_guard<std::mutex> lock(mutex_);
        cache_.emplace_back(v, f);
        return f;
    }

    std::size_t cache_size() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.size();
    }

private:
    Evaluator eval_;
    mutable std::mutex mutex_;
    mutable std::vector<std::pair<Vec<D>, double>> cache_;
};

template <int D>
double slope(const SlopeField<D>& field, const VecIn<D>& v) {
    return field(v);
}

// Bisection on theta in [0, pi/2] along v(theta) = u cos(theta) + w sin(theta).
template <int D>
Vec<D> find_zero_on_arc(const SlopeField<D>& field, const VecIn<D>& u, const VecIn<D>& w, double tol) {
    const char* where = "find_zero_on_arc";
    check_direction<D>(u, where);
    check_direction<D>(w, where);
    if (std::abs(dot(u, w)) > 1e-10) throw Error(ErrorCode::BadSpec, where, "u and w must be orthogonal");
    const double fu = field(u);
    if (std::abs(fu) <= tol) return u;
    const double fw = field(w);
    if (std::abs(fw) <= tol) return w;
    if ((fu > 0.0) == (fw > 0.0))
        throw Error(ErrorCode::NoSignChange, where, "slopes at the arc ends have the same sign");
    auto point = [&](double th) { return normalized(scaled(u, std::cos(th)) + scaled(w, std::sin(th))); };
    double lo = 0.0, hi = 0.5 * kPi;
    const bool lo_positive = fu > 0.0;
    // Aim below tol so that re-evaluation of the result keeps a margin.
    const double target = 0.25 * tol;
    Vec<D> best = u;
    double best_abs = std::abs(fu);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vec<D> v = point(mid);
        const double fv = field(v);
        if (std::abs(fv) < best_abs) {
            best = v;
            best_abs = std::abs(fv);
        }
        if (std::abs(fv) <= target) return v;
        if ((fv > 0.0) == lo_positive)
            lo = mid;
        else
            hi = mid;
    }
    return best;
}

template <int D>
struct CriticalBasis {
    std::vector<Vec<D>> basis;
    std::vector<double> residuals;
    // Set when max |f| over the coarse sample is below tol; the standard
    // basis is returned.
    bool field_identically_small = false;
};

template <int D>
std::vector<Vec<D>> coarse_directions() {
    std::vector<Vec<D>> dirs;
    if constexpr (D == 2) {
        for (int k = 0; k < 64; ++k) {
            const double th = 2.0 * kPi * k / 64;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
    } else {
        for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j)
                for (int k = -1; k <= 1; ++k)
                    if (i || j || k) dirs.push_back(normalized(Vec<3>{double(i), double(j), double(k)}));
    }
    return dirs;
}

namespace detail {

template <int D>
CriticalBasis<D> standard_basis(const SlopeField<D>& field) {
    CriticalBasis<D> out;
    out.field_identically_small = true;
    for (int i = 0; i < D; ++i) {
        Vec<D> e{};
        e[i] = 1.0;
        out.basis.push_back(e);
        out.residuals.push_back(field(e));
    }
    return out;
}

inline Vec<2> perp(const Vec<2>& v) { return {-v[1], v[0]}; }

// Completes a single critical direction v to a critical basis.
template <int D>
std::vector<VecIn<D>> complete_from(const SlopeField<D>& field, const VecIn<D>& v, double tol) {
    if constexpr (D == 2) {
        return {v, perp(v)};
    } else {
        const auto ab = complement_basis<3>(v);
        const Vec<3> e1 = normalized(find_zero_on_arc<3>(field, ab[0], ab[1], tol));
        return {v, e1, normalized(cross(v, e1))};
    }
}

template <int D>
CriticalBasis<D> with_residuals(const SlopeField<D>& field, std::vector<VecIn<D>> basis) {
    CriticalBasis<D> out;
    out.basis = std::move(basis);
    for (const auto& e : out.basis) out.residuals.push_back(field(e));
    return out;
}

}  // namespace detail

template <int D>
CriticalBasis<D> critical_basis(const SlopeField<D>& field, double tol = kDefaultBasisTolerance) {
    const char* where = "critical_basis";
    if (!(tol > 0.0)) throw Error(ErrorCode::BadSpec, where, "tolerance must be positive");
    const auto dirs = coarse_directions<D>();
    std::vector<double> f;
    double fmax = 0.0;
    for (const auto& d : dirs) {
        f.push_back(field(d));
        fmax = std::max(fmax, std::abs(f.back()));
    }
    if (fmax < tol) return detail::standard_basis(field);

    // First orthogonal sign-opposite pair in grid order.
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        for (std::size_t j = i + 1; j < dirs.size(); ++j) {
            if (std::abs(dot(dirs[i], dirs[j])) > 1e-12) continue;
            if (!((f[i] > 0.0 && f[j] < 0.0) || (f[i] < 0.0 && f[j] > 0.0))) continue;
            const Vec<D> v = normalized(find_zero_on_arc<D>(field, dirs[i], dirs[j], tol));
            return detail::with_residuals(field, detail::complete_from<D>(field, v, tol));
        }
    }
    // No strict sign change: take an already critical sample if one exists.
    std::size_t best = 0;
    for (std::size_t i = 1; i < dirs.size(); ++i)
        if (std::abs(f[i]) < std::abs(f[best])) best = i;
    if (std::abs(f[best]) <= tol)
        return detail::with_residuals(field, detail::complete_from<D>(field, dirs[best], tol));
    throw Error(ErrorCode::NoSignChange, where, "no sign-opposite orthogonal pair among samples");
}

template <int D>
CriticalBasis<D> critical_basis(const Body<D>& body, double tol = kDefaultBasisTolerance) {
    return critical_basis<D>(SlopeField<D>(body), tol);
}

// Extends an orthonormal frame of critical directions to a critical basis.
template <int D>
CriticalBasis<D> complete_frame(const SlopeField<D>& field, const std::vector<VecIn<D>>& frame,
                                double tol = kDefaultBasisTolerance) {
    const char* where = "complete_frame";
    if (frame.size() > static_cast<std::size_t>(D))
        throw Error(ErrorCode::BadSpec, where, "frame has more than n directions");
    for (std::size_t i = 0; i < frame.size(); ++i) {
        check_direction<D>(frame[i], where);
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(dot(frame[i], frame[j])) > 1e-10)
                throw Error(ErrorCode::BadSpec, where, "frame is not orthonormal");
        if (std::abs(field(frame[i])) > tol)
            throw Error(ErrorCode::FrameNotCritical, where,
                        "frame member " + std::to_string(i) + " has slope " + std::to_string(field(frame[i])));
    }
    if (frame.empty()) return critical_basis<D>(field, tol);
    if (frame.size() == static_cast<std::size_t>(D)) return detail::with_residuals(field, frame);
    if constexpr (D == 3) {
        if (frame.size() == 2) {
            std::vector<Vec<3>> b = frame;
            b.push_back(normalized(cross(frame[0], frame[1])));
            return detail::with_residuals(field, b);
        }
    }
    return detail::with_residuals(field, detail::complete_from<D>(field, frame[0], tol));
}

template <int D>
CriticalBasis<D> complete_frame(const Body<D>& body, const std::vector<VecIn<D>>& frame,
                                double tol = kDefaultBasisTolerance) {
    return complete_frame<D>(SlopeField<D>(body), frame, tol);
}

template <int D>
std::string basis_csv(const CriticalBasis<D>& b) {
    std::string out = D == 2 ? "e_i_x,e_i_y,residual\n" : "e_i_x,e_i_y,e_i_z,residual\n";
    for (std::size_t i = 0; i < b.basis.size(); ++i) {
        std::vector<std::string> cols;
        for (double x : b.basis[i]) cols.push_back(fmt17(x));
        cols.push_back(fmt17(b.residuals[i]));
        out += join(cols) + "\n";
    }
    return out;
}

}  // namespace affq

#endif  // AFFQ_BASIS_HPP
