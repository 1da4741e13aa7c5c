#ifndef AFFQ_ISOPERIMETRIC_HPP
#define AFFQ_ISOPERIMETRIC_HPP

// Isoperimetric ratio along orthogonal-affinity families K^v(t).
//
// Family quantities are evaluated by transporting one boundary sample of K
// through x -> A_t x, A_t = I + (t - 1) v v^T:
//   A(t) = sum dA * sqrt(t^2 (1 - c^2) + c^2),   c = <v, n>,
//   V(t) = (1/n) sum dA * <A_t p, cof(A_t) n>,
// which stays accurate for extreme t where the stretched body's own radial
// function is too sharply peaked for a fixed sphere grid.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "affq/body.hpp"
#include "affq/csv.hpp"
#include "affq/error.hpp"

namespace affq {

template <int D>
constexpr double iso_exponent = static_cast<double>(D) / (D - 1);

// vol/surf^{n/(n-1)} of the unit ball.
template <int D>
double ball_ratio() {
    if constexpr (D == 2) {
        return 1.0 / (4.0 * kPi);
    } else {
        return 1.0 / (6.0 * std::sqrt(kPi));
    }
}

template <int D>
double normalized_ratio(double vol, double area) {
    return vol / std::pow(area, iso_exponent<D>) / ball_ratio<D>();
}

template <int D>
double iso_ratio(const Body<D>& body, int resolution = kDefaultResolution<D>) {
    return normalized_ratio<D>(volume(body, resolution), surface_area(body, resolution));
}

template <int D>
class AffineFamily {
public:
    explicit AffineFamily(const Body<D>& body, int resolution = kDefaultResolution<D>)
        : sample_(boundary_sample(body, resolution)) {
        volume1_ = volume(identity_direction(), 1.0);
    }

    double area(const Vec<D>& v, double t) const {
        const double t2 = t * t;
        double acc = 0.0;
        for (std::size_t k = 0; k < sample_.area.size(); ++k) {
            const double c = dot(v, sample_.normal[k]);
            const double c2 = c * c;
            acc += sample_.area[k] * std::sqrt(t2 * (1.0 - c2) + c2);
        }
        return acc;
    }

    double volume(const Vec<D>& v, double t) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < sample_.area.size(); ++k) {
            const Vec<D>& p = sample_.point[k];
            const Vec<D>& n = sample_.normal[k];
            const double vp = dot(v, p), vn = dot(v, n);
            const Vec<D> ap = p + scaled(v, (t - 1.0) * vp);
            const Vec<D> cn = scaled(n, t) + scaled(v, (1.0 - t) * vn);
            acc += sample_.area[k] * dot(ap, cn);
        }
        return acc / D;
    }

    // A'(t): central differences with one Richardson step, base step 1e-4 t.
    double area_derivative(const Vec<D>& v, double t) const {
        const double h = 1e-4 * t;
        const double d1 = (area(v, t + h) - area(v, t - h)) / (2.0 * h);
        const double d2 = (area(v, t + 0.5 * h) - area(v, t - 0.5 * h)) / h;
        return (4.0 * d2 - d1) / 3.0;
    }

    // Second central difference of A(t).
    double area_second_difference(const Vec<D>& v, double t, double rel_step = 1e-3) const {
        const double h = rel_step * t;
        return (area(v, t + h) - 2.0 * area(v, t) + area(v, t - h)) / (h * h);
    }

    double iso(const Vec<D>& v, double t) const {
        return normalized_ratio<D>(volume(v, t), area(v, t));
    }

    // Normalized I'(t) = V(1) (A - s t A') / A^{s+1}, divided by the ball ratio.
    double iso_derivative(const Vec<D>& v, double t) const {
        const double a = area(v, t);
        const double s = iso_exponent<D>;
        return volume1_ * numerator(v, t) / std::pow(a, s + 1.0) / ball_ratio<D>();
    }

    // N(t) = A(t) - s t A'(t); the sign of I'(t).
    double numerator(const Vec<D>& v, double t) const {
        return area(v, t) - iso_exponent<D> * t * area_derivative(v, t);
    }

    double base_volume() const { return volume1_; }
    const BoundarySample<D>& sample() const { return sample_; }

private:
    static Vec<D> identity_direction() {
        Vec<D> e{};
        e[0] = 1.0;
        return e;
    }

    BoundarySample<D> sample_;
    double volume1_ = 0.0;
};

struct IsoSample {
    double t = 0.0;
    double volume = 0.0;
    double area = 0.0;
    double iso = 0.0;
    double iso_derivative = 0.0;
};

template <int D>
struct IsoCurve {
    Vec<D> v{};
    std::vector<IsoSample> samples;
    double exponent = iso_exponent<D>;
    double normalizer = ball_ratio<D>();
};

template <int D>
IsoCurve<D> iso_curve(const AffineFamily<D>& family, const VecIn<D>& v, const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw Error(ErrorCode::EmptyGrid, "iso_curve", "empty t grid");
    check_direction<D>(v, "iso_curve");
    IsoCurve<D> curve;
    curve.v = v;
    double prev = 0.0;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw Error(ErrorCode::BadRatio, "iso_curve", "ratios must be positive");
        if (!curve.samples.empty() && !(t > prev))
            throw Error(ErrorCode::BadSpec, "iso_curve", "t grid must be strictly increasing");
        prev = t;
        IsoSample s;
        s.t = t;
        s.volume = family.volume(v, t);
        s.area = family.area(v, t);
        s.iso = normalized_ratio<D>(s.volume, s.area);
        s.iso_derivative = family.iso_derivative(v, t);
        curve.samples.push_back(s);
    }
    return curve;
}

template <int D>
IsoCurve<D> iso_curve(const Body<D>& body, const VecIn<D>& v, const std::vector<double>& t_grid) {
    return iso_curve(AffineFamily<D>(body), v, t_grid);
}

template <int D>
double iso_derivative(const Body<D>& body, const VecIn<D>& v, double t) {
    if (!(t > 0.0)) throw Error(ErrorCode::BadRatio, "iso_derivative", "ratio must be positive");
    return AffineFamily<D>(body).iso_derivative(v, t);
}

struct IsoMax {
    double t_star = 0.0;
    double iso_star = 0.0;
};

// Bisection in log t on the sign of N(t) over [1e-4, 1e4].
template <int D>
IsoMax iso_max(const AffineFamily<D>& family, const VecIn<D>& v) {
    double lo = 1e-4, hi = 1e4;
    const double nlo = family.numerator(v, lo), nhi = family.numerator(v, hi);
    if (!(nlo > 0.0 && nhi < 0.0))
        throw Error(ErrorCode::BracketNotFound, "iso_max",
                    "A - s t A' does not change sign on [1e-4, 1e4]");
    while (std::log(hi / lo) > 1e-8) {
        const double mid = std::sqrt(lo * hi);
        if (family.numerator(v, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    IsoMax m;
    m.t_star = std::sqrt(lo * hi);
    m.iso_star = family.iso(v, m.t_star);
    return m;
}

template <int D>
IsoMax iso_max(const Body<D>& body, const VecIn<D>& v) {
    return iso_max(AffineFamily<D>(body), v);
}

struct QuasiconcavityReport {
    bool pass = false;
    int sign_changes = 0;
    // Indices k of slopes (between samples k and k+1) that rise after a fall.
    std::vector<int> violations;
};

inline QuasiconcavityReport check_quasiconcave(const std::vector<double>& t,
                                               const std::vector<double>& iso,
                                               double slope_tol = 1e-9) {
    QuasiconcavityReport rep;
    int last = 0;
    bool fallen = false;
    for (std::size_t k = 0; k + 1 < iso.size(); ++k) {
        const double slope = (iso[k + 1] - iso[k]) / (t[k + 1] - t[k]);
        const int sign = slope > slope_tol ? 1 : (slope < -slope_tol ? -1 : 0);
        if (sign == 0) continue;
        if (last != 0 && sign != last) ++rep.sign_changes;
        if (sign < 0) fallen = true;
        if (sign > 0 && fallen) rep.violations.push_back(static_cast<int>(k));
        last = sign;
    }
    rep.pass = rep.violations.empty();
    return rep;
}

template <int D>
QuasiconcavityReport check_quasiconcave(const IsoCurve<D>& curve) {
    std::vector<double> t, iso;
    for (const auto& s : curve.samples) {
        t.push_back(s.t);
        iso.push_back(s.iso);
    }
    return check_quasiconcave(t, iso);
}

// A''(t) from the graph form: the boundary splits into the graphs of f over
// the projection D onto H = v^perp (upper: <v,n> > 0, lower: < 0), and
//   A_f''(t) = int_D |grad f|^2 / (1 + t^2 |grad f|^2)^{3/2} dx
// summed over both halves. The graph is reparametrised by the boundary sample:
// |grad f|^2 = (1 - c^2) / c^2 and dx = |c| dA.
template <int D>
double surface_second_derivative(const AffineFamily<D>& family, const VecIn<D>& v, double t) {
    const BoundarySample<D>& s = family.sample();
    double upper = 0.0, lower = 0.0, upper_proj = 0.0, lower_proj = 0.0, total = 0.0;
    for (std::size_t k = 0; k < s.area.size(); ++k) {
        const double c = dot(v, s.normal[k]);
        if (c == 0.0) continue;
        const double grad2 = (1.0 - c * c) / (c * c);
        const double integrand = grad2 / std::pow(1.0 + t * t * grad2, 1.5);
        const double dx = std::abs(c) * s.area[k];
        if (c > 0.0) {
            upper += integrand * dx;
            upper_proj += dx;
        } else {
            lower += integrand * dx;
            lower_proj += dx;
        }
        total += s.area[k];
    }
    // Both halves must project onto the same domain D.
    if (std::abs(upper_proj - lower_proj) > 1e-8 * total)
        throw Error(ErrorCode::GraphSplitFailure, "surface_second_derivative",
                    "upper and lower graphs project to different areas");
    return upper + lower;
}

template <int D>
double surface_second_derivative(const Body<D>& body, const VecIn<D>& v, double t) {
    return surface_second_derivative(AffineFamily<D>(body), v, t);
}

template <int D>
std::string iso_curve_csv(const IsoCurve<D>& curve) {
    std::string out = "t,V,A,I,dI\n";
    for (const auto& s : curve.samples)
        out += join({fmt17(s.t), fmt17(s.volume), fmt17(s.area), fmt17(s.iso), fmt17(s.iso_derivative)}) +
               "\n";
    return out;
}

inline std::vector<double> log_grid(double a, double b, int n) {
    std::vector<double> g;
    if (n == 1) return {a};
    const double ratio = b / a;
    for (int i = 0; i < n; ++i) g.push_back(a * std::pow(ratio, static_cast<double>(i) / (n - 1)));
    // Endpoints exactly as given.
    g.front() = a;
    g.back() = b;
    return g;
}

}  // namespace affq

#endif  // AFFQ_ISOPERIMETRIC_HPP
