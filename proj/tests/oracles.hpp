#ifndef AFFQ_TESTS_ORACLES_HPP
#define AFFQ_TESTS_ORACLES_HPP

// Independent reference computations used by the tests. None of these go
// through the library's quadrature, transport or Newton code.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "affq/affq.hpp"

namespace oracle {

using affq::Body;
using affq::Mat;
using affq::Vec;
using affq::operator+;
using affq::operator-;
using affq::operator*;
constexpr double pi = std::numbers::pi;

// Surface area of the spheroid with semi-axes (a, a, c).
inline double spheroid_area(double a, double c) {
    if (c == a) return 4.0 * pi * a * a;
    if (c < a) {
        const double e = std::sqrt(1.0 - c * c / (a * a));
        return 2.0 * pi * a * a * (1.0 + (1.0 - e * e) / e * std::atanh(e));
    }
    const double e = std::sqrt(1.0 - a * a / (c * c));
    return 2.0 * pi * a * a * (1.0 + c / (a * e) * std::asin(e));
}

// Ellipse perimeter, 2 pi / M(a, b) * (a^2 - sum 2^(n-1) c_n^2) with the
// arithmetic-geometric mean M.
inline double ellipse_perimeter(double a, double b) {
    double x = a, y = b;
    double sum = 0.5 * (a * a - b * b), w = 0.5;
    for (int k = 0; k < 40 && x != y; ++k) {
        const double c = 0.5 * (x - y);
        const double xn = 0.5 * (x + y);
        y = std::sqrt(x * y);
        x = xn;
        w *= 2.0;
        sum += w * c * c;
    }
    return 2.0 * pi / x * (a * a - sum);
}

// Polygon on n uniform angles of a planar body's own radial function.
struct PolygonMoments {
    double area = 0.0;
    double perimeter = 0.0;
    Vec<2> centroid{};
};

inline PolygonMoments polygon_moments(const Body<2>& body, int n) {
    std::vector<Vec<2>> p(n);
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * pi * k / n;
        const Vec<2> u{std::cos(th), std::sin(th)};
        p[k] = affq::scaled(u, body(u));
    }
    PolygonMoments m;
    double cx = 0.0, cy = 0.0;
    for (int k = 0; k < n; ++k) {
        const Vec<2>& a = p[k];
        const Vec<2>& b = p[(k + 1) % n];
        const double cr = a[0] * b[1] - b[0] * a[1];
        m.area += 0.5 * cr;
        cx += (a[0] + b[0]) * cr;
        cy += (a[1] + b[1]) * cr;
        m.perimeter += std::hypot(b[0] - a[0], b[1] - a[1]);
    }
    m.centroid = {cx / (6.0 * m.area), cy / (6.0 * m.area)};
    return m;
}

// Triangulated radial surface on a lat-long mesh; volume, area and centroid
// from exact polyhedral formulas.
struct MeshMoments {
    double volume = 0.0;
    double area = 0.0;
    Vec<3> centroid{};
};

inline MeshMoments mesh_moments(const Body<3>& body, int rows) {
    const int cols = 2 * rows;
    auto point = [&](int i, int j) {
        const double th = pi * i / rows, ph = 2.0 * pi * j / cols;
        const Vec<3> u{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
        return affq::scaled(u, body(u));
    };
    std::vector<Vec<3>> grid((rows + 1) * cols);
    for (int i = 0; i <= rows; ++i)
        for (int j = 0; j < cols; ++j) grid[i * cols + j] = point(i, j);
    MeshMoments m;
    Vec<3> moment{};
    auto tri = [&](const Vec<3>& a, const Vec<3>& b, const Vec<3>& c) {
        const double v6 = affq::dot(a, affq::cross(b, c));
        m.volume += v6 / 6.0;
        for (int k = 0; k < 3; ++k) moment[k] += v6 / 6.0 * (a[k] + b[k] + c[k]) / 4.0;
        m.area += 0.5 * affq::norm(affq::cross(b - a, c - a));
    };
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const Vec<3>& p00 = grid[i * cols + j];
            const Vec<3>& p01 = grid[i * cols + (j + 1) % cols];
            const Vec<3>& p10 = grid[(i + 1) * cols + j];
            const Vec<3>& p11 = grid[(i + 1) * cols + (j + 1) % cols];
            if (i > 0) tri(p00, p10, p01);
            if (i < rows - 1) tri(p01, p10, p11);
        }
    for (int k = 0; k < 3; ++k) m.centroid[k] = moment[k] / m.volume;
    return m;
}

// Richardson extrapolation of a second-order quantity sampled at n and 2n.
inline double richardson2(double coarse, double fine) { return fine + (fine - coarse) / 3.0; }

// Haar-random orthonormal basis by Gram-Schmidt on Gaussian vectors.
template <int D>
std::vector<Vec<D>> random_basis(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vec<D>> b;
    while (static_cast<int>(b.size()) < D) {
        Vec<D> x;
        for (auto& c : x) c = g(rng);
        for (const auto& e : b) x = x - affq::scaled(e, affq::dot(x, e));
        const double n = affq::norm(x);
        if (n < 1e-6) continue;
        b.push_back(affq::scaled(x, 1.0 / n));
    }
    // Second pass removes rounding drift.
    for (std::size_t i = 0; i < b.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) b[i] = b[i] - affq::scaled(b[j], affq::dot(b[i], b[j]));
        b[i] = affq::normalized(b[i]);
    }
    return b;
}

template <int D>
Vec<D> random_direction(std::mt19937_64& rng) {
    return random_basis<D>(rng)[0];
}

// Membership test through the root shape only: x in K iff the root point
// M^-1 (x - c) lies inside the root radial graph.
template <int D>
bool contains(const Body<D>& body, const Vec<D>& x) {
    const Vec<D> y = affq::apply<double, D>(body.linear_inverse(), x - body.offset());
    const double n = affq::norm(y);
    if (n == 0.0) return true;
    return n <= body.root().radial(affq::scaled(y, 1.0 / n));
}

// Exit distance from `origin` along w by bisection on membership.
template <int D>
double ray_exit(const Body<D>& body, const Vec<D>& w, const Vec<D>& origin = {}) {
    auto inside = [&](double lam) { return contains<D>(body, origin + affq::scaled(w, lam)); };
    double lo = 0.0, hi = 1.0;
    while (inside(hi)) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Brute-force equilibrium census on two mutually rotated latitude-longitude
// grids, each trusted away from its own poles. Every grid cell is tested by
// the winding number of the finite-difference gradient around its corners:
// +1 marks an extremum (the sign of the Laplacian tells which), -1 a saddle.

struct DiscreteCounts {
    int S = 0, U = 0, N = 0;
};

namespace detail {

struct Hit {
    Vec<3> u;
    int type;  // 0 min, 1 saddle, 2 max
};

inline double wrap(double a) {
    while (a > pi) a -= 2.0 * pi;
    while (a <= -pi) a += 2.0 * pi;
    return a;
}

inline void scan_grid(const Body<3>& body, const Mat<3>& rot, int rows, double cap, std::vector<Hit>& hits) {
    const int cols = 2 * rows;
    const double h = 1e-5;
    auto r = [&](double th, double ph) {
        const Vec<3> x{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
        return body(affq::apply<double, 3>(rot, x));
    };
    auto theta = [&](int i) { return pi * (i + 0.5) / rows; };
    auto phi = [&](int j) { return 2.0 * pi * (j + 0.313) / cols; };
    // Gradient in the orthonormal (e_theta, e_phi) frame and the Laplacian sign.
    std::vector<double> angle(rows * cols), lap(rows * cols);
    for (int i = 0; i < rows; ++i) {
        const double th = theta(i), st = std::sin(th);
        for (int j = 0; j < cols; ++j) {
            const double ph = phi(j);
            const double f0 = r(th, ph);
            const double ft1 = r(th + h, ph), ft0 = r(th - h, ph);
            const double fp1 = r(th, ph + h / st), fp0 = r(th, ph - h / st);
            angle[i * cols + j] = std::atan2(fp1 - fp0, ft1 - ft0);
            lap[i * cols + j] = ft1 + ft0 + fp1 + fp0 - 4.0 * f0;
        }
    }
    for (int i = 0; i + 1 < rows; ++i) {
        const double thc = pi * (i + 1.0) / rows;
        if (thc < cap || thc > pi - cap) continue;
        for (int j = 0; j < cols; ++j) {
            const int jn = (j + 1) % cols;
            // Positively oriented in (theta, phi).
            const int ring[4] = {i * cols + j, (i + 1) * cols + j, (i + 1) * cols + jn, i * cols + jn};
            double w = 0.0;
            for (int q = 0; q < 4; ++q) w += wrap(angle[ring[(q + 1) % 4]] - angle[ring[q]]);
            const int winding = static_cast<int>(std::lround(w / (2.0 * pi)));
            if (winding == 0) continue;
            double l = 0.0;
            for (int q : ring) l += lap[q];
            const double phc = 2.0 * pi * (j + 0.813) / cols;
            const Vec<3> x{std::sin(thc) * std::cos(phc), std::sin(thc) * std::sin(phc), std::cos(thc)};
            const int type = winding < 0 ? 1 : (l > 0.0 ? 0 : 2);
            hits.push_back({affq::apply<double, 3>(rot, x), type});
        }
    }
}

}  // namespace detail

// rows: latitude rows of each grid; hits of one type closer than
// `cluster` radians are merged.
inline DiscreteCounts brute_counts(const Body<3>& body, int rows, double cluster = 0.02) {
    std::vector<detail::Hit> hits;
    const double cap = pi / 6.0;
    // Grid A is tilted generically so that symmetric bodies do not put
    // their critical points on grid lines; grid B's equator passes through
    // grid A's poles.
    const double a1 = 0.41, a2 = 0.93, a3 = 1.77;
    const Mat<3> rz1{{{std::cos(a1), -std::sin(a1), 0}, {std::sin(a1), std::cos(a1), 0}, {0, 0, 1}}};
    const Mat<3> ry{{{std::cos(a2), 0, std::sin(a2)}, {0, 1, 0}, {-std::sin(a2), 0, std::cos(a2)}}};
    const Mat<3> rz2{{{std::cos(a3), -std::sin(a3), 0}, {std::sin(a3), std::cos(a3), 0}, {0, 0, 1}}};
    const Mat<3> ra = rz2 * (ry * rz1);
    const Mat<3> rx{{{1, 0, 0}, {0, 0, -1}, {0, 1, 0}}};
    const Mat<3> rb = ra * rx;
    const Vec<3> pole = affq::apply<double, 3>(ra, Vec<3>{0, 0, 1});
    std::vector<detail::Hit> a, b;
    detail::scan_grid(body, ra, rows, cap, a);
    detail::scan_grid(body, rb, rows, 0.0, b);
    for (const auto& h : a) hits.push_back(h);
    // Grid B supplies the caps of grid A.
    for (const auto& h : b)
        if (std::abs(affq::dot(h.u, pole)) > std::cos(cap)) hits.push_back(h);
    std::vector<detail::Hit> reps;
    for (const auto& h : hits) {
        bool dup = false;
        for (const auto& r : reps)
            if (r.type == h.type && affq::angle_between<3>(r.u, h.u) < cluster) {
                dup = true;
                break;
            }
        if (!dup) reps.push_back(h);
    }
    DiscreteCounts c;
    for (const auto& r : reps) (r.type == 0 ? c.S : r.type == 1 ? c.N : c.U)++;
    return c;
}

// Planar census on n uniform angles.
inline DiscreteCounts brute_counts(const Body<2>& body, int n) {
    std::vector<double> f(n);
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * pi * (k + 0.2371) / n;
        f[k] = body(Vec<2>{std::cos(th), std::sin(th)});
    }
    DiscreteCounts c;
    for (int k = 0; k < n; ++k) {
        const double a = f[(k + n - 1) % n], b = f[k], d = f[(k + 1) % n];
        if (b < a && b < d) ++c.S;
        if (b > a && b > d) ++c.U;
    }
    return c;
}

}  // namespace oracle

#endif  // AFFQ_TESTS_ORACLES_HPP
