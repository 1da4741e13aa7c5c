#ifndef AFFQ_EQUILIBRIA_HPP
#define AFFQ_EQUILIBRIA_HPP

// Static equilibria with respect to the centroid: critical points of the
// distance |x| on the boundary, i.e. of the radial function about the
// centroid. Roots are located in the root chart u -> M rho(u) u + c, where
// the distance is smooth for every affine image, then mapped to the body's
// own direction and classified by the Hessian of its radial function.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "affq/body.hpp"
#include "affq/csv.hpp"
#include "affq/error.hpp"
#include "affq/isoperimetric.hpp"
#include "affq/jet.hpp"
#include "affq/linalg.hpp"

namespace affq {

template <int D>
constexpr int kEquilibriumResolution = D == 2 ? 2048 : 128;

enum class EquilibriumKind { stable, saddle, unstable };

inline const char* to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::stable: return "stable";
        case EquilibriumKind::saddle: return "saddle";
        case EquilibriumKind::unstable: return "unstable";
    }
    return "unknown";
}

template <int D>
struct EquilibriumPoint {
    Vec<D> u{};      // unit direction about the centroid
    Vec<D> p{};      // boundary point r(u) u
    double r = 0.0;
    int index = 0;   // Morse index: number of negative Hessian eigenvalues
    EquilibriumKind kind = EquilibriumKind::stable;
    std::vector<double> hessian_eigs;
    double gradient_norm = 0.0;
};

struct EquilibriumCounts {
    int S = 0;
    int U = 0;
    int N = 0;
    int T = 0;

    bool operator==(const EquilibriumCounts&) const = default;
};

template <int D>
bool satisfies_euler_identity(const EquilibriumCounts& c) {
    if (c.T != c.S + c.U + c.N) return false;
    if constexpr (D == 2) {
        return c.N == 0 && c.S == c.U;
    } else {
        return c.S + c.U - c.N == 2;
    }
}

// ---------------------------------------------------------------------------
// Chart grid: seeds for the Newton search.

template <int D>
struct ChartGrid {
    std::vector<Vec<D>> nodes;
    std::vector<int> adj_begin;  // CSR adjacency
    std::vector<int> adj;
    // Root boundary points and their Jacobians (columns: d/dx_k of the
    // zero-homogeneous extension) at the nodes.
    std::vector<Vec<D>> point;
    std::vector<Mat<D>> jacobian;
};

// Fixed generic rotation so that no symmetry axis of a zoo body lands on a
// grid pole or a grid line.
inline Mat<3> chart_rotation() {
    const double a = 0.3, b = 0.7, c = 1.1;
    const Mat<3> rz1{{{std::cos(a), -std::sin(a), 0}, {std::sin(a), std::cos(a), 0}, {0, 0, 1}}};
    const Mat<3> rx{{{1, 0, 0}, {0, std::cos(b), -std::sin(b)}, {0, std::sin(b), std::cos(b)}}};
    const Mat<3> rz2{{{std::cos(c), -std::sin(c), 0}, {std::sin(c), std::cos(c), 0}, {0, 0, 1}}};
    return rz2 * (rx * rz1);
}

// Root boundary points and Jacobians at the grid nodes.
template <int D>
void fill_chart_jets(ChartGrid<D>& g, const Shape<D>& root) {
    g.point.clear();
    g.jacobian.clear();
    for (const Vec<D>& u : g.nodes) {
        const auto x = seeded_direction<D>(u);
        const Jet<D> rho = root.radial(x);
        Vec<D> p;
        Mat<D> jac;
        for (int i = 0; i < D; ++i) {
            const Jet<D> pi = rho * x[i];
            p[i] = pi.v;
            for (int k = 0; k < D; ++k) jac[i][k] = pi.g[k];
        }
        g.point.push_back(p);
        g.jacobian.push_back(jac);
    }
}

template <int D>
ChartGrid<D> build_chart_grid(const Shape<D>& root, int res) {
    ChartGrid<D> g;
    std::vector<std::vector<int>> nb;
    if constexpr (D == 2) {
        for (int k = 0; k < res; ++k) {
            const double th = 2.0 * kPi * (k + 0.3) / res;
            g.nodes.push_back({std::cos(th), std::sin(th)});
            nb.push_back({(k + res - 1) % res, (k + 1) % res});
        }
    } else {
        const Mat<3> rot = chart_rotation();
        const int cols = 2 * res;
        auto id = [&](int i, int j) { return i * cols + ((j % cols) + cols) % cols; };
        for (int i = 0; i < res; ++i) {
            const double th = kPi * (i + 0.5) / res;
            for (int j = 0; j < cols; ++j) {
                const double ph = 2.0 * kPi * j / cols;
                g.nodes.push_back(apply<double, 3>(
                    rot, Vec<3>{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)}));
            }
        }
        const int north = res * cols, south = north + 1;
        g.nodes.push_back(apply<double, 3>(rot, Vec<3>{0, 0, 1}));
        g.nodes.push_back(apply<double, 3>(rot, Vec<3>{0, 0, -1}));
        nb.resize(g.nodes.size());
        for (int i = 0; i < res; ++i)
            for (int j = 0; j < cols; ++j) {
                auto& list = nb[id(i, j)];
                for (int di = -1; di <= 1; ++di)
                    for (int dj = -1; dj <= 1; ++dj) {
                        if (!di && !dj) continue;
                        const int ii = i + di;
                        if (ii < 0 || ii >= res) continue;
                        list.push_back(id(ii, j + dj));
                    }
                if (i == 0) list.push_back(north);
                if (i == res - 1) list.push_back(south);
            }
        for (int j = 0; j < cols; ++j) {
            nb[north].push_back(id(0, j));
            nb[south].push_back(id(res - 1, j));
        }
    }
    for (const auto& l : nb) {
        g.adj_begin.push_back(static_cast<int>(g.adj.size()));
        g.adj.insert(g.adj.end(), l.begin(), l.end());
    }
    g.adj_begin.push_back(static_cast<int>(g.adj.size()));
    fill_chart_jets<D>(g, root);
    return g;
}

template <int D>
std::shared_ptr<const ChartGrid<D>> chart_grid(const Body<D>& body, int res) {
    return body.root().template cached<ChartGrid<D>>(res, [&] { return build_chart_grid<D>(body.root(), res); });
}

// The same grid laid out uniformly in the body's own directions and pulled
// back to the root chart. Strong stretches squeeze the neighbourhoods of the
// small-radius equilibria into thin bands of the root chart; this layout
// resolves them.
template <int D>
ChartGrid<D> own_chart_grid(const Body<D>& body, int res) {
    ChartGrid<D> g = *chart_grid<D>(body, res);
    const Mat<D> minv = inverse(body.linear());
    for (auto& u : g.nodes) u = normalized(apply<double, D>(minv, u));
    fill_chart_jets<D>(g, body.root());
    return g;
}

// G(u) = |M rho(u) u + c|^2 / 2 in the root chart, as a second-order jet.
template <int D>
Jet<D> chart_energy(const Body<D>& body, const VecIn<D>& u) {
    const auto p = body.chart_point(seeded_direction<D>(u));
    return 0.5 * dot(p, p);
}

namespace detail {

template <int D>
struct TangentSystem {
    Vec<D - 1> grad{};
    std::array<std::array<double, D - 1>, D - 1> hess{};
    std::array<Vec<D>, D - 1> frame{};
};

template <int D>
TangentSystem<D> tangent_system(const Vec<D>& u, const Vec<D>& g, const Mat<D>& h) {
    TangentSystem<D> s;
    s.frame = tangent_frame<D>(u);
    for (int a = 0; a < D - 1; ++a) s.grad[a] = dot(g, s.frame[a]);
    s.hess = tangent_hessian<D>(h, s.frame);
    return s;
}

// One Newton step on the sphere, clipped to `max_step` radians; false if
// the tangent Hessian is singular.
template <int D>
bool newton_step(const TangentSystem<D>& s, Vec<D>& u, double max_step, double& step_len) {
    Vec<D - 1> delta{};
    if constexpr (D == 2) {
        if (s.hess[0][0] == 0.0 || !std::isfinite(s.hess[0][0])) return false;
        delta[0] = -s.grad[0] / s.hess[0][0];
    } else {
        std::array<double, 2> x;
        if (!solve_symmetric2(s.hess[0][0], s.hess[0][1], s.hess[1][1], {-s.grad[0], -s.grad[1]}, x))
            return false;
        delta = x;
    }
    step_len = norm(delta);
    if (!std::isfinite(step_len)) return false;
    if (step_len > max_step) {
        delta = scaled(delta, max_step / step_len);
        step_len = max_step;
    }
    Vec<D> next = u;
    for (int a = 0; a < D - 1; ++a) next = next + scaled(s.frame[a], delta[a]);
    u = normalized(next);
    return true;
}

template <int D>
std::array<double, D - 1> eigenvalues(const std::array<std::array<double, D - 1>, D - 1>& h) {
    if constexpr (D == 2) {
        return {h[0][0]};
    } else {
        return symmetric_eigenvalues(h[0][0], h[0][1], h[1][1]);
    }
}

}  // namespace detail

struct EquilibriumOptions {
    int resolution = 0;  // 0: dimension default
    double root_tol = 1e-10;        // |grad r| <= root_tol * mean radius
    double degeneracy_tol = 1e-8;   // |hessian eigenvalue| <= tol * mean radius is degenerate
    double dedup_angle = 1e-6;      // chart-angle deduplication
    bool own_chart = false;         // also seed from a grid uniform in the body's directions
};

template <int D>
std::vector<EquilibriumPoint<D>> find_equilibria(const Body<D>& body, const EquilibriumOptions& opt = {}) {
    const char* where = "find_equilibria";
    const int res = opt.resolution > 0 ? opt.resolution : kEquilibriumResolution<D>;
    std::vector<std::shared_ptr<const ChartGrid<D>>> grids{chart_grid<D>(body, res)};
    if (opt.own_chart) grids.push_back(std::make_shared<const ChartGrid<D>>(own_chart_grid<D>(body, res)));
    const Mat<D>& m = body.linear();
    const Vec<D>& c = body.offset();
    const Mat<D> minv_t = opt.own_chart ? transpose(inverse(m)) : Mat<D>{};

    // Seeds: grid-local minima of |grad F|^2, F = |P|, from cached root jets.
    // The scale is the mean of F over the root-chart grid.
    std::vector<Vec<D>> seeds;
    double scale = 0.0;
    for (std::size_t gi = 0; gi < grids.size(); ++gi) {
        const ChartGrid<D>& grid = *grids[gi];
        const std::size_t n = grid.nodes.size();
        std::vector<double> field(n);
        double fsum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const Vec<D> pk = apply<double, D>(m, grid.point[k]) + c;
            const Mat<D> jk = m * grid.jacobian[k];
            const double f2 = dot(pk, pk);
            Vec<D> g{};
            for (int a = 0; a < D; ++a)
                for (int i = 0; i < D; ++i) g[a] += jk[i][a] * pk[i];
            if (gi > 0) {
                // Chain rule to the own direction w = M y / |M y|:
                // dy/dw = |M y| (I - y y^T) M^-1, then project onto T_w.
                const Vec<D>& y = grid.nodes[k];
                const Vec<D> my = apply<double, D>(m, y);
                const Vec<D> w = normalized(my);
                Vec<D> gw = scaled(apply<double, D>(minv_t, g - scaled(y, dot(y, g))), norm(my));
                g = gw - scaled(w, dot(w, gw));
            }
            field[k] = dot(g, g) / f2;
            fsum += std::sqrt(f2);
        }
        if (gi == 0) scale = fsum / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            bool seed = true;
            for (int q = grid.adj_begin[k]; q < grid.adj_begin[k + 1]; ++q)
                if (field[grid.adj[q]] < field[k]) {
                    seed = false;
                    break;
                }
            if (seed) seeds.push_back(grid.nodes[k]);
        }
    }

    std::vector<Vec<D>> chart_roots;
    std::vector<EquilibriumPoint<D>> out;
    for (const Vec<D>& seed_u : seeds) {
        // Newton on the chart energy.
        Vec<D> u = seed_u;
        bool converged = false;
        for (int it = 0; it < 50; ++it) {
            const Jet<D> e = chart_energy<D>(body, u);
            const RadialJet<D> j = to_radial_jet<D>(e);
            const auto sys = detail::tangent_system<D>(u, j.gradient, j.hessian);
            const double fval = std::sqrt(2.0 * e.v);
            // Same rounding floor as below, in the chart's own scaling.
            double hmax = 0.0;
            for (double ev : detail::eigenvalues<D>(sys.hess)) hmax = std::max(hmax, std::abs(ev));
            const double floor = 64.0 * std::numeric_limits<double>::epsilon() * hmax / fval;
            if (norm(sys.grad) / fval <= std::max(1e-14 * scale, floor)) {
                converged = true;
                break;
            }
            double step = 0.0;
            if (!detail::newton_step<D>(sys, u, 0.25, step)) break;
            if (step < 1e-15) {
                const Jet<D> e2 = chart_energy<D>(body, u);
                const RadialJet<D> j2 = to_radial_jet<D>(e2);
                const auto s2 = detail::tangent_system<D>(u, j2.gradient, j2.hessian);
                converged = norm(s2.grad) / std::sqrt(2.0 * e2.v) <= 1e-9 * scale;
                break;
            }
        }
        if (!converged) continue;  // divergent seeds are covered by neighbours
        bool duplicate = false;
        for (const auto& r : chart_roots)
            if (angle_between<D>(r, u) <= opt.dedup_angle) {
                duplicate = true;
                break;
            }
        if (duplicate) continue;
        chart_roots.push_back(u);
        if (chart_roots.size() > 1000)
            throw Error(ErrorCode::Degenerate, where, "critical points are not isolated");

        // Classify in the body's own radial parametrisation.
        const Vec<D> pt = body.chart_point(u);
        Vec<D> w = normalized(pt);
        RadialJet<D> rj = body.derivatives(w);
        for (int it = 0; it < 4 && norm(rj.gradient) > 1e-13 * scale; ++it) {
            const auto sys = detail::tangent_system<D>(w, rj.gradient, rj.hessian);
            Vec<D> w2 = w;
            double step = 0.0;
            if (!detail::newton_step<D>(sys, w2, 1e-3, step)) break;
            const RadialJet<D> rj2 = body.derivatives(w2);
            if (!(norm(rj2.gradient) < norm(rj.gradient))) break;
            w = w2;
            rj = rj2;
        }
        const auto sys = detail::tangent_system<D>(w, rj.gradient, rj.hessian);
        const auto eig = detail::eigenvalues<D>(sys.hess);
        EquilibriumPoint<D> ep;
        ep.u = w;
        ep.r = rj.value;
        ep.p = scaled(w, rj.value);
        ep.gradient_norm = norm(rj.gradient);
        for (double ev : eig) {
            if (!(std::abs(ev) > opt.degeneracy_tol * scale))
                throw Error(ErrorCode::Degenerate, where,
                            "Hessian eigenvalue " + fmt17(ev) + " at a critical point");
            ep.hessian_eigs.push_back(ev);
            if (ev < 0.0) ++ep.index;
        }
        // A rounded direction cannot resolve the gradient below eps |H|; for
        // strongly stretched bodies that floor exceeds root_tol * scale.
        double hmax = 0.0;
        for (double ev : eig) hmax = std::max(hmax, std::abs(ev));
        const double gtol = std::max(opt.root_tol * scale, 64.0 * std::numeric_limits<double>::epsilon() * hmax);
        if (ep.gradient_norm > gtol)
            throw Error(ErrorCode::Degenerate, where, "root did not converge, |grad r| = " + fmt17(ep.gradient_norm));
        ep.kind = ep.index == 0 ? EquilibriumKind::stable
                  : ep.index == D - 1 ? EquilibriumKind::unstable
                                      : EquilibriumKind::saddle;
        out.push_back(ep);
    }
    std::sort(out.begin(), out.end(), [](const EquilibriumPoint<D>& a, const EquilibriumPoint<D>& b) {
        if (a.index != b.index) return a.index < b.index;
        return a.u < b.u;
    });
    return out;
}

template <int D>
EquilibriumCounts tally(const std::vector<EquilibriumPoint<D>>& eq) {
    EquilibriumCounts c;
    for (const auto& e : eq) {
        if (e.kind == EquilibriumKind::stable) ++c.S;
        else if (e.kind == EquilibriumKind::unstable) ++c.U;
        else ++c.N;
    }
    c.T = c.S + c.U + c.N;
    return c;
}

inline std::string counts_string(const EquilibriumCounts& c) {
    return "S=" + std::to_string(c.S) + " U=" + std::to_string(c.U) + " N=" + std::to_string(c.N) +
           " T=" + std::to_string(c.T);
}

// Equilibria that pass the Euler-characteristic check. On failure the search
// is repeated with own-direction seeds added, then at double density.
template <int D>
std::vector<EquilibriumPoint<D>> checked_equilibria(const Body<D>& body, const EquilibriumOptions& opt = {}) {
    EquilibriumOptions o = opt;
    if (o.resolution <= 0) o.resolution = kEquilibriumResolution<D>;
    EquilibriumCounts c;
    for (int attempt = 0; attempt < 3; ++attempt) {
        o.own_chart = attempt > 0;
        if (attempt == 2) o.resolution *= 2;
        auto eq = find_equilibria<D>(body, o);
        c = tally(eq);
        if (satisfies_euler_identity<D>(c)) return eq;
    }
    throw Error(ErrorCode::PoincareHopfViolation, "counts", counts_string(c));
}

template <int D>
EquilibriumCounts counts(const Body<D>& body, const EquilibriumOptions& opt = {}) {
    return tally(checked_equilibria<D>(body, opt));
}

struct CountsRow {
    double t = 0.0;
    EquilibriumCounts counts;
};

template <int D>
std::vector<CountsRow> counts_vs_t(const Body<D>& body, const VecIn<D>& v, const std::vector<double>& t_grid,
                                   const EquilibriumOptions& opt = {}) {
    if (t_grid.empty()) throw Error(ErrorCode::EmptyGrid, "counts_vs_t", "empty t grid");
    std::vector<CountsRow> rows;
    for (double t : t_grid) rows.push_back({t, counts<D>(apply_affinity<D>(body, v, t), opt)});
    return rows;
}

struct TStar {
    double t_star = 0.0;
    std::vector<CountsRow> rows;
};

// Smallest grid t after which U = 2 holds on the whole ascending log grid
// from 1 to t_max (about ten points per decade).
template <int D>
TStar find_t_star(const Body<D>& body, const VecIn<D>& v, double t_max, const EquilibriumOptions& opt = {}) {
    if (!(t_max >= 10.0)) throw Error(ErrorCode::BadSpec, "find_t_star", "t_max must be at least 10");
    const int n = static_cast<int>(std::ceil(10.0 * std::log10(t_max))) + 1;
    TStar ts;
    ts.rows = counts_vs_t<D>(body, v, log_grid(1.0, t_max, n), opt);
    if (ts.rows.back().counts.U != 2)
        throw Error(ErrorCode::NotReached, "find_t_star",
                    "at t_max " + fmt17(t_max) + ": " + counts_string(ts.rows.back().counts));
    std::size_t k = ts.rows.size() - 1;
    while (k > 0 && ts.rows[k - 1].counts.U == 2) --k;
    ts.t_star = ts.rows[k].t;
    return ts;
}

// ---------------------------------------------------------------------------
// Planar graph method: the boundary of K(t) over H is (x, t f(x)) and the
// equilibria on it are the roots of R_t(x) = x + t^2 f(x) f'(x).

struct GraphFunction {
    double a = 0.0, b = 0.0;
    std::function<double(double)> f;
    std::function<double(double)> df;
};

inline std::vector<double> equilibria_2d_graph(const GraphFunction& g, double t, double tol = 1e-12) {
    const int cells = 4096;
    const double len = g.b - g.a;
    auto resid = [&](double x) { return x + t * t * g.f(x) * g.df(x); };
    // Keep the scan off the endpoints, where f' is unbounded.
    const double lo = g.a + 1e-9 * len, hi = g.b - 1e-9 * len;
    std::vector<double> roots;
    double x0 = lo, r0 = resid(x0);
    for (int k = 1; k <= cells; ++k) {
        const double x1 = lo + (hi - lo) * k / cells;
        const double r1 = resid(x1);
        if (r0 == 0.0) {
            roots.push_back(x0);
        } else if ((r0 < 0.0) != (r1 < 0.0) && r1 != 0.0) {
            double a = x0, b = x1, ra = r0;
            for (int it = 0; it < 200 && b - a > tol * len; ++it) {
                const double mid = 0.5 * (a + b);
                const double rm = resid(mid);
                if (rm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((rm < 0.0) == (ra < 0.0)) {
                    a = mid;
                    ra = rm;
                } else {
                    b = mid;
                }
            }
            const double x = 0.5 * (a + b);
            roots.push_back(x);
        }
        x0 = x1;
        r0 = r1;
    }
    if (r0 == 0.0) roots.push_back(x0);
    return roots;
}

struct GraphHalves {
    Vec<2> h{}, v{};
    GraphFunction upper, lower;
};

namespace detail {

inline Vec<2> unit_angle(double th) { return {std::cos(th), std::sin(th)}; }

// Boundary point of a 2D body at polar angle th and its theta-derivative.
inline std::pair<Vec<2>, Vec<2>> boundary_with_tangent(const Body<2>& body, double th) {
    const Vec<2> e = unit_angle(th), ep{-e[1], e[0]};
    const RadialJet<2> j = body.derivatives(e);
    const double dr = dot(j.gradient, ep);
    return {scaled(e, j.value), scaled(e, dr) + scaled(ep, j.value)};
}

// Angle in (lo, hi) where <p'(th), dir> = 0, assuming a sign change.
inline double silhouette_angle(const Body<2>& body, const Vec<2>& dir, double lo, double hi) {
    auto g = [&](double th) { return dot(boundary_with_tangent(body, th).second, dir); };
    double glo = g(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Upper and lower boundary graphs of a planar body over H = v^perp, with
// abscissa along h = (v_y, -v_x) and height along v.
inline GraphHalves graph_halves(const Body<2>& body, const Vec<2>& v) {
    check_direction<2>(v, "graph_halves");
    GraphHalves gh;
    gh.v = v;
    gh.h = {v[1], -v[0]};
    const Vec<2> h = gh.h;
    const double base = std::atan2(h[1], h[0]);
    // The point of largest abscissa lies near angle `base`, the smallest near
    // base + pi; the derivative of the abscissa changes sign at each.
    const double th_b = detail::silhouette_angle(body, h, base - 0.5 * kPi, base + 0.5 * kPi);
    const double th_a = detail::silhouette_angle(body, h, base + 0.5 * kPi, base + 1.5 * kPi);
    const Vec<2> pb = detail::boundary_with_tangent(body, th_b).first;
    const Vec<2> pa = detail::boundary_with_tangent(body, th_a).first;
    const double a = dot(pa, h), b = dot(pb, h);

    // Along [th_b, th_a] (upper arc) the abscissa decreases from b to a; along
    // [th_a, th_b + 2 pi] (lower arc) it increases from a to b.
    auto make = [body, h, v, a, b](double th_start, double th_end, bool decreasing) {
        auto locate = [=](double x) {
            double lo = th_start, hi = th_end;
            for (int it = 0; it < 100 && hi - lo > 4e-16 * (1.0 + std::abs(hi)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double xm = dot(detail::boundary_with_tangent(body, mid).first, h);
                if ((xm > x) == decreasing)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        };
        GraphFunction g;
        g.a = a;
        g.b = b;
        g.f = [=](double x) { return dot(detail::boundary_with_tangent(body, locate(x)).first, v); };
        g.df = [=](double x) {
            const auto [p, dp] = detail::boundary_with_tangent(body, locate(x));
            return dot(dp, v) / dot(dp, h);
        };
        return g;
    };
    gh.upper = make(th_b, th_a, true);
    gh.lower = make(th_a, th_b + 2.0 * kPi, false);
    return gh;
}

// Equilibrium directions of K(t) from the graph method: interior roots of
// R_t on both halves, plus projection endpoints lying on H (there the
// tangent is vertical and the equation degenerates).
inline std::vector<Vec<2>> graph_equilibrium_directions(const Body<2>& body, const Vec<2>& v, double t,
                                                        double tol = 1e-12) {
    const GraphHalves gh = graph_halves(body, v);
    std::vector<Vec<2>> dirs;
    for (const GraphFunction* g : {&gh.upper, &gh.lower}) {
        for (double x : equilibria_2d_graph(*g, t, tol))
            dirs.push_back(normalized(scaled(gh.h, x) + scaled(gh.v, t * g->f(x))));
    }
    const double scale = gh.upper.b - gh.upper.a;
    for (double x : {gh.upper.a, gh.upper.b}) {
        const double y = gh.upper.f(x);
        if (std::abs(y) <= 1e-9 * scale) dirs.push_back(normalized(scaled(gh.h, x)));
    }
    return dirs;
}

// Residuals of x_i + t^2 f d_i f = 0 at an equilibrium p of K(t) with outward
// normal n: with p = (x, t f) over H and n proportional to (-t grad f, +-1),
// each residual equals <p, b_i> - <p, v> <n, b_i> / <n, v>. Points whose
// normal is nearly parallel to H are skipped (returned empty).
inline std::vector<double> graph_system_residuals(const Body<3>& body_t, const EquilibriumPoint<3>& e,
                                                  const Vec<3>& v, double min_normal = 1e-3) {
    const RadialJet<3> rj = body_t.derivatives(e.u);
    const Vec<3> n = normalized(scaled(e.u, rj.value) - rj.gradient);
    const double nv = dot(n, v);
    if (std::abs(nv) < min_normal) return {};
    const auto b = complement_basis<3>(v);
    std::vector<double> out;
    for (const auto& bi : b) out.push_back(dot(e.p, bi) - dot(e.p, v) * dot(n, bi) / nv);
    return out;
}

struct CorollaryReport {
    EquilibriumCounts stretched;
    EquilibriumCounts section;
    bool pass = false;
};

// Large-t index correspondence: U(K(t)) = 2, S(K(t)) = S(K_0), N(K(t)) = U(K_0).
inline CorollaryReport corollary_check(const Body<3>& body, const Vec<3>& v, double t = 50.0,
                                       const EquilibriumOptions& opt = {}) {
    CorollaryReport rep;
    rep.stretched = counts<3>(apply_affinity<3>(body, v, t), opt);
    rep.section = counts<2>(section_body<3>(body, v));
    rep.pass = rep.stretched.U == 2 && rep.stretched.S == rep.section.S && rep.stretched.N == rep.section.U;
    return rep;
}

inline std::string counts_csv(const std::vector<CountsRow>& rows) {
    std::string out = "t,S,U,N,T\n";
    for (const auto& r : rows)
        out += join({fmt17(r.t), std::to_string(r.counts.S), std::to_string(r.counts.U),
                     std::to_string(r.counts.N), std::to_string(r.counts.T)}) +
               "\n";
    return out;
}

template <int D>
std::string equilibria_csv(const std::vector<EquilibriumPoint<D>>& eq) {
    std::string out = D == 2 ? "ux,uy,index,r\n" : "ux,uy,uz,index,r\n";
    for (const auto& e : eq) {
        std::vector<std::string> cols;
        for (double x : e.u) cols.push_back(fmt17(x));
        cols.push_back(std::to_string(e.index));
        cols.push_back(fmt17(e.r));
        out += join(cols) + "\n";
    }
    return out;
}

}  // namespace affq

#endif  // AFFQ_EQUILIBRIA_HPP
