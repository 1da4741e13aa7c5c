#ifndef AFFQ_BODY_HPP
#define AFFQ_BODY_HPP

// Smooth convex bodies in radial form. A Body is an affine image
//   K = { M y + c : y in root }
// of a root star body (a Shape) about its own origin. Its radial function
// about the origin is the pullback r(w) = rho(dir(M^-1 w)) / |M^-1 w| when
// c = 0 and a ray cast otherwise. Bodies produced by make_body are centered:
// the origin is the centroid.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "affq/body_spec.hpp"
#include "affq/error.hpp"
#include "affq/jet.hpp"
#include "affq/linalg.hpp"
#include "affq/shape.hpp"
#include "affq/sphere_grid.hpp"

namespace affq {

template <int D>
constexpr int kDefaultResolution = D == 2 ? 2048 : 128;

template <int D>
constexpr int kValidationResolution = D == 2 ? 1024 : 64;

constexpr double kCurvatureTolerance = 1e-8;

template <int D>
class Body {
public:
    Body(std::shared_ptr<const Shape<D>> root, const Mat<D>& linear, const Vec<D>& offset,
         double curvature_margin, bool centered, std::string label)
        : root_(std::move(root)),
          linear_(linear),
          inverse_(inverse(linear)),
          offset_(offset),
          curvature_margin_(curvature_margin),
          centered_(centered),
          label_(std::move(label)) {
        has_offset_ = std::any_of(offset_.begin(), offset_.end(), [](double x) { return x != 0.0; });
    }

    static constexpr int dim = D;

    // Radial function at a unit direction (plain or jet-valued).
    template <class S>
    S radial(const VecT<S, D>& u) const {
        if (!has_offset_) {
            const VecT<S, D> y = apply<S, D>(inverse_, u);
            const S n = norm(y);
            const S inv = 1.0 / n;
            return root_->radial(scaled(y, inv)) * inv;
        }
        return ray_cast(u);
    }

    double operator()(const Vec<D>& u) const { return radial<double>(u); }

    RadialJet<D> derivatives(const Vec<D>& u) const {
        return to_radial_jet<D>(radial<Jet<D>>(seeded_direction<D>(u)));
    }

    // Boundary point parametrised by a unit direction in root coordinates.
    template <class S>
    VecT<S, D> chart_point(const VecT<S, D>& u) const {
        const S rho = root_->radial(u);
        VecT<S, D> p = apply<S, D>(linear_, scaled(u, rho));
        for (int i = 0; i < D; ++i) p[i] += offset_[i];
        return p;
    }

    const Shape<D>& root() const { return *root_; }
    std::shared_ptr<const Shape<D>> root_ptr() const { return root_; }
    const Mat<D>& linear() const { return linear_; }
    const Mat<D>& linear_inverse() const { return inverse_; }
    const Vec<D>& offset() const { return offset_; }
    bool has_offset() const { return has_offset_; }
    double curvature_margin() const { return curvature_margin_; }
    bool centered() const { return centered_; }
    const std::string& label() const { return label_; }

    Body with(const Mat<D>& linear, const Vec<D>& offset, bool centered) const {
        return Body(root_, linear, offset, curvature_margin_, centered, label_);
    }
    Body with_label(std::string label) const {
        Body b = *this;
        b.label_ = std::move(label);
        return b;
    }

private:
    // Solves |y| = rho(dir y), y = M^-1 (lambda w - c), for lambda > 0.
    double ray_length(const Vec<D>& w) const {
        const Vec<D> dir_y = apply<double, D>(inverse_, w);
        const Vec<D> base = apply<double, D>(inverse_, offset_);
        auto phi = [&](double lam) {
            Vec<D> y;
            for (int i = 0; i < D; ++i) y[i] = lam * dir_y[i] - base[i];
            const double n = norm(y);
            return n - root_->radial(scaled(y, 1.0 / n));
        };
        double a = 0.0, fa = phi(0.0);
        const double guess = root_->radial(normalized(dir_y)) / norm(dir_y);
        double b = guess, fb = phi(b);
        for (int k = 0; fb <= 0.0 && k < 200; ++k) {
            a = b;
            fa = fb;
            b *= 1.5;
            fb = phi(b);
        }
        for (int k = 0; fa > 0.0 && k < 200; ++k) {
            b = a;
            fb = fa;
            a *= 0.5;
            fa = phi(a);
        }
        // Illinois regula falsi on the bracket [a, b] with fa < 0 < fb.
        double c = b;
        int side = 0;
        for (int it = 0; it < 200; ++it) {
            c = (a * fb - b * fa) / (fb - fa);
            const double fc = phi(c);
            if (fc == 0.0 || std::abs(b - a) <= 4e-16 * std::abs(c)) break;
            if (fc > 0.0) {
                b = c;
                fb = fc;
                if (side == -1) fa *= 0.5;
                side = -1;
            } else {
                a = c;
                fa = fc;
                if (side == +1) fb *= 0.5;
                side = +1;
            }
            if (std::abs(fc) <= 1e-16 * c) break;
        }
        return c;
    }

    template <class S>
    S ray_cast(const VecT<S, D>& u) const {
        Vec<D> w;
        for (int i = 0; i < D; ++i) w[i] = value(u[i]);
        const double lam = ray_length(w);
        if constexpr (std::is_same_v<S, double>) {
            return lam;
        } else {
            // Exact slope d(phi)/d(lambda) at the root, then two fixed-slope
            // Newton corrections in jet arithmetic; each adds one correct order.
            const Vec<D> dy = apply<double, D>(inverse_, w);
            Vec<D> y0 = apply<double, D>(inverse_, scaled(w, lam) - offset_);
            const double ny = norm(y0);
            const Vec<D> yh = scaled(y0, 1.0 / ny);
            const RadialJet<D> rj = to_radial_jet<D>(root_->radial(seeded_direction<D>(yh)));
            const double slope = dot(yh, dy) - dot(rj.gradient, dy) / ny;
            S lamj = S(lam);
            for (int k = 0; k < 2; ++k) {
                VecT<S, D> y;
                for (int i = 0; i < D; ++i) {
                    S acc = inverse_[i][0] * (lamj * u[0]);
                    for (int j = 1; j < D; ++j) acc += inverse_[i][j] * (lamj * u[j]);
                    y[i] = acc;
                }
                const Vec<D> base = apply<double, D>(inverse_, offset_);
                for (int i = 0; i < D; ++i) y[i] -= base[i];
                const S n = norm(y);
                const S resid = n - root_->radial(scaled(y, 1.0 / n));
                lamj = lamj - resid * (1.0 / slope);
            }
            return lamj;
        }
    }

    std::shared_ptr<const Shape<D>> root_;
    Mat<D> linear_;
    Mat<D> inverse_;
    Vec<D> offset_;
    bool has_offset_ = false;
    double curvature_margin_ = 0.0;
    bool centered_ = false;
    std::string label_;
};

using AnyBody = std::variant<Body<2>, Body<3>>;

// The planar section H cap K, H = v^perp, as a radial function of the in-plane
// angle; the sup over lambda of { lambda w in K } is exactly r(w) for a star
// body about the origin.
class SectionShape : public ShapeBase<2, SectionShape> {
public:
    SectionShape(Body<3> body, const Vec<3>& p, const Vec<3>& q)
        : body_(std::move(body)), p_(p), q_(q) {}

    template <class S>
    S eval(const VecT<S, 2>& x) const {
        VecT<S, 3> w;
        for (int i = 0; i < 3; ++i) w[i] = p_[i] * x[0] + q_[i] * x[1];
        return body_.radial(w);
    }

    const Vec<3>& p() const { return p_; }
    const Vec<3>& q() const { return q_; }

private:
    Body<3> body_;
    Vec<3> p_, q_;
};

// ---------------------------------------------------------------------------
// Quadrature on the body's own radial function.

template <int D>
double volume(const Body<D>& body, int resolution = kDefaultResolution<D>) {
    const SphereGrid<D> grid = sphere_grid<D>(resolution);
    return grid.integrate([&](const Vec<D>& u) { return std::pow(body(u), D); }) / D;
}

template <int D>
double surface_area(const Body<D>& body, int resolution = kDefaultResolution<D>) {
    const SphereGrid<D> grid = sphere_grid<D>(resolution);
    return grid.integrate([&](const Vec<D>& u) {
        const RadialJet<D> j = body.derivatives(u);
        const double r = j.value;
        const double elem = std::sqrt(r * r + dot(j.gradient, j.gradient));
        return D == 2 ? elem : r * elem;
    });
}

template <int D>
double mean_radius(const Body<D>& body, int resolution = kDefaultResolution<D>) {
    const SphereGrid<D> grid = sphere_grid<D>(resolution);
    return grid.integrate([&](const Vec<D>& u) { return body(u); }) / sphere_measure<D>();
}

// Centroid from radial moments: (1/(n+1)) int r^{n+1} u / ((1/n) int r^n).
template <int D, class Radial>
Vec<D> radial_centroid(const Radial& radial, int resolution) {
    const SphereGrid<D> grid = sphere_grid<D>(resolution);
    Vec<D> moment{};
    double vol = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Vec<D>& u = grid.nodes[k];
        const double r = radial(u);
        const double rn = std::pow(r, D);
        vol += grid.weights[k] * rn / D;
        for (int i = 0; i < D; ++i) moment[i] += grid.weights[k] * rn * r * u[i] / (D + 1);
    }
    for (auto& m : moment) m /= vol;
    return moment;
}

template <int D>
Vec<D> centroid(const Body<D>& body, int resolution = kDefaultResolution<D>) {
    return radial_centroid<D>([&](const Vec<D>& u) { return body(u); }, resolution);
}

// ---------------------------------------------------------------------------
// Validation.

// Principal curvatures of the root boundary at direction u, from the gauge
// function phi(x) = |x| / rho(x / |x|) whose level set phi = 1 is the boundary.
template <int D>
std::array<double, D - 1> principal_curvatures(const Shape<D>& shape, const VecIn<D>& u) {
    VecT<Jet<D>, D> x;
    for (int i = 0; i < D; ++i) x[i] = Jet<D>::variable(u[i], i);
    const Jet<D> len = norm(x);
    const Jet<D> rho = shape.radial(scaled(x, 1.0 / len));
    const Jet<D> gauge = len / rho;
    // Gradient is 0-homogeneous and the Hessian (-1)-homogeneous, so at the
    // boundary point rho(u) u the Hessian scales by 1 / rho.
    Vec<D> grad;
    Mat<D> hess;
    for (int i = 0; i < D; ++i) {
        grad[i] = gauge.g[i];
        for (int k = 0; k < D; ++k) hess[i][k] = gauge.hess(i, k) / rho.v;
    }
    const double gn = norm(grad);
    const Vec<D> n = scaled(grad, 1.0 / gn);
    const auto frame = tangent_frame<D>(n);
    const auto th = tangent_hessian<D>(hess, frame);
    if constexpr (D == 2) {
        return {th[0][0] / gn};
    } else {
        const auto ev = symmetric_eigenvalues(th[0][0] / gn, th[0][1] / gn, th[1][1] / gn);
        return {ev[0], ev[1]};
    }
}

struct ValidationReport {
    double min_radial = 0.0;
    double curvature_margin = 0.0;
};

template <int D>
ValidationReport validate_shape(const Shape<D>& shape, int resolution = kValidationResolution<D>) {
    const SphereGrid<D> grid = sphere_grid<D>(resolution);
    ValidationReport rep;
    rep.min_radial = std::numeric_limits<double>::infinity();
    rep.curvature_margin = std::numeric_limits<double>::infinity();
    for (const Vec<D>& u : grid.nodes) {
        const double r = shape.radial(u);
        rep.min_radial = std::min(rep.min_radial, r);
        if (!(r > 0.0)) continue;
        for (double k : principal_curvatures<D>(shape, u))
            rep.curvature_margin = std::min(rep.curvature_margin, std::isfinite(k) ? k : -1.0);
    }
    return rep;
}

// Validates and centers a body whose root is `shape`.
template <int D>
Body<D> finalize_body(std::shared_ptr<const Shape<D>> shape, const std::string& label,
                      const char* where) {
    const ValidationReport rep = validate_shape<D>(*shape);
    if (!(rep.min_radial > 0.0))
        throw Error(ErrorCode::NonPositiveRadial, where,
                    "radial function reaches " + std::to_string(rep.min_radial));
    if (!(rep.curvature_margin > kCurvatureTolerance))
        throw Error(ErrorCode::NonConvex, where,
                    "minimum principal curvature " + std::to_string(rep.curvature_margin));
    const Vec<D> c = radial_centroid<D>([&](const Vec<D>& u) { return shape->radial(u); },
                                        kDefaultResolution<D>);
    Vec<D> offset{};
    // Sub-rounding centroids (symmetric bodies) are left exactly centered.
    if (norm(c) > 1e-14) offset = scaled(c, -1.0);
    return Body<D>(std::move(shape), identity<D>(), offset, rep.curvature_margin, true, label);
}

template <int D>
Body<D> make_body_dim(const BodySpec& spec) {
    check_spec(spec);
    if (spec.dim != D) throw Error(ErrorCode::BadSpec, "make_body", "dimension mismatch");
    std::shared_ptr<const Shape<D>> shape;
    if (spec.kind == BodyKind::ellipsoid) {
        Vec<D> a;
        for (int i = 0; i < D; ++i) a[i] = spec.coefficients[i];
        shape = std::make_shared<EllipsoidShape<D>>(a);
    } else if constexpr (D == 2) {
        shape = std::make_shared<FourierShape>(spec.coefficients);
    } else {
        shape = std::make_shared<HarmonicShape>(spec.coefficients);
    }
    return finalize_body<D>(std::move(shape), spec.label, "make_body");
}

inline AnyBody make_body(const BodySpec& spec) {
    check_spec(spec);
    if (spec.dim == 2) return make_body_dim<2>(spec);
    return make_body_dim<3>(spec);
}

// ---------------------------------------------------------------------------
// Transformations.

template <int D>
void check_direction(const Vec<D>& v, const char* where) {
    if (std::abs(norm(v) - 1.0) > 1e-12)
        throw Error(ErrorCode::BadSpec, where, "direction must be a unit vector");
}

// K^v(t): stretch by t along v, fixing the hyperplane through the origin
// orthogonal to v. Centroids at the origin stay there.
template <int D>
Body<D> apply_affinity(const Body<D>& body, const VecIn<D>& v, double t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw Error(ErrorCode::BadRatio, "apply_affinity", "ratio must be positive");
    check_direction<D>(v, "apply_affinity");
    const Mat<D> a = orthogonal_affinity<D>(v, t);
    return body.with(a * body.linear(), apply<double, D>(a, body.offset()), body.centered());
}

template <int D>
Body<D> scale_body(const Body<D>& body, double lambda) {
    Mat<D> m = body.linear();
    for (auto& row : m)
        for (auto& x : row) x *= lambda;
    return body.with(m, scaled(body.offset(), lambda), body.centered());
}

template <int D>
Body<D> rotate_body(const Body<D>& body, const Mat<D>& rotation) {
    return body.with(rotation * body.linear(), apply<double, D>(rotation, body.offset()),
                     body.centered());
}

// In-plane orthonormal basis used for sections orthogonal to v.
inline std::array<Vec<3>, 2> section_basis(const Vec<3>& v) { return complement_basis<3>(v); }

// K_0 = H cap K as a planar body in the basis of section_basis(v), recentered
// to its own centroid.
template <int D>
Body<2> section_body(const Body<D>& body, const VecIn<D>& v) {
    if constexpr (D != 3) {
        throw Error(ErrorCode::Unsupported, "section_body", "sections require a 3D body");
    } else {
        check_direction<3>(v, "section_body");
        const auto basis = section_basis(v);
        auto shape = std::make_shared<SectionShape>(body, basis[0], basis[1]);
        return finalize_body<2>(std::move(shape), body.label() + "/section", "section_body");
    }
}

// ---------------------------------------------------------------------------
// Boundary sample in the root parametrisation: points, unit outward normals
// and area weights of the body's boundary at the nodes of a sphere grid.

template <int D>
struct BoundarySample {
    std::vector<Vec<D>> point;
    std::vector<Vec<D>> normal;
    std::vector<double> area;
};

template <int D>
BoundarySample<D> root_boundary_sample(const Shape<D>& shape, int resolution) {
    const SphereGrid<D> grid = sphere_grid<D>(resolution);
    BoundarySample<D> s;
    s.point.reserve(grid.size());
    s.normal.reserve(grid.size());
    s.area.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Vec<D>& u = grid.nodes[k];
        const RadialJet<D> j = to_radial_jet<D>(shape.radial(seeded_direction<D>(u)));
        const double r = j.value;
        const double elem = std::sqrt(r * r + dot(j.gradient, j.gradient));
        s.point.push_back(scaled(u, r));
        s.normal.push_back(scaled(scaled(u, r) - j.gradient, 1.0 / elem));
        s.area.push_back(grid.weights[k] * (D == 2 ? elem : r * elem));
    }
    return s;
}

template <int D>
BoundarySample<D> boundary_sample(const Body<D>& body, int resolution = kDefaultResolution<D>) {
    auto root = body.root().template cached<BoundarySample<D>>(
        resolution, [&] { return root_boundary_sample<D>(body.root(), resolution); });
    const Mat<D>& m = body.linear();
    const Mat<D> cof = cofactor(m);
    BoundarySample<D> s = *root;
    for (std::size_t k = 0; k < s.point.size(); ++k) {
        s.point[k] = apply<double, D>(m, root->point[k]) + body.offset();
        const Vec<D> an = apply<double, D>(cof, root->normal[k]);
        const double scale = norm(an);
        s.normal[k] = scaled(an, 1.0 / scale);
        s.area[k] = root->area[k] * scale;
    }
    return s;
}

}  // namespace affq

#endif  // AFFQ_BODY_HPP
