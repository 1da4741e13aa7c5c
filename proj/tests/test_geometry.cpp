#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace affq;

namespace {

Body<3> body3(const BodySpec& s) { return std::get<Body<3>>(make_body(s)); }
Body<2> body2(const BodySpec& s) { return std::get<Body<2>>(make_body(s)); }

}  // namespace

TEST(Jet, ProductAndQuotientMatchFiniteDifferences) {
    auto f = [](auto x, auto y) { return (x * y + 2.0) / sqrt(x * x + y * y + 1.0); };
    const double x0 = 0.3, y0 = -0.7;
    Jet<2> x = Jet<2>::variable(x0, 0), y = Jet<2>::variable(y0, 1);
    const Jet<2> j = f(x, y);
    const double h = 1e-4;
    auto fd = [&](double a, double b) { return f(a, b); };
    EXPECT_NEAR(j.v, fd(x0, y0), 1e-15);
    EXPECT_NEAR(j.g[0], (fd(x0 + h, y0) - fd(x0 - h, y0)) / (2 * h), 1e-8);
    EXPECT_NEAR(j.g[1], (fd(x0, y0 + h) - fd(x0, y0 - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(j.hess(0, 1), (fd(x0 + h, y0 + h) - fd(x0 + h, y0 - h) - fd(x0 - h, y0 + h) + fd(x0 - h, y0 - h)) / (4 * h * h),
                1e-6);
    EXPECT_NEAR(j.hess(0, 0), (fd(x0 + h, y0) - 2 * fd(x0, y0) + fd(x0 - h, y0)) / (h * h), 1e-6);
}

TEST(SphereGrid, IntegratesLowDegreePolynomialsExactly) {
    const auto g3 = sphere_grid<3>(16);
    EXPECT_NEAR(g3.integrate([](const Vec<3>&) { return 1.0; }), 4.0 * kPi, 1e-13);
    EXPECT_NEAR(g3.integrate([](const Vec<3>& u) { return u[2] * u[2]; }), 4.0 * kPi / 3.0, 1e-13);
    EXPECT_NEAR(g3.integrate([](const Vec<3>& u) { return u[0] * u[0] * u[1] * u[1]; }), 4.0 * kPi / 15.0, 1e-13);
    const auto g2 = sphere_grid<2>(32);
    EXPECT_NEAR(g2.integrate([](const Vec<2>& u) { return u[0] * u[0]; }), kPi, 1e-13);
}

TEST(SphereGrid, AntipodesAreBitwiseNegatives) {
    const auto g3 = sphere_grid<3>(20);
    for (std::size_t k = 0; k < g3.size(); ++k) {
        const auto& a = g3.nodes[k];
        const auto& b = g3.nodes[antipode_index<3>(g3, k)];
        for (int i = 0; i < 3; ++i) EXPECT_EQ(a[i], -b[i]);
    }
    const auto g2 = sphere_grid<2>(32);
    for (std::size_t k = 0; k < g2.size(); ++k)
        for (int i = 0; i < 2; ++i) EXPECT_EQ(g2.nodes[k][i], -g2.nodes[antipode_index<2>(g2, k)][i]);
}

TEST(SphereGrid, RejectsCoarseResolution) {
    EXPECT_THROW(sphere_grid<3>(8), Error);
}

TEST(Body, BallVolumeAndArea) {
    const auto b = body3(ellipsoid_spec({1, 1, 1}));
    EXPECT_NEAR(volume(b), 4.0 * kPi / 3.0, 1e-12);
    EXPECT_NEAR(surface_area(b), 4.0 * kPi, 1e-11);
    EXPECT_NEAR(iso_ratio(b), 1.0, 1e-12);
}

TEST(Body, EllipsoidVolumeIsProductOfAxes) {
    const auto b = body3(ellipsoid_spec({1, 1.2, 1.5}));
    EXPECT_NEAR(volume(b) / (4.0 * kPi / 3.0 * 1.8), 1.0, 1e-12);
}

TEST(Body, SpheroidAreaMatchesClosedForm) {
    for (double c : {0.25, 0.5, 2.0, 4.0}) {
        const auto b = body3(ellipsoid_spec({1, 1, c}));
        EXPECT_NEAR(surface_area(b) / oracle::spheroid_area(1.0, c), 1.0, 1e-6) << "c = " << c;
    }
}

TEST(Body, EllipseAreaAndPerimeter) {
    const auto b = body2(ellipsoid_spec({1.4, 1.0}));
    EXPECT_NEAR(volume(b), kPi * 1.4, 1e-12);
    EXPECT_NEAR(surface_area(b) / oracle::ellipse_perimeter(1.4, 1.0), 1.0, 1e-10);
}

TEST(Body, FourierBodyIsRecenteredToItsCentroid) {
    const auto b = body2(fourier_spec({1.0, 0.1, 0.0, 0.0, 0.0, 0.05, 0.0}));
    const auto m1 = oracle::polygon_moments(b, 1 << 14);
    const auto m2 = oracle::polygon_moments(b, 1 << 15);
    EXPECT_LT(std::abs(oracle::richardson2(m1.centroid[0], m2.centroid[0])), 1e-9);
    EXPECT_LT(std::abs(oracle::richardson2(m1.centroid[1], m2.centroid[1])), 1e-9);
    // The recentering offset undoes a nonzero centroid.
    EXPECT_GT(norm(b.offset()), 1e-3);
    EXPECT_NEAR(volume(b), oracle::richardson2(m1.area, m2.area), 1e-9);
}

TEST(Body, HarmonicBodyIsRecenteredToItsCentroid) {
    const auto b = body3(harmonic_spec({{1, 0, 0.05}, {2, 1, 0.04}, {3, -2, 0.03}}));
    const auto m1 = oracle::mesh_moments(b, 300);
    const auto m2 = oracle::mesh_moments(b, 600);
    for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(oracle::richardson2(m1.centroid[i], m2.centroid[i])), 1e-6);
    EXPECT_NEAR(volume(b) / oracle::richardson2(m1.volume, m2.volume), 1.0, 1e-7);
    EXPECT_NEAR(surface_area(b) / oracle::richardson2(m1.area, m2.area), 1.0, 1e-6);
}

TEST(Body, ValidationRejectsNonConvexAndNonPositiveBodies) {
    try {
        make_body(fourier_spec({1.0, 0.0, 0.0, 0.15, 0.0, 0.0, 0.05}));
        FAIL() << "expected NonConvex";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonConvex);
    }
    try {
        make_body(fourier_spec({1.0, 1.5}));
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_TRUE(e.code() == ErrorCode::NonPositiveRadial || e.code() == ErrorCode::NonConvex);
    }
    BodySpec bad = ellipsoid_spec({1.0, -1.0, 1.0});
    EXPECT_THROW(make_body(bad), Error);
}

TEST(Body, AffinityRadialMatchesMembershipOracle) {
    const auto b = body3(harmonic_spec({{1, 1, 0.04}, {2, 0, 0.08}, {3, 3, 0.03}}));
    ASSERT_TRUE(b.has_offset());
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec<3> v = oracle::random_direction<3>(rng);
        const double t = std::exp(3.0 * (std::uniform_real_distribution<double>(-1, 1)(rng)));
        const auto bt = apply_affinity<3>(b, v, t);
        const Vec<3> w = oracle::random_direction<3>(rng);
        EXPECT_NEAR(bt(w) / oracle::ray_exit<3>(bt, w), 1.0, 1e-12);
    }
}

TEST(Body, AffinityRejectsBadArguments) {
    const auto b = body3(ellipsoid_spec({1, 1.2, 1.5}));
    EXPECT_THROW(apply_affinity<3>(b, Vec<3>{0, 0, 1}, 0.0), Error);
    EXPECT_THROW(apply_affinity<3>(b, Vec<3>{0, 0, 2}, 1.0), Error);
}

TEST(Body, RadialJetMatchesFiniteDifferences) {
    const auto b = apply_affinity<3>(body3(harmonic_spec({{2, 1, 0.05}, {3, 0, 0.04}})), normalized(Vec<3>{1, 2, 2}), 1.7);
    const Vec<3> u = normalized(Vec<3>{0.3, -0.5, 0.8});
    const RadialJet<3> j = b.derivatives(u);
    const auto frame = tangent_frame<3>(u);
    const double h = 1e-5;
    for (const auto& e : frame) {
        const double fd = (b(normalized(u + scaled(e, h))) - b(normalized(u - scaled(e, h)))) / (2 * h);
        EXPECT_NEAR(dot(j.gradient, e), fd, 1e-8);
    }
}

TEST(Body, SectionRadialMatchesPlaneRayMarch) {
    const auto b = body3(harmonic_spec({{1, 0, 0.05}, {2, 2, 0.06}, {3, 1, 0.03}}));
    const Vec<3> v = normalized(Vec<3>{0.2, -0.4, 0.9});
    const auto sec = section_body<3>(b, v);
    const auto basis = section_basis(v);
    // Section coordinates x map to 3D point x0 p + x1 q; the section body is
    // centered on its own centroid, so rays start there.
    const Vec<2> c2 = scaled(sec.offset(), -1.0);
    const Vec<3> origin = scaled(basis[0], c2[0]) + scaled(basis[1], c2[1]);
    for (int k = 0; k < 24; ++k) {
        const double th = 2.0 * kPi * (k + 0.37) / 24;
        const Vec<2> w{std::cos(th), std::sin(th)};
        const Vec<3> w3 = scaled(basis[0], w[0]) + scaled(basis[1], w[1]);
        EXPECT_NEAR(sec(w) / oracle::ray_exit<3>(b, w3, origin), 1.0, 1e-11);
    }
    const auto m1 = oracle::polygon_moments(sec, 1 << 12);
    const auto m2 = oracle::polygon_moments(sec, 1 << 13);
    EXPECT_LT(norm(Vec<2>{oracle::richardson2(m1.centroid[0], m2.centroid[0]),
                          oracle::richardson2(m1.centroid[1], m2.centroid[1])}),
              1e-9);
}

TEST(BodySpec, JsonRoundTrip) {
    const BodySpec s = harmonic_spec({{2, 0, 0.1}, {3, -1, 0.02}}, "h");
    const BodySpec r = parse_body_spec(dump_body_spec(s));
    EXPECT_EQ(r.dim, s.dim);
    EXPECT_EQ(r.kind, s.kind);
    EXPECT_EQ(r.coefficients, s.coefficients);
    EXPECT_EQ(r.label, "h");
    EXPECT_THROW(parse_body_spec("{\"dim\": 3}"), Error);
    EXPECT_THROW(parse_body_spec("{\"dim\": 2, \"kind\": \"fourier2d\", \"coefficients\": [1, 0]}"), Error);
}

TEST(Zoo, AllBodiesValidate) {
    for (const auto& s : zoo_specs()) EXPECT_NO_THROW(make_body(s)) << s.label;
    EXPECT_EQ(zoo_specs().size(), 10u);
    EXPECT_EQ(conjecture_zoo_specs().size(), 5u);
}

TEST(Zoo, PerturbedSphereIsDeterministic) {
    double a1 = 0, a2 = 0;
    const auto s1 = perturbed_sphere_spec(4, 0.12, 7, &a1);
    const auto s2 = perturbed_sphere_spec(4, 0.12, 7, &a2);
    EXPECT_EQ(s1.coefficients, s2.coefficients);
    EXPECT_EQ(a1, a2);
    EXPECT_LE(a1, 0.12);
}
