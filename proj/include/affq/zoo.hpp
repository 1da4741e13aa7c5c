#ifndef AFFQ_ZOO_HPP
#define AFFQ_ZOO_HPP

// Concrete test bodies.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "affq/body.hpp"
#include "affq/body_spec.hpp"
#include "affq/error.hpp"
#include "affq/shape.hpp"

namespace affq {

inline BodySpec ellipsoid_spec(const std::vector<double>& axes, std::string label = "") {
    BodySpec s;
    s.dim = static_cast<int>(axes.size());
    s.kind = BodyKind::ellipsoid;
    s.coefficients = axes;
    s.label = label.empty() ? "ellipsoid" : label;
    return s;
}

// Pads a0, a1, b1, a2, ... to an odd count.
inline BodySpec fourier_spec(std::vector<double> coeffs, std::string label = "") {
    if (coeffs.size() % 2 == 0) coeffs.push_back(0.0);
    BodySpec s;
    s.dim = 2;
    s.kind = BodyKind::fourier2d;
    s.coefficients = std::move(coeffs);
    s.label = label.empty() ? "fourier2d" : label;
    return s;
}

// Coefficients of 1 + sum amp_lm Y_lm, given as (l, m, amp) terms; the
// constant is carried by Y_00.
struct HarmonicTerm {
    int l, m;
    double amplitude;
};

inline BodySpec harmonic_spec(const std::vector<HarmonicTerm>& terms, std::string label = "") {
    int degree = 0;
    for (const auto& t : terms) degree = std::max(degree, t.l);
    BodySpec s;
    s.dim = 3;
    s.kind = BodyKind::harmonics3d;
    s.coefficients.assign((degree + 1) * (degree + 1), 0.0);
    s.coefficients[0] = 1.0 / harmonic_normalization(0, 0);
    for (const auto& t : terms) s.coefficients[harmonic_index(t.l, t.m)] += t.amplitude;
    s.label = label.empty() ? "harmonics3d" : label;
    return s;
}

// Uniform double in [-1, 1) from the raw 64-bit stream; independent of the
// standard library's distribution implementations.
inline double uniform_pm1(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

// r = 1 + amp * Y, Y a random combination of degree-`degree` harmonics with
// max |Y| = 1 on a dense grid. The amplitude is reduced by factors of 0.8
// until the body validates as convex.
inline BodySpec perturbed_sphere_spec(int degree, double amp, std::uint64_t seed, double* used_amp = nullptr) {
    if (degree < 2) throw Error(ErrorCode::BadSpec, "generate", "perturbation degree must be at least 2");
    if (!(amp > 0.0)) throw Error(ErrorCode::BadSpec, "generate", "amplitude must be positive");
    std::mt19937_64 rng(seed);
    std::vector<double> y((degree + 1) * (degree + 1), 0.0);
    for (int m = -degree; m <= degree; ++m) y[harmonic_index(degree, m)] = uniform_pm1(rng);
    const SphereGrid<3> grid = sphere_grid<3>(64);
    double ymax = 0.0;
    for (const auto& u : grid.nodes) ymax = std::max(ymax, std::abs(evaluate_harmonics(y, degree, u)));
    for (auto& c : y) c /= ymax;
    for (int attempt = 0; attempt < 60; ++attempt, amp *= 0.8) {
        BodySpec s;
        s.dim = 3;
        s.kind = BodyKind::harmonics3d;
        s.coefficients = y;
        for (auto& c : s.coefficients) c *= amp;
        s.coefficients[0] = 1.0 / harmonic_normalization(0, 0);
        s.label = "perturbed-sphere-l" + std::to_string(degree) + "-s" + std::to_string(seed);
        try {
            make_body(s);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NonConvex || e.code() == ErrorCode::NonPositiveRadial) continue;
            throw;
        }
        if (used_amp) *used_amp = amp;
        return s;
    }
    throw Error(ErrorCode::NonConvex, "generate", "no convex amplitude found");
}

// Seed of the zoo's perturbed sphere: U(1) = 4 at amplitude 0.12 (clamped).
constexpr std::uint64_t kPerturbedSeed = 142;

inline std::vector<BodySpec> zoo_specs() {
    return {
        ellipsoid_spec({1.0, 1.2, 1.5}, "ellipsoid-1-1.2-1.5"),
        ellipsoid_spec({1.0, 1.4}, "ellipse-1-1.4"),
        fourier_spec({1.0, 0.0, 0.0, 0.075, 0.0, 0.0, 0.025}, "fourier-c2-s3"),
        fourier_spec({1.0, 0.1, 0.0, 0.0, 0.0, 0.05, 0.0}, "fourier-c1-c3"),
        perturbed_sphere_spec(4, 0.12, kPerturbedSeed),
        harmonic_spec({{3, 3, 0.06}, {2, 0, 0.05}}, "harmonic-y33"),
        harmonic_spec({{3, 2, 0.08}}, "harmonic-y32"),
        harmonic_spec({{2, 0, 0.1}, {2, 2, 0.06}, {3, 1, 0.04}}, "harmonic-mixed"),
        ellipsoid_spec({1.0, 0.7}, "ellipse-1-0.7"),
        ellipsoid_spec({0.8, 1.1, 1.3}, "ellipsoid-0.8-1.1-1.3"),
    };
}

// The five bodies of the averaging experiment.
inline std::vector<BodySpec> conjecture_zoo_specs() {
    const auto z = zoo_specs();
    return {z[0], z[1], z[2], z[4], z[6]};
}

}  // namespace affq

#endif  // AFFQ_ZOO_HPP
