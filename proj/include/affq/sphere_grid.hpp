#ifndef AFFQ_SPHERE_GRID_HPP
#define AFFQ_SPHERE_GRID_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "affq/error.hpp"
#include "affq/linalg.hpp"

namespace affq {

constexpr double kPi = std::numbers::pi;

template <int D>
constexpr double sphere_measure() {
    return D == 2 ? 2.0 * kPi : 4.0 * kPi;
}

struct GaussLegendre {
    std::vector<double> nodes;  // descending, in (-1, 1)
    std::vector<double> weights;
};

// Nodes by Newton iteration on P_n; the lower half mirrors the upper half so
// the rule is exactly symmetric.
inline GaussLegendre gauss_legendre(int n) {
    GaussLegendre gl;
    gl.nodes.assign(n, 0.0);
    gl.weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.nodes[i] = x;
        gl.nodes[n - 1 - i] = -x;
        gl.weights[i] = w;
        gl.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) gl.nodes[n / 2] = 0.0;
    return gl;
}

// Quadrature on the unit circle (D = 2) or sphere (D = 3).
template <int D>
struct SphereGrid {
    int resolution = 0;
    std::vector<Vec<D>> nodes;
    std::vector<double> weights;
    // dim 3 only: nodes are stored polar-row major, rows x azimuths.
    int rows = 0;
    int cols = 0;

    std::size_t size() const { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const {
        // Fixed summation order keeps results reproducible bit for bit.
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

// dim 2: `resolution` uniform angles (trapezoid weights).
// dim 3: `resolution` Gauss-Legendre rows in cos(theta) times 2*resolution
// uniform azimuths.
template <int D>
SphereGrid<D> sphere_grid(int resolution) {
    if (resolution < 16)
        throw Error(ErrorCode::BadSpec, "sphere_grid", "resolution must be at least 16");
    SphereGrid<D> grid;
    grid.resolution = resolution;
    if constexpr (D == 2) {
        grid.rows = 1;
        grid.cols = resolution;
        const double w = 2.0 * kPi / resolution;
        const int half = resolution / 2;
        for (int j = 0; j < resolution; ++j) {
            const bool mirrored = resolution % 2 == 0 && j >= half;
            const double a = 2.0 * kPi * (mirrored ? j - half : j) / resolution;
            const double sign = mirrored ? -1.0 : 1.0;
            grid.nodes.push_back({sign * std::cos(a), sign * std::sin(a)});
            grid.weights.push_back(w);
        }
    } else {
        const GaussLegendre gl = gauss_legendre(resolution);
        const int cols = 2 * resolution;
        grid.rows = resolution;
        grid.cols = cols;
        const double dphi = 2.0 * kPi / cols;
        for (int i = 0; i < resolution; ++i) {
            const double z = gl.nodes[i];
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            for (int j = 0; j < cols; ++j) {
                // Second half of each ring is the exact negation of the first,
                // so the antipode of a node is bitwise its negative.
                const int jj = j % (cols / 2);
                const double sign = j < cols / 2 ? 1.0 : -1.0;
                const double phi = dphi * jj;
                grid.nodes.push_back({sign * s * std::cos(phi), sign * s * std::sin(phi), z});
                grid.weights.push_back(gl.weights[i] * dphi);
            }
        }
    }
    return grid;
}

// Index of the antipode of node k (both layouts are antipodally closed when
// the azimuth count is even).
template <int D>
std::size_t antipode_index(const SphereGrid<D>& grid, std::size_t k) {
    if constexpr (D == 2) {
        return (k + grid.cols / 2) % grid.cols;
    } else {
        const std::size_t i = k / grid.cols, j = k % grid.cols;
        return (grid.rows - 1 - i) * grid.cols + (j + grid.cols / 2) % grid.cols;
    }
}

}  // namespace affq

#endif  // AFFQ_SPHERE_GRID_HPP
