#ifndef HLAB_LEGENDRE_HPP
#define HLAB_LEGENDRE_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hlab {

/// P_0..P_n at one point (standard Legendre polynomials on [-1,1]).
inline std::vector<double> legendre_column(int n, double x) {
    std::vector<double> p(n + 1);
    p[0] = 1.0;
    if (n >= 1) p[1] = x;
    for (int k = 1; k < n; ++k)
        p[k + 1] = ((2.0 * k + 1.0) * x * p[k] - double(k) * p[k - 1]) / double(k + 1);
    return p;
}

struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1,1], exact for degree <= 2n-1.
inline GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussLegendre out;
    out.nodes.resize(n);
    out.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            const auto p = legendre_column(n, x);
            dp = double(n) * (x * p[n] - p[n - 1]) / (x * x - 1.0);
            const double dx = p[n] / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        out.nodes[i] = x;
        out.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return out;
}

/// Same rule mapped to [a, b].
inline GaussLegendre gauss_legendre(int n, double a, double b) {
    GaussLegendre g = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        g.nodes[i] = mid + half * g.nodes[i];
        g.weights[i] *= half;
    }
    return g;
}

}  // namespace hlab

#endif
