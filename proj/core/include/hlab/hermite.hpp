#ifndef HLAB_HERMITE_HPP
#define HLAB_HERMITE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hlab/util.hpp"

namespace hlab {

/// One tensor eigenfunction h_n = e_{n_1} ... e_{n_d} of H = -Laplacian + |x|^2.
/// lambda_sq = 2(n_1 + ... + n_d) + d, exactly, as an integer.
struct Mode {
    std::array<int, 3> index{0, 0, 0};  // components beyond `dimension` stay 0
    long lambda_sq = 0;
    int rank = 0;
};

/// Ordered catalogue of all modes with lambda_sq <= cutoff for one dimension.
/// Sorted by lambda_sq ascending, ties broken lexicographically on the
/// multi-index.
struct ModeTable {
    int dimension = 1;
    long cutoff = 1;
    std::vector<Mode> entries;
    int max_index_1d = 0;  // largest component appearing in any entry

    std::size_t size() const { return entries.size(); }
    double lambda(std::size_t rank) const { return std::sqrt(double(entries[rank].lambda_sq)); }
};

ModeTable build_mode_table(int dimension, long cutoff_lambda_sq);

/// A function represented by its Hermite coefficients over a ModeTable.
struct SpectralField {
    const ModeTable* table = nullptr;
    std::vector<cplx> coeffs;

    SpectralField() = default;
    explicit SpectralField(const ModeTable& t) : table(&t), coeffs(t.size(), cplx{}) {}
    SpectralField(const ModeTable& t, std::vector<cplx> c);

    std::size_t size() const { return coeffs.size(); }
    bool finite() const;
};

/// Uniform 1D grid, mirrored across the origin, used for sup norms, flat
/// Sobolev norms and tail integrals.
struct DenseGrid {
    double halfwidth = 0;
    double step = 0;
    std::vector<double> points() const;
};

/// Tensor Gauss-Hermite rule for the weight e^{-x^2}. Weights are kept in
/// log-space; corrected_weight(i) = exp(log w_i + x_i^2) is the factor for
/// integrating functions that are not polynomial * e^{-x^2}.
struct QuadratureGrid {
    int order = 0;
    std::vector<double> nodes_1d;
    std::vector<double> log_weights_1d;
    std::optional<DenseGrid> dense;

    double weight(int i) const { return std::exp(log_weights_1d[i]); }
    double corrected_weight(int i) const {
        return std::exp(log_weights_1d[i] + nodes_1d[i] * nodes_1d[i]);
    }
};

QuadratureGrid gauss_hermite_grid(int order, double dense_halfwidth = 0, double dense_step = 0.02);

/// Rule exact for P(x) e^{-beta x^2} with deg P <= 2*order - 1: nodes are the
/// standard ones divided by sqrt(beta), weights already corrected (they
/// integrate the full integrand, Gaussian included).
struct ScaledRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
ScaledRule scaled_gauss_rule(int order, double beta);

/// Values of the L^2-normalized Hermite functions e_0..e_n at each point,
/// by the weighted three-term recurrence (no overflow for large n).
/// Row k of the result holds e_k.
Eigen::MatrixXd hermite_eval_all(int n_max, std::span<const double> points);

std::vector<double> hermite_eval_1d(int n, std::span<const double> points);

/// e_n'(x) = sqrt(n/2) e_{n-1}(x) - sqrt((n+1)/2) e_{n+1}(x).
std::vector<double> hermite_deriv_1d(int n, std::span<const double> points);

/// Values of a field at the tensor quadrature nodes (row-major over axes,
/// last axis fastest). Separable: cost is one dense contraction per axis.
std::vector<cplx> synthesize(const SpectralField& field, const QuadratureGrid& grid);

/// Values of a field at arbitrary tensor points given per-axis coordinate
/// vectors (used for dense grids and the lens map).
std::vector<cplx> synthesize_at(const SpectralField& field,
                                const std::vector<std::vector<double>>& axis_points);

/// Quadrature analysis c_n = integral u h_n dx from values at tensor nodes.
/// Requires grid.order >= table.max_index_1d + 1 (Gram exactness).
SpectralField analyze(std::span<const cplx> values, const QuadratureGrid& grid,
                      const ModeTable& table);

/// L^2(R^d) inner product of two value arrays sampled on the tensor nodes of
/// `grid`, using corrected weights.
cplx quad_inner_product(std::span<const cplx> a, std::span<const cplx> b,
                        const QuadratureGrid& grid, int dimension);

}  // namespace hlab

#endif
