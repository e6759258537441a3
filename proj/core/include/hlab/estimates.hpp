#ifndef HLAB_ESTIMATES_HPP
#define HLAB_ESTIMATES_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "hlab/hermite.hpp"

namespace hlab {

struct ScalingFit {
    std::vector<double> log_x, log_y;
    double slope = 0;
    double intercept = 0;
    double max_residual = 0;
};

/// Least squares of log y against log x. Rejects fewer than 3 points or
/// non-positive coordinates.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// L^p norm of the tensor eigenfunction h_index in `dim` dimensions.
/// Factorizes across axes. p = infinity uses a resolution-aware dense scan
/// with local refinement; finite p uses Simpson integration at a step tied
/// to the mode's oscillation scale.
double hermite_lp_norm(const std::array<int, 3>& index, int dim, double p);

struct ProductNorm {
    double value = 0;           // harmonic H^s norm of the pointwise product
    double truncated_mass = 0;  // L^2 mass lost to the expansion cutoff
};

/// H^s norm of h_{i1} h_{i2} (pair) or h_{i1} h_{i2} h_{i3} (triple), via
/// exact per-axis expansion integrals and an eigenvalue-grouped sum.
ProductNorm product_sobolev_norm(const std::vector<std::array<int, 3>>& indices, int dim,
                                 double s);

/// Exact (to rounding) value of the 1D integral of e_a e_b e_c e_d.
double quartic_integral_1d(int a, int b, int c, int d);

/// Exact integral of h_{n1} h_{n2} h_{n3} h_{n4} over R^dim; zero whenever
/// any axis has odd index sum.
double quartic_integral(const std::array<std::array<int, 3>, 4>& indices, int dim);

/// Sparse field supported on a subset of table ranks.
struct BlockField {
    std::vector<std::size_t> ranks;
    std::vector<cplx> coeffs;
};

/// Unit-L^2 Gaussian field on at most `cap` modes of the sharp dyadic block
/// of N (modes with lambda in [N/2, sqrt(2) N]); deterministic in
/// (seed, sample). Throws if the block is empty under the table cutoff.
BlockField random_block_field(const ModeTable& table, long N, int cap, std::uint64_t seed,
                              std::uint64_t sample);

/// Q = L^2 norm over [t_center-1, t_center+1] x R^d of
/// (e^{itH} a)(e^{itH} b). Space integrals are exact quartic integrals; the
/// time integral is analytic (integer frequency differences).
double bilinear_Q(const ModeTable& table, const BlockField& a, const BlockField& b,
                  double t_center = 0.0);

struct BilinearStats {
    double envelope = 0;  // min(N,M)^{(d-2)/2} (min/max)^{1/2-delta}
    double max_ratio = 0;
    double mean_ratio = 0;
};

BilinearStats bilinear_experiment(int dim, long N, long M, int sample_count,
                                  std::uint64_t seed, double delta = 0.1, int cap = 0);

struct SmoothingResult {
    std::vector<double> ratios;  // one R per sample
    double max_ratio = 0;
    double mean_ratio = 0;
};

/// R = L^2([-pi,pi] x R^d) norm of <x>^{-(1/2-eps)} H^{(1/2-2eps)/2} e^{itH}u0
/// for random unit-L^2 data over the table; the time integral is exact by
/// eigenvalue-shell orthogonality over the full period.
SmoothingResult smoothing_experiment(int dim, long cutoff, int sample_count, double eps,
                                     std::uint64_t seed);

struct TailNorm {
    double value = 0;
    bool certified = true;  // false when the grid cannot certify the tail
};

/// Weighted tail norm of <x>^K h_n over {|x| >= c lambda_n} in L^p,
/// dimensions 1 and 2.
TailNorm tail_localization(const std::array<int, 3>& index, int dim, int K, double c, double p);

}  // namespace hlab

#endif
