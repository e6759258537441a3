#ifndef HLAB_RANDOM_DATA_HPP
#define HLAB_RANDOM_DATA_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hlab/hermite.hpp"
#include "hlab/spectral_ops.hpp"

namespace hlab {

/// Gaussian randomization u^w = sum c_n g_n h_n with g_n standard complex
/// Gaussians drawn from counter-based streams, so every sample is a pure
/// function of (seed, sample_index).
struct RandomizationSpec {
    const ModeTable* table = nullptr;
    std::vector<cplx> base_coeffs;
    std::uint64_t seed = 0;
    std::size_t sample_count = 0;
};

SpectralField randomize(const RandomizationSpec& spec, std::size_t sample_index);

enum class TruncateSide { low, high };

/// low keeps modes with lambda < K, high keeps lambda >= K; the two sides
/// add back to the input exactly.
SpectralField truncate(const SpectralField& field, double K, TruncateSide side);

/// Fixed multilinear form of the Gaussians: X = sum_terms coeff * g_{i_1}
/// ... g_{i_order}.
struct ChaosFunctional {
    int order = 1;  // 1..3
    struct Term {
        std::array<int, 3> idx{0, 0, 0};  // entries beyond `order` ignored
        cplx coeff{1.0, 0.0};
    };
    std::vector<Term> terms;
};

/// Monte Carlo L^q(Omega) norm of the functional over spec.sample_count
/// samples. Rejects q < 2.
double chaos_moment(const RandomizationSpec& spec, const ChaosFunctional& functional, double q);

/// Sum of squared kernel magnitudes, the natural size of the functional.
double chaos_kernel_norm(const ChaosFunctional& functional);

struct PZResult {
    double lhs = 0;       // empirical P(X >= lambda * E X)
    double rhs = 0;       // (1-lambda)^2 (E X)^2 / E X^2 from empirical moments
    double lhs_se = 0;    // binomial standard error of lhs
};

PZResult paley_zygmund_check(const RandomizationSpec& spec,
                             const std::function<double(const SpectralField&)>& statistic,
                             double lambda);

/// (lower, upper) Wilson score interval for `successes` out of `trials` at
/// normal quantile z.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials,
                                          double z = 1.959963984540054);

struct TailEstimate {
    std::vector<double> lambda_grid;
    std::vector<double> empirical_prob;  // zero-success cells hold the Wilson upper bound
    std::vector<std::pair<double, double>> wilson_ci;
    std::vector<bool> zero_cell;
    double fitted_c = 0;       // slope of -log p against Lambda^2 / norm_sq
    double fit_residual = 0;   // rms residual of that fit
};

/// Exceedance tails P(statistic > Lambda) over the sample set, with Wilson
/// intervals and the exponential-rate fit of -log p vs Lambda^2 / norm_sq.
TailEstimate tail_probability(const RandomizationSpec& spec,
                              const std::function<double(const SpectralField&)>& statistic,
                              const std::vector<double>& lambda_grid, double norm_sq);

/// Space-time event statistic: the sample is admissible at level Lambda when
/// every included condition holds with constant Lambda, so the returned value
/// is max over conditions of (norm / weight) and the event complement is
/// {statistic > Lambda}.
struct EventDescriptor {
    bool strichartz = true;    // ||Delta_N e^{itH} u||_{L^4([-pi,pi]; L^inf)} <= Lambda N^{-1/6}
    bool w_fractional = false; // ||<H>^{1/14} e^{itH} u||_{L^inf_t L^inf_x} <= Lambda R
    std::vector<long> n_values{1, 2, 4, 8};
    double R = 34.0;           // weight of the fractional condition; no canonical value
    int time_nodes = 64;       // Gauss-Legendre nodes on [-pi, pi]
    double dense_halfwidth = 0;  // 0: derived from the table cutoff
    double dense_step = 0.05;
};

double event_statistic(const EventDescriptor& desc, const SpectralField& sample);

struct NonsmoothingResult {
    std::vector<long> n_values;
    std::vector<double> median, q25, q75;
    std::vector<double> sigma_sq;         // sum chi^2(lambda^2/N^2) lambda^{2s} |c_n|^2
    std::vector<double> bound_violation;  // max_t [ P(S_N^harm <= t) - e^{t^2 - sigma^2/2} ] - 3 SE
};

/// Distribution of S_N = ||chi(H/N^2) u^w||_{H^s} per dyadic N. Medians and
/// quartiles use the flat norm (split_norms sum); the Gaussian lower-tail
/// bound P(S_N <= t) <= exp(t^2 - sigma_N^2/2) is checked against the
/// harmonic H^s norm, for which sigma_N is exact.
NonsmoothingResult nonsmoothing_scan(const RandomizationSpec& spec, double s,
                                     const std::vector<long>& n_list,
                                     const QuadratureGrid& grid);

/// One line per mode: rank, re, im.
std::vector<cplx> load_coeff_profile(const std::string& path, std::size_t expected);
void save_coeff_profile(const std::string& path, const std::vector<cplx>& coeffs);

}  // namespace hlab

#endif
