#include "hlab/random_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hlab/fft.hpp"
#include "hlab/legendre.hpp"
#include "hlab/rng.hpp"

namespace hlab {

SpectralField randomize(const RandomizationSpec& spec, std::size_t sample_index) {
    if (!spec.table) throw std::invalid_argument("randomize: spec has no table");
    if (spec.base_coeffs.size() != spec.table->size())
        throw std::invalid_argument("randomize: base coefficient count mismatch");
    if (sample_index >= spec.sample_count)
        throw std::invalid_argument("randomize: sample_index out of range");
    SpectralField out(*spec.table);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.coeffs[i] = spec.base_coeffs[i] * rng::complex_gaussian(spec.seed, sample_index, i);
    return out;
}

SpectralField truncate(const SpectralField& field, double K, TruncateSide side) {
    SpectralField out(*field.table);
    const double k_sq = K * K;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const bool low = double(field.table->entries[i].lambda_sq) < k_sq;
        if (low == (side == TruncateSide::low)) out.coeffs[i] = field.coeffs[i];
    }
    return out;
}

double chaos_moment(const RandomizationSpec& spec, const ChaosFunctional& functional, double q) {
    if (q < 2.0) throw std::invalid_argument("chaos_moment: q must be >= 2");
    if (functional.order < 1 || functional.order > 3)
        throw std::invalid_argument("chaos_moment: order must be 1..3");
    std::vector<double> powers = parallel_map<double>(
        spec.sample_count, default_threads(), [&](std::size_t sample) {
            cplx x{};
            for (const auto& term : functional.terms) {
                cplx prod = term.coeff;
                for (int j = 0; j < functional.order; ++j)
                    prod *= rng::complex_gaussian(spec.seed, sample, std::uint64_t(term.idx[j]));
                x += prod;
            }
            return std::pow(std::abs(x), q);
        });
    return std::pow(pairwise_sum(powers) / double(spec.sample_count), 1.0 / q);
}

double chaos_kernel_norm(const ChaosFunctional& functional) {
    double s = 0.0;
    for (const auto& term : functional.terms) s += std::norm(term.coeff);
    return std::sqrt(s);
}

PZResult paley_zygmund_check(const RandomizationSpec& spec,
                             const std::function<double(const SpectralField&)>& statistic,
                             double lambda) {
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("paley_zygmund_check: lambda must be in [0,1]");
    const std::size_t n = spec.sample_count;
    std::vector<double> xs = parallel_map<double>(n, default_threads(), [&](std::size_t i) {
        return statistic(randomize(spec, i));
    });
    const double mean = pairwise_sum(xs) / double(n);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = xs[i] * xs[i];
    const double second = pairwise_sum(sq) / double(n);
    std::size_t hits = 0;
    for (double x : xs)
        if (x >= lambda * mean) ++hits;
    PZResult out;
    out.lhs = double(hits) / double(n);
    out.lhs_se = std::sqrt(std::max(out.lhs * (1.0 - out.lhs), 1e-300) / double(n));
    out.rhs = second > 0 ? (1.0 - lambda) * (1.0 - lambda) * mean * mean / second : 0.0;
    return out;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z) {
    const double n = double(trials);
    const double p = double(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

TailEstimate tail_probability(const RandomizationSpec& spec,
                              const std::function<double(const SpectralField&)>& statistic,
                              const std::vector<double>& lambda_grid, double norm_sq) {
    const std::size_t n = spec.sample_count;
    std::vector<double> xs = parallel_map<double>(n, default_threads(), [&](std::size_t i) {
        return statistic(randomize(spec, i));
    });
    TailEstimate out;
    out.lambda_grid = lambda_grid;
    std::vector<double> fit_x, fit_y;
    for (double lam : lambda_grid) {
        std::size_t hits = 0;
        for (double x : xs)
            if (x > lam) ++hits;
        const auto ci = wilson_interval(hits, n);
        out.wilson_ci.push_back(ci);
        out.zero_cell.push_back(hits == 0);
        const double p = hits == 0 ? ci.second : double(hits) / double(n);
        out.empirical_prob.push_back(p);
        if (hits > 0 && hits < n) {
            fit_x.push_back(lam * lam / norm_sq);
            fit_y.push_back(-std::log(double(hits) / double(n)));
        }
    }
    if (fit_x.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < fit_x.size(); ++i) {
            sx += fit_x[i];
            sy += fit_y[i];
            sxx += fit_x[i] * fit_x[i];
            sxy += fit_x[i] * fit_y[i];
        }
        const double m = double(fit_x.size());
        const double denom = m * sxx - sx * sx;
        if (denom > 0) {
            out.fitted_c = (m * sxy - sx * sy) / denom;
            const double intercept = (sy - out.fitted_c * sx) / m;
            double rss = 0;
            for (std::size_t i = 0; i < fit_x.size(); ++i) {
                const double r = fit_y[i] - out.fitted_c * fit_x[i] - intercept;
                rss += r * r;
            }
            out.fit_residual = std::sqrt(rss / m);
        }
    }
    return out;
}

double event_statistic(const EventDescriptor& desc, const SpectralField& sample) {
    const ModeTable& table = *sample.table;
    const int d = table.dimension;
    const double lam_max = std::sqrt(double(table.cutoff));
    const double halfwidth =
        desc.dense_halfwidth > 0 ? desc.dense_halfwidth : 1.5 * lam_max + 1.0;
    std::vector<double> axis;
    for (double x = -halfwidth; x <= halfwidth; x += desc.dense_step) axis.push_back(x);
    const std::vector<std::vector<double>> axes(d, axis);
    const GaussLegendre gl =
        gauss_legendre(desc.time_nodes, -std::numbers::pi, std::numbers::pi);

    auto sup_at = [&](const SpectralField& f, double t) {
        auto values = synthesize_at(harmonic_propagate(f, t), axes);
        double sup = 0.0;
        for (const auto& v : values) sup = std::max(sup, std::abs(v));
        return sup;
    };

    double worst = 0.0;
    if (desc.strichartz) {
        for (long N : desc.n_values) {
            auto block = dyadic_project(sample, N, ProjectorKind::sharp);
            double l4 = 0.0;
            for (int j = 0; j < desc.time_nodes; ++j)
                l4 += gl.weights[j] * std::pow(sup_at(block, gl.nodes[j]), 4);
            l4 = std::pow(l4, 0.25);
            worst = std::max(worst, l4 / std::pow(double(N), -1.0 / 6.0));
        }
    }
    if (desc.w_fractional) {
        SpectralField frac(table);
        for (std::size_t i = 0; i < table.size(); ++i)
            frac.coeffs[i] =
                sample.coeffs[i] * std::pow(1.0 + double(table.entries[i].lambda_sq), 1.0 / 14.0);
        double sup = 0.0;
        for (int j = 0; j < desc.time_nodes; ++j) sup = std::max(sup, sup_at(frac, gl.nodes[j]));
        worst = std::max(worst, sup / desc.R);
    }
    return worst;
}

namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double quantile(std::vector<double> v, double q) {
    const std::size_t k = std::size_t(q * double(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + k, v.end());
    return v[k];
}

}  // namespace

NonsmoothingResult nonsmoothing_scan(const RandomizationSpec& spec, double s,
                                     const std::vector<long>& n_list,
                                     const QuadratureGrid& grid) {
    if (!grid.dense) throw std::invalid_argument("nonsmoothing_scan: grid has no dense part");
    const ModeTable& table = *spec.table;
    if (table.dimension != 1)
        throw std::invalid_argument("nonsmoothing_scan: implemented for dimension 1");
    const DyadicCutoffs cut = standard_cutoffs();
    const std::size_t n_samples = spec.sample_count;
    const std::size_t n_modes = table.size();

    const double halfwidth = grid.dense->halfwidth;
    const std::size_t m = next_pow2(std::size_t(std::ceil(2.0 * halfwidth / grid.dense->step)));
    const double dx = 2.0 * halfwidth / double(m);
    std::vector<double> axis(m);
    for (std::size_t j = 0; j < m; ++j) axis[j] = -halfwidth + double(j) * dx;
    const Eigen::MatrixXd basis_t =
        hermite_eval_all(table.max_index_1d, axis).transpose();  // m x K

    std::vector<double> weight_pow(m), xi_sq_pow(m);
    for (std::size_t j = 0; j < m; ++j) {
        weight_pow[j] = std::pow(1.0 + axis[j] * axis[j], s);
        const double xi = fft_freq(j, m, dx);
        xi_sq_pow[j] = std::pow(xi * xi, s);
    }

    // Gaussian draws, reused across all N.
    Eigen::MatrixXcd draws(n_modes, n_samples);
    parallel_map<int>(n_samples, default_threads(), [&](std::size_t sample) {
        for (std::size_t i = 0; i < n_modes; ++i)
            draws(i, sample) = spec.base_coeffs[i] * rng::complex_gaussian(spec.seed, sample, i);
        return 0;
    });

    NonsmoothingResult out;
    for (long N : n_list) {
        const double n_sq = double(N) * double(N);
        std::vector<double> chi(n_modes), lam_pow(n_modes);
        double sigma_sq = 0.0;
        for (std::size_t i = 0; i < n_modes; ++i) {
            chi[i] = cut.eta(double(table.entries[i].lambda_sq) / n_sq);
            lam_pow[i] = std::pow(double(table.entries[i].lambda_sq), s);
            sigma_sq += chi[i] * chi[i] * lam_pow[i] * std::norm(spec.base_coeffs[i]);
        }

        // Projected coefficients for all samples at once.
        Eigen::MatrixXcd proj = draws;
        for (std::size_t i = 0; i < n_modes; ++i) proj.row(i) *= chi[i];

        std::vector<double> s_flat(n_samples), s_harm(n_samples);
        const std::size_t chunk = 128;
        for (std::size_t start = 0; start < n_samples; start += chunk) {
            const std::size_t width = std::min(chunk, n_samples - start);
            // K+1 basis columns cover indices 0..max_index_1d; scatter rows.
            Eigen::MatrixXcd dense_coef =
                Eigen::MatrixXcd::Zero(table.max_index_1d + 1, width);
            for (std::size_t i = 0; i < n_modes; ++i)
                dense_coef.row(table.entries[i].index[0]) +=
                    proj.block(i, start, 1, width);
            Eigen::MatrixXcd values = basis_t * dense_coef;  // m x width
            parallel_map<int>(width, default_threads(), [&](std::size_t c) {
                double wsum = 0.0;
                std::vector<cplx> line(m);
                for (std::size_t j = 0; j < m; ++j) {
                    line[j] = values(j, c);
                    wsum += weight_pow[j] * std::norm(line[j]);
                }
                fft_inplace(line, false);
                double lsum = 0.0;
                for (std::size_t j = 0; j < m; ++j) lsum += xi_sq_pow[j] * std::norm(line[j]);
                s_flat[start + c] = std::sqrt(dx * wsum) + std::sqrt(dx / double(m) * lsum);

                double harm = 0.0;
                for (std::size_t i = 0; i < n_modes; ++i)
                    harm += lam_pow[i] * std::norm(proj(i, start + c));
                s_harm[start + c] = std::sqrt(harm);
                return 0;
            });
        }

        out.n_values.push_back(N);
        out.median.push_back(quantile(s_flat, 0.5));
        out.q25.push_back(quantile(s_flat, 0.25));
        out.q75.push_back(quantile(s_flat, 0.75));
        out.sigma_sq.push_back(sigma_sq);

        // Gaussian lower tail of the harmonic statistic.
        std::vector<double> sorted = s_harm;
        std::sort(sorted.begin(), sorted.end());
        double violation = -1e300;
        const double t_max = std::sqrt(sigma_sq / 2.0);
        for (int k = 1; k <= 20; ++k) {
            const double t = t_max * double(k) / 20.0;
            const std::size_t hits =
                std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
            const double p = double(hits) / double(n_samples);
            const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / double(n_samples));
            violation = std::max(violation, p - 3.0 * se - std::exp(t * t - sigma_sq / 2.0));
        }
        out.bound_violation.push_back(violation);
    }
    return out;
}

std::vector<cplx> load_coeff_profile(const std::string& path, std::size_t expected) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_coeff_profile: cannot open " + path);
    std::vector<cplx> out(expected, cplx{});
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::size_t rank;
        double re, im;
        if (!(ls >> rank >> re >> im))
            throw std::runtime_error("load_coeff_profile: malformed line: " + line);
        if (rank >= expected)
            throw std::runtime_error("load_coeff_profile: rank out of range in " + path);
        out[rank] = cplx(re, im);
    }
    return out;
}

void save_coeff_profile(const std::string& path, const std::vector<cplx>& coeffs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_coeff_profile: cannot open " + path);
    out.precision(17);
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        out << i << "," << coeffs[i].real() << "," << coeffs[i].imag() << "\n";
}

}  // namespace hlab
