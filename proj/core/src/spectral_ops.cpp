#include "hlab/spectral_ops.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hlab/fft.hpp"

namespace hlab {

namespace {

double bump(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// FFT along one axis of a row-major m^dim tensor (last axis fastest).
void fft_axis(std::vector<cplx>& values, int dim, int axis, std::size_t m, bool inverse) {
    std::size_t inner = 1;
    for (int a = axis + 1; a < dim; ++a) inner *= m;
    std::size_t outer = values.size() / (inner * m);
    std::vector<cplx> line(m);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < inner; ++i) {
            const std::size_t base = o * m * inner + i;
            for (std::size_t k = 0; k < m; ++k) line[k] = values[base + k * inner];
            fft_inplace(line, inverse);
            for (std::size_t k = 0; k < m; ++k) values[base + k * inner] = line[k];
        }
}

}  // namespace

double smoothstep(double a, double b, double x) {
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    const double up = bump(x - a);
    const double down = bump(b - x);
    return up / (up + down);
}

double DyadicCutoffs::eta(double x) const { return plateau * (1.0 - smoothstep(1.0, 2.0, x)); }

double DyadicCutoffs::phi(double x) const {
    return smoothstep(0.25 - r, 0.25, x) * (1.0 - smoothstep(2.0, 2.0 + r, x));
}

DyadicCutoffs standard_cutoffs() { return DyadicCutoffs{}; }

DyadicCutoffs tampered_cutoffs() {
    DyadicCutoffs c;
    c.plateau = 0.999;
    return c;
}

SpectralField dyadic_project(const SpectralField& field, long N, ProjectorKind kind,
                             const DyadicCutoffs& cut) {
    if (N < 1 || !is_power_of_two(std::size_t(N)))
        throw std::invalid_argument("dyadic_project: N must be a power of two >= 1");
    SpectralField out(*field.table);
    const double n_sq = double(N) * double(N);
    for (std::size_t i = 0; i < field.size(); ++i) {
        const long lsq = field.table->entries[i].lambda_sq;
        double mult;
        if (kind == ProjectorKind::sharp) {
            if (4 * lsq < N * N || lsq > 2 * N * N) {
                out.coeffs[i] = cplx{};
                continue;
            }
            mult = cut.psi(double(lsq) / n_sq);
        } else {
            mult = cut.phi(double(lsq) / n_sq);
        }
        out.coeffs[i] = field.coeffs[i] * mult;
    }
    return out;
}

SpectralField harmonic_propagate(const SpectralField& field, double t) {
    SpectralField out(*field.table);
    for (std::size_t i = 0; i < field.size(); ++i)
        out.coeffs[i] =
            field.coeffs[i] * std::polar(1.0, -t * double(field.table->entries[i].lambda_sq));
    return out;
}

double sobolev_H_norm(const SpectralField& field, double s) {
    std::vector<double> terms(field.size());
    for (std::size_t i = 0; i < field.size(); ++i)
        terms[i] = std::pow(double(field.table->entries[i].lambda_sq), s) *
                   std::norm(field.coeffs[i]);
    return std::sqrt(pairwise_sum(terms));
}

SplitNorms split_norms(const SpectralField& field, double s, const QuadratureGrid& grid) {
    if (s < 0) throw std::invalid_argument("split_norms: s must be >= 0");
    if (!grid.dense) throw std::invalid_argument("split_norms: grid has no dense part");
    const int d = field.table->dimension;
    const double halfwidth = grid.dense->halfwidth;
    const std::size_t m = next_pow2(std::size_t(std::ceil(2.0 * halfwidth / grid.dense->step)));
    const double dx = 2.0 * halfwidth / double(m);

    std::vector<double> axis(m);
    for (std::size_t j = 0; j < m; ++j) axis[j] = -halfwidth + double(j) * dx;
    std::vector<cplx> values = synthesize_at(field, std::vector<std::vector<double>>(d, axis));

    const double cell = std::pow(dx, d);
    std::vector<double> wterms(values.size());
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        double x_sq = 0.0;
        std::size_t rem = flat;
        for (int a = 0; a < d; ++a) {
            const double x = axis[rem % m];
            x_sq += x * x;
            rem /= m;
        }
        wterms[flat] = std::pow(1.0 + x_sq, s) * std::norm(values[flat]);
    }
    SplitNorms out;
    out.weight_norm = std::sqrt(cell * pairwise_sum(wterms));

    for (int a = 0; a < d; ++a) fft_axis(values, d, a, m, false);
    std::vector<double> lterms(values.size());
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        double xi_sq = 0.0;
        std::size_t rem = flat;
        for (int a = 0; a < d; ++a) {
            const double xi = fft_freq(rem % m, m, dx);
            xi_sq += xi * xi;
            rem /= m;
        }
        lterms[flat] = std::pow(xi_sq, s) * std::norm(values[flat]);
    }
    out.lap_norm = std::sqrt(cell / std::pow(double(m), d) * pairwise_sum(lterms));
    return out;
}

namespace {

// Multiply a tensor of values by per-axis quadratic phases e^{i q x_a^2} and
// a scalar amplitude.
void apply_quadratic_phase(std::vector<cplx>& values,
                           const std::vector<std::vector<double>>& axes, double q, double amp) {
    const int d = int(axes.size());
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        double x_sq = 0.0;
        std::size_t rem = flat;
        for (int a = d - 1; a >= 0; --a) {
            const double x = axes[a][rem % axes[a].size()];
            x_sq += x * x;
            rem /= axes[a].size();
        }
        values[flat] *= amp * std::polar(1.0, q * x_sq);
    }
}

}  // namespace

std::vector<cplx> lens_pullback(const FreeFrameEval& U, double t,
                                const std::vector<std::vector<double>>& x_axes) {
    const double c = std::cos(2.0 * t);
    if (!(c > 0.0)) throw std::invalid_argument("lens_pullback: need |t| < pi/4");
    const int d = int(x_axes.size());
    const double tn = std::tan(2.0 * t);
    std::vector<std::vector<double>> scaled(x_axes);
    for (auto& ax : scaled)
        for (auto& x : ax) x /= c;
    std::vector<cplx> values = U(tn / 2.0, scaled);
    apply_quadratic_phase(values, x_axes, -tn / 2.0, std::pow(c, -0.5 * d));
    return values;
}

std::vector<cplx> lens_pushforward(const HarmonicFrameEval& u, double s,
                                   const std::vector<std::vector<double>>& y_axes) {
    const int d = int(y_axes.size());
    const double t = 0.5 * std::atan(2.0 * s);
    const double c = std::cos(2.0 * t);  // equals (1+4s^2)^{-1/2}
    std::vector<std::vector<double>> scaled(y_axes);
    for (auto& ax : scaled)
        for (auto& y : ax) y *= c;
    std::vector<cplx> values = u(t, scaled);
    apply_quadratic_phase(values, y_axes, s / (1.0 + 4.0 * s * s), std::pow(c, 0.5 * d));
    return values;
}

std::vector<cplx> free_evolve_periodic(std::vector<cplx> values, int dim, std::size_t m,
                                       double length, double s) {
    std::size_t expected = 1;
    for (int a = 0; a < dim; ++a) expected *= m;
    if (values.size() != expected)
        throw std::invalid_argument("free_evolve_periodic: size mismatch");
    const double dx = 2.0 * length / double(m);
    for (int a = 0; a < dim; ++a) fft_axis(values, dim, a, m, false);
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        double xi_sq = 0.0;
        std::size_t rem = flat;
        for (int a = 0; a < dim; ++a) {
            const double xi = fft_freq(rem % m, m, dx);
            xi_sq += xi * xi;
            rem /= m;
        }
        values[flat] *= std::polar(1.0, -s * xi_sq);
    }
    for (int a = 0; a < dim; ++a) fft_axis(values, dim, a, m, true);
    return values;
}

std::vector<cplx> trig_interpolate(const std::vector<cplx>& values, double length,
                                   const std::vector<double>& points) {
    const std::size_t m = values.size();
    std::vector<cplx> hat = values;
    fft_inplace(hat, false);
    const double dx = 2.0 * length / double(m);
    std::vector<cplx> out(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
        cplx acc{};
        for (std::size_t k = 0; k < m; ++k)
            acc += hat[k] * std::polar(1.0, fft_freq(k, m, dx) * (points[j] + length));
        out[j] = acc / double(m);
    }
    return out;
}

double xsb_norm(const Trajectory& traj, const XsbParams& params) {
    if (params.b < 0 || params.b > 1) throw std::invalid_argument("xsb_norm: b must be in [0,1]");
    const std::size_t m = traj.times.size();
    if (m < 2 || !is_power_of_two(m))
        throw std::invalid_argument("xsb_norm: time grid length must be a power of two >= 2");
    const double dt = traj.times[1] - traj.times[0];
    for (std::size_t i = 1; i < m; ++i)
        if (std::abs(traj.times[i] - traj.times[0] - double(i) * dt) > 1e-9 * std::abs(dt))
            throw std::invalid_argument("xsb_norm: time grid must be uniform");
    if (traj.coeffs.size() != m) throw std::invalid_argument("xsb_norm: ragged trajectory");

    std::vector<double> window(m);
    for (std::size_t i = 0; i < m; ++i)
        window[i] =
            1.0 - smoothstep(params.window_inner, params.window_outer, std::abs(traj.times[i]));

    const std::size_t n_modes = traj.table->size();
    std::vector<double> per_mode = parallel_map<double>(
        n_modes, default_threads(), [&](std::size_t n) {
            const double lsq = double(traj.table->entries[n].lambda_sq);
            std::vector<cplx> series(m);
            for (std::size_t i = 0; i < m; ++i) series[i] = window[i] * traj.coeffs[i][n];
            fft_inplace(series, false);
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double tau = fft_freq(k, m, dt);
                const double bracket = 1.0 + (tau + lsq) * (tau + lsq);
                acc += std::pow(bracket, params.b) * std::norm(series[k]);
            }
            return std::pow(lsq, params.s) * acc * dt / double(m);
        });
    return std::sqrt(pairwise_sum(per_mode));
}

}  // namespace hlab
