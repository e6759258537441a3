#include "hlab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "hlab/rng.hpp"
#include "hlab/spectral_ops.hpp"

namespace hlab {

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_scaling: need at least 3 points");
    ScalingFit fit;
    for (const auto& [x, y] : points) {
        if (!(x > 0) || !(y > 0))
            throw std::invalid_argument("fit_scaling: coordinates must be positive");
        fit.log_x.push_back(std::log(x));
        fit.log_y.push_back(std::log(y));
    }
    const double n = double(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sx += fit.log_x[i];
        sy += fit.log_y[i];
        sxx += fit.log_x[i] * fit.log_x[i];
        sxy += fit.log_x[i] * fit.log_y[i];
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    for (std::size_t i = 0; i < points.size(); ++i)
        fit.max_residual = std::max(
            fit.max_residual, std::abs(fit.log_y[i] - fit.slope * fit.log_x[i] - fit.intercept));
    return fit;
}

namespace {

// 1D L^p norm of e_n; |e_n| is even, so work on [0, end].
double lp_norm_1d(int n, double p) {
    const double mu = std::sqrt(2.0 * n + 1.0);
    const double step = std::min(0.02, 2.0 * std::numbers::pi / (16.0 * mu));
    if (p == kInfinity) {
        const double end = mu + 4.0;
        std::vector<double> xs;
        for (double x = 0.0; x <= end; x += step) xs.push_back(x);
        auto vals = hermite_eval_1d(n, xs);
        double best_x = 0.0, best = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (std::abs(vals[j]) > best) {
                best = std::abs(vals[j]);
                best_x = xs[j];
            }
        double r = step;
        for (int round = 0; round < 8; ++round) {
            std::vector<double> fine(17);
            for (int j = 0; j <= 16; ++j) fine[j] = best_x - r + r * double(j) / 8.0;
            auto fv = hermite_eval_1d(n, fine);
            for (int j = 0; j <= 16; ++j)
                if (std::abs(fv[j]) > best) {
                    best = std::abs(fv[j]);
                    best_x = fine[j];
                }
            r /= 8.0;
        }
        return best;
    }
    const double end = mu + 6.0;
    std::size_t intervals = std::size_t(std::ceil(end / step));
    if (intervals % 2 == 1) ++intervals;
    const double h = end / double(intervals);
    std::vector<double> xs(intervals + 1);
    for (std::size_t j = 0; j <= intervals; ++j) xs[j] = double(j) * h;
    auto vals = hermite_eval_1d(n, xs);
    double simpson = 0.0;
    for (std::size_t j = 0; j <= intervals; ++j) {
        const double f = std::pow(std::abs(vals[j]), p);
        const double coef = (j == 0 || j == intervals) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        simpson += coef * f;
    }
    simpson *= h / 3.0;
    return std::pow(2.0 * simpson, 1.0 / p);
}

// Integral of prod_j e_{idx_j}(x) e_k(x) dx for k = 0..K, exact by a scaled
// Gauss rule for the weight e^{-beta x^2} with beta = (count+1)/2.
std::vector<double> expansion_integrals(const std::vector<int>& idx, int K) {
    int degree_base = 0, parity = 0;
    for (int n : idx) {
        degree_base += n;
        parity ^= (n & 1);
    }
    const double beta = 0.5 * double(idx.size() + 1);
    const int order = (degree_base + K) / 2 + 1;
    const ScaledRule rule = scaled_gauss_rule(order, beta);
    std::vector<double> g = rule.weights;
    for (int n : idx) {
        const auto vals = hermite_eval_1d(n, rule.nodes);
        for (int i = 0; i < order; ++i) g[i] *= vals[i];
    }
    const Eigen::MatrixXd basis = hermite_eval_all(K, rule.nodes);  // (K+1) x order
    Eigen::Map<const Eigen::VectorXd> gv(g.data(), order);
    Eigen::VectorXd t = basis * gv;
    std::vector<double> out(K + 1);
    for (int k = 0; k <= K; ++k) out[k] = ((k & 1) != parity) ? 0.0 : t(k);
    return out;
}

// Integral of the product of the listed 1D Hermite functions.
double prod_integral_1d(const std::vector<int>& idx) {
    int degree = 0, parity = 0;
    for (int n : idx) {
        degree += n;
        parity ^= (n & 1);
    }
    if (parity) return 0.0;
    const double beta = 0.5 * double(idx.size());
    const int order = degree / 2 + 1;
    const ScaledRule rule = scaled_gauss_rule(order, beta);
    std::vector<double> g = rule.weights;
    for (int n : idx) {
        const auto vals = hermite_eval_1d(n, rule.nodes);
        for (int i = 0; i < order; ++i) g[i] *= vals[i];
    }
    return pairwise_sum(g);
}

}  // namespace

double hermite_lp_norm(const std::array<int, 3>& index, int dim, double p) {
    if (p < 1.0) throw std::invalid_argument("hermite_lp_norm: p must be >= 1");
    if (dim < 1 || dim > 3) throw std::invalid_argument("hermite_lp_norm: dim must be 1..3");
    double out = 1.0;
    for (int a = 0; a < dim; ++a) out *= lp_norm_1d(index[a], p);
    return out;
}

ProductNorm product_sobolev_norm(const std::vector<std::array<int, 3>>& indices, int dim,
                                 double s) {
    if (indices.size() != 2 && indices.size() != 3)
        throw std::invalid_argument("product_sobolev_norm: need 2 or 3 factors");
    if (s < 0.0 || s > 1.0)
        throw std::invalid_argument("product_sobolev_norm: s must be in [0,1]");

    std::vector<std::vector<double>> sq_per_axis(dim);
    double exact_mass = 1.0, captured_mass = 1.0;
    for (int a = 0; a < dim; ++a) {
        std::vector<int> idx;
        for (const auto& mi : indices) idx.push_back(mi[a]);
        // The extra Gaussian of each factor spreads the expansion roughly
        // lambda indices above the degree sum, so the margin has to grow
        // with the eigenvalue, not stay constant.
        int degree = 0;
        for (int n : idx) degree += n;
        const int K = degree + 60 + 8 * int(std::ceil(std::sqrt(2.0 * degree + 1.0)));
        const auto t = expansion_integrals(idx, K);
        auto& sq = sq_per_axis[a];
        sq.resize(t.size());
        double cap = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            sq[k] = t[k] * t[k];
            cap += sq[k];
        }
        std::vector<int> doubled = idx;
        doubled.insert(doubled.end(), idx.begin(), idx.end());
        exact_mass *= prod_integral_1d(doubled);
        captured_mass *= cap;
    }

    // Convolve the squared-coefficient sequences across axes, then weight by
    // the integer eigenvalue lambda^2 = 2E + dim.
    std::vector<double> conv = sq_per_axis[0];
    for (int a = 1; a < dim; ++a) {
        std::vector<double> next(conv.size() + sq_per_axis[a].size() - 1, 0.0);
        for (std::size_t i = 0; i < conv.size(); ++i)
            for (std::size_t j = 0; j < sq_per_axis[a].size(); ++j)
                next[i + j] += conv[i] * sq_per_axis[a][j];
        conv = std::move(next);
    }
    double norm_sq = 0.0;
    for (std::size_t e = 0; e < conv.size(); ++e)
        norm_sq += std::pow(2.0 * double(e) + double(dim), s) * conv[e];

    ProductNorm out;
    out.value = std::sqrt(norm_sq);
    out.truncated_mass = std::max(0.0, exact_mass - captured_mass);
    return out;
}

double quartic_integral_1d(int a, int b, int c, int d) {
    return prod_integral_1d({a, b, c, d});
}

double quartic_integral(const std::array<std::array<int, 3>, 4>& indices, int dim) {
    double out = 1.0;
    for (int axis = 0; axis < dim; ++axis) {
        int parity = 0;
        for (const auto& mi : indices) parity ^= (mi[axis] & 1);
        if (parity) return 0.0;
        out *= quartic_integral_1d(indices[0][axis], indices[1][axis], indices[2][axis],
                                   indices[3][axis]);
    }
    return out;
}

BlockField random_block_field(const ModeTable& table, long N, int cap, std::uint64_t seed,
                              std::uint64_t sample) {
    std::vector<std::size_t> block;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const long lsq = table.entries[i].lambda_sq;
        if (4 * lsq >= N * N && lsq <= 2 * N * N) block.push_back(i);
    }
    if (block.empty())
        throw std::invalid_argument("random_block_field: dyadic block empty under cutoff");
    if (cap > 0 && block.size() > std::size_t(cap)) {
        // Deterministic subsample: order by a per-mode hash, keep the lowest.
        std::sort(block.begin(), block.end(), [&](std::size_t l, std::size_t r) {
            return rng::counter_hash(seed ^ 0x5b1ce5ULL, sample, l) <
                   rng::counter_hash(seed ^ 0x5b1ce5ULL, sample, r);
        });
        block.resize(cap);
        std::sort(block.begin(), block.end());
    }
    BlockField out;
    out.ranks = block;
    out.coeffs.resize(block.size());
    double mass = 0.0;
    for (std::size_t j = 0; j < block.size(); ++j) {
        out.coeffs[j] = rng::complex_gaussian(seed, sample, block[j]);
        mass += std::norm(out.coeffs[j]);
    }
    const double scale = 1.0 / std::sqrt(mass);
    for (auto& c : out.coeffs) c *= scale;
    return out;
}

namespace {

struct QuarticMemo {
    // Values e_k(y_i) at the beta=2 scaled nodes, row k.
    Eigen::MatrixXd basis;
    std::vector<double> weights;
    std::unordered_map<std::uint64_t, double> cache;

    explicit QuarticMemo(int k_max) {
        const int order = 2 * k_max + 1;
        const ScaledRule rule = scaled_gauss_rule(order, 2.0);
        basis = hermite_eval_all(k_max, rule.nodes);
        weights = rule.weights;
    }

    double get(int a, int b, int c, int d) {
        if (((a ^ b ^ c ^ d) & 1) != 0) return 0.0;
        std::array<int, 4> k{a, b, c, d};
        std::sort(k.begin(), k.end());
        const std::uint64_t key = (std::uint64_t(k[0]) << 48) | (std::uint64_t(k[1]) << 32) |
                                  (std::uint64_t(k[2]) << 16) | std::uint64_t(k[3]);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i)
            acc += weights[i] * basis(k[0], i) * basis(k[1], i) * basis(k[2], i) * basis(k[3], i);
        cache.emplace(key, acc);
        return acc;
    }
};

}  // namespace

double bilinear_Q(const ModeTable& table, const BlockField& a, const BlockField& b,
                  double t_center) {
    const int d = table.dimension;
    struct Term {
        std::array<int, 3> na, nb;
        long energy;
        cplx coeff;
    };
    std::vector<Term> terms;
    terms.reserve(a.ranks.size() * b.ranks.size());
    int k_max = 0;
    for (std::size_t i = 0; i < a.ranks.size(); ++i)
        for (std::size_t j = 0; j < b.ranks.size(); ++j) {
            const Mode& ma = table.entries[a.ranks[i]];
            const Mode& mb = table.entries[b.ranks[j]];
            terms.push_back({ma.index, mb.index, ma.lambda_sq + mb.lambda_sq,
                             a.coeffs[i] * b.coeffs[j]});
            for (int axis = 0; axis < d; ++axis)
                k_max = std::max({k_max, ma.index[axis], mb.index[axis]});
        }
    QuarticMemo memo(k_max);

    // Q^2 = sum over term pairs of c c'* G(pair) int e^{-it(E-E')} dt; the
    // Gram factor is symmetric, so run p' <= p with doubled real part.
    double q_sq = 0.0;
    for (std::size_t p = 0; p < terms.size(); ++p) {
        for (std::size_t pp = 0; pp <= p; ++pp) {
            const Term& t1 = terms[p];
            const Term& t2 = terms[pp];
            double gram = 1.0;
            for (int axis = 0; axis < d && gram != 0.0; ++axis)
                gram *= memo.get(t1.na[axis], t1.nb[axis], t2.na[axis], t2.nb[axis]);
            if (gram == 0.0) continue;
            const double delta = double(t1.energy - t2.energy);
            const double sinc = delta == 0.0 ? 1.0 : std::sin(delta) / delta;
            const cplx phase =
                t1.coeff * std::conj(t2.coeff) * std::polar(1.0, -t_center * delta);
            const double contrib = 2.0 * sinc * gram * phase.real();
            q_sq += (pp == p) ? contrib : 2.0 * contrib;
        }
    }
    return std::sqrt(std::max(0.0, q_sq));
}

BilinearStats bilinear_experiment(int dim, long N, long M, int sample_count,
                                  std::uint64_t seed, double delta, int cap) {
    if (cap <= 0) cap = dim == 1 ? 64 : (dim == 2 ? 40 : 28);
    const long big = std::max(N, M);
    ModeTable table = build_mode_table(dim, 2 * big * big);
    std::vector<double> qs = parallel_map<double>(
        std::size_t(sample_count), default_threads(), [&](std::size_t sample) {
            auto u = random_block_field(table, M, cap, seed, 2 * sample);
            auto v = random_block_field(table, N, cap, seed, 2 * sample + 1);
            return bilinear_Q(table, v, u);
        });
    const double mn = double(std::min(N, M)), mx = double(big);
    BilinearStats stats;
    stats.envelope = std::pow(mn, 0.5 * double(dim - 2)) * std::pow(mn / mx, 0.5 - delta);
    double acc = 0.0;
    for (double q : qs) {
        const double r = q / stats.envelope;
        stats.max_ratio = std::max(stats.max_ratio, r);
        acc += r;
    }
    stats.mean_ratio = acc / double(sample_count);
    return stats;
}

SmoothingResult smoothing_experiment(int dim, long cutoff, int sample_count, double eps,
                                     std::uint64_t seed) {
    if (!(eps > 0.0 && eps < 0.5))
        throw std::invalid_argument("smoothing_experiment: eps must be in (0, 1/2)");
    if (dim < 1 || dim > 2)
        throw std::invalid_argument("smoothing_experiment: dimensions 1 and 2 supported");
    const ModeTable table = build_mode_table(dim, cutoff);
    const double gamma = 0.5 - eps;       // spatial weight exponent
    const double beta = 0.5 - 2.0 * eps;  // power of H (as lambda^{2 beta})

    const int order = table.max_index_1d + 25;
    const QuadratureGrid grid = gauss_hermite_grid(order);
    const Eigen::MatrixXd axis_vals = hermite_eval_all(table.max_index_1d, grid.nodes_1d);
    std::vector<double> cw(order);
    for (int i = 0; i < order; ++i) cw[i] = grid.corrected_weight(i);

    // Group modes by eigenvalue; over the full period [-pi, pi] distinct
    // shells are orthogonal in time, so the time integral is 2 pi times the
    // per-shell weighted spatial mass.
    std::vector<std::vector<std::size_t>> shells;
    std::vector<long> shell_energy;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (shell_energy.empty() || shell_energy.back() != table.entries[i].lambda_sq) {
            shell_energy.push_back(table.entries[i].lambda_sq);
            shells.emplace_back();
        }
        shells.back().push_back(i);
    }

    const std::size_t n_pts = dim == 1 ? std::size_t(order) : std::size_t(order) * order;
    Eigen::VectorXd wq(n_pts);
    for (std::size_t flat = 0; flat < n_pts; ++flat) {
        const int i0 = int(flat % order);
        const int i1 = dim == 2 ? int(flat / order) : 0;
        double x_sq = grid.nodes_1d[i0] * grid.nodes_1d[i0];
        double weight = cw[i0];
        if (dim == 2) {
            x_sq += grid.nodes_1d[i1] * grid.nodes_1d[i1];
            weight *= cw[i1];
        }
        wq(flat) = weight * std::pow(1.0 + x_sq, -gamma);
    }

    std::vector<Eigen::MatrixXd> shell_gram(shells.size());
    parallel_map<int>(shells.size(), default_threads(), [&](std::size_t si) {
        const auto& shell = shells[si];
        Eigen::MatrixXd v(n_pts, shell.size());
        for (std::size_t c = 0; c < shell.size(); ++c) {
            const auto& ix = table.entries[shell[c]].index;
            for (std::size_t flat = 0; flat < n_pts; ++flat) {
                const int i0 = int(flat % order);
                double val = axis_vals(ix[0], i0);
                if (dim == 2) val *= axis_vals(ix[1], int(flat / order));
                v(flat, c) = val;
            }
        }
        shell_gram[si] = v.transpose() * wq.asDiagonal() * v;
        return 0;
    });

    SmoothingResult out;
    out.ratios = parallel_map<double>(
        std::size_t(sample_count), default_threads(), [&](std::size_t sample) {
            std::vector<cplx> coef(table.size());
            double mass = 0.0;
            for (std::size_t i = 0; i < table.size(); ++i) {
                coef[i] = rng::complex_gaussian(seed, sample, i);
                mass += std::norm(coef[i]);
            }
            const double scale = 1.0 / std::sqrt(mass);
            double r_sq = 0.0;
            for (std::size_t si = 0; si < shells.size(); ++si) {
                const auto& shell = shells[si];
                Eigen::VectorXcd a(shell.size());
                for (std::size_t c = 0; c < shell.size(); ++c)
                    a(c) = coef[shell[c]] * scale;
                const double quad = (a.adjoint() * shell_gram[si] * a).value().real();
                r_sq += std::pow(double(shell_energy[si]), beta) * quad;
            }
            return std::sqrt(2.0 * std::numbers::pi * std::max(0.0, r_sq));
        });
    double acc = 0.0;
    for (double r : out.ratios) {
        out.max_ratio = std::max(out.max_ratio, r);
        acc += r;
    }
    out.mean_ratio = acc / double(sample_count);
    return out;
}

TailNorm tail_localization(const std::array<int, 3>& index, int dim, int K, double c, double p) {
    if (c <= 1.0) throw std::invalid_argument("tail_localization: c must be > 1");
    if (p < 1.0) throw std::invalid_argument("tail_localization: p must be >= 1");
    if (dim < 1 || dim > 2)
        throw std::invalid_argument("tail_localization: dimensions 1 and 2 supported");
    long lsq = dim;
    for (int a = 0; a < dim; ++a) lsq += 2L * index[a];
    const double lambda = std::sqrt(double(lsq));
    const double radius = c * lambda;
    const double max_halfwidth = 250.0;
    TailNorm out;
    if (radius >= max_halfwidth) {
        out.certified = false;
        return out;
    }
    const double end = std::min(max_halfwidth, std::sqrt(radius * radius + 1600.0));

    if (dim == 1) {
        const int n = index[0];
        const double step = std::min(0.01, 2.0 * std::numbers::pi / (16.0 * lambda));
        std::size_t intervals = std::size_t(std::ceil((end - radius) / step));
        if (intervals % 2 == 1) ++intervals;
        const double h = (end - radius) / double(intervals);
        std::vector<double> xs(intervals + 1);
        for (std::size_t j = 0; j <= intervals; ++j) xs[j] = radius + double(j) * h;
        auto vals = hermite_eval_1d(n, xs);
        if (p == kInfinity) {
            for (std::size_t j = 0; j <= intervals; ++j)
                out.value = std::max(
                    out.value, std::pow(1.0 + xs[j] * xs[j], 0.5 * K) * std::abs(vals[j]));
            return out;
        }
        double simpson = 0.0;
        for (std::size_t j = 0; j <= intervals; ++j) {
            const double f =
                std::pow(std::pow(1.0 + xs[j] * xs[j], 0.5 * K) * std::abs(vals[j]), p);
            const double coef = (j == 0 || j == intervals) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            simpson += coef * f;
        }
        out.value = std::pow(2.0 * simpson * h / 3.0, 1.0 / p);
        return out;
    }

    // dim == 2: tensor grid over the annulus radius <= |x| <= end.
    const double step = std::min(0.02, 2.0 * std::numbers::pi / (16.0 * lambda));
    std::vector<double> axis;
    for (double x = -end; x <= end; x += step) axis.push_back(x);
    std::vector<double> e0 = hermite_eval_1d(index[0], axis);
    std::vector<double> e1 = hermite_eval_1d(index[1], axis);
    double acc = 0.0;
    for (std::size_t i = 0; i < axis.size(); ++i)
        for (std::size_t j = 0; j < axis.size(); ++j) {
            const double r_sq = axis[i] * axis[i] + axis[j] * axis[j];
            if (r_sq < radius * radius) continue;
            const double v = std::pow(1.0 + r_sq, 0.5 * K) * std::abs(e0[i] * e1[j]);
            if (p == kInfinity)
                acc = std::max(acc, v);
            else
                acc += std::pow(v, p) * step * step;
        }
    out.value = p == kInfinity ? acc : std::pow(acc, 1.0 / p);
    return out;
}

}  // namespace hlab
