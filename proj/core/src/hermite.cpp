#include "hlab/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hlab {

namespace {

constexpr double kPiQuarterRoot = 0.7511255444649425;  // pi^{-1/4}

// The raw start e^{-x^2/2} underflows for |x| beyond ~38 while e_n(x) itself
// is O(1) in the oscillatory region, so the recurrence runs on mantissas with
// a shared binary exponent that is renormalized as it climbs back up.
struct ScaledRecurrence {
    double prev = 0.0, cur;
    int exp2;  // e_k = cur * 2^exp2

    explicit ScaledRecurrence(double x) {
        const double t = -0.5 * x * x + std::log(kPiQuarterRoot);
        exp2 = int(std::floor(t / std::numbers::ln2));
        cur = std::exp(t - exp2 * std::numbers::ln2);
    }
    void step(int k, double x) {
        const double next =
            x * std::sqrt(2.0 / double(k + 1)) * cur - std::sqrt(double(k) / double(k + 1)) * prev;
        prev = cur;
        cur = next;
        const double mag = std::abs(cur);
        if (mag > 0x1p500 || (mag > 0 && mag < 0x1p-500)) {
            int shift;
            std::frexp(cur, &shift);
            prev = std::ldexp(prev, -shift);
            cur = std::ldexp(cur, -shift);
            exp2 += shift;
        }
    }
    double value() const { return std::ldexp(cur, exp2); }
    double previous() const { return std::ldexp(prev, exp2); }
};

// e_0..e_{n_max} at a single point, written into buf (size n_max+1).
void eval_column(int n_max, double x, double* buf) {
    ScaledRecurrence r(x);
    buf[0] = r.value();
    for (int k = 0; k < n_max; ++k) {
        r.step(k, x);
        buf[k + 1] = r.value();
    }
}

// e_m(x) and e_m'(x) without storing the whole column.
std::pair<double, double> eval_with_deriv(int m, double x) {
    ScaledRecurrence r(x);
    for (int k = 0; k < m; ++k) r.step(k, x);
    // e_m' = -x e_m + sqrt(2m) e_{m-1}
    const double value = r.value();
    const double deriv = -x * value + (m > 0 ? std::sqrt(2.0 * m) * r.previous() : 0.0);
    return {value, deriv};
}

}  // namespace

ModeTable build_mode_table(int dimension, long cutoff_lambda_sq) {
    if (dimension < 1 || dimension > 3)
        throw std::invalid_argument("build_mode_table: dimension must be in 1..3");
    if (cutoff_lambda_sq < dimension)
        throw std::invalid_argument("build_mode_table: cutoff below ground state eigenvalue");
    ModeTable table;
    table.dimension = dimension;
    table.cutoff = cutoff_lambda_sq;
    const long max_sum = (cutoff_lambda_sq - dimension) / 2;
    auto push = [&](int a, int b, int c) {
        Mode m;
        m.index = {a, b, c};
        m.lambda_sq = 2L * (a + b + c) + dimension;
        table.entries.push_back(m);
    };
    if (dimension == 1) {
        for (long a = 0; a <= max_sum; ++a) push(int(a), 0, 0);
    } else if (dimension == 2) {
        for (long a = 0; a <= max_sum; ++a)
            for (long b = 0; a + b <= max_sum; ++b) push(int(a), int(b), 0);
    } else {
        for (long a = 0; a <= max_sum; ++a)
            for (long b = 0; a + b <= max_sum; ++b)
                for (long c = 0; a + b + c <= max_sum; ++c) push(int(a), int(b), int(c));
    }
    std::sort(table.entries.begin(), table.entries.end(), [](const Mode& l, const Mode& r) {
        if (l.lambda_sq != r.lambda_sq) return l.lambda_sq < r.lambda_sq;
        return l.index < r.index;
    });
    table.max_index_1d = 0;
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        table.entries[i].rank = int(i);
        for (int d = 0; d < dimension; ++d)
            table.max_index_1d = std::max(table.max_index_1d, table.entries[i].index[d]);
    }
    return table;
}

SpectralField::SpectralField(const ModeTable& t, std::vector<cplx> c)
    : table(&t), coeffs(std::move(c)) {
    if (coeffs.size() != t.size())
        throw std::invalid_argument("SpectralField: coefficient count does not match table");
}

bool SpectralField::finite() const {
    for (const auto& c : coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

std::vector<double> DenseGrid::points() const {
    std::vector<double> pts;
    const long n = long(std::floor(halfwidth / step));
    pts.reserve(2 * n + 1);
    for (long i = -n; i <= n; ++i) pts.push_back(double(i) * step);
    return pts;
}

Eigen::MatrixXd hermite_eval_all(int n_max, std::span<const double> points) {
    Eigen::MatrixXd out(n_max + 1, points.size());
    std::vector<double> col(n_max + 1);
    for (std::size_t j = 0; j < points.size(); ++j) {
        eval_column(n_max, points[j], col.data());
        for (int k = 0; k <= n_max; ++k) out(k, j) = col[k];
    }
    return out;
}

std::vector<double> hermite_eval_1d(int n, std::span<const double> points) {
    if (n < 0) throw std::invalid_argument("hermite_eval_1d: n must be >= 0");
    std::vector<double> out(points.size());
    std::vector<double> col(n + 1);
    for (std::size_t j = 0; j < points.size(); ++j) {
        eval_column(n, points[j], col.data());
        out[j] = col[n];
    }
    return out;
}

std::vector<double> hermite_deriv_1d(int n, std::span<const double> points) {
    if (n < 0) throw std::invalid_argument("hermite_deriv_1d: n must be >= 0");
    std::vector<double> out(points.size());
    std::vector<double> col(n + 2);
    for (std::size_t j = 0; j < points.size(); ++j) {
        eval_column(n + 1, points[j], col.data());
        const double lower = n > 0 ? std::sqrt(double(n) / 2.0) * col[n - 1] : 0.0;
        out[j] = lower - std::sqrt(double(n + 1) / 2.0) * col[n + 1];
    }
    return out;
}

QuadratureGrid gauss_hermite_grid(int order, double dense_halfwidth, double dense_step) {
    if (order < 1) throw std::invalid_argument("gauss_hermite_grid: order must be >= 1");
    QuadratureGrid grid;
    grid.order = order;

    std::vector<double> positive;  // strictly positive zeros of e_order
    if (order > 1) {
        const double edge = std::sqrt(2.0 * order + 1.0);
        const double scan_step = std::numbers::pi / (5.0 * edge);
        double x_prev = (order % 2 == 1) ? scan_step * 0.5 : 1e-12;
        double f_prev = eval_with_deriv(order, x_prev).first;
        for (double x = x_prev + scan_step; x < edge + scan_step; x += scan_step) {
            const double f = eval_with_deriv(order, x).first;
            if (f_prev == 0.0) {
                positive.push_back(x_prev);
            } else if (f_prev * f < 0.0) {
                double lo = x_prev, hi = x;
                double root = 0.5 * (lo + hi);
                for (int it = 0; it < 100; ++it) {
                    auto [fr, dfr] = eval_with_deriv(order, root);
                    double next = root - fr / dfr;
                    if (!(next > lo && next < hi)) {  // Newton left the bracket
                        if (eval_with_deriv(order, lo).first * fr < 0.0)
                            hi = root;
                        else
                            lo = root;
                        next = 0.5 * (lo + hi);
                    }
                    if (std::abs(next - root) < 1e-15 * std::max(1.0, std::abs(root))) {
                        root = next;
                        break;
                    }
                    root = next;
                }
                positive.push_back(root);
            }
            x_prev = x;
            f_prev = f;
        }
        if (int(positive.size()) != order / 2)
            throw std::runtime_error("gauss_hermite_grid: node search failed to converge");
    }

    if (order % 2 == 1) grid.nodes_1d.push_back(0.0);
    for (double r : positive) {
        grid.nodes_1d.push_back(r);
        grid.nodes_1d.push_back(-r);
    }
    std::sort(grid.nodes_1d.begin(), grid.nodes_1d.end());

    // w_i = e^{-x_i^2} / sum_{k<order} p_k(x_i)^2 with p_k the orthonormal
    // polynomials; in terms of Hermite functions the sum is
    // e^{x_i^2} sum e_k(x_i)^2, so everything stays in log space.
    grid.log_weights_1d.resize(order);
    std::vector<double> col(order);
    for (int i = 0; i < order; ++i) {
        const double x = grid.nodes_1d[i];
        eval_column(order - 1, x, col.data());
        double s = 0.0;
        for (int k = 0; k < order; ++k) s += col[k] * col[k];
        grid.log_weights_1d[i] = -x * x - std::log(s);
    }

    if (dense_halfwidth > 0) grid.dense = DenseGrid{dense_halfwidth, dense_step};
    return grid;
}

ScaledRule scaled_gauss_rule(int order, double beta) {
    if (beta <= 0) throw std::invalid_argument("scaled_gauss_rule: beta must be positive");
    const QuadratureGrid base = gauss_hermite_grid(order);
    ScaledRule rule;
    const double root = std::sqrt(beta);
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = base.nodes_1d[i] / root;
        rule.weights[i] = base.corrected_weight(i) / root;
    }
    return rule;
}

namespace {

using MatC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Contract the coefficient tensor of `field` against one basis matrix per
// axis. basis[a] has shape (n_points_a, K+1). Output is row-major over axes.
std::vector<cplx> tensor_contract(const SpectralField& field,
                                  const std::vector<Eigen::MatrixXd>& basis) {
    const ModeTable& table = *field.table;
    const int d = table.dimension;
    const int K = table.max_index_1d + 1;

    if (d == 1) {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(K);
        for (std::size_t i = 0; i < table.size(); ++i) c(table.entries[i].index[0]) += field.coeffs[i];
        Eigen::VectorXcd v = basis[0].cast<cplx>() * c;
        return {v.data(), v.data() + v.size()};
    }
    if (d == 2) {
        MatC c = MatC::Zero(K, K);
        for (std::size_t i = 0; i < table.size(); ++i)
            c(table.entries[i].index[0], table.entries[i].index[1]) += field.coeffs[i];
        MatC v = basis[0].cast<cplx>() * c * basis[1].cast<cplx>().transpose();
        return {v.data(), v.data() + v.size()};
    }
    // d == 3: contract axis 2, then axis 1, then axis 0.
    const Eigen::Index q1 = basis[1].rows(), q2 = basis[2].rows();
    MatC c(K * K, K);
    c.setZero();
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& ix = table.entries[i].index;
        c(ix[0] * K + ix[1], ix[2]) += field.coeffs[i];
    }
    MatC t2 = c * basis[2].cast<cplx>().transpose();  // (K*K) x q2
    MatC t1(K, q1 * q2);
    for (int k0 = 0; k0 < K; ++k0) {
        MatC block = basis[1].cast<cplx>() * t2.block(k0 * K, 0, K, q2);  // q1 x q2
        t1.row(k0) = Eigen::Map<Eigen::RowVectorXcd>(block.data(), q1 * q2);
    }
    MatC v = basis[0].cast<cplx>() * t1;  // q0 x (q1*q2)
    return {v.data(), v.data() + v.size()};
}

}  // namespace

std::vector<cplx> synthesize(const SpectralField& field, const QuadratureGrid& grid) {
    if (!field.table) throw std::invalid_argument("synthesize: field has no table");
    const Eigen::MatrixXd basis =
        hermite_eval_all(field.table->max_index_1d, grid.nodes_1d).transpose();
    std::vector<Eigen::MatrixXd> per_axis(field.table->dimension, basis);
    return tensor_contract(field, per_axis);
}

std::vector<cplx> synthesize_at(const SpectralField& field,
                                const std::vector<std::vector<double>>& axis_points) {
    if (!field.table) throw std::invalid_argument("synthesize_at: field has no table");
    if (int(axis_points.size()) != field.table->dimension)
        throw std::invalid_argument("synthesize_at: need one point vector per axis");
    std::vector<Eigen::MatrixXd> per_axis;
    for (const auto& pts : axis_points)
        per_axis.push_back(hermite_eval_all(field.table->max_index_1d, pts).transpose());
    return tensor_contract(field, per_axis);
}

SpectralField analyze(std::span<const cplx> values, const QuadratureGrid& grid,
                      const ModeTable& table) {
    if (grid.order < table.max_index_1d + 1)
        throw std::invalid_argument("analyze: quadrature order below Gram exactness threshold");
    const int d = table.dimension;
    const int q = grid.order;
    std::size_t expected = 1;
    for (int a = 0; a < d; ++a) expected *= std::size_t(q);
    if (values.size() != expected)
        throw std::invalid_argument("analyze: value count does not match tensor grid");

    // Weighted basis: row k of W holds e_k(x_i) * corrected_weight(i).
    Eigen::MatrixXd basis = hermite_eval_all(table.max_index_1d, grid.nodes_1d);
    Eigen::VectorXd w(q);
    for (int i = 0; i < q; ++i) w(i) = grid.corrected_weight(i);
    Eigen::MatrixXd weighted = basis * w.asDiagonal();
    const int K = table.max_index_1d + 1;

    SpectralField out(table);
    if (d == 1) {
        Eigen::Map<const Eigen::VectorXcd> v(values.data(), q);
        Eigen::VectorXcd c = weighted.cast<cplx>() * v;
        for (std::size_t i = 0; i < table.size(); ++i) out.coeffs[i] = c(table.entries[i].index[0]);
    } else if (d == 2) {
        Eigen::Map<const MatC> v(values.data(), q, q);
        MatC c = weighted.cast<cplx>() * v * weighted.cast<cplx>().transpose();
        for (std::size_t i = 0; i < table.size(); ++i)
            out.coeffs[i] = c(table.entries[i].index[0], table.entries[i].index[1]);
    } else {
        Eigen::Map<const MatC> v(values.data(), q, q * q);
        MatC t0 = weighted.cast<cplx>() * v;  // K x (q*q)
        MatC c(K * K, K);
        for (int k0 = 0; k0 < K; ++k0) {
            Eigen::Map<const MatC> slab(t0.row(k0).data(), q, q);
            MatC block = weighted.cast<cplx>() * slab * weighted.cast<cplx>().transpose();
            c.block(k0 * K, 0, K, K) = block;
        }
        for (std::size_t i = 0; i < table.size(); ++i) {
            const auto& ix = table.entries[i].index;
            out.coeffs[i] = c(ix[0] * K + ix[1], ix[2]);
        }
    }
    if (!out.finite()) throw std::runtime_error("analyze: produced non-finite coefficients");
    return out;
}

cplx quad_inner_product(std::span<const cplx> a, std::span<const cplx> b,
                        const QuadratureGrid& grid, int dimension) {
    if (a.size() != b.size()) throw std::invalid_argument("quad_inner_product: size mismatch");
    const int q = grid.order;
    std::vector<double> w(q);
    for (int i = 0; i < q; ++i) w[i] = grid.corrected_weight(i);
    std::vector<cplx> terms(a.size());
    for (std::size_t flat = 0; flat < a.size(); ++flat) {
        double wt = 1.0;
        std::size_t rem = flat;
        for (int ax = dimension - 1; ax >= 0; --ax) {
            wt *= w[rem % q];
            rem /= q;
        }
        terms[flat] = a[flat] * std::conj(b[flat]) * wt;
    }
    return pairwise_sum(terms);
}

}  // namespace hlab
