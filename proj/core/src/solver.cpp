#include "hlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "hlab/legendre.hpp"
#include "json.hpp"

namespace hlab {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;

void validate(const SolverConfig& cfg) {
    if (cfg.kappa < -1 || cfg.kappa > 1)
        throw std::invalid_argument("solver: kappa must be -1, 0 or +1");
    if (cfg.p < 3 || cfg.p % 2 == 0) throw std::invalid_argument("solver: p must be odd and >= 3");
    if (cfg.dimension < 1 || cfg.dimension > 3)
        throw std::invalid_argument("solver: dimension must be 1..3");
    if (!(cfg.T > 0.0) || !(cfg.T < kQuarterPi))
        throw std::invalid_argument("solver: T must lie in (0, pi/4)");
    if (cfg.time_nodes < 8) throw std::invalid_argument("solver: need at least 8 time nodes");
    if (!(cfg.picard_tol > 0)) throw std::invalid_argument("solver: picard_tol must be positive");
}

double cosine_weight(double t, const SolverConfig& cfg) {
    const double e = 0.5 * cfg.dimension * (cfg.p - 1) - 2.0;
    return std::pow(std::cos(2.0 * t), e);
}

cplx pointwise_power(cplx z, int p) {
    const double n = std::norm(z);
    double a = 1.0;
    for (int i = 0; i < (p - 1) / 2; ++i) a *= n;
    return z * a;
}

/// Collocation nodes on [-T, T] (ascending) with the value -> Legendre
/// coefficient matrix C: c_k = (2k+1)/2 sum_i w_i f(x_i) P_k(x_i).
struct TimeGrid {
    int m = 0;
    double T = 0;
    std::vector<double> x, w, t;
    Eigen::MatrixXd P;  // P(k, i) = P_k(x_i)
    Eigen::MatrixXd C;
};

TimeGrid make_time_grid(int m, double T) {
    TimeGrid g;
    g.m = m;
    g.T = T;
    GaussLegendre rule = gauss_legendre(m);
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return rule.nodes[a] < rule.nodes[b]; });
    g.x.resize(m);
    g.w.resize(m);
    g.t.resize(m);
    for (int i = 0; i < m; ++i) {
        g.x[i] = rule.nodes[order[i]];
        g.w[i] = rule.weights[order[i]];
        g.t[i] = T * g.x[i];
    }
    g.P.resize(m, m);
    for (int i = 0; i < m; ++i) {
        const auto col = legendre_column(m - 1, g.x[i]);
        for (int k = 0; k < m; ++k) g.P(k, i) = col[k];
    }
    g.C.resize(m, m);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i) g.C(k, i) = 0.5 * (2.0 * k + 1.0) * g.w[i] * g.P(k, i);
    return g;
}

/// Row of integrals from 0 to T*x_up of e^{i lam_sq s} P_k(s/T) ds, k < ncols.
/// Inner Gauss-Legendre rule sized to resolve both the polynomial degree and
/// the phase, so the moments are exact to rounding.
Eigen::RowVectorXcd phase_moments(long lam_sq, double x_up, double T, int ncols) {
    Eigen::RowVectorXcd out = Eigen::RowVectorXcd::Zero(ncols);
    if (x_up == 0.0) return out;
    const double lo = std::min(0.0, x_up), hi = std::max(0.0, x_up);
    const int nq =
        ncols / 2 + 24 + int(std::ceil(0.5 * std::abs(double(lam_sq)) * T * std::abs(x_up)));
    GaussLegendre rule = gauss_legendre(nq, lo, hi);
    for (int i = 0; i < nq; ++i) {
        const double xi = rule.nodes[i];
        const cplx ph = std::exp(cplx(0.0, double(lam_sq) * T * xi)) * rule.weights[i];
        const auto col = legendre_column(ncols - 1, xi);
        for (int k = 0; k < ncols; ++k) out(k) += ph * col[k];
    }
    out *= T * (x_up > 0 ? 1.0 : -1.0);
    return out;
}

/// Everything fixed across Picard iterations for one (table, config) pair.
struct Workspace {
    const ModeTable* table = nullptr;
    SolverConfig cfg;
    TimeGrid tg;
    ModeTable dealias;
    QuadratureGrid grid;
    std::map<long, std::vector<int>> groups;          // lambda_sq -> column ranks
    std::map<long, Eigen::MatrixXcd> integration;     // lambda_sq -> M(l) * C
    Eigen::MatrixXcd lin;                             // e^{-i t_j l_n} u0_n

    Workspace(const SpectralField& u0, const SolverConfig& config) : cfg(config) {
        validate(cfg);
        table = u0.table;
        if (!table || table->dimension != cfg.dimension)
            throw std::invalid_argument("solver: field table does not match config dimension");
        tg = make_time_grid(cfg.time_nodes, cfg.T);
        dealias = make_dealias_table(*table, cfg);
        grid = make_dealias_grid(*table, dealias, cfg.p);
        for (std::size_t n = 0; n < table->size(); ++n)
            groups[table->entries[n].lambda_sq].push_back(int(n));
        for (const auto& [l, cols] : groups) {
            Eigen::MatrixXcd M(tg.m, tg.m);
            for (int j = 0; j < tg.m; ++j) M.row(j) = phase_moments(l, tg.x[j], cfg.T, tg.m);
            integration[l] = M * tg.C;
        }
        const std::size_t K = table->size();
        lin.resize(tg.m, K);
        for (int j = 0; j < tg.m; ++j)
            for (std::size_t n = 0; n < K; ++n)
                lin(j, n) = std::exp(cplx(0.0, -tg.t[j] * double(table->entries[n].lambda_sq))) *
                            u0.coeffs[n];
    }

    /// W(t) * (working-table projection of |u|^{p-1}u) for one time node.
    std::pair<std::vector<cplx>, double> weighted_nonlinearity(const Eigen::MatrixXcd& U,
                                                               int j) const {
        const std::size_t K = table->size();
        SpectralField u(*table);
        for (std::size_t n = 0; n < K; ++n) u.coeffs[n] = U(j, n);
        double lost = 0;
        SpectralField prod = nonlinearity(u, cfg.p, grid, dealias, &lost);
        const double wt = cosine_weight(tg.t[j], cfg);
        std::vector<cplx> f(K);
        for (std::size_t n = 0; n < K; ++n) f[n] = wt * prod.coeffs[n];
        return {std::move(f), lost};
    }

    /// v(t_j) = -i kappa e^{-i t_j l} int_0^{t_j} e^{i s l} f(s) ds, from
    /// nodal values of the slowly varying part f.
    Eigen::MatrixXcd duhamel(const Eigen::MatrixXcd& F) const {
        Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(tg.m, table->size());
        const cplx factor = cplx(0.0, -1.0) * double(cfg.kappa);
        for (const auto& [l, cols] : groups) {
            Eigen::MatrixXcd Fg(tg.m, cols.size());
            for (std::size_t c = 0; c < cols.size(); ++c) Fg.col(c) = F.col(cols[c]);
            Eigen::MatrixXcd Vg = integration.at(l) * Fg;
            for (int j = 0; j < tg.m; ++j) {
                const cplx ph = factor * std::exp(cplx(0.0, -tg.t[j] * double(l)));
                for (std::size_t c = 0; c < cols.size(); ++c) V(j, cols[c]) = ph * Vg(j, c);
            }
        }
        return V;
    }

    double sup_sobolev(const Eigen::MatrixXcd& D, double s) const {
        double worst = 0;
        for (int j = 0; j < tg.m; ++j) {
            double acc = 0;
            for (std::size_t n = 0; n < table->size(); ++n)
                acc += std::pow(double(table->entries[n].lambda_sq), s) * std::norm(D(j, n));
            worst = std::max(worst, std::sqrt(acc));
        }
        return worst;
    }
};

/// Interaction-picture Legendre coefficients of a(t) = e^{itH} u(t).
Eigen::MatrixXcd interaction_coeffs(const Trajectory& traj, const TimeGrid& tg) {
    const std::size_t K = traj.table->size();
    if (traj.times.size() != std::size_t(tg.m))
        throw std::invalid_argument("solver: trajectory does not match the config time grid");
    Eigen::MatrixXcd A(tg.m, K);
    for (int j = 0; j < tg.m; ++j) {
        if (std::abs(traj.times[j] - tg.t[j]) > 1e-12)
            throw std::invalid_argument("solver: trajectory does not match the config time grid");
        for (std::size_t n = 0; n < K; ++n)
            A(j, n) = std::exp(cplx(0.0, tg.t[j] * double(traj.table->entries[n].lambda_sq))) *
                      traj.coeffs[j][n];
    }
    return tg.C * A;
}

Eigen::RowVectorXcd eval_legendre_series(const Eigen::MatrixXcd& chat, double x) {
    const auto col = legendre_column(int(chat.rows()) - 1, x);
    Eigen::RowVectorXd row(chat.rows());
    for (int k = 0; k < chat.rows(); ++k) row(k) = col[k];
    return row * chat;
}

}  // namespace

ModeTable make_dealias_table(const ModeTable& working, const SolverConfig& config) {
    long cutoff = config.dealias_cutoff > 0 ? config.dealias_cutoff : config.p * working.cutoff;
    if (cutoff < working.cutoff)
        throw std::invalid_argument("solver: dealias cutoff below the working cutoff");
    ModeTable dealias = build_mode_table(working.dimension, cutoff);
    for (std::size_t n = 0; n < working.size(); ++n)
        if (dealias.entries[n].index != working.entries[n].index)
            throw std::logic_error("solver: dealias table is not an extension of the working one");
    return dealias;
}

QuadratureGrid make_dealias_grid(const ModeTable& working, const ModeTable& dealias, int p) {
    // The product of p working modes against a dealias mode decays like
    // e^{-(p+1)x^2/2}; Gauss-Hermite handles the extra Gaussian with
    // geometric accuracy, the +33 keeps that error near rounding.
    const int order = (p * working.max_index_1d + dealias.max_index_1d) / 2 + 33;
    return gauss_hermite_grid(std::max(order, dealias.max_index_1d + 1));
}

SpectralField nonlinearity(const SpectralField& field, int p, const QuadratureGrid& grid,
                           const ModeTable& dealias_table, double* lost_mass) {
    if (p < 3 || p % 2 == 0) throw std::invalid_argument("nonlinearity: p must be odd and >= 3");
    std::vector<cplx> vals = synthesize(field, grid);
    for (auto& z : vals) z = pointwise_power(z, p);
    SpectralField out = analyze(vals, grid, dealias_table);
    if (lost_mass) {
        const double total = quad_inner_product(vals, vals, grid, dealias_table.dimension).real();
        double captured = 0;
        for (const auto& c : out.coeffs) captured += std::norm(c);
        *lost_mass = total > 0 ? std::sqrt(std::max(0.0, total - captured) / total) : 0.0;
    }
    return out;
}

SolveResult picard_solve(const SpectralField& u0, const SolverConfig& config) {
    Workspace ws(u0, config);
    const std::size_t K = ws.table->size();
    const int m = ws.tg.m;
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(m, K);
    PicardDiagnostics diag;
    int bad_streak = 0;
    double prev_increment = -1;
    for (int iter = 0; iter < config.max_picard_iters; ++iter) {
        Eigen::MatrixXcd U = ws.lin + V;
        auto rows = parallel_map<std::pair<std::vector<cplx>, double>>(
            std::size_t(m), default_threads(),
            [&](std::size_t j) { return ws.weighted_nonlinearity(U, int(j)); });
        Eigen::MatrixXcd F(m, K);
        for (int j = 0; j < m; ++j) {
            for (std::size_t n = 0; n < K; ++n) F(j, n) = rows[j].first[n];
            diag.aliasing_mass = std::max(diag.aliasing_mass, rows[j].second);
        }
        Eigen::MatrixXcd Vnew = ws.duhamel(F);
        const double inc = ws.sup_sobolev(Vnew - V, config.sobolev_s);
        diag.increments.push_back(inc);
        diag.iterations = iter + 1;
        V = std::move(Vnew);
        if (inc < config.picard_tol) {
            diag.converged = true;
            break;
        }
        if (prev_increment > 0) {
            const double ratio = std::isfinite(inc) ? inc / prev_increment
                                                    : std::numeric_limits<double>::infinity();
            diag.contraction_ratios.push_back(ratio);
            bad_streak = ratio >= 1.0 ? bad_streak + 1 : 0;
            if (bad_streak >= 3) throw PicardDivergence(diag.contraction_ratios);
        }
        prev_increment = inc;
    }
    SolveResult out;
    out.diagnostics = std::move(diag);
    out.trajectory.table = ws.table;
    out.trajectory.times = ws.tg.t;
    out.trajectory.coeffs.resize(m);
    Eigen::MatrixXcd U = ws.lin + V;
    for (int j = 0; j < m; ++j) {
        out.trajectory.coeffs[j].resize(K);
        for (std::size_t n = 0; n < K; ++n) out.trajectory.coeffs[j][n] = U(j, n);
    }
    return out;
}

double duhamel_residual(const Trajectory& traj, const SpectralField& u0,
                        const SolverConfig& config) {
    Workspace ws(u0, config);
    const std::size_t K = ws.table->size();
    Eigen::MatrixXcd chat = interaction_coeffs(traj, ws.tg);

    // Re-evaluate the nonlinearity on an independent, twice-finer rule fed by
    // the interpolated trajectory.
    TimeGrid fine = make_time_grid(2 * ws.tg.m, config.T);
    Eigen::MatrixXd Pf(fine.m, ws.tg.m);
    for (int i = 0; i < fine.m; ++i) {
        const auto col = legendre_column(ws.tg.m - 1, fine.x[i]);
        for (int k = 0; k < ws.tg.m; ++k) Pf(i, k) = col[k];
    }
    Eigen::MatrixXcd afine = Pf * chat;
    Eigen::MatrixXcd Ufine(fine.m, K);
    for (int i = 0; i < fine.m; ++i)
        for (std::size_t n = 0; n < K; ++n)
            Ufine(i, n) =
                std::exp(cplx(0.0, -fine.t[i] * double(ws.table->entries[n].lambda_sq))) *
                afine(i, n);
    auto rows = parallel_map<std::vector<cplx>>(
        std::size_t(fine.m), default_threads(), [&](std::size_t i) {
            SpectralField u(*ws.table);
            for (std::size_t n = 0; n < K; ++n) u.coeffs[n] = Ufine(i, n);
            SpectralField prod = nonlinearity(u, config.p, ws.grid, ws.dealias);
            const double wt = cosine_weight(fine.t[i], config);
            std::vector<cplx> f(K);
            for (std::size_t n = 0; n < K; ++n) f[n] = wt * prod.coeffs[n];
            return f;
        });
    Eigen::MatrixXcd Ffine(fine.m, K);
    for (int i = 0; i < fine.m; ++i)
        for (std::size_t n = 0; n < K; ++n) Ffine(i, n) = rows[i][n];
    Eigen::MatrixXcd fhat = fine.C * Ffine;

    const cplx ikappa = cplx(0.0, 1.0) * double(config.kappa);
    const double s_res = config.sobolev_s - 2.0;
    double worst = 0;
    for (int c = 0; c < 9; ++c) {
        const double x_up = 0.95 * (-1.0 + 0.25 * c);
        Eigen::RowVectorXcd a_here = eval_legendre_series(chat, x_up);
        double acc = 0;
        for (const auto& [l, cols] : ws.groups) {
            Eigen::RowVectorXcd mom = phase_moments(l, x_up, config.T, fine.m);
            for (int n : cols) {
                const cplx integral = mom * fhat.col(n);
                const cplx res = a_here(n) - u0.coeffs[n] + ikappa * integral;
                acc += std::pow(double(l), s_res) * std::norm(res);
            }
        }
        worst = std::max(worst, std::sqrt(acc));
    }
    return worst;
}

ScatteringResult scattering_limit(const Trajectory& traj, const SpectralField& u0,
                                  const SolverConfig& config) {
    Workspace ws(u0, config);
    const std::size_t K = ws.table->size();
    Eigen::MatrixXcd chat = interaction_coeffs(traj, ws.tg);
    Eigen::RowVectorXcd a_end = eval_legendre_series(chat, 1.0);

    ScatteringResult out;
    out.L_plus = SpectralField(*ws.table);
    for (std::size_t n = 0; n < K; ++n) out.L_plus.coeffs[n] = a_end(n) - u0.coeffs[n];
    for (int k = 1; k <= 14; ++k) {
        const double x = 1.0 - std::pow(2.0, -k);
        Eigen::RowVectorXcd a_here = eval_legendre_series(chat, x);
        double acc = 0;
        for (std::size_t n = 0; n < K; ++n)
            acc += std::pow(double(ws.table->entries[n].lambda_sq), config.sobolev_s) *
                   std::norm(a_here(n) - a_end(n));
        out.times.push_back(config.T * x);
        out.cauchy_curve.push_back(std::sqrt(acc));
    }
    out.decreasing = true;
    for (std::size_t k = 1; k < out.cauchy_curve.size(); ++k)
        if (!(out.cauchy_curve[k] < out.cauchy_curve[k - 1])) out.decreasing = false;
    return out;
}

FreeFrameTrajectory to_free_nls(const Trajectory& traj, const DenseGrid& grid) {
    if (!traj.table) throw std::invalid_argument("to_free_nls: empty trajectory");
    const ModeTable& table = *traj.table;
    for (double t : traj.times)
        if (std::abs(t) >= kQuarterPi)
            throw std::invalid_argument("to_free_nls: times must lie inside (-pi/4, pi/4)");
    FreeFrameTrajectory out;
    out.table = &table;
    out.grid = grid;
    const std::vector<double> axis = grid.points();
    const std::vector<std::vector<double>> dense_axes(table.dimension, axis);
    QuadratureGrid qgrid = gauss_hermite_grid(table.max_index_1d + 49);
    const std::vector<double> qaxis(qgrid.nodes_1d.begin(), qgrid.nodes_1d.end());
    const std::vector<std::vector<double>> quad_axes(table.dimension, qaxis);
    out.slices.resize(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        SpectralField u(table);
        u.coeffs = traj.coeffs[i];
        HarmonicFrameEval eval = [&](double, const std::vector<std::vector<double>>& axes) {
            return synthesize_at(u, axes);
        };
        FreeFrameSlice& slice = out.slices[i];
        slice.s = 0.5 * std::tan(2.0 * t);
        slice.dense_values = lens_pushforward(eval, slice.s, dense_axes);
        std::vector<cplx> qvals = lens_pushforward(eval, slice.s, quad_axes);
        slice.coeffs = analyze(qvals, qgrid, table).coeffs;
    }
    return out;
}

namespace {

nlohmann::ordered_json config_json(const SolverConfig& c) {
    return {{"kappa", c.kappa},
            {"p", c.p},
            {"dimension", c.dimension},
            {"T", c.T},
            {"time_nodes", c.time_nodes},
            {"max_picard_iters", c.max_picard_iters},
            {"picard_tol", c.picard_tol},
            {"dealias_cutoff", c.dealias_cutoff},
            {"sobolev_s", c.sobolev_s}};
}

SolverConfig config_from_json(const nlohmann::json& j) {
    SolverConfig c;
    c.kappa = j.at("kappa").get<int>();
    c.p = j.at("p").get<int>();
    c.dimension = j.at("dimension").get<int>();
    c.T = j.at("T").get<double>();
    c.time_nodes = j.at("time_nodes").get<int>();
    c.max_picard_iters = j.at("max_picard_iters").get<int>();
    c.picard_tol = j.at("picard_tol").get<double>();
    c.dealias_cutoff = j.at("dealias_cutoff").get<long>();
    c.sobolev_s = j.at("sobolev_s").get<double>();
    return c;
}

}  // namespace

std::string serialize_trajectory(const Trajectory& traj, const SolverConfig& config) {
    if (!traj.table) throw std::invalid_argument("serialize_trajectory: empty trajectory");
    nlohmann::ordered_json header = {{"dimension", traj.table->dimension},
                                     {"cutoff", traj.table->cutoff},
                                     {"config", config_json(config)}};
    std::ostringstream out;
    out << header.dump() << "\n";
    char buf[96];
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "t %.17g\n", traj.times[i]);
        out << buf;
        for (std::size_t n = 0; n < traj.coeffs[i].size(); ++n) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", n, traj.coeffs[i][n].real(),
                          traj.coeffs[i][n].imag());
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

StoredTrajectory parse_trajectory(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("parse_trajectory: empty input");
    nlohmann::json header = nlohmann::json::parse(line);
    StoredTrajectory out;
    out.dimension = header.at("dimension").get<int>();
    out.cutoff = header.at("cutoff").get<long>();
    out.config = config_from_json(header.at("config"));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == 't' && line.size() > 1 && line[1] == ' ') {
            out.times.push_back(std::stod(line.substr(2)));
            out.coeffs.emplace_back();
            continue;
        }
        std::size_t rank = 0;
        double re = 0, im = 0;
        if (std::sscanf(line.c_str(), "%zu,%lf,%lf", &rank, &re, &im) != 3)
            throw std::invalid_argument("parse_trajectory: bad row: " + line);
        if (out.coeffs.empty() || rank != out.coeffs.back().size())
            throw std::invalid_argument("parse_trajectory: ranks out of order");
        out.coeffs.back().emplace_back(re, im);
    }
    return out;
}

}  // namespace hlab
