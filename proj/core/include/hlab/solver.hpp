#ifndef HLAB_SOLVER_HPP
#define HLAB_SOLVER_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "hlab/hermite.hpp"
#include "hlab/spectral_ops.hpp"

namespace hlab {

/// Collocation solver for i u_t - H u = kappa cos(2t)^{d(p-1)/2 - 2} |u|^{p-1} u
/// on |t| <= T < pi/4, in the harmonic frame.
struct SolverConfig {
    int kappa = 1;  // -1, 0, +1; 0 solves the linear flow
    int p = 3;      // odd, >= 3
    int dimension = 1;
    double T = 0.7;  // strictly below pi/4
    int time_nodes = 48;
    int max_picard_iters = 60;
    double picard_tol = 1e-10;
    long dealias_cutoff = 0;   // eigenvalue cutoff of the product table; 0 = p * working cutoff
    double sobolev_s = 1.0;    // norm for increments, residuals and the scattering curve
};

struct PicardDiagnostics {
    std::vector<double> increments;          // sup-in-time H^s of v^{(k+1)} - v^{(k)}
    std::vector<double> contraction_ratios;  // increments[k] / increments[k-1]
    double aliasing_mass = 0;                // worst relative L^2 mass lost to dealiasing
    int iterations = 0;
    bool converged = false;
};

struct PicardDivergence : std::runtime_error {
    std::vector<double> ratios;
    explicit PicardDivergence(std::vector<double> r)
        : std::runtime_error("Picard iteration is not contracting"), ratios(std::move(r)) {}
};

struct SolveResult {
    Trajectory trajectory;  // times ascending (Gauss-Legendre nodes on [-T, T])
    PicardDiagnostics diagnostics;
};

/// |u|^{p-1} u analyzed on the dealias table. The quadrature grid must hold
/// enough nodes for the product Gram to be exact (see make_dealias_grid).
/// lost_mass, when given, receives the L^2 mass outside the dealias table
/// relative to the product's own mass.
SpectralField nonlinearity(const SpectralField& field, int p, const QuadratureGrid& grid,
                           const ModeTable& dealias_table, double* lost_mass = nullptr);

/// Dealias table and matching quadrature grid for a working table and power p.
ModeTable make_dealias_table(const ModeTable& working, const SolverConfig& config);
QuadratureGrid make_dealias_grid(const ModeTable& working, const ModeTable& dealias, int p);

/// Picard fixed point of the Duhamel map on Gauss-Legendre collocation nodes.
/// Linear phases e^{-i(t-s)lambda^2} are integrated exactly against the
/// Legendre interpolant of the slowly varying part of the integrand.
/// Throws PicardDivergence after three consecutive non-contracting ratios.
SolveResult picard_solve(const SpectralField& u0, const SolverConfig& config);

/// Sup over off-node check times of the Duhamel defect
/// || u(t) - e^{-itH}u0 + i kappa int_0^t e^{-i(t-s)H} W(s) N(u(s)) ds ||
/// in H^{s-2}, with the integral re-evaluated on a finer independent rule.
double duhamel_residual(const Trajectory& traj, const SpectralField& u0,
                        const SolverConfig& config);

struct ScatteringResult {
    SpectralField L_plus;              // F(T) = e^{iTH} u(T) - u0
    std::vector<double> times;         // t_k increasing towards T
    std::vector<double> cauchy_curve;  // ||F(t_k) - F(T)||_{H^s}
    bool decreasing = false;
};

/// Cauchy curve of the interaction-picture limit along t_k = T (1 - 2^{-k}).
ScatteringResult scattering_limit(const Trajectory& traj, const SpectralField& u0,
                                  const SolverConfig& config);

struct FreeFrameSlice {
    double s = 0;                    // tan(2t)/2
    std::vector<cplx> dense_values;  // U(s, .) on the tensor dense grid
    std::vector<cplx> coeffs;        // re-analyzed Hermite coefficients
};

struct FreeFrameTrajectory {
    const ModeTable* table = nullptr;
    DenseGrid grid;
    std::vector<FreeFrameSlice> slices;
};

/// Lens map of a harmonic-frame trajectory to the free frame. Rejects
/// trajectories reaching |t| >= pi/4.
FreeFrameTrajectory to_free_nls(const Trajectory& traj, const DenseGrid& grid);

/// Textual round trip: one JSON header line (table and config), then one
/// block per time of "rank,re,im" rows.
std::string serialize_trajectory(const Trajectory& traj, const SolverConfig& config);

struct StoredTrajectory {
    SolverConfig config;
    int dimension = 1;
    long cutoff = 1;
    std::vector<double> times;
    std::vector<std::vector<cplx>> coeffs;
};

StoredTrajectory parse_trajectory(const std::string& text);

}  // namespace hlab

#endif
