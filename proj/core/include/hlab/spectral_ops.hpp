#ifndef HLAB_SPECTRAL_OPS_HPP
#define HLAB_SPECTRAL_OPS_HPP

#include <functional>
#include <vector>

#include "hlab/hermite.hpp"

namespace hlab {

/// Smooth transition: 0 for x <= a, 1 for x >= b, C^infinity in between.
double smoothstep(double a, double b, double x);

/// Smooth dyadic cutoffs. eta is 1 on [0,1] and 0 on [2,inf);
/// psi(x) = eta(x) - eta(4x) is supported in [1/4, 2];
/// phi is 1 on [1/4, 2] and 0 outside [1/4 - r, 2 + r].
struct DyadicCutoffs {
    double r = 0.05;
    double plateau = 1.0;  // exactly 1 for the standard family

    double eta(double x) const;
    double psi(double x) const { return eta(x) - eta(4.0 * x); }
    double phi(double x) const;
};

DyadicCutoffs standard_cutoffs();

/// Negative control: same supports but the low plateau of eta sits at 0.999
/// instead of 1, which silently breaks the dyadic partition of unity.
DyadicCutoffs tampered_cutoffs();

enum class ProjectorKind { sharp, wide };

/// Multiplier psi(lambda^2/N^2) (sharp) or phi(lambda^2/N^2) (wide) on the
/// coefficients. Sharp zeroes modes with lambda outside [N/2, sqrt(2) N]
/// exactly, decided on the integer eigenvalue.
SpectralField dyadic_project(const SpectralField& field, long N, ProjectorKind kind,
                             const DyadicCutoffs& cut = standard_cutoffs());

/// c_n -> e^{-i t lambda_n^2} c_n. Unitary in every H^s norm; period 2 pi in t.
SpectralField harmonic_propagate(const SpectralField& field, double t);

/// sqrt(sum lambda_n^{2s} |c_n|^2).
double sobolev_H_norm(const SpectralField& field, double s);

/// The two halves of the flat Sobolev norm: L^2 norm of (-Laplacian)^{s/2} u
/// (computed by a periodized Fourier multiplier on a uniform grid derived
/// from grid.dense) and L^2 norm of <x>^s u on the same grid.
struct SplitNorms {
    double lap_norm = 0;
    double weight_norm = 0;
};
SplitNorms split_norms(const SpectralField& field, double s, const QuadratureGrid& grid);

/// Free-frame evaluator: values of U(s, .) at the tensor points given by one
/// coordinate vector per axis.
using FreeFrameEval =
    std::function<std::vector<cplx>(double s, const std::vector<std::vector<double>>& axes)>;

/// u(t,x) = cos(2t)^{-d/2} U(tan(2t)/2, x/cos(2t)) e^{-i|x|^2 tan(2t)/2}.
/// Requires |t| < pi/4.
std::vector<cplx> lens_pullback(const FreeFrameEval& U, double t,
                                const std::vector<std::vector<double>>& x_axes);

/// Harmonic-frame evaluator for the inverse map.
using HarmonicFrameEval =
    std::function<std::vector<cplx>(double t, const std::vector<std::vector<double>>& axes)>;

/// U(s,y) = (1+4s^2)^{-d/4} u(arctan(2s)/2, y/sqrt(1+4s^2)) e^{i|y|^2 s/(1+4s^2)}.
std::vector<cplx> lens_pushforward(const HarmonicFrameEval& u, double s,
                                   const std::vector<std::vector<double>>& y_axes);

/// Periodic free Schrodinger flow e^{is Laplacian-multiplier}: values live on
/// the uniform tensor grid [-L, L)^d with m points per axis (m a power of
/// two); each Fourier mode is multiplied by e^{-i s |xi|^2}.
std::vector<cplx> free_evolve_periodic(std::vector<cplx> values, int dim, std::size_t m,
                                       double length, double s);

/// Evaluate the trigonometric interpolant of periodic 1D samples on [-L, L)
/// at arbitrary points.
std::vector<cplx> trig_interpolate(const std::vector<cplx>& values, double length,
                                   const std::vector<double>& points);

/// Coefficient time series c_n(t_i) over one mode table.
struct Trajectory {
    const ModeTable* table = nullptr;
    std::vector<double> times;
    std::vector<std::vector<cplx>> coeffs;  // coeffs[i] belongs to times[i]
};

struct XsbParams {
    double s = 0;
    double b = 0;
    double window_inner = 0.7853981633974483;  // pi/4: window is 1 inside
    double window_outer = 1.5707963267948966;  // pi/2: window is 0 outside
};

/// Discrete Bourgain norm: per mode, DFT the windowed time series, weight by
/// <tau + lambda_n^2>^b lambda_n^s, sum squares over modes and frequencies.
/// Requires a uniform time grid of power-of-two length.
double xsb_norm(const Trajectory& traj, const XsbParams& params);

}  // namespace hlab

#endif
