#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hlab/fft.hpp"
#include "hlab/hermite.hpp"
#include "hlab/rng.hpp"
#include "hlab/spectral_ops.hpp"

using namespace hlab;

namespace {

SpectralField random_field(const ModeTable& table, std::uint64_t seed) {
    SpectralField f(table);
    for (std::size_t i = 0; i < table.size(); ++i)
        f.coeffs[i] = rng::complex_gaussian(seed, 0, i);
    return f;
}

}  // namespace

TEST_CASE("cutoff supports and plateaus") {
    auto cut = standard_cutoffs();
    CHECK(cut.eta(0.3) == 1.0);
    CHECK(cut.eta(1.0) == 1.0);
    CHECK(cut.eta(2.0) == 0.0);
    CHECK(cut.eta(5.0) == 0.0);
    for (double x = 0.0; x <= 4.0; x += 0.001) {
        if (x < 0.25 || x > 2.0) CHECK(cut.psi(x) == 0.0);
        CHECK(cut.phi(x) * cut.psi(x) == cut.psi(x));
        if (x >= 0.25 && x <= 2.0) CHECK(cut.phi(x) == 1.0);
        if (x <= 0.25 - cut.r || x >= 2.0 + cut.r) CHECK(cut.phi(x) == 0.0);
    }
}

TEST_CASE("ground state d=3 killed by N=1 projector") {
    auto table = build_mode_table(3, 3);
    SpectralField f(table);
    f.coeffs[0] = 1.0;
    auto p = dyadic_project(f, 1, ProjectorKind::sharp);
    CHECK(p.coeffs[0] == cplx{});  // lambda^2 = 3 > 2
}

TEST_CASE("wide after sharp is sharp, bitwise") {
    auto table = build_mode_table(1, 201);
    auto f = random_field(table, 11);
    for (long N : {1L, 2L, 4L, 8L}) {
        auto sharp = dyadic_project(f, N, ProjectorKind::sharp);
        auto both = dyadic_project(sharp, N, ProjectorKind::wide);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(both.coeffs[i] == sharp.coeffs[i]);
    }
}

TEST_CASE("disjoint dyadic blocks annihilate") {
    auto table = build_mode_table(1, 301);
    auto f = random_field(table, 12);
    auto a = dyadic_project(dyadic_project(f, 8, ProjectorKind::sharp), 1, ProjectorKind::sharp);
    for (const auto& c : a.coeffs) CHECK(c == cplx{});
}

TEST_CASE("dyadic multipliers form a partition of unity") {
    auto cut = standard_cutoffs();
    const int J = 5;
    for (long lsq = 1; lsq <= (1L << (2 * J)); lsq += 2) {
        double sum = 0.0;
        for (int j = 0; j <= J; ++j) {
            const double n_sq = double(1L << (2 * j));
            sum += cut.psi(double(lsq) / n_sq);
        }
        CHECK(sum == 1.0);
    }
}

TEST_CASE("partition reassembles fields to rounding") {
    auto table = build_mode_table(1, 63);  // cutoff <= 4^3
    auto f = random_field(table, 13);
    SpectralField acc(table);
    for (long N : {1L, 2L, 4L, 8L}) {
        auto p = dyadic_project(f, N, ProjectorKind::sharp);
        for (std::size_t i = 0; i < f.size(); ++i) acc.coeffs[i] += p.coeffs[i];
    }
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(std::abs(acc.coeffs[i] - f.coeffs[i]) <= 4e-16 * std::abs(f.coeffs[i]));
}

TEST_CASE("tampered cutoffs break the partition") {
    auto cut = tampered_cutoffs();
    double sum = 0.0;
    for (int j = 0; j <= 3; ++j) sum += cut.psi(3.0 / double(1L << (2 * j)));
    CHECK(std::abs(sum - 1.0) > 1e-4);
}

TEST_CASE("propagator identity, periodicity, parity") {
    auto table = build_mode_table(1, 41);
    auto f = random_field(table, 14);
    auto id = harmonic_propagate(f, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(id.coeffs[i] == f.coeffs[i]);

    auto flip = harmonic_propagate(f, std::numbers::pi);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(std::abs(flip.coeffs[i] + f.coeffs[i]) < 1e-11);

    auto period = harmonic_propagate(f, 2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(std::abs(period.coeffs[i] - f.coeffs[i]) < 1e-11);
}

TEST_CASE("propagator is unitary in every H^s") {
    auto table = build_mode_table(2, 30);
    auto f = random_field(table, 15);
    for (double s : {-1.0, 0.0, 0.5, 2.0})
        for (double t : {0.3, 1.7, -4.0}) {
            auto g = harmonic_propagate(f, t);
            CHECK(sobolev_H_norm(g, s) ==
                  doctest::Approx(sobolev_H_norm(f, s)).epsilon(1e-14));
        }
}

TEST_CASE("sobolev norm oracles") {
    auto t3 = build_mode_table(3, 3);
    SpectralField ground(t3);
    ground.coeffs[0] = 1.0;
    CHECK(sobolev_H_norm(ground, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

    auto t1 = build_mode_table(1, 25);
    auto f = random_field(t1, 16);
    double l2 = 0.0, direct = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        l2 += std::norm(f.coeffs[i]);
        direct += std::pow(double(t1.entries[i].lambda_sq), 0.7) * std::norm(f.coeffs[i]);
    }
    CHECK(sobolev_H_norm(f, 0.0) == doctest::Approx(std::sqrt(l2)).epsilon(1e-13));
    CHECK(sobolev_H_norm(f, 0.7) == doctest::Approx(std::sqrt(direct)).epsilon(1e-13));
}

TEST_CASE("split norms at s=0 reduce to L2") {
    auto table = build_mode_table(1, 21);
    auto f = random_field(table, 17);
    auto grid = gauss_hermite_grid(table.max_index_1d + 1, 12.0, 0.02);
    auto sn = split_norms(f, 0.0, grid);
    const double l2 = sobolev_H_norm(f, 0.0);
    CHECK(sn.lap_norm == doctest::Approx(l2).epsilon(1e-8));
    CHECK(sn.weight_norm == doctest::Approx(l2).epsilon(1e-8));
    CHECK_THROWS(split_norms(f, -0.5, grid));
}

TEST_CASE("split norms at s=1 recover the eigenvalue identity") {
    // For an eigenfunction, |grad u|^2 + |x u|^2 integrates to lambda^2, and
    // <x>^2 = 1 + |x|^2 adds one unit of mass.
    auto table = build_mode_table(1, 15);
    for (std::size_t r : {std::size_t(0), std::size_t(4), std::size_t(7)}) {
        SpectralField f(table);
        f.coeffs[r] = 1.0;
        auto grid = gauss_hermite_grid(table.max_index_1d + 1, 14.0, 0.01);
        auto sn = split_norms(f, 1.0, grid);
        const double lsq = double(table.entries[r].lambda_sq);
        const double grad_sq = sn.lap_norm * sn.lap_norm;
        const double xw_sq = sn.weight_norm * sn.weight_norm - 1.0;  // strip <x>^0 part
        CHECK(grad_sq + xw_sq == doctest::Approx(lsq).epsilon(1e-6));
    }
}

TEST_CASE("split norm bracket against H^s over random fields") {
    auto table = build_mode_table(1, 31);
    auto grid = gauss_hermite_grid(table.max_index_1d + 1, 12.0, 0.02);
    double lo = 1e9, hi = 0;
    for (int k = 0; k < 20; ++k) {
        auto f = random_field(table, 100 + k);
        auto sn = split_norms(f, 1.0, grid);
        const double ratio = (sn.lap_norm + sn.weight_norm) / sobolev_H_norm(f, 1.0);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(lo > 0.5);
    CHECK(hi < 2.5);
}

TEST_CASE("lens maps invert each other") {
    auto table = build_mode_table(1, 21);
    auto f = random_field(table, 18);
    HarmonicFrameEval u = [&](double t, const std::vector<std::vector<double>>& axes) {
        auto g = harmonic_propagate(f, t);
        return synthesize_at(g, axes);
    };
    const double s = 0.35;
    FreeFrameEval U = [&](double sv, const std::vector<std::vector<double>>& axes) {
        CHECK(sv == doctest::Approx(s).epsilon(1e-12));
        return lens_pushforward(u, sv, axes);
    };
    const double t = 0.5 * std::atan(2.0 * s);
    std::vector<double> xs;
    for (double x = -3.0; x <= 3.0; x += 0.25) xs.push_back(x);
    auto round_trip = lens_pullback(U, t, {xs});
    auto direct = u(t, {xs});
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(std::abs(round_trip[i] - direct[i]) < 1e-12);
}

TEST_CASE("lens pullback at t=0 is the identity") {
    std::vector<double> xs = {-1.0, 0.0, 0.7};
    FreeFrameEval U = [&](double, const std::vector<std::vector<double>>& axes) {
        std::vector<cplx> v;
        for (double x : axes[0]) v.push_back(cplx(x, -x * x));
        return v;
    };
    auto out = lens_pullback(U, 0.0, {xs});
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(out[i] == cplx(xs[i], -xs[i] * xs[i]));
    CHECK_THROWS(lens_pullback(U, 0.8, {xs}));
}

TEST_CASE("free periodic flow conserves mass and matches a plane wave") {
    const std::size_t m = 128;
    const double L = 8.0, dx = 2.0 * L / m;
    std::vector<cplx> values(m);
    const double xi = fft_freq(3, m, dx);
    for (std::size_t j = 0; j < m; ++j)
        values[j] = std::polar(1.0, xi * (-L + j * dx));
    auto out = free_evolve_periodic(values, 1, m, L, 0.4);
    for (std::size_t j = 0; j < m; ++j) {
        const cplx expect = std::polar(1.0, xi * (-L + j * dx) - 0.4 * xi * xi);
        CHECK(std::abs(out[j] - expect) < 1e-12);
    }
}

TEST_CASE("trig interpolation reproduces samples") {
    const std::size_t m = 64;
    const double L = 5.0, dx = 2.0 * L / m;
    std::vector<cplx> values(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double x = -L + j * dx;
        values[j] = cplx(std::exp(-x * x), std::sin(x));
    }
    std::vector<double> pts(m);
    for (std::size_t j = 0; j < m; ++j) pts[j] = -L + j * dx;
    auto out = trig_interpolate(values, L, pts);
    for (std::size_t j = 0; j < m; ++j) CHECK(std::abs(out[j] - values[j]) < 1e-11);
}

TEST_CASE("harmonic flow equals lens-pulled free flow") {
    auto table = build_mode_table(1, 59);  // 30 modes
    auto f = random_field(table, 19);
    for (auto& c : f.coeffs) c /= 4.0;

    const std::size_t m = 1024;
    const double L = 26.0;
    const double dx = 2.0 * L / m;
    std::vector<double> grid_pts(m);
    for (std::size_t j = 0; j < m; ++j) grid_pts[j] = -L + j * dx;
    auto u0 = synthesize_at(f, {grid_pts});

    FreeFrameEval U = [&](double s, const std::vector<std::vector<double>>& axes) {
        auto evolved = free_evolve_periodic(u0, 1, m, L, s);
        return trig_interpolate(evolved, L, axes[0]);
    };

    std::vector<double> xs;
    for (double x = -4.0; x <= 4.0; x += 0.1) xs.push_back(x);
    double worst = 0.0;
    for (double t : {-0.6, -0.3, 0.15, 0.45, 0.6}) {
        auto lensed = lens_pullback(U, t, {xs});
        auto direct = synthesize_at(harmonic_propagate(f, t), {xs});
        for (std::size_t i = 0; i < xs.size(); ++i)
            worst = std::max(worst, std::abs(lensed[i] - direct[i]));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("xsb norm at b=0 s=0 is the windowed space-time L2") {
    auto table = build_mode_table(1, 21);
    auto f = random_field(table, 20);
    const std::size_t m = 256;
    Trajectory traj;
    traj.table = &table;
    const double t0 = -std::numbers::pi / 2.0, dt = std::numbers::pi / double(m);
    for (std::size_t i = 0; i < m; ++i) {
        traj.times.push_back(t0 + double(i) * dt);
        traj.coeffs.push_back(harmonic_propagate(f, traj.times.back()).coeffs);
    }
    XsbParams p;
    const double got = xsb_norm(traj, p);
    double ref_sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = 1.0 - smoothstep(p.window_inner, p.window_outer,
                                          std::abs(traj.times[i]));
        double amp = 0.0;
        for (const auto& c : traj.coeffs[i]) amp += std::norm(c);
        ref_sq += w * w * amp * dt;
    }
    CHECK(got == doctest::Approx(std::sqrt(ref_sq)).epsilon(1e-10));
}

TEST_CASE("xsb norm concentrates for exact linear flow and grows with b") {
    auto table = build_mode_table(1, 9);
    auto f = random_field(table, 21);
    const std::size_t m = 512;
    Trajectory traj;
    traj.table = &table;
    const double t0 = -std::numbers::pi / 2.0, dt = std::numbers::pi / double(m);
    for (std::size_t i = 0; i < m; ++i) {
        traj.times.push_back(t0 + double(i) * dt);
        traj.coeffs.push_back(harmonic_propagate(f, traj.times.back()).coeffs);
    }
    XsbParams p0, p1;
    p1.b = 1.0;
    const double n0 = xsb_norm(traj, p0);
    const double n1 = xsb_norm(traj, p1);
    CHECK(n1 >= n0);
    CHECK(n1 < 2.0 * n0);

    XsbParams ph;
    ph.b = 0.5;
    const double nh = xsb_norm(traj, ph);
    CHECK(nh >= n0);
    CHECK(nh <= n1);

    Trajectory bad = traj;
    bad.times[3] += 0.01;
    CHECK_THROWS(xsb_norm(bad, p0));
}
