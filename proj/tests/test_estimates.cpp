#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hlab/estimates.hpp"
#include "hlab/legendre.hpp"
#include "hlab/rng.hpp"
#include "hlab/spectral_ops.hpp"

using namespace hlab;

TEST_CASE("fit scaling recovers exact power laws") {
    std::vector<std::pair<double, double>> quad, flat;
    for (double x : {1.0, 2.0, 3.5, 7.0}) {
        quad.push_back({x, x * x});
        flat.push_back({x, 5.0});
    }
    auto f1 = fit_scaling(quad);
    CHECK(f1.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f1.max_residual < 1e-12);
    auto f2 = fit_scaling(flat);
    CHECK(f2.slope == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(f2.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-12));

    std::vector<std::pair<double, double>> noisy;
    for (int k = 0; k < 30; ++k) {
        const double x = 1.0 + k;
        const double jitter = 1.0 + 0.02 * rng::gaussian(1, k, 0);
        noisy.push_back({x, 3.0 * std::pow(x, -1.7) * jitter});
    }
    CHECK(fit_scaling(noisy).slope == doctest::Approx(-1.7).epsilon(0.02));

    CHECK_THROWS(fit_scaling({{1.0, 1.0}, {2.0, 2.0}}));
    CHECK_THROWS(fit_scaling({{1.0, 1.0}, {2.0, -2.0}, {3.0, 1.0}}));
}

TEST_CASE("lp norm oracles") {
    const double pi_quarter = std::pow(std::numbers::pi, -0.25);
    CHECK(hermite_lp_norm({0, 0, 0}, 1, kInfinity) == doctest::Approx(pi_quarter).epsilon(1e-10));
    CHECK(hermite_lp_norm({0, 0, 0}, 3, kInfinity) ==
          doctest::Approx(std::pow(pi_quarter, 3)).epsilon(1e-9));
    for (int n : {0, 3, 17, 120})
        CHECK(hermite_lp_norm({n, 0, 0}, 1, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
    const double e0_l4 = std::pow(1.0 / std::sqrt(2.0 * std::numbers::pi), 0.25);
    CHECK(hermite_lp_norm({0, 0, 0}, 1, 4.0) == doctest::Approx(e0_l4).epsilon(1e-10));
    CHECK_THROWS(hermite_lp_norm({0, 0, 0}, 1, 0.5));
}

TEST_CASE("sup norm decays like the minus one sixth power") {
    std::vector<std::pair<double, double>> pts;
    for (int n : {64, 128, 256, 512, 1024}) {
        const double mu = std::sqrt(2.0 * n + 1.0);
        pts.push_back({mu, hermite_lp_norm({n, 0, 0}, 1, kInfinity)});
    }
    auto fit = fit_scaling(pts);
    CHECK(fit.slope == doctest::Approx(-1.0 / 6.0).epsilon(0.2));
}

TEST_CASE("pair product norms") {
    auto p00 = product_sobolev_norm({{{0, 0, 0}, {0, 0, 0}}}, 1, 0.0);
    CHECK(p00.value == doctest::Approx(std::pow(2.0 * std::numbers::pi, -0.25)).epsilon(1e-12));
    CHECK(p00.truncated_mass < 1e-12);

    auto p35 = product_sobolev_norm({{{3, 0, 0}, {5, 0, 0}}}, 1, 0.0);
    CHECK(p35.value * p35.value ==
          doctest::Approx(quartic_integral_1d(3, 5, 3, 5)).epsilon(1e-11));

    auto p2 = product_sobolev_norm({{{2, 1, 0}, {1, 2, 0}}}, 2, 0.5);
    CHECK(p2.value > 0.0);
    CHECK(p2.truncated_mass < 1e-10);

    CHECK_THROWS(product_sobolev_norm({{{0, 0, 0}}}, 1, 0.0));
    CHECK_THROWS(product_sobolev_norm({{{0, 0, 0}, {0, 0, 0}}}, 1, 1.5));
}

TEST_CASE("pair product scan slope stays near minus one half") {
    std::vector<std::pair<double, double>> pts;
    for (int n : {8, 16, 32, 64, 128}) {
        const double mu = std::sqrt(2.0 * n + 1.0);
        pts.push_back({mu, product_sobolev_norm({{{2, 0, 0}, {n, 0, 0}}}, 1, 0.0).value});
    }
    CHECK(fit_scaling(pts).slope <= -0.4);
}

TEST_CASE("quartic integral oracles and parity") {
    const double e0_4 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    CHECK(quartic_integral_1d(0, 0, 0, 0) == doctest::Approx(e0_4).epsilon(1e-13));
    CHECK(quartic_integral_1d(1, 0, 0, 0) == 0.0);
    CHECK(quartic_integral({{{{1, 0, 0}}, {{0, 1, 0}}, {{0, 0, 0}}, {{0, 0, 0}}}}, 2) == 0.0);
    const double d2 = quartic_integral({{{{0, 0, 0}}, {{0, 0, 0}}, {{0, 0, 0}}, {{0, 0, 0}}}}, 2);
    CHECK(d2 == doctest::Approx(e0_4 * e0_4).epsilon(1e-12));
    // Symmetric in its arguments.
    CHECK(quartic_integral_1d(2, 4, 6, 8) == doctest::Approx(quartic_integral_1d(8, 2, 6, 4)));
}

TEST_CASE("quartic integrals decay superpolynomially in the high index") {
    std::vector<std::pair<double, double>> pts;
    for (int n1 : {16, 32, 64, 128, 256}) {
        const double v = std::abs(quartic_integral_1d(n1, 4, 3, 1));
        if (v > 0) pts.push_back({std::sqrt(2.0 * n1 + 1.0), v});
    }
    REQUIRE(pts.size() >= 4);
    CHECK(fit_scaling(pts).slope <= -4.0);
}

TEST_CASE("bilinear single mode oracle") {
    for (int dim : {1, 2}) {
        auto table = build_mode_table(dim, 2 * 16 + dim);
        BlockField f;
        std::size_t rank = 0;
        for (std::size_t i = 0; i < table.size(); ++i)
            if (table.entries[i].index == std::array<int, 3>{3, dim == 2 ? 1 : 0, 0}) rank = i;
        f.ranks = {rank};
        f.coeffs = {cplx{1.0, 0.0}};
        const double q = bilinear_Q(table, f, f);
        std::vector<std::array<int, 3>> idx = {table.entries[rank].index,
                                               table.entries[rank].index};
        const double prod_l2 = product_sobolev_norm(idx, dim, 0.0).value;
        CHECK(q == doctest::Approx(std::sqrt(2.0) * prod_l2).epsilon(1e-10));
    }
}

TEST_CASE("bilinear agrees with brute force quadrature") {
    auto table = build_mode_table(1, 2 * 16);
    auto a = random_block_field(table, 2, 8, 7, 0);
    auto b = random_block_field(table, 4, 8, 7, 1);
    const double q = bilinear_Q(table, a, b);

    SpectralField fa(table), fb(table);
    for (std::size_t j = 0; j < a.ranks.size(); ++j) fa.coeffs[a.ranks[j]] = a.coeffs[j];
    for (std::size_t j = 0; j < b.ranks.size(); ++j) fb.coeffs[b.ranks[j]] = b.coeffs[j];
    const auto gl = gauss_legendre(48, -1.0, 1.0);
    const auto rule = scaled_gauss_rule(80, 2.0);
    double q_sq = 0.0;
    for (int t = 0; t < 48; ++t) {
        auto va = synthesize_at(harmonic_propagate(fa, gl.nodes[t]), {rule.nodes});
        auto vb = synthesize_at(harmonic_propagate(fb, gl.nodes[t]), {rule.nodes});
        double space = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            space += rule.weights[i] * std::norm(va[i] * vb[i]);
        q_sq += gl.weights[t] * space;
    }
    CHECK(q == doctest::Approx(std::sqrt(q_sq)).epsilon(1e-8));
}

TEST_CASE("bilinear time shift covariance") {
    auto table = build_mode_table(1, 2 * 16);
    auto a = random_block_field(table, 2, 8, 9, 0);
    auto b = random_block_field(table, 4, 8, 9, 1);
    const double t0 = 0.37;
    BlockField sa = a, sb = b;
    for (std::size_t j = 0; j < sa.ranks.size(); ++j)
        sa.coeffs[j] *= std::polar(1.0, -t0 * double(table.entries[sa.ranks[j]].lambda_sq));
    for (std::size_t j = 0; j < sb.ranks.size(); ++j)
        sb.coeffs[j] *= std::polar(1.0, -t0 * double(table.entries[sb.ranks[j]].lambda_sq));
    CHECK(bilinear_Q(table, sa, sb, 0.0) ==
          doctest::Approx(bilinear_Q(table, a, b, t0)).epsilon(1e-10));
}

TEST_CASE("bilinear experiment returns sane ratios") {
    auto stats = bilinear_experiment(2, 4, 8, 5, 11);
    CHECK(stats.envelope > 0.0);
    CHECK(stats.max_ratio >= stats.mean_ratio);
    CHECK(stats.mean_ratio > 0.0);
    auto table = build_mode_table(1, 3);
    CHECK_THROWS(random_block_field(table, 8, 8, 1, 0));
}

TEST_CASE("smoothing single mode oracle") {
    const double eps = 0.1;
    auto res = smoothing_experiment(1, 1, 3, eps, 13);  // table holds only e_0
    double integral = 0.0;
    const double h = 0.001;
    for (double x = -12.0; x <= 12.0; x += h)
        integral += h * std::pow(1.0 + x * x, -(0.5 - eps)) *
                    std::exp(-x * x) / std::sqrt(std::numbers::pi);
    const double expect = std::sqrt(2.0 * std::numbers::pi * integral);
    for (double r : res.ratios) CHECK(r == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("smoothing limit eps near one half drops the spatial weight") {
    // At eps -> 1/2 the weight <x>^{-(1/2-eps)} tends to 1, so R reduces to
    // the purely spectral quantity sqrt(2 pi sum lambda^{-1} |c_n|^2).
    const double eps = 0.4999;
    auto table = build_mode_table(1, 21);
    auto res = smoothing_experiment(1, 21, 4, eps, 14);
    for (std::size_t sample = 0; sample < res.ratios.size(); ++sample) {
        double mass = 0.0, weighted = 0.0;
        for (std::size_t i = 0; i < table.size(); ++i) {
            const double a = std::norm(rng::complex_gaussian(14, sample, i));
            mass += a;
            weighted += std::pow(double(table.entries[i].lambda_sq), 0.5 - 2.0 * eps) * a;
        }
        const double expect = std::sqrt(2.0 * std::numbers::pi * weighted / mass);
        CHECK(res.ratios[sample] == doctest::Approx(expect).epsilon(0.001));
    }
    CHECK_THROWS(smoothing_experiment(1, 21, 4, 0.7, 14));
}

TEST_CASE("smoothing ratio stable across cutoffs") {
    auto small = smoothing_experiment(1, 21, 30, 0.1, 15);
    auto large = smoothing_experiment(1, 81, 30, 0.1, 15);
    CHECK(std::abs(large.max_ratio - small.max_ratio) / small.max_ratio < 0.3);
}

TEST_CASE("tail localization gaussian oracle") {
    auto t = tail_localization({0, 0, 0}, 1, 0, 3.0, 2.0);
    CHECK(t.certified);
    CHECK(t.value * t.value == doctest::Approx(std::erfc(3.0)).epsilon(1e-6));
    CHECK(t.value * t.value < 1e-3);

    auto far = tail_localization({0, 0, 0}, 1, 0, 300.0, 2.0);
    CHECK_FALSE(far.certified);
    CHECK(far.value == 0.0);
    CHECK_THROWS(tail_localization({0, 0, 0}, 1, 0, 0.5, 2.0));
}

TEST_CASE("tail localization decays superpolynomially") {
    std::vector<std::pair<double, double>> pts;
    for (int n : {64, 128, 256}) {
        auto t = tail_localization({n, 0, 0}, 1, 2, 1.5, 2.0);
        REQUIRE(t.certified);
        REQUIRE(t.value > 0.0);
        pts.push_back({std::sqrt(2.0 * n + 1.0), t.value});
    }
    CHECK(fit_scaling(pts).slope <= -4.0);
}
