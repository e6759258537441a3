#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hlab/random_data.hpp"
#include "hlab/rng.hpp"
#include "hlab/spectral_ops.hpp"

using namespace hlab;

namespace {

RandomizationSpec unit_spec(const ModeTable& table, std::uint64_t seed, std::size_t count) {
    RandomizationSpec spec;
    spec.table = &table;
    spec.base_coeffs.assign(table.size(), cplx{1.0, 0.0});
    spec.seed = seed;
    spec.sample_count = count;
    return spec;
}

}  // namespace

TEST_CASE("randomization is deterministic and linear") {
    auto table = build_mode_table(1, 41);
    auto spec = unit_spec(table, 5, 10);
    auto a = randomize(spec, 3);
    auto b = randomize(spec, 3);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.coeffs[i] == b.coeffs[i]);

    RandomizationSpec scaled = spec;
    for (auto& c : scaled.base_coeffs) c *= cplx(2.0, -1.0);
    auto d = randomize(scaled, 3);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(d.coeffs[i] - cplx(2.0, -1.0) * a.coeffs[i]) < 1e-15);

    RandomizationSpec zero = spec;
    zero.base_coeffs.assign(table.size(), cplx{});
    auto z = randomize(zero, 0);
    for (const auto& c : z.coeffs) CHECK(c == cplx{});

    CHECK_THROWS(randomize(spec, 10));
}

TEST_CASE("unit gaussian variance") {
    auto table = build_mode_table(1, 1);
    auto spec = unit_spec(table, 77, 100000);
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.sample_count; ++i)
        acc += std::norm(randomize(spec, i).coeffs[0]);
    CHECK(acc / double(spec.sample_count) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("expected sobolev mass matches the deterministic sum") {
    auto table = build_mode_table(1, 31);
    auto spec = unit_spec(table, 78, 10000);
    for (std::size_t i = 0; i < table.size(); ++i)
        spec.base_coeffs[i] = cplx(1.0 / double(i + 1), 0.1);
    const double sigma = 0.5;
    double expect = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i)
        expect += std::pow(double(table.entries[i].lambda_sq), sigma) *
                  std::norm(spec.base_coeffs[i]);
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t i = 0; i < spec.sample_count; ++i) {
        const double v = std::pow(sobolev_H_norm(randomize(spec, i), sigma), 2);
        acc += v;
        acc2 += v * v;
    }
    const double mean = acc / double(spec.sample_count);
    const double se = std::sqrt((acc2 / double(spec.sample_count) - mean * mean) /
                                double(spec.sample_count));
    CHECK(std::abs(mean - expect) < 3.0 * se);
}

TEST_CASE("truncation splits and recombines exactly") {
    auto table = build_mode_table(2, 20);
    auto spec = unit_spec(table, 79, 1);
    auto f = randomize(spec, 0);
    for (double K : {0.5, 2.3, 4.0, 100.0}) {
        auto lo = truncate(f, K, TruncateSide::low);
        auto hi = truncate(f, K, TruncateSide::high);
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(lo.coeffs[i] + hi.coeffs[i] == f.coeffs[i]);
    }
    auto lo = truncate(f, 1.0, TruncateSide::low);  // min lambda^2 = 2
    for (const auto& c : lo.coeffs) CHECK(c == cplx{});
    auto all = truncate(f, 100.0, TruncateSide::low);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(all.coeffs[i] == f.coeffs[i]);
}

TEST_CASE("first order chaos moments match the gamma formula") {
    auto table = build_mode_table(1, 1);
    auto spec = unit_spec(table, 80, 1000000);
    ChaosFunctional fun;
    fun.order = 1;
    fun.terms.push_back({{0, 0, 0}, cplx{1.0, 0.0}});
    for (double q : {2.0, 4.0, 6.0, 8.0}) {
        const double expect = std::pow(std::tgamma(q / 2.0 + 1.0), 1.0 / q);
        CHECK(chaos_moment(spec, fun, q) == doctest::Approx(expect).epsilon(0.02));
    }
    CHECK_THROWS(chaos_moment(spec, fun, 1.0));
}

TEST_CASE("diagonal-free second order chaos has the kernel variance") {
    auto table = build_mode_table(1, 21);
    auto spec = unit_spec(table, 81, 200000);
    ChaosFunctional fun;
    fun.order = 2;
    for (int n = 0; n < 6; ++n)
        for (int m = n + 1; m < 6; ++m)
            fun.terms.push_back({{n, m, 0}, cplx(0.3 / double(n + 1), 0.2 * m)});
    const double kernel = chaos_kernel_norm(fun);
    const double second = chaos_moment(spec, fun, 2.0);
    CHECK(second == doctest::Approx(kernel).epsilon(0.02));
}

TEST_CASE("chaos moments scale like q to the half order") {
    auto table = build_mode_table(1, 9);
    auto spec = unit_spec(table, 82, 1000000);
    // Diagonal powers g^k realize the q^{k/2} moment growth; spread-out
    // kernels are closer to Gaussian and sit well below the bound.
    for (int order : {1, 2, 3}) {
        ChaosFunctional fun;
        fun.order = order;
        fun.terms.push_back({{0, 0, 0}, cplx{0.7, 0.1}});
        double lo = 1e300, hi = 0.0;
        for (double q : {2.0, 4.0, 6.0, 8.0}) {
            const double ratio = chaos_moment(spec, fun, q) / std::pow(q, 0.5 * order);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        CHECK(hi / lo < 2.0);
    }
}

TEST_CASE("paley zygmund against the exponential law") {
    auto table = build_mode_table(1, 1);
    auto spec = unit_spec(table, 83, 100000);
    auto stat = [](const SpectralField& f) { return std::norm(f.coeffs[0]); };
    for (double lam : {0.0, 0.25, 0.5, 0.75, 0.9}) {
        auto r = paley_zygmund_check(spec, stat, lam);
        CHECK(r.lhs >= r.rhs - 3.0 * r.lhs_se);
        CHECK(r.lhs == doctest::Approx(std::exp(-lam)).epsilon(0.03));
    }
    auto top = paley_zygmund_check(spec, stat, 1.0);
    CHECK(top.rhs == 0.0);
    CHECK_THROWS(paley_zygmund_check(spec, stat, 1.5));
}

TEST_CASE("paley zygmund for a projected sobolev mass") {
    auto table = build_mode_table(1, 41);
    auto spec = unit_spec(table, 84, 20000);
    auto stat = [](const SpectralField& f) {
        auto p = dyadic_project(f, 4, ProjectorKind::sharp);
        const double v = sobolev_H_norm(p, 0.3);
        return v * v;
    };
    auto r = paley_zygmund_check(spec, stat, 0.5);
    CHECK(r.lhs >= r.rhs - 3.0 * r.lhs_se);
}

TEST_CASE("wilson interval brackets the point estimate") {
    for (std::size_t hits : {std::size_t(0), std::size_t(3), std::size_t(50),
                             std::size_t(100)}) {
        auto ci = wilson_interval(hits, 100);
        const double p = double(hits) / 100.0;
        CHECK(ci.first <= p + 1e-12);
        CHECK(ci.second >= p - 1e-12);
        CHECK(ci.first >= 0.0);
        CHECK(ci.second <= 1.0);
    }
    auto zero = wilson_interval(0, 1000);
    CHECK(zero.second < 0.01);
    CHECK(zero.second > 0.0);
}

TEST_CASE("tail of a single gaussian matches the chi-square law") {
    auto table = build_mode_table(1, 1);
    auto spec = unit_spec(table, 85, 100000);
    auto stat = [](const SpectralField& f) { return std::abs(f.coeffs[0]); };
    std::vector<double> grid;
    for (double lam = 0.4; lam <= 2.6; lam += 0.2) grid.push_back(lam);
    grid.push_back(50.0);  // beyond any observation
    auto tail = tail_probability(spec, stat, grid, 1.0);
    for (std::size_t i = 1; i + 1 < tail.empirical_prob.size(); ++i)
        CHECK(tail.empirical_prob[i] <= tail.empirical_prob[i - 1] + 1e-12);
    CHECK(tail.zero_cell.back());
    CHECK(tail.empirical_prob.back() <= wilson_interval(0, 100000).second + 1e-15);
    // P(|g| > L) = exp(-L^2), so the fitted rate is 1.
    CHECK(tail.fitted_c == doctest::Approx(1.0).epsilon(0.05));
    CHECK(tail.fit_residual < 0.05);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(tail.wilson_ci[i].first <= tail.empirical_prob[i] + 1e-12);
        CHECK(tail.wilson_ci[i].second >= tail.empirical_prob[i] - 1e-12);
    }
}

TEST_CASE("tail slope is stable across sample sizes") {
    auto table = build_mode_table(1, 21);
    std::vector<double> grid;
    for (double lam = 1.0; lam <= 3.0; lam += 0.25) grid.push_back(lam);
    auto stat = [](const SpectralField& f) { return sobolev_H_norm(f, 0.0); };
    double slopes[2];
    const std::size_t sizes[2] = {5000, 50000};
    for (int k = 0; k < 2; ++k) {
        auto spec = unit_spec(table, 86, sizes[k]);
        for (std::size_t i = 0; i < table.size(); ++i)
            spec.base_coeffs[i] = 1.0 / double(table.entries[i].lambda_sq);
        double norm_sq = 0.0;
        for (const auto& c : spec.base_coeffs) norm_sq += std::norm(c);
        slopes[k] = tail_probability(spec, stat, grid, norm_sq).fitted_c;
    }
    CHECK(slopes[0] > 0.0);
    CHECK(slopes[1] > 0.0);
    CHECK(std::abs(slopes[0] - slopes[1]) / slopes[1] < 0.2);
}

TEST_CASE("independent coordinates across a truncation split") {
    auto table = build_mode_table(1, 41);
    auto spec = unit_spec(table, 87, 20000);
    const double K = 4.0;
    double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < spec.sample_count; ++i) {
        auto f = randomize(spec, i);
        const double a = std::pow(sobolev_H_norm(truncate(f, K, TruncateSide::low), 0.0), 2);
        const double b = std::pow(sobolev_H_norm(truncate(f, K, TruncateSide::high), 0.0), 2);
        sa += a;
        sb += b;
        sab += a * b;
        saa += a * a;
        sbb += b * b;
    }
    const double n = double(spec.sample_count);
    const double cov = sab / n - (sa / n) * (sb / n);
    const double var_a = saa / n - (sa / n) * (sa / n);
    const double var_b = sbb / n - (sb / n) * (sb / n);
    const double se = std::sqrt(var_a * var_b / n);
    CHECK(std::abs(cov) < 3.0 * se);
}

TEST_CASE("event statistic is homogeneous and covers both families") {
    auto table = build_mode_table(1, 41);
    auto spec = unit_spec(table, 88, 1);
    auto f = randomize(spec, 0);
    EventDescriptor desc;
    desc.n_values = {1, 2, 4};
    desc.w_fractional = true;
    desc.time_nodes = 8;
    desc.dense_halfwidth = 9.0;
    desc.dense_step = 0.1;
    const double base = event_statistic(desc, f);
    CHECK(base > 0.0);
    SpectralField doubled(table);
    for (std::size_t i = 0; i < f.size(); ++i) doubled.coeffs[i] = 2.0 * f.coeffs[i];
    CHECK(event_statistic(desc, doubled) == doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("single mode nonsmoothing is a rayleigh variable") {
    auto table = build_mode_table(1, 21);
    RandomizationSpec spec;
    spec.table = &table;
    spec.base_coeffs.assign(table.size(), cplx{});
    spec.base_coeffs[2] = 0.7;  // lambda^2 = 5
    spec.seed = 89;
    spec.sample_count = 4000;
    auto grid = gauss_hermite_grid(table.max_index_1d + 1, 10.0, 0.05);
    auto res = nonsmoothing_scan(spec, 0.0, {8}, grid);
    // s=0 flat norm = lap + weight = 2 L2; median of |g| is sqrt(log 2).
    const double expect = 2.0 * 0.7 * std::sqrt(std::numbers::ln2);
    CHECK(res.median[0] == doctest::Approx(expect).epsilon(0.05));
    CHECK(res.sigma_sq[0] == doctest::Approx(0.49).epsilon(1e-12));
    CHECK(res.bound_violation[0] <= 0.0);
}

TEST_CASE("divergent profile gives increasing medians") {
    auto table = build_mode_table(1, 513);
    RandomizationSpec spec;
    spec.table = &table;
    const double s = 0.4;
    spec.base_coeffs.resize(table.size());
    for (std::size_t i = 0; i < table.size(); ++i)
        spec.base_coeffs[i] = std::pow(double(table.entries[i].lambda_sq), -s / 2.0) /
                              std::sqrt(double(i + 1));
    spec.seed = 90;
    spec.sample_count = 400;
    auto grid = gauss_hermite_grid(table.max_index_1d + 1, 26.0, 0.05);
    auto res = nonsmoothing_scan(spec, s, {2, 4, 8, 16}, grid);
    for (std::size_t k = 1; k < res.median.size(); ++k) {
        CHECK(res.median[k] > res.median[k - 1]);
        CHECK(res.sigma_sq[k] > res.sigma_sq[k - 1]);
    }
    for (double v : res.bound_violation) CHECK(v <= 0.0);
}

TEST_CASE("coefficient profiles round trip through files") {
    std::vector<cplx> coeffs = {{1.5, -2.0}, {0.0, 3.25}, {-0.125, 0.0}};
    const std::string path = "profile_roundtrip.csv";
    save_coeff_profile(path, coeffs);
    auto back = load_coeff_profile(path, coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) CHECK(back[i] == coeffs[i]);
    CHECK_THROWS(load_coeff_profile("missing_profile.csv", 3));
    std::remove(path.c_str());
}
