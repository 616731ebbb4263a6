#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "support/oracles.hpp"
#include "swegsa/gsa/design.hpp"
#include "swegsa/gsa/estimators.hpp"

using namespace swegsa;
using namespace swegsa::gsa;

namespace {

using Model = std::function<double(const std::vector<double>&)>;

PickFreezeOutputs evaluate(const SampleDesign& d, const Model& f) {
    PickFreezeOutputs out;
    out.ya.resize(d.n);
    out.yb.resize(d.n);
    out.yab.assign(d.p(), std::vector<double>(d.n));
    std::vector<double> row(d.p());
    for (int r = 0; r < d.n; ++r) {
        for (int c = 0; c < d.p(); ++c) row[c] = d.a_at(r, c);
        out.ya[r] = f(row);
        for (int c = 0; c < d.p(); ++c) row[c] = d.b_at(r, c);
        out.yb[r] = f(row);
        for (int i = 0; i < d.p(); ++i) {
            auto ab = d.ab_row(i, r);
            out.yab[i][r] = f(ab);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("single-variable model: S1 = 1, S2 = 0") {
    const auto d = sample({{"x1", Uniform{0, 1}}, {"x2", Uniform{0, 1}}}, 1 << 14, 101);
    const auto out = evaluate(d, [](const std::vector<double>& x) { return x[0]; });
    const auto s1 = estimate_first_order(out);
    CHECK(s1[0] == Catch::Approx(1.0).margin(0.02));
    CHECK(s1[1] == Catch::Approx(0.0).margin(0.02));
}

TEST_CASE("linear model Y = X1 + 2 X2: S = (0.2, 0.8)") {
    const auto d = sample({{"x1", Uniform{0, 1}}, {"x2", Uniform{0, 1}}}, 1 << 14, 2718);
    const auto out =
        evaluate(d, [](const std::vector<double>& x) { return x[0] + 2.0 * x[1]; });
    const auto s1 = estimate_first_order(out);
    const auto st = estimate_total_order(out);
    CHECK(s1[0] == Catch::Approx(0.2).margin(0.02));
    CHECK(s1[1] == Catch::Approx(0.8).margin(0.02));
    // additive model: total == first order
    CHECK(st[0] == Catch::Approx(s1[0]).margin(0.02));
    CHECK(st[1] == Catch::Approx(s1[1]).margin(0.02));
}

TEST_CASE("Ishigami function against the closed-form indices") {
    const double a = 7.0, b = 0.1;
    const auto ref = oracles::ishigami_indices(a, b);
    const auto d = sample({{"x1", Uniform{-M_PI, M_PI}},
                           {"x2", Uniform{-M_PI, M_PI}},
                           {"x3", Uniform{-M_PI, M_PI}}},
                          1 << 15, 314159);
    const auto out = evaluate(d, [&](const std::vector<double>& x) {
        return oracles::ishigami(a, b, x[0], x[1], x[2]);
    });
    const auto s1 = estimate_first_order(out);
    const auto st = estimate_total_order(out);
    CHECK(ref.s1 == Catch::Approx(0.3139).margin(5e-4));
    CHECK(ref.s2 == Catch::Approx(0.4424).margin(5e-4));
    CHECK(ref.st3 == Catch::Approx(0.2437).margin(5e-4));
    CHECK(s1[0] == Catch::Approx(ref.s1).margin(0.03));
    CHECK(s1[1] == Catch::Approx(ref.s2).margin(0.03));
    CHECK(s1[2] == Catch::Approx(0.0).margin(0.03));
    CHECK(st[2] == Catch::Approx(ref.st3).margin(0.05));
    CHECK(st[2] >= 0.2);
    CHECK(s1[2] <= 0.03);
}

TEST_CASE("pure interaction Y = X1 X2 on U(-1,1): S ~ 0, ST ~ 1") {
    const auto d = sample({{"x1", Uniform{-1, 1}}, {"x2", Uniform{-1, 1}}}, 1 << 15, 55);
    const auto out = evaluate(d, [](const std::vector<double>& x) { return x[0] * x[1]; });
    const auto s1 = estimate_first_order(out);
    const auto st = estimate_total_order(out);
    for (int i = 0; i < 2; ++i) {
        CHECK(s1[i] == Catch::Approx(0.0).margin(0.05));
        CHECK(st[i] == Catch::Approx(1.0).margin(0.05));
        CHECK(s1[i] <= 0.05);
        CHECK(st[i] >= 0.9);
    }
}

TEST_CASE("sum of first-order indices stays below 1.1") {
    const auto d = sample({{"x1", Uniform{0, 1}}, {"x2", Uniform{0, 1}},
                           {"x3", Uniform{0, 1}}},
                          1 << 14, 808);
    for (int variant = 0; variant < 3; ++variant) {
        const auto out = evaluate(d, [variant](const std::vector<double>& x) {
            switch (variant) {
                case 0: return x[0] + x[1] + x[2];
                case 1: return x[0] * x[1] + x[2];
                default: return std::sin(6 * x[0]) + x[1] * x[1] + x[0] * x[2];
            }
        });
        const auto s1 = estimate_first_order(out);
        CHECK(s1[0] + s1[1] + s1[2] <= 1.1);
    }
}

TEST_CASE("total order dominates first order up to noise") {
    const auto d = sample({{"x1", Uniform{0, 1}}, {"x2", Uniform{0, 1}}}, 1 << 14, 33);
    const auto out = evaluate(d, [](const std::vector<double>& x) {
        return x[0] + 0.5 * x[0] * x[1] + 0.3 * x[1];
    });
    const auto s1 = estimate_first_order(out);
    const auto st = estimate_total_order(out);
    for (int i = 0; i < 2; ++i) CHECK(st[i] >= s1[i] - 0.05);
}

TEST_CASE("affine output invariance") {
    const auto d = sample({{"x1", Uniform{0, 1}}, {"x2", Uniform{0, 1}}}, 4096, 4444);
    const auto out =
        evaluate(d, [](const std::vector<double>& x) { return x[0] + 2.0 * x[1]; });
    PickFreezeOutputs scaled = out;
    const double a = -3.7, b = 1234.5;
    for (auto& y : scaled.ya) y = a * y + b;
    for (auto& y : scaled.yb) y = a * y + b;
    for (auto& col : scaled.yab)
        for (auto& y : col) y = a * y + b;
    const auto s1 = estimate_first_order(out);
    const auto s1s = estimate_first_order(scaled);
    const auto st = estimate_total_order(out);
    const auto sts = estimate_total_order(scaled);
    for (int i = 0; i < 2; ++i) {
        CHECK(s1s[i] == Catch::Approx(s1[i]).margin(1e-12));
        CHECK(sts[i] == Catch::Approx(st[i]).margin(1e-12));
    }
}

TEST_CASE("estimates are deterministic and clamped") {
    const auto d = sample({{"x", Uniform{0, 1}}, {"y", Uniform{0, 1}}}, 256, 5);
    const auto out = evaluate(d, [](const std::vector<double>& x) { return x[0] - x[1]; });
    BootstrapOptions opts;
    opts.seed = 99;
    const SobolResult r1 = estimate_sobol(out, opts);
    const SobolResult r2 = estimate_sobol(out, opts);
    for (int i = 0; i < 2; ++i) {
        REQUIRE(r1.index[i].s1 == r2.index[i].s1);
        REQUIRE(r1.index[i].st == r2.index[i].st);
        REQUIRE(r1.index[i].s1_lo == r2.index[i].s1_lo);
        REQUIRE(r1.index[i].st_hi == r2.index[i].st_hi);
        CHECK(r1.index[i].s1 >= kIndexClampLo);
        CHECK(r1.index[i].s1 <= kIndexClampHi);
        // CIs bracket the point estimate
        CHECK(r1.index[i].s1_lo <= r1.index[i].s1_raw);
        CHECK(r1.index[i].s1_hi >= r1.index[i].s1_raw);
    }
}

TEST_CASE("degenerate variance is flagged, not reported as noise") {
    const auto d = sample({{"x", Uniform{0, 1}}}, 128, 6);
    PickFreezeOutputs out;
    out.ya.assign(128, 3.25);
    out.yb.assign(128, 3.25);
    out.yab.assign(1, std::vector<double>(128, 3.25));
    const SobolResult res = estimate_sobol(out);
    CHECK(res.degenerate);
    CHECK(std::isnan(res.index[0].s1_raw));
    CHECK_THROWS(bootstrap_ci(out));
    (void)d;
}

TEST_CASE("brute-force oracle equivalence for discrete inputs") {
    // two discrete inputs with 4 and 5 levels, response with interaction
    auto f = [](int i, int j) {
        return 0.8 * i + 0.5 * j * j - 0.3 * i * j + ((i + j) % 2 ? 0.25 : -0.25);
    };
    const auto exact = oracles::exact_anova_2d(4, 5, f);
    const auto d = sample({{"s", DiscreteUniform{{0, 1, 2, 3}}},
                           {"r", DiscreteUniform{{0, 1, 2, 3, 4}}}},
                          1 << 16, 777);
    const auto out = evaluate(d, [&](const std::vector<double>& x) {
        return f(static_cast<int>(x[0]), static_cast<int>(x[1]));
    });
    const auto s1 = estimate_first_order(out);
    const auto st = estimate_total_order(out);
    CHECK(s1[0] == Catch::Approx(exact.s1).margin(0.02));
    CHECK(s1[1] == Catch::Approx(exact.s2).margin(0.02));
    CHECK(st[0] == Catch::Approx(exact.st1).margin(0.02));
    CHECK(st[1] == Catch::Approx(exact.st2).margin(0.02));
}

TEST_CASE("bootstrap confidence intervals") {
    SECTION("Y = X1: CI tight around 1") {
        const auto d = sample({{"x1", Uniform{0, 1}}, {"x2", Uniform{0, 1}}}, 1 << 14, 2023);
        const auto out = evaluate(d, [](const std::vector<double>& x) { return x[0]; });
        BootstrapOptions opts;
        opts.resamples = 500;
        const auto cis = bootstrap_ci(out, opts);
        CHECK(cis.s1[0][0] <= 1.0);
        CHECK(cis.s1[0][1] >= 1.0);
        CHECK(cis.s1[0][1] - cis.s1[0][0] <= 0.05);
    }
    SECTION("CI width shrinks like 1/sqrt(n)") {
        auto width_at = [&](int n) {
            const auto d = sample({{"x1", Uniform{0, 1}}, {"x2", Uniform{0, 1}}}, n, 31);
            const auto out = evaluate(
                d, [](const std::vector<double>& x) { return x[0] + 2.0 * x[1]; });
            BootstrapOptions opts;
            opts.resamples = 400;
            const auto cis = bootstrap_ci(out, opts);
            return cis.s1[1][1] - cis.s1[1][0];
        };
        const double ratio = width_at(4 * 2048) / width_at(2048);
        CHECK(ratio == Catch::Approx(0.5).margin(0.15));
    }
    SECTION("coverage of the true index is near the nominal level") {
        const double target = 0.2;  // S1 of X1 + 2 X2
        int covered = 0;
        const int reps = 200;
        for (int rep = 0; rep < reps; ++rep) {
            const auto d =
                sample({{"x1", Uniform{0, 1}}, {"x2", Uniform{0, 1}}}, 1024, 1000 + rep);
            const auto out = evaluate(
                d, [](const std::vector<double>& x) { return x[0] + 2.0 * x[1]; });
            BootstrapOptions opts;
            opts.resamples = 300;
            opts.seed = rep;
            const auto cis = bootstrap_ci(out, opts);
            covered += cis.s1[0][0] <= target && target <= cis.s1[0][1];
        }
        const double coverage = static_cast<double>(covered) / reps;
        CHECK(coverage >= 0.90);
        CHECK(coverage <= 0.99);
    }
}
