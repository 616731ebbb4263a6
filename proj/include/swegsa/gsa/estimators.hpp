#pragma once

// Sobol index estimation on pick-freeze outputs: Saltelli (2010) for first
// order, Jansen for total order, percentile bootstrap for confidence
// intervals. Outputs are centred on the pooled A/B mean first, which makes
// the estimates invariant under affine output transforms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "swegsa/rng.hpp"

namespace swegsa::gsa {

/// Model evaluations for a pick-freeze design: Y(A), Y(B) and Y(A_B^(i)).
struct PickFreezeOutputs {
    std::vector<double> ya;
    std::vector<double> yb;
    std::vector<std::vector<double>> yab;  // one vector per parameter

    int n() const { return static_cast<int>(ya.size()); }
    int p() const { return static_cast<int>(yab.size()); }

    void validate() const {
        if (ya.size() != yb.size()) throw std::invalid_argument("Y_A and Y_B sizes differ");
        for (const auto& col : yab)
            if (col.size() != ya.size())
                throw std::invalid_argument("Y_AB size differs from Y_A");
        for (double y : ya)
            if (!std::isfinite(y)) throw std::invalid_argument("non-finite output in Y_A");
        for (double y : yb)
            if (!std::isfinite(y)) throw std::invalid_argument("non-finite output in Y_B");
        for (const auto& col : yab)
            for (double y : col)
                if (!std::isfinite(y)) throw std::invalid_argument("non-finite output in Y_AB");
    }
};

constexpr double kIndexClampLo = -0.1;
constexpr double kIndexClampHi = 1.1;

inline double clamp_index(double s) { return std::min(kIndexClampHi, std::max(kIndexClampLo, s)); }

inline double variance_floor(double mean) { return 1e-12 * (1.0 + mean * mean); }

struct SobolIndices {
    double s1 = 0.0, s1_raw = 0.0, s1_lo = 0.0, s1_hi = 0.0;
    double st = 0.0, st_raw = 0.0, st_lo = 0.0, st_hi = 0.0;
};

struct SobolResult {
    std::vector<SobolIndices> index;  // per parameter
    double var_y = 0.0;
    double mean_y = 0.0;
    int n_used = 0;
    bool degenerate = false;
};

namespace detail {

// Point estimates on (optionally resampled) rows. rows == nullptr uses 0..n-1.
inline void point_estimates(const PickFreezeOutputs& out, const std::vector<int>* rows,
                            std::vector<double>& s1, std::vector<double>& st, double& var_y,
                            double& mean_y, bool& degenerate) {
    const int n = rows ? static_cast<int>(rows->size()) : out.n();
    const int p = out.p();
    auto ya = [&](int j) { return out.ya[rows ? (*rows)[j] : j]; };
    auto yb = [&](int j) { return out.yb[rows ? (*rows)[j] : j]; };

    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += ya(j) + yb(j);
    const double mu = sum / static_cast<double>(2 * n);
    double ss = 0.0;
    for (int j = 0; j < n; ++j) {
        ss += (ya(j) - mu) * (ya(j) - mu);
        ss += (yb(j) - mu) * (yb(j) - mu);
    }
    const double var = ss / static_cast<double>(2 * n - 1);
    mean_y = mu;
    var_y = var;
    s1.assign(p, std::numeric_limits<double>::quiet_NaN());
    st.assign(p, std::numeric_limits<double>::quiet_NaN());
    if (var < variance_floor(mu)) {
        degenerate = true;
        return;
    }
    degenerate = false;
    for (int i = 0; i < p; ++i) {
        const std::vector<double>& yab = out.yab[i];
        double acc1 = 0.0, acct = 0.0;
        for (int j = 0; j < n; ++j) {
            const int r = rows ? (*rows)[j] : j;
            const double a = out.ya[r] - mu;
            const double b = out.yb[r] - mu;
            const double ab = yab[r] - mu;
            acc1 += b * (ab - a);
            const double d = a - ab;
            acct += d * d;
        }
        s1[i] = acc1 / (static_cast<double>(n) * var);
        st[i] = acct / (2.0 * static_cast<double>(n) * var);
    }
}

}  // namespace detail

/// Saltelli-2010 first-order estimates, raw (unclamped), one per parameter.
inline std::vector<double> estimate_first_order(const PickFreezeOutputs& out) {
    out.validate();
    std::vector<double> s1, st;
    double var = 0, mean = 0;
    bool degenerate = false;
    detail::point_estimates(out, nullptr, s1, st, var, mean, degenerate);
    return s1;
}

/// Jansen total-order estimates, raw (unclamped), one per parameter.
inline std::vector<double> estimate_total_order(const PickFreezeOutputs& out) {
    out.validate();
    std::vector<double> s1, st;
    double var = 0, mean = 0;
    bool degenerate = false;
    detail::point_estimates(out, nullptr, s1, st, var, mean, degenerate);
    return st;
}

struct BootstrapOptions {
    int resamples = 1000;
    double level = 0.95;
    std::uint64_t seed = 1;
};

namespace detail {

// Linear-interpolation quantile of a sorted vector (R type 7).
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

/// Full estimation: point estimates, clamped report values, percentile
/// bootstrap CIs (rows resampled jointly across A, B and every A_B^(i)).
/// Deterministic for a fixed seed.
inline SobolResult estimate_sobol(const PickFreezeOutputs& out,
                                  const BootstrapOptions& opts = {}) {
    out.validate();
    const int n = out.n();
    const int p = out.p();
    if (n < 2) throw std::invalid_argument("estimate_sobol: need n >= 2");

    SobolResult res;
    res.n_used = n;
    std::vector<double> s1, st;
    detail::point_estimates(out, nullptr, s1, st, res.var_y, res.mean_y, res.degenerate);
    res.index.resize(p);
    for (int i = 0; i < p; ++i) {
        res.index[i].s1_raw = s1[i];
        res.index[i].st_raw = st[i];
        res.index[i].s1 = res.degenerate ? s1[i] : clamp_index(s1[i]);
        res.index[i].st = res.degenerate ? st[i] : clamp_index(st[i]);
    }
    if (res.degenerate || opts.resamples <= 0) return res;

    std::vector<std::vector<double>> boot_s1(p), boot_st(p);
    for (int i = 0; i < p; ++i) {
        boot_s1[i].reserve(opts.resamples);
        boot_st[i].reserve(opts.resamples);
    }
    CounterRng rng(opts.seed);
    std::vector<int> rows(n);
    std::vector<double> rs1, rst;
    for (int r = 0; r < opts.resamples; ++r) {
        for (int j = 0; j < n; ++j) {
            const std::uint64_t bits = rng.bits(r, j);
            rows[j] = static_cast<int>(bits % static_cast<std::uint64_t>(n));
        }
        double var = 0, mean = 0;
        bool degenerate = false;
        detail::point_estimates(out, &rows, rs1, rst, var, mean, degenerate);
        if (degenerate) continue;
        for (int i = 0; i < p; ++i) {
            boot_s1[i].push_back(rs1[i]);
            boot_st[i].push_back(rst[i]);
        }
    }
    const double alpha = 0.5 * (1.0 - opts.level);
    for (int i = 0; i < p; ++i) {
        auto ci = [&](std::vector<double>& samples, double point, double& lo, double& hi) {
            if (samples.empty()) {
                lo = hi = point;
                return;
            }
            std::sort(samples.begin(), samples.end());
            lo = detail::sorted_quantile(samples, alpha);
            hi = detail::sorted_quantile(samples, 1.0 - alpha);
            // CI always brackets the point estimate.
            lo = std::min(lo, point);
            hi = std::max(hi, point);
        };
        ci(boot_s1[i], res.index[i].s1_raw, res.index[i].s1_lo, res.index[i].s1_hi);
        ci(boot_st[i], res.index[i].st_raw, res.index[i].st_lo, res.index[i].st_hi);
    }
    return res;
}

/// Percentile bootstrap CIs only, as (lo, hi) per parameter for S1 and ST.
struct BootstrapCis {
    std::vector<std::array<double, 2>> s1;
    std::vector<std::array<double, 2>> st;
};

inline BootstrapCis bootstrap_ci(const PickFreezeOutputs& out, const BootstrapOptions& opts = {}) {
    if (out.n() < 50) throw std::invalid_argument("bootstrap_ci: need n >= 50");
    const SobolResult res = estimate_sobol(out, opts);
    if (res.degenerate) throw std::runtime_error("bootstrap_ci: degenerate output variance");
    BootstrapCis cis;
    for (const auto& ix : res.index) {
        cis.s1.push_back({ix.s1_lo, ix.s1_hi});
        cis.st.push_back({ix.st_lo, ix.st_hi});
    }
    return cis;
}

}  // namespace swegsa::gsa
