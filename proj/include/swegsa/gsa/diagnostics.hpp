#pragma once

// Convergence series, histograms and scatter tables for uncertainty
// propagation diagnostics.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "swegsa/gsa/estimators.hpp"

namespace swegsa::gsa {

struct ConvergenceCheckpoint {
    int n = 0;
    double mean = 0.0;
    double ci_half_width = 0.0;        // 1.96 s / sqrt(N)
    std::vector<double> s1;            // first-order estimates on the truncated design
};

struct ConvergenceSeries {
    std::vector<ConvergenceCheckpoint> checkpoints;
};

/// Running mean/CI of Y(A) and Sobol estimates recomputed on truncated
/// designs at each checkpoint. Checkpoints must be increasing, within [2, n].
inline ConvergenceSeries convergence_series(const PickFreezeOutputs& out,
                                            const std::vector<int>& checkpoints) {
    out.validate();
    ConvergenceSeries series;
    int prev = 1;
    for (int N : checkpoints) {
        if (N < 2 || N > out.n()) throw std::invalid_argument("checkpoint outside [2, n]");
        if (N <= prev) throw std::invalid_argument("checkpoints must be strictly increasing");
        prev = N;
        ConvergenceCheckpoint cp;
        cp.n = N;
        double sum = 0.0;
        for (int j = 0; j < N; ++j) sum += out.ya[j];
        cp.mean = sum / N;
        double ss = 0.0;
        for (int j = 0; j < N; ++j) ss += (out.ya[j] - cp.mean) * (out.ya[j] - cp.mean);
        const double s = std::sqrt(ss / (N - 1));
        cp.ci_half_width = 1.96 * s / std::sqrt(static_cast<double>(N));

        PickFreezeOutputs trunc;
        trunc.ya.assign(out.ya.begin(), out.ya.begin() + N);
        trunc.yb.assign(out.yb.begin(), out.yb.begin() + N);
        for (const auto& col : out.yab)
            trunc.yab.emplace_back(col.begin(), col.begin() + N);
        cp.s1 = estimate_first_order(trunc);
        series.checkpoints.push_back(std::move(cp));
    }
    return series;
}

struct Histogram {
    std::vector<double> edges;   // bins + 1 edges
    std::vector<long> counts;    // per bin
};

/// Histogram with R's convention: right-closed bins (a,b], leftmost closed.
/// Count of all values inside [lo, hi] sums to the sample size.
inline Histogram histogram(const std::vector<double>& values, int bins) {
    if (values.empty()) throw std::invalid_argument("histogram: empty input");
    if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    Histogram h;
    h.edges.resize(bins + 1);
    const double span = hi > lo ? hi - lo : 1.0;
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + span * b / bins;
    h.counts.assign(bins, 0);
    for (double v : values) {
        int b;
        if (v <= h.edges.front()) {
            b = 0;
        } else {
            b = static_cast<int>(std::ceil((v - lo) / span * bins)) - 1;
            b = std::min(std::max(b, 0), bins - 1);
            // guard against rounding across an edge
            while (b > 0 && v <= h.edges[b]) --b;
            while (b < bins - 1 && v > h.edges[b + 1]) ++b;
        }
        ++h.counts[b];
    }
    return h;
}

inline Histogram histogram(const std::vector<double>& values, int bins, double lo, double hi) {
    if (values.empty()) throw std::invalid_argument("histogram: empty input");
    if (bins < 1 || !(lo < hi)) throw std::invalid_argument("histogram: bad bins/range");
    Histogram h;
    h.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
    h.counts.assign(bins, 0);
    for (double v : values) {
        if (v < lo || v > hi) continue;
        int b;
        if (v <= h.edges.front()) {
            b = 0;
        } else {
            b = static_cast<int>(std::ceil((v - lo) / (hi - lo) * bins)) - 1;
            b = std::min(std::max(b, 0), bins - 1);
            while (b > 0 && v <= h.edges[b]) --b;
            while (b < bins - 1 && v > h.edges[b + 1]) ++b;
        }
        ++h.counts[b];
    }
    return h;
}

struct ScatterPoint {
    double x, y;
};

/// Paired (parameter value, output) table for scatter diagnostics.
inline std::vector<ScatterPoint> scatter(const std::vector<double>& param_column,
                                         const std::vector<double>& outputs) {
    if (param_column.size() != outputs.size())
        throw std::invalid_argument("scatter: column sizes differ");
    if (param_column.empty()) throw std::invalid_argument("scatter: empty input");
    std::vector<ScatterPoint> pts(param_column.size());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {param_column[i], outputs[i]};
    return pts;
}

}  // namespace swegsa::gsa
