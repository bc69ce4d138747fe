#pragma once

#include <array>
#include <cmath>
#include <cstdlib>

#include "pcsat/domain.hpp"

namespace pcsat {

/// Unit switch for the %-satisfied loss term: 1.0 keeps it a fraction,
/// 100.0 turns it into percentage points.
struct LossOptions {
    double pct_scale = 1.0;
};

/// Average class, Sum(counts_i * i) / total.
inline double mean_of(const OrdinalDistribution& dist) {
    const std::int64_t total = dist.total();
    if (total == 0) throw Error(Errc::empty_distribution, "mean of empty distribution");
    double weighted = 0.0;
    for (int i = 0; i < 5; ++i) weighted += static_cast<double>(dist.counts[i]) * (i + 1);
    return weighted / static_cast<double>(total);
}

/// Fraction of calls in class 4 or 5.
inline double pct_satisfied(const OrdinalDistribution& dist) {
    const std::int64_t total = dist.total();
    if (total == 0) throw Error(Errc::empty_distribution, "pct_satisfied of empty distribution");
    return static_cast<double>(dist.counts[3] + dist.counts[4]) / static_cast<double>(total);
}

/// Counts scaled to Euclidean unit length.
inline std::array<double, 5> normalize_unit(const OrdinalDistribution& dist) {
    if (dist.total() == 0) throw Error(Errc::empty_distribution, "normalize of empty distribution");
    double sumsq = 0.0;
    for (auto c : dist.counts) sumsq += static_cast<double>(c) * static_cast<double>(c);
    const double norm = std::sqrt(sumsq);
    std::array<double, 5> out{};
    for (int i = 0; i < 5; ++i) out[i] = static_cast<double>(dist.counts[i]) / norm;
    return out;
}

/// The three-component loss between a predicted and an observed distribution:
/// |delta % satisfied| + |delta mean| + MSE of the unit-normalized count
/// vectors. MSE divides by the vector length (5).
inline LossBreakdown loss_between(const OrdinalDistribution& pred, const OrdinalDistribution& obs,
                                  const LossOptions& opts = {}) {
    LossBreakdown out;
    out.delta_pct_satisfied = std::abs(pct_satisfied(pred) - pct_satisfied(obs)) * opts.pct_scale;
    out.delta_mean_signed = mean_of(pred) - mean_of(obs);
    out.delta_mean = std::abs(out.delta_mean_signed);

    const auto u = normalize_unit(pred);
    const auto v = normalize_unit(obs);
    double sq = 0.0;
    for (int i = 0; i < 5; ++i) sq += (u[i] - v[i]) * (u[i] - v[i]);
    out.mse = sq / 5.0;

    out.total = out.delta_pct_satisfied + out.delta_mean + out.mse;
    return out;
}

}  // namespace pcsat
