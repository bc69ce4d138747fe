#pragma once

#include <span>

#include "pcsat/domain.hpp"

namespace pcsat {

/// What happens when a proba lands exactly on a threshold. `favor_higher`
/// sends it to the higher-satisfaction class (pCSAT 1 requires proba strictly
/// above t12); `favor_lower` flips every boundary to >=.
enum class BoundaryMode {
    favor_higher,
    favor_lower,
};

/// Maps a low-CSAT probability to a 1-5 pCSAT. Monotone non-increasing in p.
inline int map_proba(double p, const Thresholds& th,
                     BoundaryMode mode = BoundaryMode::favor_higher) {
    if (mode == BoundaryMode::favor_higher) {
        if (p > th.t12) return 1;
        if (p > th.t23) return 2;
        if (p > th.t34) return 3;
        if (p > th.t45) return 4;
        return 5;
    }
    if (p >= th.t12) return 1;
    if (p >= th.t23) return 2;
    if (p >= th.t34) return 3;
    if (p >= th.t45) return 4;
    return 5;
}

inline OrdinalDistribution map_all_probas(std::span<const double> probas, const Thresholds& th,
                                          BoundaryMode mode = BoundaryMode::favor_higher) {
    if (probas.empty()) throw Error(Errc::empty_input, "no calls to map");
    OrdinalDistribution d;
    for (double p : probas) ++d.counts[map_proba(p, th, mode) - 1];
    return d;
}

/// Predicted pCSAT distribution of a call set under the given thresholds.
inline OrdinalDistribution map_all(std::span<const ScoredCall> calls, const Thresholds& th,
                                   BoundaryMode mode = BoundaryMode::favor_higher) {
    if (calls.empty()) throw Error(Errc::empty_input, "no calls to map");
    OrdinalDistribution d;
    for (const auto& c : calls) ++d.counts[map_proba(c.proba, th, mode) - 1];
    return d;
}

}  // namespace pcsat
