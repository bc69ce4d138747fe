#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "pcsat/domain.hpp"
#include "pcsat/optimizer.hpp"

namespace pcsat {

enum class StrategyMode {
    global,
    per_group,
    hybrid,
};

inline const char* strategy_mode_name(StrategyMode m) {
    switch (m) {
        case StrategyMode::global: return "global";
        case StrategyMode::per_group: return "per_group";
        case StrategyMode::hybrid: return "hybrid";
    }
    return "?";
}

/// How thresholds are assigned to groups, plus the eligibility floor.
/// `hybrid_cutoff` follows the "fewer than N responses use global" rule, so
/// exactly N responses already uses the per-group fit.
struct StrategyConfig {
    StrategyMode mode = StrategyMode::hybrid;
    std::int64_t hybrid_cutoff = 200;
    std::int64_t min_high = 5;
    std::int64_t min_low = 5;
    Thresholds baseline_thresholds{0.8, 0.6, 0.4, 0.2};
};

enum class Eligibility { eligible, excluded };

/// A group qualifies for fitted thresholds only with at least `min_high`
/// high-CSAT and `min_low` low-CSAT survey responses in the training window.
inline Eligibility eligibility(const GroupTrainingStats& stats, const StrategyConfig& cfg) {
    return (stats.n_high >= cfg.min_high && stats.n_low >= cfg.min_low) ? Eligibility::eligible
                                                                       : Eligibility::excluded;
}

enum class Provenance { baseline, global, per_group };

inline const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::baseline: return "baseline";
        case Provenance::global: return "global";
        case Provenance::per_group: return "per_group";
    }
    return "?";
}

struct Assignment {
    Thresholds thresholds;
    Provenance provenance;
};

/// Gives every group exactly one threshold set. Excluded groups fall back to
/// the baseline thresholds under every mode (production still needs a pCSAT
/// for their calls); eligible groups follow the configured mode.
inline std::map<std::string, Assignment> assign_thresholds(
    const std::map<std::string, GroupTrainingStats>& groups, const FitResult& global_fit,
    const std::map<std::string, FitResult>& per_group_fits, const StrategyConfig& cfg) {
    std::map<std::string, Assignment> out;
    for (const auto& [gid, stats] : groups) {
        if (eligibility(stats, cfg) == Eligibility::excluded) {
            out.emplace(gid, Assignment{cfg.baseline_thresholds, Provenance::baseline});
            continue;
        }
        const bool wants_per_group =
            cfg.mode == StrategyMode::per_group ||
            (cfg.mode == StrategyMode::hybrid && stats.n_responses >= cfg.hybrid_cutoff);
        if (!wants_per_group) {
            out.emplace(gid, Assignment{global_fit.thresholds, Provenance::global});
            continue;
        }
        auto it = per_group_fits.find(gid);
        if (it == per_group_fits.end())
            throw Error(Errc::missing_fit, "no per-group fit for eligible group '" + gid + "'");
        out.emplace(gid, Assignment{it->second.thresholds, Provenance::per_group});
    }
    return out;
}

}  // namespace pcsat
