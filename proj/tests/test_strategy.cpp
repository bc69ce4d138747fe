#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <map>

#include "helpers.hpp"
#include "pcsat/strategy.hpp"

using namespace pcsat;

namespace {

GroupTrainingStats stats(const std::string& gid, std::int64_t high, std::int64_t low) {
    GroupTrainingStats s;
    s.group_id = gid;
    s.n_high = high;
    s.n_low = low;
    s.n_responses = high + low;
    return s;
}

FitResult fake_fit(double t12, double t23, double t34, double t45) {
    return FitResult{Thresholds(t12, t23, t34, t45), {}, 0, 0, 0};
}

}  // namespace

TEST_CASE("eligibility needs both high and low minimums", "[strategy]") {
    const StrategyConfig cfg;
    CHECK(eligibility(stats("g", 5, 5), cfg) == Eligibility::eligible);
    CHECK(eligibility(stats("g", 4, 100), cfg) == Eligibility::excluded);
    CHECK(eligibility(stats("g", 100, 4), cfg) == Eligibility::excluded);
    CHECK(eligibility(stats("g", 0, 0), cfg) == Eligibility::excluded);
    CHECK(eligibility(stats("g", 500, 500), cfg) == Eligibility::eligible);

    StrategyConfig loose;
    loose.min_high = 0;
    loose.min_low = 0;
    CHECK(eligibility(stats("g", 0, 0), loose) == Eligibility::eligible);
}

TEST_CASE("hybrid assignment splits at the volume cutoff", "[strategy]") {
    StrategyConfig cfg;  // hybrid, cutoff 200
    std::map<std::string, GroupTrainingStats> groups{
        {"small", stats("small", 99, 100)},   // 199 responses
        {"exact", stats("exact", 100, 100)},  // 200 responses
        {"tiny", stats("tiny", 2, 3)},        // excluded
    };
    const auto global_fit = fake_fit(0.9, 0.7, 0.5, 0.3);
    std::map<std::string, FitResult> per_group{
        {"small", fake_fit(0.85, 0.65, 0.45, 0.25)},
        {"exact", fake_fit(0.75, 0.55, 0.35, 0.15)},
    };

    const auto out = assign_thresholds(groups, global_fit, per_group, cfg);
    REQUIRE(out.size() == 3);
    CHECK(out.at("small").provenance == Provenance::global);
    CHECK(out.at("small").thresholds == global_fit.thresholds);
    CHECK(out.at("exact").provenance == Provenance::per_group);
    CHECK(out.at("exact").thresholds == per_group.at("exact").thresholds);
    CHECK(out.at("tiny").provenance == Provenance::baseline);
    CHECK(out.at("tiny").thresholds == cfg.baseline_thresholds);
}

TEST_CASE("excluded groups get baseline thresholds under every mode", "[strategy]") {
    std::map<std::string, GroupTrainingStats> groups{{"t", stats("t", 1, 1)}};
    const auto global_fit = fake_fit(0.9, 0.7, 0.5, 0.3);
    const std::map<std::string, FitResult> none;
    for (StrategyMode mode : {StrategyMode::global, StrategyMode::per_group, StrategyMode::hybrid}) {
        StrategyConfig cfg;
        cfg.mode = mode;
        const auto out = assign_thresholds(groups, global_fit, none, cfg);
        CHECK(out.at("t").provenance == Provenance::baseline);
        CHECK(out.at("t").thresholds == cfg.baseline_thresholds);
    }
}

TEST_CASE("global mode assigns the pooled fit to every eligible group", "[strategy]") {
    StrategyConfig cfg;
    cfg.mode = StrategyMode::global;
    std::map<std::string, GroupTrainingStats> groups{
        {"a", stats("a", 10, 10)},
        {"b", stats("b", 600, 600)},
    };
    const auto global_fit = fake_fit(0.9, 0.7, 0.5, 0.3);
    const auto out = assign_thresholds(groups, global_fit, {}, cfg);
    CHECK(out.at("a").provenance == Provenance::global);
    CHECK(out.at("b").provenance == Provenance::global);
    CHECK(out.at("b").thresholds == global_fit.thresholds);
}

TEST_CASE("per-group mode uses each group's own fit", "[strategy]") {
    StrategyConfig cfg;
    cfg.mode = StrategyMode::per_group;
    std::map<std::string, GroupTrainingStats> groups{
        {"a", stats("a", 10, 10)},
        {"b", stats("b", 6, 6)},
    };
    std::map<std::string, FitResult> per_group{
        {"a", fake_fit(0.85, 0.65, 0.45, 0.25)},
        {"b", fake_fit(0.75, 0.55, 0.35, 0.15)},
    };
    const auto out = assign_thresholds(groups, fake_fit(0.9, 0.7, 0.5, 0.3), per_group, cfg);
    CHECK(out.at("a").thresholds == per_group.at("a").thresholds);
    CHECK(out.at("b").thresholds == per_group.at("b").thresholds);
    CHECK(out.at("a").provenance == Provenance::per_group);
}

TEST_CASE("extreme cutoffs collapse hybrid to the pure modes", "[strategy]") {
    std::map<std::string, GroupTrainingStats> groups{
        {"a", stats("a", 10, 10)},
        {"b", stats("b", 600, 600)},
    };
    std::map<std::string, FitResult> per_group{
        {"a", fake_fit(0.85, 0.65, 0.45, 0.25)},
        {"b", fake_fit(0.75, 0.55, 0.35, 0.15)},
    };
    const auto global_fit = fake_fit(0.9, 0.7, 0.5, 0.3);

    StrategyConfig all_global;
    all_global.hybrid_cutoff = std::numeric_limits<std::int64_t>::max();
    const auto g = assign_thresholds(groups, global_fit, per_group, all_global);
    CHECK(g.at("a").provenance == Provenance::global);
    CHECK(g.at("b").provenance == Provenance::global);

    StrategyConfig all_local;
    all_local.hybrid_cutoff = 0;
    const auto l = assign_thresholds(groups, global_fit, per_group, all_local);
    CHECK(l.at("a").provenance == Provenance::per_group);
    CHECK(l.at("b").provenance == Provenance::per_group);
}

TEST_CASE("a needed per-group fit must exist", "[strategy]") {
    std::map<std::string, GroupTrainingStats> groups{{"big", stats("big", 300, 300)}};
    const auto global_fit = fake_fit(0.9, 0.7, 0.5, 0.3);

    StrategyConfig cfg;  // hybrid; 600 responses -> per-group required
    try {
        assign_thresholds(groups, global_fit, {}, cfg);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::missing_fit);
    }

    // The same group under global mode never needs it.
    cfg.mode = StrategyMode::global;
    CHECK_NOTHROW(assign_thresholds(groups, global_fit, {}, cfg));

    // Hybrid below the cutoff does not need it either.
    StrategyConfig small_cut;
    small_cut.hybrid_cutoff = 1000;
    CHECK_NOTHROW(assign_thresholds(groups, global_fit, {}, small_cut));
}

TEST_CASE("every input group receives exactly one assignment", "[strategy]") {
    Rng rng(67);
    std::map<std::string, GroupTrainingStats> groups;
    std::map<std::string, FitResult> per_group;
    for (int i = 0; i < 30; ++i) {
        const std::string gid = "g" + std::to_string(i);
        groups.emplace(gid, stats(gid, rng.next_below(20), rng.next_below(20)));
        per_group.emplace(gid, fake_fit(0.9, 0.7, 0.5, 0.3));
    }
    const auto out = assign_thresholds(groups, fake_fit(0.8, 0.6, 0.4, 0.2), per_group,
                                       StrategyConfig{});
    CHECK(out.size() == groups.size());
    for (const auto& [gid, _] : groups) CHECK(out.count(gid) == 1);
}
