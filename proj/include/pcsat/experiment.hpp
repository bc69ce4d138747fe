#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcsat/domain.hpp"
#include "pcsat/loss.hpp"
#include "pcsat/mapping.hpp"
#include "pcsat/optimizer.hpp"
#include "pcsat/parallel.hpp"
#include "pcsat/rng.hpp"
#include "pcsat/strategy.hpp"

namespace pcsat {

/// Rolling trial layout: trial k trains on
/// [start + k*stride, start + k*stride + train_days) and tests on the
/// following test_days.
struct TrialWindows {
    int train_days = 60;
    int test_days = 120;
    int stride_days = 30;
    int n_trials = 7;
    Date start_date{};

    void validate() const {
        if (train_days < 1 || test_days < 1 || stride_days < 1 || n_trials < 1)
            throw Error(Errc::invalid_config, "trial window day counts and n_trials must be >= 1");
    }

    struct Window {
        Date begin, end;  // [begin, end)
        bool contains(Date d) const { return begin <= d && d < end; }
    };

    Window train_window(int trial) const {
        const Date begin = start_date + trial * stride_days;
        return {begin, begin + train_days};
    }

    Window test_window(int trial) const {
        const Date begin = start_date + trial * stride_days + train_days;
        return {begin, begin + test_days};
    }
};

/// One survey-response-volume bin; `upper` empty means unbounded above.
struct VolumeBin {
    std::string label;
    std::int64_t lower = 1;
    std::optional<std::int64_t> upper;

    bool contains(std::int64_t n) const { return n >= lower && (!upper || n <= *upper); }
};

inline std::vector<VolumeBin> default_bins() {
    return {
        {"1-50", 1, 50},           {"51-200", 51, 200}, {"201-500", 201, 500},
        {"501-1000", 501, 1000},   {">1000", 1001, std::nullopt},
    };
}

inline std::optional<std::string> bin_label_for(std::int64_t n, std::span<const VolumeBin> bins) {
    for (const auto& b : bins)
        if (b.contains(n)) return b.label;
    return std::nullopt;
}

enum class Condition {
    baseline,
    global_threshold,
    group_threshold,
    train_period,
    bootstrap_train,
};

inline constexpr Condition kAllConditions[] = {
    Condition::baseline,        Condition::global_threshold, Condition::group_threshold,
    Condition::train_period,    Condition::bootstrap_train,
};

inline const char* condition_name(Condition c) {
    switch (c) {
        case Condition::baseline: return "baseline";
        case Condition::global_threshold: return "global_threshold";
        case Condition::group_threshold: return "group_threshold";
        case Condition::train_period: return "train_period";
        case Condition::bootstrap_train: return "bootstrap_train";
    }
    return "?";
}

/// Metrics for one (trial, group, condition) cell.
struct ConditionReport {
    int trial_index = 0;
    std::string group_id;
    Condition condition = Condition::baseline;
    std::string bin;
    LossBreakdown metrics;
    std::int64_t n_train_responses = 0;
    std::int64_t n_test_responses = 0;
};

struct SkipRecord {
    int trial_index = 0;
    std::string group_id;
    std::string reason;
};

struct RunResult {
    std::vector<ConditionReport> reports;
    std::vector<SkipRecord> skips;
};

struct ExperimentOptions {
    std::int64_t iterations = 5000;
    std::int64_t bootstrap_resamples = 200;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    BoundaryMode boundary = BoundaryMode::favor_higher;
    LossOptions loss{};
    std::span<const VolumeBin> bins;  // empty = default bins
};

namespace detail {

inline LossBreakdown evaluate_condition(std::span<const ScoredCall> labeled, const Thresholds& th,
                                        BoundaryMode mode, const LossOptions& loss_opts) {
    return loss_between(map_all(labeled, th, mode), OrdinalDistribution::from_labels(labeled),
                        loss_opts);
}

/// Average of per-resample metrics over with-replacement resamples of the
/// same size. Absolute components are averaged (the total stays the sum of
/// the averaged components); the signed mean delta is averaged alongside.
inline LossBreakdown bootstrap_metrics(std::span<const ScoredCall> labeled, const Thresholds& th,
                                       std::int64_t resamples, Rng& rng, BoundaryMode mode,
                                       const LossOptions& loss_opts) {
    const std::size_t n = labeled.size();
    std::vector<ScoredCall> sample(n);
    LossBreakdown acc;
    for (std::int64_t r = 0; r < resamples; ++r) {
        for (std::size_t i = 0; i < n; ++i) sample[i] = labeled[rng.next_below(n)];
        const LossBreakdown lb = evaluate_condition(sample, th, mode, loss_opts);
        acc.delta_pct_satisfied += lb.delta_pct_satisfied;
        acc.delta_mean += lb.delta_mean;
        acc.mse += lb.mse;
        acc.delta_mean_signed += lb.delta_mean_signed;
    }
    const double k = static_cast<double>(resamples);
    acc.delta_pct_satisfied /= k;
    acc.delta_mean /= k;
    acc.mse /= k;
    acc.delta_mean_signed /= k;
    acc.total = acc.delta_pct_satisfied + acc.delta_mean + acc.mse;
    return acc;
}

}  // namespace detail

/// Runs one trial of the five-condition experiment. Within the trial: compute
/// per-group training stats and eligibility, fit a global threshold set on
/// the pooled labeled train calls of eligible groups, fit per-group sets, and
/// evaluate baseline / global / per-group thresholds on the test window plus
/// the per-group set on the train window and on bootstrap resamples of it.
/// Groups are processed with independent derived RNG streams, so the worker
/// count cannot change any report.
inline RunResult run_single_trial(std::span<const ScoredCall> calls, const TrialWindows& windows,
                                  int trial, const StrategyConfig& cfg,
                                  const ExperimentOptions& opts = {}) {
    windows.validate();
    const auto train_w = windows.train_window(trial);
    const auto test_w = windows.test_window(trial);

    std::map<std::string, std::vector<ScoredCall>> train_labeled, test_labeled;
    for (const auto& c : calls) {
        if (!c.survey_csat) continue;
        if (train_w.contains(c.timestamp)) train_labeled[c.group_id].push_back(c);
        else if (test_w.contains(c.timestamp)) test_labeled[c.group_id].push_back(c);
    }

    std::vector<std::string> eligible;
    std::map<std::string, GroupTrainingStats> stats;
    for (const auto& [gid, group_calls] : train_labeled) {
        auto s = make_group_stats(gid, group_calls);
        if (eligibility(s, cfg) == Eligibility::eligible) eligible.push_back(gid);
        stats.emplace(gid, std::move(s));
    }
    if (eligible.empty())
        throw Error(Errc::insufficient_data,
                    "trial " + std::to_string(trial) + " has no eligible group");

    std::vector<ScoredCall> global_pool;
    for (const auto& gid : eligible) {
        const auto& gc = train_labeled.at(gid);
        global_pool.insert(global_pool.end(), gc.begin(), gc.end());
    }

    FitOptions fit_opts;
    fit_opts.iterations = opts.iterations;
    fit_opts.warm_start = cfg.baseline_thresholds;
    fit_opts.boundary = opts.boundary;
    fit_opts.loss = opts.loss;

    FitOptions global_opts = fit_opts;
    global_opts.seed = derive_stream(opts.seed, trial, "fit:global");
    const FitResult global_fit = fit_random_search(global_pool, global_opts);

    const auto bins =
        opts.bins.empty() ? default_bins() : std::vector<VolumeBin>(opts.bins.begin(), opts.bins.end());

    struct Cell {
        std::vector<ConditionReport> reports;
        std::optional<SkipRecord> skip;
    };
    std::vector<Cell> cells(eligible.size());

    parallel_for(eligible.size(), opts.workers, [&](std::size_t i) {
        const std::string& gid = eligible[i];
        const auto& train_g = train_labeled.at(gid);
        const GroupTrainingStats& st = stats.at(gid);

        auto test_it = test_labeled.find(gid);
        if (test_it == test_labeled.end() || test_it->second.empty()) {
            cells[i].skip = SkipRecord{trial, gid, "no_test_responses"};
            return;
        }
        const auto& test_g = test_it->second;

        FitOptions group_opts = fit_opts;
        group_opts.seed = derive_stream(opts.seed, trial, "fit:group", gid);
        const FitResult group_fit = fit_random_search(train_g, group_opts);

        auto emit = [&](Condition cond, const LossBreakdown& lb) {
            ConditionReport r;
            r.trial_index = trial;
            r.group_id = gid;
            r.condition = cond;
            r.bin = bin_label_for(st.n_responses, bins).value_or("");
            r.metrics = lb;
            r.n_train_responses = st.n_responses;
            r.n_test_responses = static_cast<std::int64_t>(test_g.size());
            cells[i].reports.push_back(std::move(r));
        };

        emit(Condition::baseline,
             detail::evaluate_condition(test_g, cfg.baseline_thresholds, opts.boundary, opts.loss));
        emit(Condition::global_threshold,
             detail::evaluate_condition(test_g, global_fit.thresholds, opts.boundary, opts.loss));
        emit(Condition::group_threshold,
             detail::evaluate_condition(test_g, group_fit.thresholds, opts.boundary, opts.loss));
        emit(Condition::train_period,
             detail::evaluate_condition(train_g, group_fit.thresholds, opts.boundary, opts.loss));

        Rng boot_rng(derive_stream(opts.seed, trial, "bootstrap", gid));
        emit(Condition::bootstrap_train,
             detail::bootstrap_metrics(train_g, group_fit.thresholds, opts.bootstrap_resamples,
                                       boot_rng, opts.boundary, opts.loss));
    });

    RunResult out;
    for (auto& cell : cells) {
        for (auto& r : cell.reports) out.reports.push_back(std::move(r));
        if (cell.skip) out.skips.push_back(std::move(*cell.skip));
    }
    return out;
}

/// Runs all trials. The call stream must span every trial window.
inline RunResult run_trials(std::span<const ScoredCall> calls, const TrialWindows& windows,
                            const StrategyConfig& cfg, const ExperimentOptions& opts = {}) {
    windows.validate();
    if (calls.empty()) throw Error(Errc::insufficient_data, "empty call stream");

    Date min_date = calls.front().timestamp, max_date = calls.front().timestamp;
    for (const auto& c : calls) {
        min_date = std::min(min_date, c.timestamp);
        max_date = std::max(max_date, c.timestamp);
    }
    const Date last_end = windows.test_window(windows.n_trials - 1).end;
    if (min_date > windows.start_date || max_date < last_end - 1)
        throw Error(Errc::insufficient_data,
                    "call stream [" + format_date(min_date) + ", " + format_date(max_date) +
                        "] does not span trial windows [" + format_date(windows.start_date) + ", " +
                        format_date(last_end - 1) + "]");

    RunResult out;
    for (int trial = 0; trial < windows.n_trials; ++trial) {
        RunResult one = run_single_trial(calls, windows, trial, cfg, opts);
        for (auto& r : one.reports) out.reports.push_back(std::move(r));
        for (auto& s : one.skips) out.skips.push_back(std::move(s));
    }
    return out;
}

/// Mean of each metric over the (group, trial) cells of one bin x condition.
struct BinAggregate {
    std::string bin;
    Condition condition = Condition::baseline;
    std::int64_t n_cells = 0;
    double delta_pct_satisfied = 0.0;
    double delta_mean_signed = 0.0;
    double delta_mean_abs = 0.0;
    double mse = 0.0;
    double loss_total = 0.0;
};

/// Aggregates reports into the (bin x condition) table behind the result
/// figures. Cells with zero members are omitted, not emitted as zero.
inline std::vector<BinAggregate> aggregate_bins(std::span<const ConditionReport> reports,
                                                std::span<const VolumeBin> bins) {
    std::vector<BinAggregate> out;
    for (const auto& bin : bins) {
        for (Condition cond : kAllConditions) {
            BinAggregate agg;
            agg.bin = bin.label;
            agg.condition = cond;
            for (const auto& r : reports) {
                if (r.condition != cond || !bin.contains(r.n_train_responses)) continue;
                ++agg.n_cells;
                agg.delta_pct_satisfied += r.metrics.delta_pct_satisfied;
                agg.delta_mean_signed += r.metrics.delta_mean_signed;
                agg.delta_mean_abs += r.metrics.delta_mean;
                agg.mse += r.metrics.mse;
                agg.loss_total += r.metrics.total;
            }
            if (agg.n_cells == 0) continue;
            const double k = static_cast<double>(agg.n_cells);
            agg.delta_pct_satisfied /= k;
            agg.delta_mean_signed /= k;
            agg.delta_mean_abs /= k;
            agg.mse /= k;
            agg.loss_total /= k;
            out.push_back(std::move(agg));
        }
    }
    return out;
}

}  // namespace pcsat
