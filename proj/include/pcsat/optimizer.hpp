#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pcsat/domain.hpp"
#include "pcsat/loss.hpp"
#include "pcsat/mapping.hpp"
#include "pcsat/rng.hpp"

namespace pcsat {

/// Outcome of a threshold fit. `iteration_of_best` is 0 when the warm start
/// won, otherwise the 1-based index of the winning random candidate.
struct FitResult {
    Thresholds thresholds;
    LossBreakdown loss;
    std::int64_t iterations_run = 0;
    std::int64_t iteration_of_best = 0;
    std::uint64_t seed = 0;
};

struct FitOptions {
    std::int64_t iterations = 5000;
    std::uint64_t seed = 0;
    std::optional<Thresholds> warm_start;
    BoundaryMode boundary = BoundaryMode::favor_higher;
    LossOptions loss{};
};

namespace detail {

struct LabeledPool {
    std::vector<double> probas;
    OrdinalDistribution observed;
};

inline LabeledPool collect_labeled(std::span<const ScoredCall> pool) {
    LabeledPool out;
    for (const auto& c : pool) {
        if (!c.survey_csat) continue;
        out.probas.push_back(c.proba);
        out.observed.add(*c.survey_csat);
    }
    return out;
}

inline LossBreakdown eval_candidate(const LabeledPool& pool, const Thresholds& th,
                                    BoundaryMode mode, const LossOptions& loss_opts) {
    return loss_between(map_all_probas(pool.probas, th, mode), pool.observed, loss_opts);
}

/// Draws 4 values ~ U(0,1) and sorts them descending. Redraws the whole
/// quadruple on an exact tie or a value on the open-interval boundary, so the
/// result always satisfies the Thresholds invariant.
inline Thresholds draw_candidate(Rng& rng) {
    for (;;) {
        double v[4] = {rng.next_double(), rng.next_double(), rng.next_double(), rng.next_double()};
        std::sort(v, v + 4, std::greater<>());
        if (v[0] >= 1.0 || v[3] <= 0.0) continue;
        if (v[0] == v[1] || v[1] == v[2] || v[2] == v[3]) continue;
        return Thresholds(v[0], v[1], v[2], v[3]);
    }
}

}  // namespace detail

/// Random search over threshold quadruples: per iteration draw 4 uniform
/// values, sort them into a candidate, keep the lowest-loss candidate seen.
/// A warm start, when given, is evaluated as iteration 0 so the result never
/// underperforms it. Deterministic given (pool, iterations, seed).
inline FitResult fit_random_search(std::span<const ScoredCall> pool, const FitOptions& opts = {}) {
    const auto labeled = detail::collect_labeled(pool);
    if (labeled.probas.empty()) throw Error(Errc::empty_input, "pool has no labeled calls");
    if (opts.iterations <= 0 && !opts.warm_start)
        throw Error(Errc::no_candidates, "zero iterations and no warm start");

    double best_loss = 1000.0;
    std::optional<Thresholds> best_th;
    LossBreakdown best_breakdown;
    std::int64_t best_iter = 0;

    if (opts.warm_start) {
        best_breakdown = detail::eval_candidate(labeled, *opts.warm_start, opts.boundary, opts.loss);
        best_loss = best_breakdown.total;
        best_th = *opts.warm_start;
        best_iter = 0;
    }

    Rng rng(opts.seed);
    for (std::int64_t j = 1; j <= opts.iterations; ++j) {
        const Thresholds cand = detail::draw_candidate(rng);
        const LossBreakdown lb = detail::eval_candidate(labeled, cand, opts.boundary, opts.loss);
        if (lb.total < best_loss) {
            best_loss = lb.total;
            best_breakdown = lb;
            best_th = cand;
            best_iter = j;
        }
    }

    return FitResult{*best_th, best_breakdown, opts.iterations, best_iter, opts.seed};
}

struct ExhaustiveOptions {
    std::int64_t max_distinct = 40;
    BoundaryMode boundary = BoundaryMode::favor_higher;
    LossOptions loss{};
};

/// Exhaustive oracle: enumerates every threshold equivalence class a pool
/// admits (two quadruples inducing the same per-call class assignment have
/// identical loss) and returns the global optimum. Candidate positions are
/// the open gaps between adjacent distinct probas plus one below the minimum
/// and one above the maximum; a class boundary in a given gap is represented
/// by an interior point, and k boundaries sharing a gap are spread evenly so
/// the quadruple stays strictly descending. Intended for tests and small
/// pools; the pool may hold at most `max_distinct` distinct proba values.
inline FitResult fit_exhaustive(std::span<const ScoredCall> pool, const ExhaustiveOptions& opts = {}) {
    const auto labeled = detail::collect_labeled(pool);
    if (labeled.probas.empty()) throw Error(Errc::empty_input, "pool has no labeled calls");

    std::vector<double> distinct = labeled.probas;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (static_cast<std::int64_t>(distinct.size()) > opts.max_distinct)
        throw Error(Errc::too_large, "pool has " + std::to_string(distinct.size()) +
                                         " distinct probas, oracle limit is " +
                                         std::to_string(opts.max_distinct));

    // Gap intervals (lo, hi), ascending. Gaps outside (0,1) are unreachable
    // by any valid threshold and are dropped.
    struct Gap {
        double lo, hi;
    };
    std::vector<Gap> gaps;
    if (distinct.front() > 0.0) gaps.push_back({0.0, distinct.front()});
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
        gaps.push_back({distinct[i], distinct[i + 1]});
    if (distinct.back() < 1.0) gaps.push_back({distinct.back(), 1.0});

    const std::size_t g = gaps.size();
    double best_loss = 1000.0;
    std::optional<Thresholds> best_th;
    LossBreakdown best_breakdown;
    std::int64_t candidates = 0;
    std::int64_t best_iter = 0;

    // Multisets of 4 gap indices, ascending: a <= b <= c <= d. Higher gap
    // index = higher proba = lower-satisfaction boundary, so gap d hosts t12.
    for (std::size_t a = 0; a < g; ++a)
        for (std::size_t b = a; b < g; ++b)
            for (std::size_t c = b; c < g; ++c)
                for (std::size_t d = c; d < g; ++d) {
                    const std::size_t idx[4] = {d, c, b, a};  // t12, t23, t34, t45
                    double values[4];
                    std::size_t i = 0;
                    while (i < 4) {
                        std::size_t j = i;
                        while (j < 4 && idx[j] == idx[i]) ++j;
                        const Gap& gap = gaps[idx[i]];
                        const std::size_t k = j - i;  // boundaries sharing this gap
                        for (std::size_t r = 0; r < k; ++r)
                            values[i + r] =
                                gap.lo + (gap.hi - gap.lo) *
                                             (static_cast<double>(k - r) / static_cast<double>(k + 1));
                        i = j;
                    }
                    const Thresholds cand(values[0], values[1], values[2], values[3]);
                    const LossBreakdown lb =
                        detail::eval_candidate(labeled, cand, opts.boundary, opts.loss);
                    ++candidates;
                    if (lb.total < best_loss) {
                        best_loss = lb.total;
                        best_breakdown = lb;
                        best_th = cand;
                        best_iter = candidates;
                    }
                }

    return FitResult{*best_th, best_breakdown, candidates, best_iter, 0};
}

}  // namespace pcsat
