#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "pcsat/date.hpp"
#include "pcsat/domain.hpp"
#include "pcsat/rng.hpp"

namespace pcsat {

struct BetaParams {
    double a = 1.0;
    double b = 1.0;
    double mean() const { return a / (a + b); }
};

/// Linear drift of the per-group class prior: starting at `start_date` the
/// prior moves along `direction` (L1-normalized, zero-sum) by `daily_l1` of
/// L1 mass per day, clipped at zero and renormalized.
struct DriftSpec {
    double daily_l1 = 0.0;
    std::array<double, 5> direction{1.0, 0.5, 0.0, -0.5, -1.0};
    std::optional<Date> start_date;  // default: range start
};

/// Controls for the synthetic multi-group call population. Group g draws its
/// class prior from Dirichlet(csat_prior) and its daily call count from
/// Poisson(calls_per_day[g mod size]); cycling the rate list over groups
/// yields mixed-volume populations.
struct SynthConfig {
    int n_groups = 10;
    std::vector<double> calls_per_day{20.0};
    Date start_date{};
    int n_days = 0;
    double survey_response_rate = 0.08;
    std::array<double, 5> csat_prior{4.0, 2.0, 3.0, 8.0, 16.0};
    std::array<BetaParams, 5> proba_link{BetaParams{8.0, 2.0}, BetaParams{6.0, 3.0},
                                         BetaParams{5.0, 5.0}, BetaParams{3.0, 6.0},
                                         BetaParams{2.0, 8.0}};
    std::optional<DriftSpec> drift;
    std::uint64_t seed = 0;
    std::string group_prefix = "g";

    void validate() const {
        if (n_groups < 1) throw Error(Errc::invalid_config, "n_groups must be >= 1");
        if (n_days < 1) throw Error(Errc::invalid_config, "empty date range");
        if (calls_per_day.empty()) throw Error(Errc::invalid_config, "calls_per_day is empty");
        for (double r : calls_per_day)
            if (!(r > 0.0)) throw Error(Errc::invalid_config, "call rates must be > 0");
        if (!(survey_response_rate > 0.0 && survey_response_rate <= 1.0))
            throw Error(Errc::invalid_config, "survey_response_rate must be in (0,1]");
        for (double a : csat_prior)
            if (!(a > 0.0)) throw Error(Errc::invalid_config, "Dirichlet concentrations must be > 0");
        for (const auto& bp : proba_link)
            if (!(bp.a > 0.0 && bp.b > 0.0))
                throw Error(Errc::invalid_config, "Beta parameters must be > 0");
        for (int i = 0; i + 1 < 5; ++i)
            if (!(proba_link[i].mean() > proba_link[i + 1].mean()))
                throw Error(Errc::invalid_config,
                            "proba_link means must strictly decrease with CSAT class");
        if (drift && !(drift->daily_l1 >= 0.0))
            throw Error(Errc::invalid_config, "drift daily_l1 must be >= 0");
    }
};

struct GroupProfile {
    std::string group_id;
    double calls_per_day = 0.0;
    std::array<double, 5> prior{};  // drawn class prior before drift
};

struct SynthOutput {
    std::vector<ScoredCall> calls;
    std::vector<GroupProfile> groups;
};

namespace detail {

inline std::array<double, 5> drifted_prior(const std::array<double, 5>& prior,
                                           const DriftSpec& drift, Date start, Date day) {
    const Date from = drift.start_date.value_or(start);
    const int elapsed = day - from;
    if (elapsed <= 0 || drift.daily_l1 <= 0.0) return prior;

    double dir_l1 = 0.0;
    for (double d : drift.direction) dir_l1 += std::abs(d);
    if (dir_l1 <= 0.0) return prior;

    const double scale = drift.daily_l1 * elapsed / dir_l1;
    std::array<double, 5> out{};
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        out[i] = std::max(0.0, prior[i] + scale * drift.direction[i]);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

}  // namespace detail

/// Generates the population and keeps each group's drawn profile alongside
/// (useful when checking the calls against the priors they came from).
/// Deterministic given the seed: each group runs an independent derived
/// stream and output ordering is canonical (group, date, index).
inline SynthOutput generate_detailed(const SynthConfig& cfg) {
    cfg.validate();
    SynthOutput out;
    out.groups.reserve(cfg.n_groups);

    for (int g = 0; g < cfg.n_groups; ++g) {
        char gid_buf[32];
        std::snprintf(gid_buf, sizeof(gid_buf), "%s%03d", cfg.group_prefix.c_str(), g);
        GroupProfile profile;
        profile.group_id = gid_buf;
        profile.calls_per_day = cfg.calls_per_day[g % cfg.calls_per_day.size()];

        Rng rng(derive_stream(cfg.seed, "synth", g));
        const auto prior_vec = rng.next_dirichlet(std::span<const double>(cfg.csat_prior));
        for (int i = 0; i < 5; ++i) profile.prior[i] = prior_vec[i];

        for (int day = 0; day < cfg.n_days; ++day) {
            const Date date = cfg.start_date + day;
            std::array<double, 5> prior = profile.prior;
            if (cfg.drift)
                prior = detail::drifted_prior(profile.prior, *cfg.drift, cfg.start_date, date);

            const std::int64_t n_calls = rng.next_poisson(profile.calls_per_day);
            for (std::int64_t k = 0; k < n_calls; ++k) {
                const int cls = static_cast<int>(rng.next_categorical(prior)) + 1;
                const auto& link = cfg.proba_link[cls - 1];

                ScoredCall call;
                char cid_buf[64];
                std::snprintf(cid_buf, sizeof(cid_buf), "%s-d%04d-%lld", gid_buf, day,
                              static_cast<long long>(k));
                call.call_id = cid_buf;
                call.group_id = profile.group_id;
                call.timestamp = date;
                call.proba = rng.next_beta(link.a, link.b);
                if (rng.next_double() < cfg.survey_response_rate) call.survey_csat = cls;
                out.calls.push_back(std::move(call));
            }
        }
        out.groups.push_back(std::move(profile));
    }
    return out;
}

inline std::vector<ScoredCall> generate(const SynthConfig& cfg) {
    return generate_detailed(cfg).calls;
}

}  // namespace pcsat
