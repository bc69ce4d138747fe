#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcsat/date.hpp"
#include "pcsat/errors.hpp"

namespace pcsat {

/// One call record: the classifier's low-CSAT probability plus, when the
/// customer answered the survey, the observed 1-5 CSAT.
struct ScoredCall {
    std::string call_id;
    std::string group_id;
    Date timestamp;
    double proba = 0.0;                 // probability of the low-CSAT class, in [0,1]
    std::optional<int> survey_csat;     // 1..5 when present

    bool labeled() const { return survey_csat.has_value(); }
};

/// The four ordered class boundaries. t12 separates pCSAT 1 from 2, and so
/// on down to t45. Strictly descending and strictly inside (0,1); violations
/// are rejected at construction.
struct Thresholds {
    double t12;
    double t23;
    double t34;
    double t45;

    Thresholds(double t12_, double t23_, double t34_, double t45_)
        : t12(t12_), t23(t23_), t34(t34_), t45(t45_) {
        if (!(t12 > t23 && t23 > t34 && t34 > t45))
            throw Error(Errc::bad_thresholds, "thresholds must be strictly descending");
        if (!(t12 < 1.0 && t45 > 0.0))
            throw Error(Errc::bad_thresholds, "thresholds must lie strictly inside (0,1)");
    }

    bool operator==(const Thresholds&) const = default;
};

/// Counts per CSAT class 1-5.
struct OrdinalDistribution {
    std::array<std::int64_t, 5> counts{};  // counts[i] holds class i+1

    static OrdinalDistribution from_labels(std::span<const ScoredCall> calls) {
        OrdinalDistribution d;
        for (const auto& c : calls)
            if (c.survey_csat) d.add(*c.survey_csat);
        return d;
    }

    void add(int csat_class, std::int64_t n = 1) {
        if (csat_class < 1 || csat_class > 5)
            throw Error(Errc::out_of_range_csat, "class must be in 1..5");
        counts[csat_class - 1] += n;
    }

    std::int64_t count_for(int csat_class) const { return counts[csat_class - 1]; }

    std::int64_t total() const {
        std::int64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }

    bool operator==(const OrdinalDistribution&) const = default;
};

/// The three loss components between a predicted and an observed distribution,
/// plus their sum. `delta_mean_signed` is diagnostic only and does not enter
/// the total.
struct LossBreakdown {
    double delta_pct_satisfied = 0.0;
    double delta_mean = 0.0;
    double mse = 0.0;
    double total = 0.0;
    double delta_mean_signed = 0.0;
};

/// Survey-response counts for one group over a training window.
struct GroupTrainingStats {
    std::string group_id;
    std::int64_t n_responses = 0;  // n_high + n_low
    std::int64_t n_high = 0;       // survey_csat >= 4
    std::int64_t n_low = 0;        // survey_csat <= 3
};

inline GroupTrainingStats make_group_stats(const std::string& group_id,
                                           std::span<const ScoredCall> calls) {
    GroupTrainingStats s;
    s.group_id = group_id;
    for (const auto& c : calls) {
        if (!c.survey_csat) continue;
        ++s.n_responses;
        (*c.survey_csat >= 4 ? s.n_high : s.n_low)++;
    }
    return s;
}

/// One CSV row as split by the ingestion layer, before validation.
struct RawCall {
    std::string call_id;
    std::string group_id;
    std::string date;
    std::string proba;
    std::string survey_csat;  // empty when the survey was not answered
};

/// A rejected input row: where it was and why.
struct RowRejection {
    std::size_t row = 0;  // 1-based, header = row 1
    Errc code = Errc::schema_error;
    std::string message;
};

/// Validates one raw row. Returns the call, or pushes a rejection carrying
/// the row number and reason.
inline std::optional<ScoredCall> validate_call(const RawCall& raw, std::size_t row,
                                               std::vector<RowRejection>& rejections) {
    auto reject = [&](Errc code, std::string msg) {
        rejections.push_back(RowRejection{row, code, std::move(msg)});
        return std::nullopt;
    };

    ScoredCall call;
    call.call_id = raw.call_id;
    call.group_id = raw.group_id;

    auto date = parse_date(raw.date);
    if (!date) return reject(Errc::bad_timestamp, "unparseable date '" + raw.date + "'");
    call.timestamp = *date;

    {
        const char* begin = raw.proba.data();
        const char* end = begin + raw.proba.size();
        auto [p, ec] = std::from_chars(begin, end, call.proba);
        if (ec != std::errc() || p != end)
            return reject(Errc::out_of_range_proba, "unparseable proba '" + raw.proba + "'");
    }
    if (!(call.proba >= 0.0 && call.proba <= 1.0))
        return reject(Errc::out_of_range_proba, "proba " + raw.proba + " outside [0,1]");

    if (!raw.survey_csat.empty()) {
        int v = 0;
        const char* begin = raw.survey_csat.data();
        const char* end = begin + raw.survey_csat.size();
        auto [p, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc() || p != end || v < 1 || v > 5)
            return reject(Errc::out_of_range_csat,
                          "survey_csat '" + raw.survey_csat + "' outside {1..5}");
        call.survey_csat = v;
    }
    return call;
}

}  // namespace pcsat
