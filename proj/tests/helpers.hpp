#pragma once

// Shared test scaffolding: quick call construction, tiny pool builders, and an
// error-code matcher.

#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <string>
#include <vector>

#include "pcsat/pcsat.hpp"

/// Catch matcher asserting a pcsat::Error carries a specific code.
class ErrcIs : public Catch::Matchers::MatcherGenericBase {
  public:
    explicit ErrcIs(pcsat::Errc code) : code_(code) {}
    bool match(const pcsat::Error& e) const { return e.code() == code_; }
    std::string describe() const override {
        return "has error code " + std::string(pcsat::errc_name(code_));
    }

  private:
    pcsat::Errc code_;
};

namespace testutil {

inline pcsat::ScoredCall call(double proba, std::optional<int> csat = std::nullopt,
                              const std::string& gid = "g1",
                              pcsat::Date date = pcsat::make_date(2024, 1, 1),
                              const std::string& id = "c") {
    pcsat::ScoredCall c;
    c.call_id = id;
    c.group_id = gid;
    c.timestamp = date;
    c.proba = proba;
    c.survey_csat = csat;
    return c;
}

/// Pool of labeled calls from parallel proba/label lists.
inline std::vector<pcsat::ScoredCall> pool(const std::vector<double>& probas,
                                           const std::vector<int>& labels,
                                           const std::string& gid = "g1") {
    std::vector<pcsat::ScoredCall> out;
    for (std::size_t i = 0; i < probas.size(); ++i)
        out.push_back(call(probas[i], labels[i], gid, pcsat::make_date(2024, 1, 1),
                           "c" + std::to_string(i)));
    return out;
}

/// Random labeled pool on a quantized proba grid: `classes` calls per class,
/// probas drawn from overlapping per-class bands so the optimum spreads its
/// thresholds. Deterministic in `seed`.
inline std::vector<pcsat::ScoredCall> banded_pool(std::uint64_t seed, int per_class = 4,
                                                  int grid = 14) {
    pcsat::Rng rng(seed);
    std::vector<pcsat::ScoredCall> out;
    for (int cls = 1; cls <= 5; ++cls) {
        const int base = (5 - cls) * 2;  // class 5 lowest probas
        for (int k = 0; k < per_class; ++k) {
            const int j = base + static_cast<int>(rng.next_below(5));
            const double p = (j + 0.5) / static_cast<double>(grid);
            out.push_back(call(p, cls, "g1", pcsat::make_date(2024, 1, 1),
                               "c" + std::to_string(out.size())));
        }
    }
    return out;
}

/// Coarse 5-value pool with mild label noise: probas one of 5 spread values,
/// labels mostly the matching class, shifted one step 25% of the time.
inline std::vector<pcsat::ScoredCall> coarse_pool(std::uint64_t seed, int per_class = 4) {
    pcsat::Rng rng(seed);
    const double values[5] = {0.9, 0.7, 0.5, 0.3, 0.1};  // class 1..5
    std::vector<pcsat::ScoredCall> out;
    for (int cls = 1; cls <= 5; ++cls) {
        for (int k = 0; k < per_class; ++k) {
            int label = cls;
            const double u = rng.next_double();
            if (u < 0.125) label = std::max(1, cls - 1);
            else if (u < 0.25) label = std::min(5, cls + 1);
            out.push_back(call(values[cls - 1], label, "g1", pcsat::make_date(2024, 1, 1),
                               "c" + std::to_string(out.size())));
        }
    }
    return out;
}

}  // namespace testutil
