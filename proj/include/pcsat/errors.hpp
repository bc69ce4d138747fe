#pragma once

#include <stdexcept>
#include <string>

namespace pcsat {

enum class Errc {
    out_of_range_proba,
    out_of_range_csat,
    bad_timestamp,
    bad_thresholds,
    empty_input,
    empty_distribution,
    no_candidates,
    too_large,
    missing_fit,
    insufficient_data,
    invalid_config,
    schema_error,
    io_error,
    usage_error,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::out_of_range_proba: return "OutOfRangeProba";
        case Errc::out_of_range_csat: return "OutOfRangeCsat";
        case Errc::bad_timestamp: return "BadTimestamp";
        case Errc::bad_thresholds: return "BadThresholds";
        case Errc::empty_input: return "EmptyInput";
        case Errc::empty_distribution: return "EmptyDistribution";
        case Errc::no_candidates: return "NoCandidates";
        case Errc::too_large: return "TooLarge";
        case Errc::missing_fit: return "MissingFit";
        case Errc::insufficient_data: return "InsufficientData";
        case Errc::invalid_config: return "InvalidConfig";
        case Errc::schema_error: return "SchemaError";
        case Errc::io_error: return "IoError";
        case Errc::usage_error: return "UsageError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace pcsat
