#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pcsat/domain.hpp"
#include "pcsat/experiment.hpp"
#include "pcsat/loss.hpp"
#include "pcsat/mapping.hpp"
#include "pcsat/optimizer.hpp"
#include "pcsat/strategy.hpp"
#include "pcsat/synthdata.hpp"

namespace pcsat {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// CSV primitives (RFC 4180 quoting)
// ---------------------------------------------------------------------------

namespace csv {

/// Splits one CSV record into fields. Quoted fields may contain commas,
/// doubled quotes, and (already joined) newlines.
inline std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string quote_field(const std::string& f) {
    if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
    std::string out = "\"";
    for (char c : f) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace csv

// ---------------------------------------------------------------------------
// Deterministic number formatting
// ---------------------------------------------------------------------------

/// 17 significant digits: round-trips any double exactly.
inline std::string format_double_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Report formatting: stable and readable, 12 significant digits.
inline std::string format_double_report(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Call CSV
// ---------------------------------------------------------------------------

struct ReadCallsResult {
    std::vector<ScoredCall> calls;
    std::vector<RowRejection> rejections;
};

/// Reads the standard call CSV: header
/// call_id,group_id,date,proba,survey_csat (columns located by name, extras
/// ignored). Malformed rows are collected, valid rows returned in file order.
inline ReadCallsResult read_calls(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open '" + path + "'");

    std::string header;
    if (!std::getline(in, header)) throw Error(Errc::schema_error, "'" + path + "' is empty");
    if (!header.empty() && header.back() == '\r') header.pop_back();

    const auto cols = csv::split_record(header);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < cols.size(); ++i) index[cols[i]] = i;
    for (const char* required : {"call_id", "group_id", "date", "proba", "survey_csat"})
        if (!index.count(required))
            throw Error(Errc::schema_error,
                        "'" + path + "' is missing required column '" + required + "'");

    ReadCallsResult out;
    std::string line;
    std::size_t row = 1;  // header is row 1
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = csv::split_record(line);
        if (fields.size() < cols.size()) {
            out.rejections.push_back({row, Errc::schema_error, "wrong field count"});
            continue;
        }
        RawCall raw{fields[index["call_id"]], fields[index["group_id"]], fields[index["date"]],
                    fields[index["proba"]], fields[index["survey_csat"]]};
        if (auto call = validate_call(raw, row, out.rejections)) out.calls.push_back(std::move(*call));
    }
    return out;
}

inline void write_calls(const std::string& path, std::span<const ScoredCall> calls) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
    out << "call_id,group_id,date,proba,survey_csat\n";
    for (const auto& c : calls) {
        out << csv::quote_field(c.call_id) << ',' << csv::quote_field(c.group_id) << ','
            << format_date(c.timestamp) << ',' << format_double_exact(c.proba) << ',';
        if (c.survey_csat) out << *c.survey_csat;
        out << '\n';
    }
    if (!out) throw Error(Errc::io_error, "write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Thresholds JSON
// ---------------------------------------------------------------------------

inline nlohmann::json loss_to_json(const LossBreakdown& lb) {
    return {{"delta_pct_satisfied", lb.delta_pct_satisfied},
            {"delta_mean", lb.delta_mean},
            {"delta_mean_signed", lb.delta_mean_signed},
            {"mse", lb.mse},
            {"total", lb.total}};
}

inline nlohmann::json thresholds_to_json(const FitResult& fit, const nlohmann::json& fitted_on) {
    return {{"schema", 1},
            {"t12", fit.thresholds.t12},
            {"t23", fit.thresholds.t23},
            {"t34", fit.thresholds.t34},
            {"t45", fit.thresholds.t45},
            {"fitted_on", fitted_on},
            {"loss", loss_to_json(fit.loss)},
            {"iterations_run", fit.iterations_run},
            {"iteration_of_best", fit.iteration_of_best},
            {"seed", fit.seed}};
}

inline void write_thresholds(const std::string& path, const FitResult& fit,
                             const nlohmann::json& fitted_on) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
    out << thresholds_to_json(fit, fitted_on).dump(2) << '\n';
    if (!out) throw Error(Errc::io_error, "write failed for '" + path + "'");
}

inline Thresholds read_thresholds(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::schema_error, "'" + path + "' is not valid JSON: " + e.what());
    }
    for (const char* key : {"t12", "t23", "t34", "t45"})
        if (!j.contains(key) || !j[key].is_number())
            throw Error(Errc::schema_error, "'" + path + "' is missing threshold '" + key + "'");
    return Thresholds(j["t12"].get<double>(), j["t23"].get<double>(), j["t34"].get<double>(),
                      j["t45"].get<double>());
}

// ---------------------------------------------------------------------------
// Report CSVs
// ---------------------------------------------------------------------------

inline void write_cells_csv(const std::string& path, std::span<const ConditionReport> reports) {
    // Canonical row order keeps the file byte-stable across worker counts.
    std::vector<const ConditionReport*> sorted;
    sorted.reserve(reports.size());
    for (const auto& r : reports) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](const ConditionReport* a, const ConditionReport* b) {
        if (a->trial_index != b->trial_index) return a->trial_index < b->trial_index;
        if (a->group_id != b->group_id) return a->group_id < b->group_id;
        return static_cast<int>(a->condition) < static_cast<int>(b->condition);
    });

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
    out << "trial,group_id,condition,bin,n_train_responses,n_test_responses,"
           "delta_pct_satisfied,delta_mean_signed,delta_mean_abs,mse,loss_total\n";
    for (const auto* r : sorted) {
        out << r->trial_index << ',' << csv::quote_field(r->group_id) << ','
            << condition_name(r->condition) << ',' << csv::quote_field(r->bin) << ','
            << r->n_train_responses << ',' << r->n_test_responses << ','
            << format_double_report(r->metrics.delta_pct_satisfied) << ','
            << format_double_report(r->metrics.delta_mean_signed) << ','
            << format_double_report(r->metrics.delta_mean) << ','
            << format_double_report(r->metrics.mse) << ','
            << format_double_report(r->metrics.total) << '\n';
    }
    if (!out) throw Error(Errc::io_error, "write failed for '" + path + "'");
}

inline void write_bins_csv(const std::string& path, std::span<const BinAggregate> aggregates) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
    out << "bin,condition,n_cells,delta_pct_satisfied,delta_mean_signed,delta_mean_abs,mse,"
           "loss_total\n";
    for (const auto& a : aggregates) {
        out << csv::quote_field(a.bin) << ',' << condition_name(a.condition) << ',' << a.n_cells
            << ',' << format_double_report(a.delta_pct_satisfied) << ','
            << format_double_report(a.delta_mean_signed) << ','
            << format_double_report(a.delta_mean_abs) << ',' << format_double_report(a.mse) << ','
            << format_double_report(a.loss_total) << '\n';
    }
    if (!out) throw Error(Errc::io_error, "write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Flat key=value config
// ---------------------------------------------------------------------------

/// Parses "key = value" lines; '#' starts a comment, blank lines ignored.
inline std::map<std::string, std::string> read_kv_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open config '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::invalid_config,
                        path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw Error(Errc::invalid_config, path + ":" + std::to_string(lineno) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

inline std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw Error(Errc::invalid_config, "bad number '" + item + "' in " + what);
        }
    }
    if (out.empty()) throw Error(Errc::invalid_config, what + " is empty");
    return out;
}

/// Bin list syntax: "1-50,51-200,201-500,501-1000,1000+". An "N+" entry is
/// unbounded and labeled ">N".
inline std::vector<VolumeBin> parse_bins(const std::string& text) {
    std::vector<VolumeBin> bins;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        VolumeBin bin;
        try {
            if (!item.empty() && item.back() == '+') {
                bin.lower = std::stoll(item.substr(0, item.size() - 1));
                bin.label = ">" + std::to_string(bin.lower - 1);
            } else {
                const auto dash = item.find('-');
                if (dash == std::string::npos) throw std::invalid_argument(item);
                bin.lower = std::stoll(item.substr(0, dash));
                bin.upper = std::stoll(item.substr(dash + 1));
                bin.label = item;
            }
        } catch (const Error&) {
            throw;
        } catch (...) {
            throw Error(Errc::invalid_config, "bad bin spec '" + item + "'");
        }
        bins.push_back(std::move(bin));
    }
    if (bins.empty()) throw Error(Errc::invalid_config, "bin list is empty");
    return bins;
}

// ---------------------------------------------------------------------------
// Run config (simulate)
// ---------------------------------------------------------------------------

/// Everything the simulate command needs, parsed from the flat config file.
struct RunConfig {
    std::string input;
    std::string out_dir;
    StrategyConfig strategy;
    TrialWindows windows;
    bool start_date_given = false;  // absent → caller defaults to first call date
    std::vector<VolumeBin> bins = default_bins();
    std::int64_t iterations = 5000;
    std::int64_t bootstrap_resamples = 200;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    BoundaryMode boundary = BoundaryMode::favor_higher;
    LossOptions loss{};
};

inline BoundaryMode parse_boundary_mode(const std::string& v) {
    if (v == "higher") return BoundaryMode::favor_higher;
    if (v == "lower") return BoundaryMode::favor_lower;
    throw Error(Errc::invalid_config, "boundary_mode must be 'higher' or 'lower', got '" + v + "'");
}

inline StrategyMode parse_strategy_mode(const std::string& v) {
    if (v == "global") return StrategyMode::global;
    if (v == "per_group") return StrategyMode::per_group;
    if (v == "hybrid") return StrategyMode::hybrid;
    throw Error(Errc::invalid_config, "mode must be global|per_group|hybrid, got '" + v + "'");
}

inline RunConfig load_run_config(const std::string& path) {
    const auto kv = read_kv_config(path);
    RunConfig cfg;
    auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    auto to_ll = [&](const std::string& v, const char* key) {
        try {
            return std::stoll(v);
        } catch (...) {
            throw Error(Errc::invalid_config, std::string("bad integer for ") + key);
        }
    };

    if (auto v = get("input")) cfg.input = *v;
    if (auto v = get("out_dir")) cfg.out_dir = *v;
    if (auto v = get("seed")) cfg.seed = static_cast<std::uint64_t>(to_ll(*v, "seed"));
    if (auto v = get("iterations")) cfg.iterations = to_ll(*v, "iterations");
    if (auto v = get("bootstrap_resamples"))
        cfg.bootstrap_resamples = to_ll(*v, "bootstrap_resamples");
    if (auto v = get("workers")) cfg.workers = static_cast<std::size_t>(to_ll(*v, "workers"));
    if (auto v = get("mode")) cfg.strategy.mode = parse_strategy_mode(*v);
    if (auto v = get("hybrid_cutoff")) cfg.strategy.hybrid_cutoff = to_ll(*v, "hybrid_cutoff");
    if (auto v = get("min_high")) cfg.strategy.min_high = to_ll(*v, "min_high");
    if (auto v = get("min_low")) cfg.strategy.min_low = to_ll(*v, "min_low");
    if (auto v = get("baseline_thresholds")) {
        const auto t = parse_double_list(*v, "baseline_thresholds");
        if (t.size() != 4)
            throw Error(Errc::invalid_config, "baseline_thresholds needs exactly 4 values");
        cfg.strategy.baseline_thresholds = Thresholds(t[0], t[1], t[2], t[3]);
    }
    if (auto v = get("train_days")) cfg.windows.train_days = static_cast<int>(to_ll(*v, "train_days"));
    if (auto v = get("test_days")) cfg.windows.test_days = static_cast<int>(to_ll(*v, "test_days"));
    if (auto v = get("stride_days"))
        cfg.windows.stride_days = static_cast<int>(to_ll(*v, "stride_days"));
    if (auto v = get("n_trials")) cfg.windows.n_trials = static_cast<int>(to_ll(*v, "n_trials"));
    if (auto v = get("start_date")) {
        cfg.windows.start_date = parse_date_or_throw(*v);
        cfg.start_date_given = true;
    }
    if (auto v = get("bins")) cfg.bins = parse_bins(*v);
    if (auto v = get("boundary_mode")) cfg.boundary = parse_boundary_mode(*v);
    if (auto v = get("pct_units")) {
        if (*v == "fraction") cfg.loss.pct_scale = 1.0;
        else if (*v == "points") cfg.loss.pct_scale = 100.0;
        else throw Error(Errc::invalid_config, "pct_units must be 'fraction' or 'points'");
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Synth config
// ---------------------------------------------------------------------------

/// Synth generator settings from the same flat key=value format. Only keys
/// present in the file override the defaults.
inline SynthConfig load_synth_config(const std::string& path) {
    const auto kv = read_kv_config(path);
    SynthConfig cfg;
    auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    auto to_ll = [&](const std::string& v, const char* key) {
        try {
            return std::stoll(v);
        } catch (...) {
            throw Error(Errc::invalid_config, std::string("bad integer for ") + key);
        }
    };
    auto to_d = [&](const std::string& v, const char* key) {
        try {
            return std::stod(v);
        } catch (...) {
            throw Error(Errc::invalid_config, std::string("bad number for ") + key);
        }
    };

    if (auto v = get("n_groups")) cfg.n_groups = static_cast<int>(to_ll(*v, "n_groups"));
    if (auto v = get("calls_per_day")) cfg.calls_per_day = parse_double_list(*v, "calls_per_day");
    if (auto v = get("start_date")) cfg.start_date = parse_date_or_throw(*v);
    if (auto v = get("n_days")) cfg.n_days = static_cast<int>(to_ll(*v, "n_days"));
    if (auto v = get("survey_response_rate"))
        cfg.survey_response_rate = to_d(*v, "survey_response_rate");
    if (auto v = get("csat_prior")) {
        const auto p = parse_double_list(*v, "csat_prior");
        if (p.size() != 5) throw Error(Errc::invalid_config, "csat_prior needs exactly 5 values");
        std::copy(p.begin(), p.end(), cfg.csat_prior.begin());
    }
    if (auto v = get("proba_link")) {
        const auto p = parse_double_list(*v, "proba_link");
        if (p.size() != 10)
            throw Error(Errc::invalid_config, "proba_link needs 10 values (a,b per class)");
        for (int i = 0; i < 5; ++i) cfg.proba_link[i] = {p[2 * i], p[2 * i + 1]};
    }
    if (auto v = get("drift_daily_l1")) {
        DriftSpec drift = cfg.drift.value_or(DriftSpec{});
        drift.daily_l1 = to_d(*v, "drift_daily_l1");
        cfg.drift = drift;
    }
    if (auto v = get("drift_direction")) {
        const auto d = parse_double_list(*v, "drift_direction");
        if (d.size() != 5)
            throw Error(Errc::invalid_config, "drift_direction needs exactly 5 values");
        DriftSpec drift = cfg.drift.value_or(DriftSpec{});
        std::copy(d.begin(), d.end(), drift.direction.begin());
        cfg.drift = drift;
    }
    if (auto v = get("drift_start_date")) {
        DriftSpec drift = cfg.drift.value_or(DriftSpec{});
        drift.start_date = parse_date_or_throw(*v);
        cfg.drift = drift;
    }
    if (auto v = get("seed")) cfg.seed = static_cast<std::uint64_t>(to_ll(*v, "seed"));
    if (auto v = get("group_prefix")) cfg.group_prefix = *v;
    return cfg;
}

// ---------------------------------------------------------------------------
// Run metadata
// ---------------------------------------------------------------------------

/// FNV-1a 64 over the file bytes; cheap input fingerprint for metadata.
inline std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open '" + path + "' for digest");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Base metadata skeleton every command run writes next to its outputs.
inline nlohmann::json make_run_metadata(const std::string& command, std::uint64_t seed) {
    return {{"schema", 1},
            {"tool", "pcsat"},
            {"version", kToolVersion},
            {"compiler", __VERSION__},
            {"command", command},
            {"seed", seed},
            {"config", nlohmann::json::object()},
            {"inputs", nlohmann::json::array()},
            {"outputs", nlohmann::json::array()}};
}

inline void add_input_digest(nlohmann::json& meta, const std::string& path) {
    meta["inputs"].push_back({{"path", path}, {"digest_fnv1a64", hex64(fnv1a64_file(path))}});
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw Error(Errc::io_error, "write failed for '" + path + "'");
}

}  // namespace pcsat
