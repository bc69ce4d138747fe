// pcsat CLI: synth / fit / apply / evaluate / simulate.

#include <charconv>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pcsat/pcsat.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int fail_data(const pcsat::Error& e) {
    json j{{"error", pcsat::errc_name(e.code())}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
    return 1;
}

void warn_rejections(const std::vector<pcsat::RowRejection>& rejections) {
    if (rejections.empty()) return;
    std::cerr << rejections.size() << " row(s) rejected:\n";
    std::size_t shown = 0;
    for (const auto& r : rejections) {
        if (shown++ == 5) {
            std::cerr << "  ... (" << rejections.size() - 5 << " more)\n";
            break;
        }
        std::cerr << "  row " << r.row << ": " << pcsat::errc_name(r.code) << " — " << r.message
                  << '\n';
    }
}

json rejections_summary(const std::vector<pcsat::RowRejection>& rejections) {
    json arr = json::array();
    for (const auto& r : rejections)
        arr.push_back({{"row", r.row}, {"error", pcsat::errc_name(r.code)}, {"message", r.message}});
    return arr;
}

pcsat::BoundaryMode boundary_from_flag(const std::string& v) {
    return pcsat::parse_boundary_mode(v);
}

pcsat::LossOptions loss_from_flag(const std::string& units) {
    pcsat::LossOptions opts;
    if (units == "fraction") opts.pct_scale = 1.0;
    else if (units == "points") opts.pct_scale = 100.0;
    else throw pcsat::Error(pcsat::Errc::invalid_config, "pct units must be 'fraction' or 'points'");
    return opts;
}

json synth_config_to_json(const pcsat::SynthConfig& cfg) {
    json link = json::array();
    for (const auto& bp : cfg.proba_link) link.push_back({{"a", bp.a}, {"b", bp.b}});
    json j{{"n_groups", cfg.n_groups},
           {"calls_per_day", cfg.calls_per_day},
           {"start_date", pcsat::format_date(cfg.start_date)},
           {"n_days", cfg.n_days},
           {"survey_response_rate", cfg.survey_response_rate},
           {"csat_prior", cfg.csat_prior},
           {"proba_link", link},
           {"seed", cfg.seed},
           {"group_prefix", cfg.group_prefix}};
    if (cfg.drift) {
        j["drift"] = {{"daily_l1", cfg.drift->daily_l1}, {"direction", cfg.drift->direction}};
        if (cfg.drift->start_date) j["drift"]["start_date"] = pcsat::format_date(*cfg.drift->start_date);
    }
    return j;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int run_synth(const SynthArgs& args) {
    pcsat::SynthConfig cfg;
    if (!args.config.empty()) cfg = pcsat::load_synth_config(args.config);
    if (args.seed_set) cfg.seed = args.seed;

    const auto out = pcsat::generate_detailed(cfg);
    pcsat::write_calls(args.out, out.calls);

    json meta = pcsat::make_run_metadata("synth", cfg.seed);
    meta["config"] = synth_config_to_json(cfg);
    if (!args.config.empty()) pcsat::add_input_digest(meta, args.config);
    meta["outputs"].push_back(
        {{"path", args.out},
         {"digest_fnv1a64", pcsat::hex64(pcsat::fnv1a64_file(args.out))},
         {"n_calls", out.calls.size()},
         {"n_groups", out.groups.size()}});
    pcsat::write_json(args.out + ".meta.json", meta);

    std::int64_t labeled = 0;
    for (const auto& c : out.calls)
        if (c.labeled()) ++labeled;
    std::cout << "wrote " << out.calls.size() << " calls (" << labeled << " with survey labels, "
              << out.groups.size() << " groups) to " << args.out << '\n';
    return 0;
}

// --- fit -------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::string out;
    std::string method = "random";
    std::string warm_start;
    std::int64_t iterations = 5000;
    std::int64_t max_distinct = 40;
    std::uint64_t seed = 0;
    std::string boundary = "higher";
    std::string pct_units = "fraction";
};

int run_fit(const FitArgs& args) {
    auto rr = pcsat::read_calls(args.input);
    warn_rejections(rr.rejections);

    const pcsat::FitResult fit = [&] {
        if (args.method == "random") {
            pcsat::FitOptions fo;
            fo.iterations = args.iterations;
            fo.seed = args.seed;
            fo.boundary = boundary_from_flag(args.boundary);
            fo.loss = loss_from_flag(args.pct_units);
            if (!args.warm_start.empty()) fo.warm_start = pcsat::read_thresholds(args.warm_start);
            return pcsat::fit_random_search(rr.calls, fo);
        }
        if (args.method == "exhaustive") {
            pcsat::ExhaustiveOptions eo;
            eo.max_distinct = args.max_distinct;
            eo.boundary = boundary_from_flag(args.boundary);
            eo.loss = loss_from_flag(args.pct_units);
            return pcsat::fit_exhaustive(rr.calls, eo);
        }
        throw pcsat::Error(pcsat::Errc::usage_error, "method must be 'random' or 'exhaustive'");
    }();

    std::int64_t labeled = 0;
    for (const auto& c : rr.calls)
        if (c.labeled()) ++labeled;
    json fitted_on{{"input", args.input},
                   {"n_rows", rr.calls.size()},
                   {"n_labeled", labeled},
                   {"n_rejected", rr.rejections.size()},
                   {"method", args.method}};
    pcsat::write_thresholds(args.out, fit, fitted_on);

    json meta = pcsat::make_run_metadata("fit", fit.seed);
    meta["config"] = {{"method", args.method},
                      {"iterations", args.iterations},
                      {"max_distinct", args.max_distinct},
                      {"boundary_mode", args.boundary},
                      {"pct_units", args.pct_units},
                      {"warm_start", args.warm_start}};
    pcsat::add_input_digest(meta, args.input);
    meta["rejections"] = rejections_summary(rr.rejections);
    meta["outputs"].push_back(
        {{"path", args.out}, {"digest_fnv1a64", pcsat::hex64(pcsat::fnv1a64_file(args.out))}});
    pcsat::write_json(args.out + ".meta.json", meta);

    std::cout << "fit " << labeled << " labeled calls: thresholds (" << fit.thresholds.t12 << ", "
              << fit.thresholds.t23 << ", " << fit.thresholds.t34 << ", " << fit.thresholds.t45
              << "), loss " << fit.loss.total << " -> " << args.out << '\n';
    return 0;
}

// --- apply -----------------------------------------------------------------

struct ApplyArgs {
    std::string input;
    std::string thresholds;
    std::string out;
    std::string boundary = "higher";
};

// Streams the input through unchanged, appending one pcsat column. Any
// malformed row aborts: the output must keep exactly one row per input row.
int run_apply(const ApplyArgs& args) {
    const auto th = pcsat::read_thresholds(args.thresholds);
    const auto mode = boundary_from_flag(args.boundary);

    std::ifstream in(args.input, std::ios::binary);
    if (!in) throw pcsat::Error(pcsat::Errc::io_error, "cannot open '" + args.input + "'");
    std::string header;
    if (!std::getline(in, header))
        throw pcsat::Error(pcsat::Errc::schema_error, "'" + args.input + "' is empty");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const auto cols = pcsat::csv::split_record(header);
    std::size_t proba_col = cols.size();
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i] == "proba") proba_col = i;
    if (proba_col == cols.size())
        throw pcsat::Error(pcsat::Errc::schema_error,
                           "'" + args.input + "' is missing required column 'proba'");

    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw pcsat::Error(pcsat::Errc::io_error, "cannot write '" + args.out + "'");
    out << header << ",pcsat\n";

    std::string line;
    std::size_t row = 1;
    std::size_t n_rows = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty())
            throw pcsat::Error(pcsat::Errc::schema_error,
                               "row " + std::to_string(row) + ": empty row");
        const auto fields = pcsat::csv::split_record(line);
        if (fields.size() < cols.size())
            throw pcsat::Error(pcsat::Errc::schema_error,
                               "row " + std::to_string(row) + ": wrong field count");
        const std::string& ptext = fields[proba_col];
        double p = 0.0;
        const auto [end, ec] = std::from_chars(ptext.data(), ptext.data() + ptext.size(), p);
        if (ec != std::errc{} || end != ptext.data() + ptext.size())
            throw pcsat::Error(pcsat::Errc::out_of_range_proba,
                               "row " + std::to_string(row) + ": bad proba '" + ptext + "'");
        if (!(p >= 0.0 && p <= 1.0))
            throw pcsat::Error(pcsat::Errc::out_of_range_proba,
                               "row " + std::to_string(row) + ": proba " + ptext +
                                   " outside [0,1]");
        out << line << ',' << pcsat::map_proba(p, th, mode) << '\n';
        ++n_rows;
    }
    if (!out) throw pcsat::Error(pcsat::Errc::io_error, "write failed for '" + args.out + "'");
    out.close();

    json meta = pcsat::make_run_metadata("apply", 0);
    meta["config"] = {{"thresholds", args.thresholds}, {"boundary_mode", args.boundary}};
    pcsat::add_input_digest(meta, args.input);
    pcsat::add_input_digest(meta, args.thresholds);
    meta["outputs"].push_back(
        {{"path", args.out},
         {"digest_fnv1a64", pcsat::hex64(pcsat::fnv1a64_file(args.out))},
         {"n_rows", n_rows}});
    pcsat::write_json(args.out + ".meta.json", meta);

    std::cout << "scored " << n_rows << " rows -> " << args.out << '\n';
    return 0;
}

// --- evaluate --------------------------------------------------------------

struct EvaluateArgs {
    std::string input;
    std::string thresholds;
    std::string out;
    std::string boundary = "higher";
    std::string pct_units = "fraction";
};

int run_evaluate(const EvaluateArgs& args) {
    const auto th = pcsat::read_thresholds(args.thresholds);
    const auto mode = boundary_from_flag(args.boundary);
    const auto loss_opts = loss_from_flag(args.pct_units);

    auto rr = pcsat::read_calls(args.input);
    warn_rejections(rr.rejections);
    std::vector<pcsat::ScoredCall> labeled;
    for (auto& c : rr.calls)
        if (c.labeled()) labeled.push_back(std::move(c));
    if (labeled.empty())
        throw pcsat::Error(pcsat::Errc::empty_input, "no labeled calls in '" + args.input + "'");

    const auto pred = pcsat::map_all(labeled, th, mode);
    const auto obs = pcsat::OrdinalDistribution::from_labels(labeled);
    const auto lb = pcsat::loss_between(pred, obs, loss_opts);

    json report{{"input", args.input},
                {"n_rows", rr.calls.size()},
                {"n_labeled", labeled.size()},
                {"n_rejected", rr.rejections.size()},
                {"thresholds",
                 {{"t12", th.t12}, {"t23", th.t23}, {"t34", th.t34}, {"t45", th.t45}}},
                {"loss", pcsat::loss_to_json(lb)},
                {"predicted_counts", pred.counts},
                {"observed_counts", obs.counts}};
    std::cout << report.dump(2) << '\n';
    if (!args.out.empty()) {
        pcsat::write_json(args.out, report);
        json meta = pcsat::make_run_metadata("evaluate", 0);
        meta["config"] = {{"thresholds", args.thresholds},
                          {"boundary_mode", args.boundary},
                          {"pct_units", args.pct_units}};
        pcsat::add_input_digest(meta, args.input);
        pcsat::add_input_digest(meta, args.thresholds);
        meta["outputs"].push_back(
            {{"path", args.out}, {"digest_fnv1a64", pcsat::hex64(pcsat::fnv1a64_file(args.out))}});
        pcsat::write_json(args.out + ".meta.json", meta);
    }
    return 0;
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string out_dir;
    std::string input;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::int64_t iterations = 0;
    std::int64_t bootstrap_resamples = 0;
    std::int64_t workers = 0;
};

int run_simulate(const SimulateArgs& args) {
    pcsat::RunConfig rc = pcsat::load_run_config(args.config);
    if (!args.input.empty()) rc.input = args.input;
    if (!args.out_dir.empty()) rc.out_dir = args.out_dir;
    if (args.seed_set) rc.seed = args.seed;
    if (args.iterations > 0) rc.iterations = args.iterations;
    if (args.bootstrap_resamples > 0) rc.bootstrap_resamples = args.bootstrap_resamples;
    if (args.workers > 0) rc.workers = static_cast<std::size_t>(args.workers);
    if (rc.input.empty())
        throw pcsat::Error(pcsat::Errc::invalid_config, "no input CSV (config key or --input)");
    if (rc.out_dir.empty())
        throw pcsat::Error(pcsat::Errc::invalid_config, "no output directory (config key or --out)");

    auto rr = pcsat::read_calls(rc.input);
    warn_rejections(rr.rejections);
    if (rr.calls.empty())
        throw pcsat::Error(pcsat::Errc::empty_input, "no valid calls in '" + rc.input + "'");
    if (!rc.start_date_given) {
        pcsat::Date first = rr.calls.front().timestamp;
        for (const auto& c : rr.calls) first = std::min(first, c.timestamp);
        rc.windows.start_date = first;
    }

    pcsat::ExperimentOptions eo;
    eo.iterations = rc.iterations;
    eo.bootstrap_resamples = rc.bootstrap_resamples;
    eo.seed = rc.seed;
    eo.workers = rc.workers;
    eo.boundary = rc.boundary;
    eo.loss = rc.loss;
    eo.bins = rc.bins;

    const auto result = pcsat::run_trials(rr.calls, rc.windows, rc.strategy, eo);

    fs::create_directories(rc.out_dir);
    const std::string cells_path = (fs::path(rc.out_dir) / "cells.csv").string();
    const std::string bins_path = (fs::path(rc.out_dir) / "bins.csv").string();
    const std::string meta_path = (fs::path(rc.out_dir) / "run_meta.json").string();
    pcsat::write_cells_csv(cells_path, result.reports);
    const auto aggs = pcsat::aggregate_bins(result.reports, rc.bins);
    pcsat::write_bins_csv(bins_path, aggs);

    json meta = pcsat::make_run_metadata("simulate", rc.seed);
    json bins_echo = json::array();
    for (const auto& b : rc.bins) bins_echo.push_back(b.label);
    meta["config"] = {
        {"config_file", args.config},
        {"input", rc.input},
        {"out_dir", rc.out_dir},
        {"mode", pcsat::strategy_mode_name(rc.strategy.mode)},
        {"hybrid_cutoff", rc.strategy.hybrid_cutoff},
        {"min_high", rc.strategy.min_high},
        {"min_low", rc.strategy.min_low},
        {"baseline_thresholds",
         {rc.strategy.baseline_thresholds.t12, rc.strategy.baseline_thresholds.t23,
          rc.strategy.baseline_thresholds.t34, rc.strategy.baseline_thresholds.t45}},
        {"train_days", rc.windows.train_days},
        {"test_days", rc.windows.test_days},
        {"stride_days", rc.windows.stride_days},
        {"n_trials", rc.windows.n_trials},
        {"start_date", pcsat::format_date(rc.windows.start_date)},
        {"bins", bins_echo},
        {"iterations", rc.iterations},
        {"bootstrap_resamples", rc.bootstrap_resamples},
        {"workers", rc.workers},
        {"boundary_mode",
         rc.boundary == pcsat::BoundaryMode::favor_higher ? "higher" : "lower"},
        {"pct_units", rc.loss.pct_scale == 100.0 ? "points" : "fraction"}};
    pcsat::add_input_digest(meta, args.config);
    pcsat::add_input_digest(meta, rc.input);
    json skips = json::array();
    for (const auto& s : result.skips)
        skips.push_back({{"trial", s.trial_index}, {"group_id", s.group_id}, {"reason", s.reason}});
    meta["skips"] = skips;
    meta["rejections"] = rejections_summary(rr.rejections);
    meta["outputs"].push_back(
        {{"path", cells_path},
         {"digest_fnv1a64", pcsat::hex64(pcsat::fnv1a64_file(cells_path))},
         {"n_rows", result.reports.size()}});
    meta["outputs"].push_back(
        {{"path", bins_path},
         {"digest_fnv1a64", pcsat::hex64(pcsat::fnv1a64_file(bins_path))},
         {"n_rows", aggs.size()}});
    pcsat::write_json(meta_path, meta);

    std::cout << "ran " << rc.windows.n_trials << " trials: " << result.reports.size()
              << " condition cells, " << result.skips.size() << " skips -> " << rc.out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ordinal threshold calibration for pCSAT distributions"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a synthetic call CSV");
    synth->add_option("--config", synth_args.config, "flat key=value synth config");
    synth->add_option("--out", synth_args.out, "output CSV path")->required();
    auto* synth_seed = synth->add_option("--seed", synth_args.seed, "RNG seed (overrides config)");
    synth->callback([&] { synth_args.seed_set = synth_seed->count() > 0; });

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "fit thresholds on a labeled CSV");
    fit->add_option("--input", fit_args.input, "labeled call CSV")->required();
    fit->add_option("--out", fit_args.out, "output thresholds JSON")->required();
    fit->add_option("--iterations", fit_args.iterations, "random-search iterations (default 5000)");
    fit->add_option("--seed", fit_args.seed, "RNG seed (default 0)");
    fit->add_option("--method", fit_args.method, "random | exhaustive (default random)");
    fit->add_option("--max-distinct", fit_args.max_distinct,
                    "exhaustive: max distinct probas (default 40)");
    fit->add_option("--warm-start", fit_args.warm_start, "thresholds JSON evaluated as iteration 0");
    fit->add_option("--boundary-mode", fit_args.boundary, "higher | lower (default higher)");
    fit->add_option("--pct-units", fit_args.pct_units, "fraction | points (default fraction)");

    ApplyArgs apply_args;
    auto* apply = app.add_subcommand("apply", "map a CSV through thresholds, adding a pcsat column");
    apply->add_option("--input", apply_args.input, "call CSV")->required();
    apply->add_option("--thresholds", apply_args.thresholds, "thresholds JSON")->required();
    apply->add_option("--out", apply_args.out, "output CSV path")->required();
    apply->add_option("--boundary-mode", apply_args.boundary, "higher | lower (default higher)");

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "loss of given thresholds on a labeled CSV");
    evaluate->add_option("--input", eval_args.input, "labeled call CSV")->required();
    evaluate->add_option("--thresholds", eval_args.thresholds, "thresholds JSON")->required();
    evaluate->add_option("--out", eval_args.out, "optional JSON report path");
    evaluate->add_option("--boundary-mode", eval_args.boundary, "higher | lower (default higher)");
    evaluate->add_option("--pct-units", eval_args.pct_units, "fraction | points (default fraction)");

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "run the five-condition trial harness");
    simulate->add_option("--config", sim_args.config, "flat key=value run config")->required();
    simulate->add_option("--out", sim_args.out_dir, "output directory (overrides config)");
    simulate->add_option("--input", sim_args.input, "call CSV (overrides config)");
    auto* sim_seed = simulate->add_option("--seed", sim_args.seed, "RNG seed (overrides config)");
    simulate->add_option("--iterations", sim_args.iterations, "fit iterations (overrides config)");
    simulate->add_option("--bootstrap-resamples", sim_args.bootstrap_resamples,
                         "bootstrap resamples (overrides config)");
    simulate->add_option("--workers", sim_args.workers, "worker threads (overrides config)");
    simulate->callback([&] { sim_args.seed_set = sim_seed->count() > 0; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        json j{{"error", "UsageError"}, {"message", e.what()}};
        std::cerr << j.dump() << '\n';
        return 2;
    }

    try {
        if (synth->parsed()) return run_synth(synth_args);
        if (fit->parsed()) return run_fit(fit_args);
        if (apply->parsed()) return run_apply(apply_args);
        if (evaluate->parsed()) return run_evaluate(eval_args);
        if (simulate->parsed()) return run_simulate(sim_args);
    } catch (const pcsat::Error& e) {
        if (e.code() == pcsat::Errc::usage_error) {
            json j{{"error", "UsageError"}, {"message", e.what()}};
            std::cerr << j.dump() << '\n';
            return 2;
        }
        return fail_data(e);
    } catch (const std::exception& e) {
        json j{{"error", "InternalError"}, {"message", e.what()}};
        std::cerr << j.dump() << '\n';
        return 1;
    }
    return 2;  // unreachable with require_subcommand(1)
}
