#include "tailgini/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "tailgini/errors.hpp"
#include "tailgini/estimators.hpp"
#include "tailgini/experiments.hpp"
#include "tailgini/ingest.hpp"
#include "tailgini/simulation.hpp"
#include "tailgini/tailtest.hpp"
#include "tailgini/textio.hpp"

namespace tailgini {

namespace {

namespace fs = std::filesystem;

SimModel parse_model(const std::string& name) {
    if (const ModelPreset* preset = find_preset(name)) return preset->model;
    const auto parse_pair = [&](const std::string& body, ModelVariant variant) {
        const auto comma = body.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("model '" + name + "': expected custom:a1,a2");
        }
        SimModel model;
        model.variant = variant;
        model.a1 = parse_double(body.substr(0, comma), "model a1");
        model.a2 = parse_double(body.substr(comma + 1), "model a2");
        model.validate();
        return model;
    };
    if (name.rfind("custom:", 0) == 0) return parse_pair(name.substr(7), ModelVariant::model1);
    if (name.rfind("custom2:", 0) == 0) return parse_pair(name.substr(8), ModelVariant::model2);
    throw std::invalid_argument(
        "unknown model '" + name +
        "' (expected model1a..model1d, model2, custom:a1,a2 or custom2:a1,a2)");
}

// Shared tail-fraction/level options (the RunConfig of a run).
struct RunConfig {
    double alpha = kDefaultAlpha;
    double alpha1 = kDefaultAlpha1;
    double alpha2 = kDefaultAlpha2;
    std::vector<double> p_levels = {0.01, 0.001};
    std::uint64_t seed = 20240915;

    void validate() const {
        for (double a : {alpha, alpha1, alpha2}) {
            if (!(a > 0.0 && a <= 0.5)) {
                throw std::invalid_argument("tail fractions must lie in (0, 0.5]");
            }
        }
        if (p_levels.empty()) throw std::invalid_argument("at least one level p is required");
        for (double p : p_levels) {
            if (!(p > 0.0 && p <= alpha)) {
                throw std::invalid_argument("each p must lie in (0, alpha]");
            }
        }
    }

    TailConfig tail_config(std::size_t n, double p) const {
        TailConfig config;
        config.k = static_cast<int>(std::lround(alpha * static_cast<double>(n)));
        config.k1 = static_cast<int>(std::lround(alpha1 * static_cast<double>(n)));
        config.k2 = static_cast<int>(std::lround(alpha2 * static_cast<double>(n)));
        config.p = p;
        return config;
    }
};

void add_run_config_flags(CLI::App* sub, RunConfig& config) {
    sub->add_option("--alpha", config.alpha, "Tail fraction k/n for the tail Gini sum");
    sub->add_option("--alpha1", config.alpha1, "Tail fraction k1/n for the tail index");
    sub->add_option("--alpha2", config.alpha2, "Tail fraction k2/n for the dependence exponent");
    sub->add_option("--p", config.p_levels, "Extreme level (repeatable)");
    sub->add_option("--seed", config.seed, "Master seed");
    sub->set_config("--config", "", "Flat key=value config file; command line flags win");
}

void write_run_meta(const fs::path& dir, const std::string& invocation) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::ostringstream meta;
    meta << "invocation\t" << invocation << '\n';
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    meta << "written\t" << buf << '\n';
    atomic_write(dir / "run_meta.txt", meta.str());
}

std::string join_args(const std::vector<std::string>& args) {
    std::string s;
    for (const auto& a : args) {
        if (!s.empty()) s += ' ';
        s += a;
    }
    return s;
}

// ---- estimate ----------------------------------------------------------

std::string fit_table(const std::vector<TailGiniFit>& fits) {
    std::ostringstream out;
    out << "p\tk\tk1\tk2\ttheta_intermediate\tgamma1_hat\teta_hat\td_n\ttheta_extreme\t"
           "theta_baseline\tqualifying_points\ttie_at_threshold\n";
    for (const auto& fit : fits) {
        out << format_double(fit.config.p) << '\t' << fit.config.k << '\t' << fit.config.k1 << '\t'
            << fit.config.k2 << '\t' << format_double(fit.theta_intermediate) << '\t'
            << format_double(fit.gamma1_hat) << '\t' << format_double(fit.eta_hat) << '\t'
            << format_double(fit.d_n) << '\t' << format_double(fit.theta_extreme) << '\t'
            << format_double(fit.theta_baseline) << '\t' << fit.qualifying_points << '\t'
            << (fit.tie_at_threshold ? 1 : 0) << '\n';
    }
    return out.str();
}

int cmd_estimate(const RunConfig& config, const std::string& input, const std::string& out_file) {
    config.validate();
    const PairedSample sample = read_pair_file(input);
    std::vector<TailGiniFit> fits;
    for (double p : config.p_levels) {
        const TailGiniFit fit = fit_tail_gini(sample, config.tail_config(sample.n(), p));
        if (const auto warning = small_tail_warning(fit, sample.n())) {
            std::cerr << "warning: " << *warning << '\n';
        }
        if (fit.tie_at_threshold) {
            std::cerr << "warning: ties at the y threshold, only " << fit.qualifying_points
                      << " of k = " << fit.config.k << " points qualify\n";
        }
        fits.push_back(fit);
    }
    const std::string table = fit_table(fits);
    std::cout << table;
    if (!out_file.empty()) atomic_write(out_file, table);
    return kExitOk;
}

// ---- simulate ----------------------------------------------------------

int cmd_simulate(const std::string& model_name, int n, std::uint64_t seed,
                 const std::string& out_file) {
    const SimModel model = parse_model(model_name);
    if (n < 2) throw std::invalid_argument("simulate: --n must be at least 2");
    RngStream rng(seed, 0);
    const PairedSample sample = sample_model(model, static_cast<std::size_t>(n), rng);
    write_pair_file(out_file, sample);
    std::cout << "wrote " << sample.n() << " pairs to " << out_file << '\n';
    return kExitOk;
}

// ---- truevalue ---------------------------------------------------------

int cmd_truevalue(const std::string& model_name, double p, int reps, int size, bool paper_scale,
                  std::uint64_t seed, const std::string& out_file) {
    const SimModel model = parse_model(model_name);
    if (paper_scale) {
        reps = kPaperOracleReps;
        size = kPaperOracleSize;
    }
    const TrueValueEstimate est = true_tg_oracle(model, p, reps, size, seed);
    if (est.replications_excluded > 0) {
        std::cerr << "warning: " << est.replications_excluded
                  << " replications excluded for lack of tail points\n";
    }
    std::ostringstream out;
    out << "model\tp\treps\tsize\tvalue\treplications_used\treplications_excluded\n"
        << model_name << '\t' << format_double(p) << '\t' << reps << '\t' << size << '\t'
        << format_double(est.value) << '\t' << est.replications_used << '\t'
        << est.replications_excluded << '\n';
    std::cout << out.str();
    if (!out_file.empty()) atomic_write(out_file, out.str());
    return kExitOk;
}

// ---- experiment --------------------------------------------------------

int cmd_experiment(const std::string& model_name, const RunConfig& config, int n, int m,
                   bool paper_scale, bool sweep, const std::vector<std::string>& true_flags,
                   const std::string& out_dir, const std::string& invocation) {
    config.validate();
    ExperimentSpec spec;
    spec.model = parse_model(model_name);
    spec.n = n;
    spec.m = paper_scale ? kPaperReplications : m;
    spec.p_levels = config.p_levels;
    spec.seed = config.seed;
    spec.grid.push_back({config.alpha, config.alpha1, config.alpha2});
    if (sweep) {
        for (const auto& g : axis_sweep_grid(kDefaultSweep)) {
            if (std::find(spec.grid.begin(), spec.grid.end(), g) == spec.grid.end()) {
                spec.grid.push_back(g);
            }
        }
    }

    std::map<double, double> true_values;
    for (const auto& flag : true_flags) {
        const auto eq = flag.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("--true expects p=value, got '" + flag + "'");
        }
        true_values[parse_double(flag.substr(0, eq), "--true level")] =
            parse_double(flag.substr(eq + 1), "--true value");
    }
    for (double p : spec.p_levels) {
        if (true_values.count(p)) continue;
        std::cerr << "computing reference value for p = " << format_double(p)
                  << " (no --true supplied)\n";
        const int reps = paper_scale ? kPaperOracleReps : kDeskOracleReps;
        const int size = paper_scale ? kPaperOracleSize : kDeskOracleSize;
        // Oracle streams live far from the replication streams.
        true_values[p] = true_tg_oracle(spec.model, p, reps, size, spec.seed, 1000000).value;
    }

    const ExperimentResult result = run_replications(spec, true_values);
    if (result.failed_replications > 0) {
        std::cerr << "warning: " << result.failed_replications << " of " << spec.m
                  << " replications recorded failures\n";
    }

    const fs::path dir(out_dir);
    write_replication_records(dir / "replications.tsv", result);
    const auto smse = smse_grid(result);
    write_smse(dir / "smse.tsv", smse);
    const auto summaries = ratio_summaries(result);
    write_ratio_summary(dir / "ratio_summary.tsv", summaries);
    const auto diagnostics = logratio_diagnostics(result);
    write_qq_pairs(dir / "qq_pairs.tsv", diagnostics);
    write_qq_summary(dir / "qq_summary.tsv", diagnostics);
    write_run_meta(dir, invocation);

    for (const auto& row : summaries) {
        if (row.grid == spec.grid.front()) {
            std::cout << "p=" << format_double(row.p) << " method=" << row.method
                      << " mean_ratio=" << format_double(row.mean_ratio)
                      << " sd_ratio=" << format_double(row.sd_ratio) << '\n';
        }
    }
    std::cout << "wrote result tables to " << out_dir << '\n';
    return kExitOk;
}

// ---- test-indep --------------------------------------------------------

int cmd_test_indep(const std::string& input, int null_reps, double level, std::uint64_t seed,
                   const std::string& out_file) {
    const PairedSample sample = read_pair_file(input);
    RngStream rng(seed, 0);
    const IndependenceTestResult result = tqcc_pvalue(sample, null_reps, rng, level);
    std::ostringstream out;
    out << "statistic\tthreshold\tp_value\tnull_replications\tlevel\treject\n"
        << format_double(result.statistic) << '\t' << format_double(result.threshold) << '\t'
        << format_double(result.p_value) << '\t' << result.null_replications << '\t'
        << format_double(result.level) << '\t' << (result.reject ? 1 : 0) << '\n';
    std::cout << out.str();
    if (!out_file.empty()) atomic_write(out_file, out.str());
    return kExitOk;
}

// ---- ingest ------------------------------------------------------------

int cmd_ingest(const std::string& prices_file, const std::string& pair_with,
               const std::string& out_file) {
    const fs::path price_path(prices_file);
    const PriceSeries prices = read_price_csv(price_path, price_path.stem().string());
    const LossSeries losses = weekly_losses(prices);
    if (losses.gap_count > 0) {
        std::cerr << "warning: " << losses.gap_count << " calendar-week gaps in " << prices_file
                  << '\n';
    }
    if (pair_with.empty()) {
        write_loss_series(out_file, losses);
        std::cout << "wrote " << losses.losses.size() << " weekly losses to " << out_file << '\n';
        return kExitOk;
    }
    const fs::path other_path(pair_with);
    const PriceSeries other = read_price_csv(other_path, other_path.stem().string());
    const LossSeries other_losses = weekly_losses(other);
    const PairedSample pairs = align_losses(losses, other_losses);
    write_pair_file(out_file, pairs);
    std::cout << "wrote " << pairs.n() << " aligned loss pairs to " << out_file << '\n';
    return kExitOk;
}

// ---- pipeline ----------------------------------------------------------

int cmd_pipeline(const std::string& prices_dir, const std::string& index_ticker,
                 const RunConfig& config, int null_reps, double level, const std::string& out_dir,
                 const std::string& invocation) {
    config.validate();
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(prices_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) throw io_error("no .csv price files found in " + prices_dir);
    std::sort(files.begin(), files.end());

    std::map<std::string, LossSeries> losses;
    for (const auto& file : files) {
        const std::string ticker = file.stem().string();
        losses[ticker] = weekly_losses(read_price_csv(file, ticker));
    }
    const auto index_it = losses.find(index_ticker);
    if (index_it == losses.end()) {
        throw std::invalid_argument("pipeline: index ticker '" + index_ticker +
                                    "' has no price file in " + prices_dir);
    }
    const LossSeries& index_losses = index_it->second;

    const fs::path dir(out_dir);
    fs::create_directories(dir / "losses");
    for (const auto& [ticker, series] : losses) {
        write_loss_series(dir / "losses" / (ticker + ".csv"), series);
    }

    std::ostringstream report;
    report << "ticker\tn_weeks\tmean_pct\tsd_pct\tgaps\ttqcc\tp_value\tstatus\tgamma1_hat\t"
              "eta_hat";
    for (double p : config.p_levels) report << "\ttheta_" << format_double(p);
    report << '\n';

    const auto index_stats = summary_stats(index_losses);
    report << index_ticker << '\t' << index_losses.losses.size() << '\t'
           << format_double(index_stats.mean) << '\t' << format_double(index_stats.sd) << '\t'
           << index_losses.gap_count << "\tNA\tNA\tindex\tNA\tNA";
    for (std::size_t i = 0; i < config.p_levels.size(); ++i) report << "\tNA";
    report << '\n';

    std::uint64_t stream = 1;
    for (const auto& [ticker, series] : losses) {
        if (ticker == index_ticker) continue;
        const auto stats = summary_stats(series);
        const PairedSample pair = align_losses(series, index_losses);
        RngStream rng(config.seed, stream++);
        const IndependenceTestResult test = tqcc_pvalue(pair, null_reps, rng, level);

        report << ticker << '\t' << series.losses.size() << '\t' << format_double(stats.mean)
               << '\t' << format_double(stats.sd) << '\t' << series.gap_count << '\t'
               << format_double(test.statistic) << '\t' << format_double(test.p_value) << '\t';
        if (test.reject) {
            report << "excluded\tNA\tNA";
            for (std::size_t i = 0; i < config.p_levels.size(); ++i) report << "\tNA";
            report << '\n';
            continue;
        }
        report << "retained";
        std::vector<std::string> theta_cells;
        double gamma1 = 0.0, eta = 0.0;
        for (double p : config.p_levels) {
            const TailGiniFit fit = fit_tail_gini(pair, config.tail_config(pair.n(), p));
            if (const auto warning = small_tail_warning(fit, pair.n())) {
                std::cerr << "warning (" << ticker << "): " << *warning << '\n';
            }
            gamma1 = fit.gamma1_hat;
            eta = fit.eta_hat;
            theta_cells.push_back(format_double(fit.theta_extreme));
        }
        report << '\t' << format_double(gamma1) << '\t' << format_double(eta);
        for (const auto& cell : theta_cells) report << '\t' << cell;
        report << '\n';
    }

    atomic_write(dir / "report.tsv", report.str());
    write_run_meta(dir, invocation);
    std::cout << report.str();
    std::cout << "wrote report to " << (dir / "report.tsv").string() << '\n';
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Extreme-level tail Gini estimation for asymptotically independent loss pairs"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Draw a synthetic loss sample to a pair file");
    std::string sim_model = "model1a";
    int sim_n = 5000;
    std::uint64_t sim_seed = 20240915;
    std::string sim_out;
    simulate->add_option("--model", sim_model, "Model preset or custom:a1,a2 / custom2:a1,a2");
    simulate->add_option("--n", sim_n, "Sample size");
    simulate->add_option("--seed", sim_seed, "Master seed");
    simulate->add_option("--out", sim_out, "Output pair file")->required();
    simulate->set_config("--config");

    // truevalue
    auto* truevalue = app.add_subcommand("truevalue", "Monte Carlo reference value of TG_p");
    std::string tv_model = "model1a";
    double tv_p = 0.01;
    int tv_reps = kDeskOracleReps;
    int tv_size = kDeskOracleSize;
    bool tv_paper = false;
    std::uint64_t tv_seed = 20240915;
    std::string tv_out;
    truevalue->add_option("--model", tv_model, "Model preset or custom parameterization");
    truevalue->add_option("--p", tv_p, "Extreme level");
    truevalue->add_option("--reps", tv_reps, "Replications");
    truevalue->add_option("--size", tv_size, "Sample size per replication");
    truevalue->add_flag("--paper-scale", tv_paper, "Use 200 replications of size 1000000");
    truevalue->add_option("--seed", tv_seed, "Master seed");
    truevalue->add_option("--out", tv_out, "Optional output table");
    truevalue->set_config("--config");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "Fit the tail Gini pipeline on a pair file");
    RunConfig est_config;
    std::string est_in, est_out;
    estimate->add_option("--in", est_in, "Input pair file (header x,y)")->required();
    estimate->add_option("--out", est_out, "Optional output table");
    add_run_config_flags(estimate, est_config);

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Replicated simulation study");
    RunConfig exp_config;
    std::string exp_model = "model1a";
    int exp_n = 5000;
    int exp_m = kDeskReplications;
    bool exp_paper = false;
    bool exp_sweep = false;
    std::vector<std::string> exp_true;
    std::string exp_out;
    experiment->add_option("--model", exp_model, "Model preset or custom parameterization");
    experiment->add_option("--n", exp_n, "Sample size per replication");
    experiment->add_option("--reps", exp_m, "Replications");
    experiment->add_flag("--paper-scale", exp_paper, "Use 2000 replications and the large oracle");
    experiment->add_flag("--sweep", exp_sweep, "Add one-axis tail-fraction sweeps to the grid");
    experiment->add_option("--true", exp_true, "Reference value as p=value (repeatable)");
    experiment->add_option("--out", exp_out, "Output directory")->required();
    add_run_config_flags(experiment, exp_config);

    // test-indep
    auto* indep = app.add_subcommand("test-indep", "Permutation test of tail independence");
    std::string ti_in, ti_out;
    int ti_null = kDefaultNullReplications;
    double ti_level = 0.05;
    std::uint64_t ti_seed = 20240915;
    indep->add_option("--in", ti_in, "Input pair file (header x,y)")->required();
    indep->add_option("--null-reps", ti_null, "Null replications");
    indep->add_option("--level", ti_level, "Test level");
    indep->add_option("--seed", ti_seed, "Master seed");
    indep->add_option("--out", ti_out, "Optional output table");
    indep->set_config("--config");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Daily prices to weekly losses");
    std::string ing_prices, ing_pair_with, ing_out;
    ingest->add_option("--prices", ing_prices, "Price file (header date,close)")->required();
    ingest->add_option("--pair-with", ing_pair_with,
                       "Second price file; output becomes an aligned pair file");
    ingest->add_option("--out", ing_out, "Output file")->required();
    std::uint64_t ing_seed = 20240915; // accepted for interface uniformity
    ingest->add_option("--seed", ing_seed, "Unused; accepted for uniformity");
    ingest->set_config("--config");

    // pipeline
    auto* pipeline = app.add_subcommand(
        "pipeline", "Ingest a price directory, screen against the index, estimate retained pairs");
    RunConfig pipe_config;
    std::string pipe_dir, pipe_index, pipe_out;
    int pipe_null = kDefaultNullReplications;
    double pipe_level = 0.05;
    pipeline->add_option("--prices-dir", pipe_dir, "Directory of <ticker>.csv price files")
        ->required();
    pipeline->add_option("--index", pipe_index, "Ticker of the systemic index series")->required();
    pipeline->add_option("--null-reps", pipe_null, "Null replications for the screen");
    pipeline->add_option("--level", pipe_level, "Screening level");
    pipeline->add_option("--out", pipe_out, "Output directory")->required();
    add_run_config_flags(pipeline, pipe_config);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help
        }
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    const std::string invocation = join_args(args);
    try {
        if (simulate->parsed()) return cmd_simulate(sim_model, sim_n, sim_seed, sim_out);
        if (truevalue->parsed()) {
            return cmd_truevalue(tv_model, tv_p, tv_reps, tv_size, tv_paper, tv_seed, tv_out);
        }
        if (estimate->parsed()) return cmd_estimate(est_config, est_in, est_out);
        if (experiment->parsed()) {
            return cmd_experiment(exp_model, exp_config, exp_n, exp_m, exp_paper, exp_sweep,
                                  exp_true, exp_out, invocation);
        }
        if (indep->parsed()) return cmd_test_indep(ti_in, ti_null, ti_level, ti_seed, ti_out);
        if (ingest->parsed()) return cmd_ingest(ing_prices, ing_pair_with, ing_out);
        if (pipeline->parsed()) {
            return cmd_pipeline(pipe_dir, pipe_index, pipe_config, pipe_null, pipe_level, pipe_out,
                                invocation);
        }
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitContract;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitEstimation;
    }
    return kExitUsage;
}

} // namespace tailgini
