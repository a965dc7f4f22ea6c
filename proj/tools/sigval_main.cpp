#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sigval/config.hpp"
#include "sigval/csv_io.hpp"
#include "sigval/errors.hpp"
#include "sigval/harness.hpp"
#include "sigval/mmd_test.hpp"
#include "sigval/report.hpp"
#include "sigval/signature.hpp"

namespace {

using namespace sigval;

struct GlobalArgs {
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string config_path;
    std::string out;       // empty or "-" means stdout
    std::string format = "json";
    int threads = 0;
};

Config load_config(const GlobalArgs& g) {
    if (g.config_path.empty()) {
        throw std::invalid_argument("this subcommand needs --config <file>");
    }
    return Config::from_file(g.config_path);
}

void emit(const GlobalArgs& g, const std::string& json_text,
          const std::string& csv_text) {
    write_text(g.out, g.format == "csv" ? csv_text : json_text);
}

// simulate: draw paths from a configured model and write them as CSV.
int cmd_simulate(const GlobalArgs& g, int paths, int steps, double horizon,
                 int stride) {
    const Config cfg = load_config(g);
    const ModelSpec model = model_from_config(cfg, "model");
    SimGrid defaults;
    SimGrid grid = grid_from_config(cfg, "grid", defaults);
    if (paths > 0) grid.paths = static_cast<std::size_t>(paths);
    if (steps > 0) grid.steps_per_year = steps;
    if (horizon > 0.0) grid.horizon = horizon;
    if (g.seed_set) grid.seed = g.seed;
    PathSample sample = simulate(model, grid);
    if (stride > 1) sample = extract_stride(sample, stride);
    write_paths_csv(sample, g.out);
    return 0;
}

// sig: signatures of a path file, one long-format row per coefficient.
int cmd_sig(const GlobalArgs& g, const std::string& in, int order, bool use_log,
            int from_level, const std::string& representation,
            const std::string& lift) {
    const PathSample raw = read_paths_csv(in);
    TransformSpec spec;
    spec.representation = representation_from_string(representation);
    spec.lift = lift_from_string(lift);
    spec.rescale = false;
    const PathSample lifted = apply_transform(raw, spec);
    const SignatureConfig sc{order, use_log};
    const auto sigs = batch_signatures(lifted, sc);
    const Eigen::MatrixXd f = feature_matrix(sigs, from_level);

    std::string text;
    char buf[96];
    if (g.format == "csv") {
        std::snprintf(buf, sizeof buf,
                      "# signature: order=%d,log=%d,from_level=%d,width=%d\n",
                      order, use_log ? 1 : 0, from_level,
                      static_cast<int>(f.cols()));
        text += buf;
        text += "path_id,coef_index,value\n";
        for (Eigen::Index p = 0; p < f.rows(); ++p) {
            for (Eigen::Index c = 0; c < f.cols(); ++c) {
                std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g\n",
                              static_cast<long long>(p),
                              static_cast<long long>(c), f(p, c));
                text += buf;
            }
        }
    } else {
        text += "{\n  \"type\": \"signatures\",\n";
        std::snprintf(buf, sizeof buf,
                      "  \"order\": %d,\n  \"log_signature\": %s,\n"
                      "  \"from_level\": %d,\n  \"width\": %d,\n",
                      order, use_log ? "true" : "false", from_level,
                      static_cast<int>(f.cols()));
        text += buf;
        text += "  \"features\": [\n";
        for (Eigen::Index p = 0; p < f.rows(); ++p) {
            text += "    [";
            for (Eigen::Index c = 0; c < f.cols(); ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", f(p, c));
                text += buf;
                if (c + 1 < f.cols()) text += ", ";
            }
            text += p + 1 < f.rows() ? "],\n" : "]\n";
        }
        text += "  ]\n}\n";
    }
    write_text(g.out, text);
    return 0;
}

// test: two-sample test between two path files.
int cmd_test(const GlobalArgs& g, const std::string& a_path,
             const std::string& b_path, int order, bool use_log, int from_level,
             const std::string& representation, const std::string& lift,
             bool rescale, double level, int draws, int top) {
    const PathSample a = read_paths_csv(a_path);
    const PathSample b = read_paths_csv(b_path);
    KernelConfig cfg;
    cfg.signature_cfg = SignatureConfig{order, use_log};
    cfg.transform.representation = representation_from_string(representation);
    cfg.transform.lift = lift_from_string(lift);
    cfg.transform.rescale = rescale;
    cfg.from_level = from_level;
    const TestResult result =
        two_sample_test(a, b, cfg, level, g.seed, draws, top);
    std::cerr << human_summary(result);
    emit(g, test_result_json(result), test_result_csv(result));
    return 0; // the decision is payload, not exit status
}

int cmd_power(const GlobalArgs& g, int repetitions, bool threshold_per_rep) {
    const Config file = load_config(g);
    PowerStudyConfig cfg = power_config(file);
    if (g.seed_set) cfg.seed = g.seed;
    if (g.threads > 0) cfg.threads = g.threads;
    if (repetitions > 0) cfg.repetitions = repetitions;
    if (threshold_per_rep) cfg.threshold_per_rep = true;

    // Flush the partial report after every m so interrupted studies keep
    // their finished cells; stderr gets a one-line progress note.
    const PowerProgress progress = [&](const PowerReport& partial) {
        if (!g.out.empty() && g.out != "-") {
            emit(g, power_report_json(partial), power_report_csv(partial));
        }
        const PowerCell& last = partial.cells.back();
        const std::size_t total = partial.config.m_list.size() *
                                  partial.config.order_list.size();
        std::fprintf(stderr, "m=%d done (%zu/%zu cells, %.1f s)\n", last.m,
                     partial.cells.size(), total, partial.total_seconds);
    };
    const PowerReport report = run_power_study(cfg, progress);
    std::cerr << human_summary(report);
    emit(g, power_report_json(report), power_report_csv(report));
    return 0;
}

int cmd_calibrate(const GlobalArgs& g, const std::string& data,
                  const std::string& model_kind,
                  const std::string& emit_config) {
    const DatedSeries series = read_series_csv(data);
    const CalibrationOutcome outcome =
        calibrate_series(series, model_kind, g.seed);
    std::cerr << human_summary(outcome);
    if (!emit_config.empty()) {
        write_text(emit_config, model_to_config(outcome.model, "model"));
    }
    emit(g, calibration_json(outcome), calibration_csv(outcome));
    return 0;
}

int cmd_validate(const GlobalArgs& g, const std::string& data,
                 const std::string& model_kind, bool calibrate_flag,
                 bool ensemble, int order, int from_level,
                 const std::string& lift, int log_signature, double level,
                 int simulations, int ks_simulations, int draws, int top) {
    const DatedSeries series = read_series_csv(data);
    ValidationOptions opts;
    opts.model_kind = model_kind;
    opts.order = order;
    opts.from_level = from_level;
    opts.lift = lift_from_string(lift);
    if (log_signature >= 0) opts.log_signature = log_signature != 0;
    opts.level = level;
    opts.simulations = simulations;
    opts.ks_simulations = ks_simulations;
    opts.null_draws = draws;
    opts.top_eigenvalues = top;
    opts.seed = g.seed;
    opts.ensemble = ensemble;
    opts.threads = g.threads;

    // A config file with model.* keys supplies the model; --calibrate
    // forces a fresh fit even when one is present.
    if (!g.config_path.empty()) {
        const Config file = Config::from_file(g.config_path);
        if (file.has("model.kind") && !calibrate_flag) {
            opts.calibrate = false;
            opts.model = model_from_config(file, "model");
        }
    }
    const ValidationReport report = run_validation_pipeline(series, opts);
    std::cerr << human_summary(report);
    emit(g, validation_report_json(report), validation_report_csv(report));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"signature-kernel two-sample testing for stochastic process "
                 "path samples"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs g;
    app.add_option("--seed", g.seed, "master random seed")
        ->each([&](const std::string&) { g.seed_set = true; });
    app.add_option("--config", g.config_path, "key = value configuration file");
    app.add_option("--out", g.out, "output file ('-' or empty for stdout)");
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->default_str("json");
    app.add_option("--threads", g.threads,
                   "worker threads (0 = hardware concurrency)");

    // simulate
    auto* sim = app.add_subcommand(
        "simulate", "draw model paths from a config and write a path CSV");
    int sim_paths = 0, sim_steps = 0, sim_stride = 1;
    double sim_horizon = 0.0;
    sim->add_option("--paths", sim_paths, "number of paths (overrides config)");
    sim->add_option("--steps", sim_steps,
                    "steps per year (overrides config)");
    sim->add_option("--horizon", sim_horizon, "years (overrides config)");
    sim->add_option("--stride", sim_stride, "keep every k-th node")
        ->check(CLI::PositiveNumber);
    sim->callback([&] { cmd_simulate(g, sim_paths, sim_steps, sim_horizon,
                                     sim_stride); });

    // sig
    auto* sig = app.add_subcommand(
        "sig", "signature features of a path CSV");
    std::string sig_in, sig_rep = "original", sig_lift = "none";
    int sig_order = 2, sig_from = 1;
    bool sig_log = false;
    sig->add_option("--in", sig_in, "path CSV")->required();
    sig->add_option("--order", sig_order, "truncation order")
        ->check(CLI::Range(1, 8));
    sig->add_flag("--log", sig_log, "log-signature");
    sig->add_option("--from-level", sig_from, "first level kept")
        ->check(CLI::PositiveNumber);
    sig->add_option("--representation", sig_rep,
                    "original|log_path|log_returns|realized_volatility");
    sig->add_option("--lift", sig_lift,
                    "none|lead_lag|time_augment|time_lead_lag|"
                    "cumulative_lead_lag");
    sig->callback([&] {
        cmd_sig(g, sig_in, sig_order, sig_log, sig_from, sig_rep, sig_lift);
    });

    // test
    auto* tst = app.add_subcommand(
        "test", "two-sample signature-kernel test between two path CSVs");
    std::string tst_a, tst_b, tst_rep = "original", tst_lift = "lead_lag";
    int tst_order = 2, tst_from = 1, tst_draws = 10000, tst_top = 20;
    bool tst_log = false, tst_rescale = false;
    double tst_level = 0.01;
    tst->add_option("--a", tst_a, "first sample CSV")->required();
    tst->add_option("--b", tst_b, "second sample CSV")->required();
    tst->add_option("--order", tst_order, "truncation order")
        ->check(CLI::Range(1, 8));
    tst->add_flag("--log", tst_log, "log-signature");
    tst->add_option("--from-level", tst_from, "first level kept")
        ->check(CLI::PositiveNumber);
    tst->add_option("--representation", tst_rep, "path representation");
    tst->add_option("--lift", tst_lift, "path lift");
    tst->add_flag("--rescale", tst_rescale,
                  "cross-sample per-coefficient rescaling");
    tst->add_option("--level", tst_level, "test level")
        ->check(CLI::Range(0.0, 1.0));
    tst->add_option("--draws", tst_draws, "null-distribution draws");
    tst->add_option("--top", tst_top, "eigenvalues kept");
    tst->callback([&] {
        cmd_test(g, tst_a, tst_b, tst_order, tst_log, tst_from, tst_rep,
                 tst_lift, tst_rescale, tst_level, tst_draws, tst_top);
    });

    // power
    auto* pow = app.add_subcommand(
        "power", "Monte Carlo power study from a config file");
    int pow_reps = 0;
    bool pow_per_rep = false;
    pow->add_option("--repetitions", pow_reps,
                    "repetitions (overrides config)");
    pow->add_flag("--threshold-per-rep", pow_per_rep,
                  "recompute the threshold for every repetition");
    pow->callback([&] { cmd_power(g, pow_reps, pow_per_rep); });

    // calibrate
    auto* cal = app.add_subcommand(
        "calibrate", "fit a model to a dated series");
    std::string cal_data, cal_model, cal_emit;
    cal->add_option("--data", cal_data, "date,value CSV")->required();
    cal->add_option("--model", cal_model, "ou|fou|gamma_rw|rsar1")->required();
    cal->add_option("--emit-config", cal_emit,
                    "write the fitted model as a config file");
    cal->callback([&] { cmd_calibrate(g, cal_data, cal_model, cal_emit); });

    // validate
    auto* val = app.add_subcommand(
        "validate", "historical validation pipeline on a dated series");
    std::string val_data, val_model, val_lift = "lead_lag";
    bool val_cal = false, val_ens = false;
    int val_order = 4, val_from = 2, val_log = -1;
    int val_sims = 1000, val_ks = 10000, val_draws = 10000, val_top = 20;
    double val_level = 0.01;
    val->add_option("--data", val_data, "date,value CSV")->required();
    val->add_option("--model", val_model, "ou|fou|gamma_rw|rsar1")->required();
    val->add_flag("--calibrate", val_cal,
                  "fit the model from the data (default unless --config "
                  "supplies model.* keys)");
    val->add_flag("--ensemble", val_ens,
                  "majority vote across the transform/order lever grid");
    val->add_option("--order", val_order, "signature order")
        ->check(CLI::Range(1, 8));
    val->add_option("--from-level", val_from, "first level kept")
        ->check(CLI::PositiveNumber);
    val->add_option("--lift", val_lift, "path lift");
    val->add_option("--log-signature", val_log,
                    "1 = log-signature, 0 = signature (default by pipeline)")
        ->check(CLI::Range(0, 1));
    val->add_option("--level", val_level, "test level")
        ->check(CLI::Range(0.0, 1.0));
    val->add_option("--simulations", val_sims, "model sample size n");
    val->add_option("--ks-simulations", val_ks,
                    "simulated annual changes for the KS check");
    val->add_option("--draws", val_draws, "null-distribution draws");
    val->add_option("--top", val_top, "eigenvalues kept");
    val->callback([&] {
        cmd_validate(g, val_data, val_model, val_cal, val_ens, val_order,
                     val_from, val_lift, val_log, val_level, val_sims, val_ks,
                     val_draws, val_top);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage errors exit 1
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
