#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sigval/calibration.hpp"
#include "sigval/config.hpp"
#include "sigval/csv_io.hpp"
#include "sigval/mmd_test.hpp"
#include "sigval/path_transforms.hpp"
#include "sigval/process_models.hpp"

namespace sigval {

// Monte Carlo power study of the two-sample test. Sample a (size m) is
// drawn from model_a and sample b (size n) from model_b; the type I error
// is measured by drawing both samples from model_a. By default the
// rejection threshold of each (m, order) cell is computed once from a
// dedicated pair simulated under the null and reused across repetitions.
struct PowerStudyConfig {
    ModelSpec model_a; // null-hypothesis model
    ModelSpec model_b; // alternative
    std::vector<int> m_list{50};
    int n = 1000;
    std::vector<int> order_list{2};
    TransformSpec transform{};
    bool log_signature = false;
    int from_level = 1;
    double level = 0.01;
    int repetitions = 1000;
    int null_draws = 10000;
    int top_eigenvalues = 20;
    std::uint64_t seed = 0;
    SimGrid grid{};  // horizon and step density; paths/seed set per role
    int stride = 1;  // keep every stride-th node after simulation
    bool threshold_per_rep = false;
    int threads = 0; // 0 picks the hardware concurrency
};

struct PowerCell {
    int m = 0;
    int order = 0;
    double power = 0.0;
    double power_se = 0.0;
    double type1 = 0.0;
    double type1_se = 0.0;
    double threshold = 0.0;
    std::vector<double> eigenvalues; // null spectrum behind the threshold
    int repetitions = 0;
    // Wall time of the whole m batch; cells of one m share their
    // simulations and signatures across orders.
    double seconds = 0.0;
};

struct PowerReport {
    PowerStudyConfig config;
    std::vector<PowerCell> cells;
    double total_seconds = 0.0;
};

// Called with the partial report after each m completes, so interrupted
// studies still leave their finished cells on disk.
using PowerProgress = std::function<void(const PowerReport&)>;

PowerReport run_power_study(const PowerStudyConfig& cfg,
                            const PowerProgress& progress = {});

// Reads a PowerStudyConfig from the flat key = value format; keys are
// model_a.*, model_b.*, m_list, n, orders, transform.*, log_signature,
// from_level, level, repetitions, null_draws, top_eigenvalues, seed,
// grid.*, stride, threshold_per_rep, threads.
PowerStudyConfig power_config(const Config& cfg);

// Historical validation pipeline: ingest a dated series, calibrate (or
// accept) a model, split the log series into one-year monthly paths,
// simulate the model, and run the two-sample test plus a preliminary
// Kolmogorov-Smirnov check on the annual log-returns.
enum class Pipeline { volatility, inflation };

struct ValidationOptions {
    std::string model_kind; // ou | fou | gamma_rw | rsar1
    bool calibrate = true;
    ModelSpec model{}; // used when calibrate is false
    int order = 4;
    int from_level = 2;
    Lift lift = Lift::lead_lag;
    std::optional<bool> log_signature; // default: signature for volatility,
                                       // log-signature for inflation
    double level = 0.01;
    int simulations = 1000;
    int ks_simulations = 10000;
    int null_draws = 10000;
    int top_eigenvalues = 20;
    std::uint64_t seed = 0;
    bool ensemble = false;
    int threads = 0;
};

struct EnsembleMember {
    Representation representation = Representation::original;
    Lift lift = Lift::lead_lag;
    int order = 2;
    bool log_signature = false;
    bool rescale = false;
    double p_value = 1.0;
    bool reject = false;
};

struct ValidationReport {
    Pipeline pipeline = Pipeline::volatility;
    std::string model_kind;
    ModelSpec model; // fitted when opts.calibrate, else the supplied spec
    std::optional<HurstFit> hurst;
    std::optional<double> loglik; // regime-switching MLE objective
    std::vector<std::string> stages;
    int m = 0;
    int n = 0;
    KsResult ks;
    int ks_simulations = 0;
    TestResult test;
    bool reject_at_1pct = false;
    bool reject_at_5pct = false;
    std::vector<EnsembleMember> ensemble;
    int ensemble_rejections = 0;
    bool ensemble_majority_reject = false;
};

ValidationReport run_validation_pipeline(const DatedSeries& series,
                                         const ValidationOptions& opts);

// Calibration step of the pipeline on its own: same downsampling rules,
// time steps and lag caps as run_validation_pipeline. The seed feeds the
// regime-switching MLE restarts; the other estimators are deterministic.
struct CalibrationOutcome {
    Pipeline pipeline = Pipeline::volatility;
    ModelSpec model;
    std::optional<HurstFit> hurst;        // fou
    std::optional<AnnualMoments> moments; // gamma_rw
    std::optional<double> loglik;         // rsar1
};

CalibrationOutcome calibrate_series(const DatedSeries& series,
                                    const std::string& model_kind,
                                    std::uint64_t seed = 0);

std::string to_string(Pipeline p);

} // namespace sigval
