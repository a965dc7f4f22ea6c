#include "sigval/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "sigval/errors.hpp"
#include "sigval/rng.hpp"
#include "sigval/signature.hpp"
#include "sigval/tensor_series.hpp"

namespace sigval {

namespace {

// Stream roles for derive_seed(master, repetition, role). The threshold
// pair, the null draws and the pipeline stages get fixed slots so no
// random stream is ever reused for two purposes.
enum Role : std::uint64_t {
    kRolePowerA = 0,
    kRolePowerB = 1,
    kRoleType1A = 2,
    kRoleType1B = 3,
    kRoleNullPairA = 4,
    kRoleNullPairB = 5,
    kRoleThresholdDraws = 6,
    kRoleRepDraws = 7,
    kRoleSims = 8,
    kRoleKsSims = 9,
    kRoleTestDraws = 10,
    kRoleEnsembleDraws = 11,
};

int effective_threads(int requested, int work_items) {
    if (requested < 1) {
        const unsigned hw = std::thread::hardware_concurrency();
        requested = static_cast<int>(hw == 0 ? 1u : std::min(hw, 8u));
    }
    return std::max(1, std::min(requested, work_items));
}

// Runs fn(0), ..., fn(count-1) on a small pool. Every fn writes only to
// its own index's output slot, so the schedule cannot affect results.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = effective_threads(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next.store(count);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

PathSample draw_sample(const ModelSpec& model, SimGrid grid, int paths,
                       std::uint64_t seed, int stride) {
    grid.paths = static_cast<std::size_t>(paths);
    grid.seed = seed;
    PathSample out = simulate(model, grid);
    return stride > 1 ? extract_stride(out, stride) : out;
}

int feature_width(int dim, int from_level, int order) {
    std::size_t total = 0;
    for (int l = from_level; l <= order; ++l) total += level_size(dim, l);
    return static_cast<int>(total);
}

// Transforms a sample pair and turns it into feature matrices at the
// largest requested order. Because level l of a signature (or of its log)
// only depends on levels <= l, the features of any smaller order are a
// column prefix, and the pooled rescaling maxima are per coefficient, so
// one evaluation serves every order in the study.
struct PreparedPair {
    Eigen::MatrixXd fa;
    Eigen::MatrixXd fb;
    int dim = 0;
};

PreparedPair prepare_pair(const PathSample& a, const PathSample& b,
                          const PowerStudyConfig& cfg, int max_order) {
    const PathSample ta = apply_transform(a, cfg.transform);
    const PathSample tb = apply_transform(b, cfg.transform);
    const SignatureConfig sc{max_order, cfg.log_signature};
    auto sa = batch_signatures(ta, sc);
    auto sb = batch_signatures(tb, sc);
    if (cfg.transform.rescale) rescale_signatures(sa, sb);
    PreparedPair out;
    out.fa = feature_matrix(sa, cfg.from_level);
    out.fb = feature_matrix(sb, cfg.from_level);
    out.dim = ta.dim;
    return out;
}

Eigen::MatrixXd pooled_gram(const Eigen::MatrixXd& fa,
                            const Eigen::MatrixXd& fb) {
    Eigen::MatrixXd pooled(fa.rows() + fb.rows(), fa.cols());
    pooled.topRows(fa.rows()) = fa;
    pooled.bottomRows(fb.rows()) = fb;
    return gram_matrix(pooled);
}

double binomial_se(double rate, int reps) {
    return std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
}

void validate_power_config(const PowerStudyConfig& cfg) {
    if (cfg.m_list.empty()) {
        throw std::invalid_argument("power study: m_list must not be empty");
    }
    for (int m : cfg.m_list) {
        if (m < 2) throw std::invalid_argument("power study: every m must be >= 2");
    }
    const int m_max = *std::max_element(cfg.m_list.begin(), cfg.m_list.end());
    if (cfg.n < m_max) {
        throw std::invalid_argument("power study: n must be >= max(m_list)");
    }
    if (cfg.order_list.empty()) {
        throw std::invalid_argument("power study: order_list must not be empty");
    }
    for (int o : cfg.order_list) {
        if (o < 1 || o > 8) {
            throw std::invalid_argument("power study: orders must lie in 1..8");
        }
    }
    if (cfg.repetitions < 1) {
        throw std::invalid_argument("power study: repetitions must be >= 1");
    }
    if (cfg.null_draws < 1) {
        throw std::invalid_argument("power study: null_draws must be >= 1");
    }
    if (cfg.top_eigenvalues < 1) {
        throw std::invalid_argument("power study: top_eigenvalues must be >= 1");
    }
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
        throw std::invalid_argument("power study: level must be in (0,1)");
    }
    if (cfg.stride < 1 || cfg.grid.total_steps() % cfg.stride != 0) {
        throw std::invalid_argument(
            "power study: stride must divide the step count");
    }
}

} // namespace

PowerReport run_power_study(const PowerStudyConfig& cfg,
                            const PowerProgress& progress) {
    validate_power_config(cfg);
    const int order_count = static_cast<int>(cfg.order_list.size());
    const int max_order =
        *std::max_element(cfg.order_list.begin(), cfg.order_list.end());
    const int reps = cfg.repetitions;

    PowerReport report;
    report.config = cfg;
    const auto t_total = std::chrono::steady_clock::now();

    try {
        for (std::size_t im = 0; im < cfg.m_list.size(); ++im) {
            const int m = cfg.m_list[im];
            const int N = m + cfg.n;
            const auto t_cell = std::chrono::steady_clock::now();

            // One pair under the null fixes the spectrum and the threshold
            // for every repetition of this m (unless threshold_per_rep).
            const PathSample a0 =
                draw_sample(cfg.model_a, cfg.grid, m,
                            derive_seed(cfg.seed, 0, kRoleNullPairA), cfg.stride);
            const PathSample b0 =
                draw_sample(cfg.model_a, cfg.grid, cfg.n,
                            derive_seed(cfg.seed, 0, kRoleNullPairB), cfg.stride);
            const PreparedPair h0 = prepare_pair(a0, b0, cfg, max_order);

            std::vector<double> thresholds(order_count);
            std::vector<std::vector<double>> spectra(order_count);
            for (int io = 0; io < order_count; ++io) {
                const int w =
                    feature_width(h0.dim, cfg.from_level, cfg.order_list[io]);
                const Eigen::MatrixXd gram =
                    pooled_gram(h0.fa.leftCols(w), h0.fb.leftCols(w));
                spectra[io] = null_spectrum(gram, cfg.top_eigenvalues);
                const auto draws = null_draws(
                    spectra[io], m, cfg.n, cfg.null_draws,
                    derive_seed(cfg.seed, im, kRoleThresholdDraws),
                    static_cast<std::uint64_t>(io));
                thresholds[io] = threshold_from_draws(draws, cfg.level);
            }

            std::vector<std::uint8_t> rej_power(
                static_cast<std::size_t>(order_count) * reps, 0);
            std::vector<std::uint8_t> rej_type1(
                static_cast<std::size_t>(order_count) * reps, 0);

            parallel_for(reps, cfg.threads, [&](int r) {
                const auto rep_seed = [&](Role role) {
                    return derive_seed(cfg.seed, static_cast<std::uint64_t>(r),
                                       role);
                };
                const PathSample pa = draw_sample(cfg.model_a, cfg.grid, m,
                                                  rep_seed(kRolePowerA),
                                                  cfg.stride);
                const PathSample pb = draw_sample(cfg.model_b, cfg.grid, cfg.n,
                                                  rep_seed(kRolePowerB),
                                                  cfg.stride);
                const PathSample ua = draw_sample(cfg.model_a, cfg.grid, m,
                                                  rep_seed(kRoleType1A),
                                                  cfg.stride);
                const PathSample ub = draw_sample(cfg.model_a, cfg.grid, cfg.n,
                                                  rep_seed(kRoleType1B),
                                                  cfg.stride);
                const PreparedPair power_pair = prepare_pair(pa, pb, cfg, max_order);
                const PreparedPair type1_pair = prepare_pair(ua, ub, cfg, max_order);

                for (int io = 0; io < order_count; ++io) {
                    const int w = feature_width(power_pair.dim, cfg.from_level,
                                                cfg.order_list[io]);
                    const Eigen::MatrixXd pfa = power_pair.fa.leftCols(w);
                    const Eigen::MatrixXd pfb = power_pair.fb.leftCols(w);
                    const Eigen::MatrixXd tfa = type1_pair.fa.leftCols(w);
                    const Eigen::MatrixXd tfb = type1_pair.fb.leftCols(w);
                    const double stat_power =
                        static_cast<double>(N) * mmd2_unbiased_features(pfa, pfb);
                    const double stat_type1 =
                        static_cast<double>(N) * mmd2_unbiased_features(tfa, tfb);

                    double thr_power = thresholds[io];
                    double thr_type1 = thresholds[io];
                    if (cfg.threshold_per_rep) {
                        const auto own_threshold = [&](const Eigen::MatrixXd& fa,
                                                       const Eigen::MatrixXd& fb,
                                                       std::uint64_t tag) {
                            const auto eigs = null_spectrum(pooled_gram(fa, fb),
                                                            cfg.top_eigenvalues);
                            const auto draws =
                                null_draws(eigs, m, cfg.n, cfg.null_draws,
                                           rep_seed(kRoleRepDraws), tag);
                            return threshold_from_draws(draws, cfg.level);
                        };
                        const auto tag = static_cast<std::uint64_t>(io);
                        thr_power = own_threshold(pfa, pfb, 2 * tag);
                        thr_type1 = own_threshold(tfa, tfb, 2 * tag + 1);
                    }
                    const std::size_t slot =
                        static_cast<std::size_t>(io) * reps +
                        static_cast<std::size_t>(r);
                    rej_power[slot] = stat_power > thr_power ? 1 : 0;
                    rej_type1[slot] = stat_type1 > thr_type1 ? 1 : 0;
                }
            });

            const double cell_seconds = seconds_since(t_cell);
            for (int io = 0; io < order_count; ++io) {
                int hits_power = 0;
                int hits_type1 = 0;
                for (int r = 0; r < reps; ++r) {
                    const std::size_t slot =
                        static_cast<std::size_t>(io) * reps +
                        static_cast<std::size_t>(r);
                    hits_power += rej_power[slot];
                    hits_type1 += rej_type1[slot];
                }
                PowerCell cell;
                cell.m = m;
                cell.order = cfg.order_list[io];
                cell.power = static_cast<double>(hits_power) / reps;
                cell.power_se = binomial_se(cell.power, reps);
                cell.type1 = static_cast<double>(hits_type1) / reps;
                cell.type1_se = binomial_se(cell.type1, reps);
                cell.threshold = thresholds[io];
                cell.eigenvalues = spectra[io];
                cell.repetitions = reps;
                cell.seconds = cell_seconds;
                report.cells.push_back(std::move(cell));
            }
            report.total_seconds = seconds_since(t_total);
            if (progress) progress(report);
        }
    } catch (...) {
        // Leave whatever finished on disk before surfacing the error.
        report.total_seconds = seconds_since(t_total);
        if (progress && !report.cells.empty()) progress(report);
        throw;
    }
    report.total_seconds = seconds_since(t_total);
    return report;
}

PowerStudyConfig power_config(const Config& cfg) {
    PowerStudyConfig out;
    out.model_a = model_from_config(cfg, "model_a");
    out.model_b = model_from_config(cfg, "model_b");
    if (cfg.has("m_list")) out.m_list = cfg.get_int_list("m_list");
    out.n = cfg.get_int("n", out.n);
    if (cfg.has("orders")) out.order_list = cfg.get_int_list("orders");
    out.transform = transform_from_config(cfg, "transform");
    out.log_signature = cfg.get_bool("log_signature", out.log_signature);
    out.from_level = cfg.get_int("from_level", out.from_level);
    out.level = cfg.get_double("level", out.level);
    out.repetitions = cfg.get_int("repetitions", out.repetitions);
    out.null_draws = cfg.get_int("null_draws", out.null_draws);
    out.top_eigenvalues = cfg.get_int("top_eigenvalues", out.top_eigenvalues);
    out.seed = cfg.get_u64("seed", out.seed);
    out.grid = grid_from_config(cfg, "grid");
    out.stride = cfg.get_int("stride", out.stride);
    out.threshold_per_rep = cfg.get_bool("threshold_per_rep", out.threshold_per_rep);
    out.threads = cfg.get_int("threads", out.threads);
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i]);
    }
    return out + ")";
}

// True when no calendar month holds two observations.
bool series_is_monthly(const DatedSeries& s) {
    for (std::size_t i = 1; i < s.dates.size(); ++i) {
        if (s.dates[i].compare(0, 7, s.dates[i - 1], 0, 7) == 0) return false;
    }
    return true;
}

std::vector<double> log_values(const std::vector<double>& v,
                               const char* stage) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0)) {
            throw std::runtime_error(std::string(stage) +
                                     ": values must be positive to take logs");
        }
        out[i] = std::log(v[i]);
    }
    return out;
}

// Per-path growth index exp(x_k - x_0) of a log-space sample; puts
// historical paths (arbitrary starting level) and simulated paths
// (starting at 0 or at the fitted mean) on one comparable scale.
PathSample rebase_growth(const PathSample& logs) {
    PathSample out = logs;
    for (std::size_t p = 0; p < out.paths(); ++p) {
        for (int j = 0; j < out.dim; ++j) {
            const double base = logs.at(p, 0, j);
            for (int k = 0; k < out.nodes; ++k) {
                out.at(p, k, j) = std::exp(logs.at(p, k, j) - base);
            }
        }
    }
    return out;
}

// Subtracts each path's starting value; used before the cumulative
// lead-lag lift, which is the one lift that is not translation invariant.
PathSample rebase_to_zero(const PathSample& in) {
    PathSample out = in;
    for (std::size_t p = 0; p < out.paths(); ++p) {
        for (int j = 0; j < out.dim; ++j) {
            const double base = in.at(p, 0, j);
            for (int k = 0; k < out.nodes; ++k) {
                out.at(p, k, j) = in.at(p, k, j) - base;
            }
        }
    }
    return out;
}

std::vector<double> annual_changes(const std::vector<double>& x, int step) {
    if (x.size() < 13) {
        throw std::runtime_error("validation: need at least 13 monthly values");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i + 12 < x.size(); i += static_cast<std::size_t>(step)) {
        out.push_back(x[i + 12] - x[i]);
    }
    return out;
}

} // namespace

std::string to_string(Pipeline p) {
    return p == Pipeline::volatility ? "volatility" : "inflation";
}

CalibrationOutcome calibrate_series(const DatedSeries& series,
                                    const std::string& model_kind,
                                    std::uint64_t seed) {
    CalibrationOutcome out;
    if (model_kind == "ou" || model_kind == "fou") {
        out.pipeline = Pipeline::volatility;
    } else if (model_kind == "gamma_rw" || model_kind == "rsar1") {
        out.pipeline = Pipeline::inflation;
    } else {
        throw std::invalid_argument("calibrate_series: unknown model kind '" +
                                    model_kind +
                                    "' (expected ou, fou, gamma_rw or rsar1)");
    }
    if (series.size() < 26) {
        throw std::runtime_error("calibrate: series too short (need 2+ years)");
    }
    const bool monthly_input = series_is_monthly(series);
    if (out.pipeline == Pipeline::volatility) {
        // Volatility models are fitted on the full-resolution log series;
        // only the two-sample test downsamples to monthly.
        const auto y = log_values(series.values, "ingest");
        const double dt = monthly_input ? 1.0 / 12.0 : 1.0 / 252.0;
        const int max_lag = monthly_input ? 24 : 252;
        if (model_kind == "fou") {
            const HurstFit h =
                estimate_hurst(y, {0.5, 1.0, 1.5, 2.0, 3.0}, max_lag, dt);
            out.hurst = h;
            out.model = fit_fou_moments(y, h.hurst, dt);
        } else {
            out.model = fit_ou_mle(y, dt);
        }
    } else {
        const DatedSeries monthly =
            monthly_input ? series : monthly_downsample(series);
        const auto x = log_values(monthly.values, "downsample");
        std::vector<double> returns(x.size() - 1);
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            returns[i] = x[i + 1] - x[i];
        }
        if (model_kind == "gamma_rw") {
            // Annual windows stepped by a quarter balance window count
            // against overlap when only decades of data exist.
            const AnnualMoments mom = sample_annual_moments(returns, 3);
            out.moments = mom;
            out.model = fit_gamma_rw(mom);
        } else {
            const Rsar1Fit fit = fit_rsar1_mle(returns, 20, seed);
            out.model = fit.spec;
            out.loglik = fit.loglik;
        }
    }
    return out;
}

ValidationReport run_validation_pipeline(const DatedSeries& series,
                                         const ValidationOptions& opts) {
    ValidationReport rep;
    rep.model_kind = opts.model_kind;
    if (opts.model_kind == "ou" || opts.model_kind == "fou") {
        rep.pipeline = Pipeline::volatility;
    } else if (opts.model_kind == "gamma_rw" || opts.model_kind == "rsar1") {
        rep.pipeline = Pipeline::inflation;
    } else {
        throw std::invalid_argument(
            "run_validation_pipeline: unknown model kind '" + opts.model_kind +
            "' (expected ou, fou, gamma_rw or rsar1)");
    }
    if (opts.order < 1 || opts.order > 8) {
        throw std::invalid_argument("validation: order must lie in 1..8");
    }
    if (opts.simulations < 2 || opts.ks_simulations < 2) {
        throw std::invalid_argument("validation: need at least 2 simulations");
    }
    if (series.size() < 26) {
        throw std::runtime_error("validation: series too short (need 2+ years)");
    }

    const auto stage = [&rep](const std::string& line) {
        rep.stages.push_back(line);
    };
    stage("ingest: " + std::to_string(series.size()) + " observations, " +
          series.dates.front() + " .. " + series.dates.back());

    const bool monthly_input = series_is_monthly(series);
    DatedSeries monthly = monthly_input ? series : monthly_downsample(series);
    stage(monthly_input
              ? "downsample: input is already monthly"
              : "downsample: " + std::to_string(monthly.size()) +
                    " end-of-month observations");

    PathSample hist;
    std::vector<double> hist_annual;
    if (rep.pipeline == Pipeline::volatility) {
        // Calibration runs on the full-resolution log series; the test and
        // the KS check run on the monthly downsample.
        if (opts.calibrate) {
            const CalibrationOutcome fit =
                calibrate_series(series, opts.model_kind, opts.seed);
            rep.model = fit.model;
            rep.hurst = fit.hurst;
            if (opts.model_kind == "fou") {
                const FOU& f = std::get<FOU>(rep.model);
                stage("calibrate[fou]: hurst=" + fmt(fit.hurst->hurst) +
                      " theta=" + fmt(f.theta) + " sigma=" + fmt(f.sigma) +
                      " alpha=" + fmt(f.alpha));
            } else {
                const OU& o = std::get<OU>(rep.model);
                stage("calibrate[ou]: theta=" + fmt(o.theta) +
                      " alpha=" + fmt(o.alpha) + " sigma=" + fmt(o.sigma));
            }
        } else {
            rep.model = opts.model;
            stage("model: supplied " + model_name(rep.model));
        }
        const auto ym = log_values(monthly.values, "downsample");
        hist = split_years(ym);
        hist_annual = annual_changes(ym, 1);
    } else {
        const auto x = log_values(monthly.values, "downsample");
        if (opts.calibrate) {
            const CalibrationOutcome fit =
                calibrate_series(series, opts.model_kind, opts.seed);
            rep.model = fit.model;
            rep.loglik = fit.loglik;
            if (opts.model_kind == "gamma_rw") {
                const GammaRW& g = std::get<GammaRW>(rep.model);
                stage("calibrate[gamma_rw]: m1=" + fmt(fit.moments->m1) +
                      " m2c=" + fmt(fit.moments->m2c) +
                      " m3c=" + fmt(fit.moments->m3c) +
                      " -> gamma=" + fmt(g.gamma_shift) +
                      " alpha=" + fmt(g.alpha_shape) +
                      " beta=" + fmt(g.beta_scale));
            } else {
                const RSAR1& s = std::get<RSAR1>(rep.model);
                stage("calibrate[rsar1]: loglik=" + fmt(*fit.loglik) +
                      " mu=" + fmt_list(s.mu) + " phi=" + fmt_list(s.phi) +
                      " sigma=" + fmt_list(s.sigma) + " p11=" + fmt(s.P[0][0]) +
                      " p22=" + fmt(s.P[1][1]));
            }
        } else {
            rep.model = opts.model;
            stage("model: supplied " + model_name(rep.model));
        }
        hist = split_years(x);
        hist_annual = annual_changes(x, 3);
    }
    if (!opts.calibrate && model_name(rep.model) != opts.model_kind) {
        throw std::invalid_argument(
            "validation: supplied model is " + model_name(rep.model) +
            " but the pipeline was asked for " + opts.model_kind);
    }
    rep.m = static_cast<int>(hist.paths());
    if (rep.m < 2) {
        throw std::runtime_error("validation: fewer than 2 one-year paths");
    }
    stage("split_years: " + std::to_string(rep.m) + " paths x " +
          std::to_string(hist.nodes) + " nodes");

    SimGrid sgrid;
    sgrid.horizon = 1.0;
    sgrid.steps_per_year = 12;
    sgrid.paths = static_cast<std::size_t>(opts.simulations);
    sgrid.seed = derive_seed(opts.seed, 0, kRoleSims);
    const PathSample sims = simulate(rep.model, sgrid);
    rep.n = static_cast<int>(sims.paths());
    stage("simulate[" + model_name(rep.model) + "]: " + std::to_string(rep.n) +
          " one-year monthly paths");

    // Both hist and sims live in log space here, so the lift is applied to
    // the paths as they are. Lead-lag style lifts only see increments; the
    // cumulative lead-lag needs a common starting level first.
    PathSample test_hist = hist;
    PathSample test_sims = sims;
    if (opts.lift == Lift::cumulative_lead_lag) {
        test_hist = rebase_to_zero(test_hist);
        test_sims = rebase_to_zero(test_sims);
        stage("rebase: paths shifted to start at 0 for the cumulative lift");
    }
    const TransformSpec tspec{Representation::original, opts.lift, false};
    const PathSample th = apply_transform(test_hist, tspec);
    const PathSample ts = apply_transform(test_sims, tspec);
    stage("transform[" + to_string(opts.lift) + "]: " +
          std::to_string(rep.m) + "+" + std::to_string(rep.n) + " paths x " +
          std::to_string(th.nodes) + " nodes, dim " + std::to_string(th.dim));

    const bool use_log =
        opts.log_signature.value_or(rep.pipeline == Pipeline::inflation);
    KernelConfig kc;
    kc.signature_cfg = SignatureConfig{opts.order, use_log};
    kc.transform = tspec;
    kc.from_level = opts.from_level;
    rep.test = two_sample_test_from_signatures(
        batch_signatures(th, kc.signature_cfg),
        batch_signatures(ts, kc.signature_cfg), kc, opts.level,
        derive_seed(opts.seed, 0, kRoleTestDraws), opts.null_draws,
        opts.top_eigenvalues);
    stage("signature: order " + std::to_string(opts.order) + ", levels " +
          std::to_string(opts.from_level) + ".." + std::to_string(opts.order) +
          (use_log ? ", log-signature" : ", signature"));
    stage("test: N=" + std::to_string(rep.test.N) +
          " statistic=" + fmt(rep.test.statistic) +
          " threshold=" + fmt(rep.test.threshold) +
          " p=" + fmt(rep.test.p_value));

    // The same draws the test used, re-quantiled at the two standard levels.
    const auto draws =
        null_draws(rep.test.eigenvalues, rep.test.m, rep.test.n,
                   rep.test.null_draw_count, rep.test.seed);
    rep.reject_at_1pct = rep.test.statistic > threshold_from_draws(draws, 0.01);
    rep.reject_at_5pct = rep.test.statistic > threshold_from_draws(draws, 0.05);

    // Preliminary check: one-year changes of the log series against the
    // model's simulated annual changes, as a plain distribution test.
    SimGrid kgrid = sgrid;
    kgrid.paths = static_cast<std::size_t>(opts.ks_simulations);
    kgrid.seed = derive_seed(opts.seed, 0, kRoleKsSims);
    const PathSample ks_paths = simulate(rep.model, kgrid);
    std::vector<double> sim_annual(ks_paths.paths());
    for (std::size_t p = 0; p < ks_paths.paths(); ++p) {
        sim_annual[p] = ks_paths.at(p, 12, 0) - ks_paths.at(p, 0, 0);
    }
    rep.ks = ks_two_sample(hist_annual, sim_annual);
    rep.ks_simulations = opts.ks_simulations;
    stage("ks: D=" + fmt(rep.ks.statistic) + " p=" + fmt(rep.ks.p_value) +
          " (" + std::to_string(hist_annual.size()) + " historical vs " +
          std::to_string(sim_annual.size()) + " simulated annual changes)");

    if (opts.ensemble) {
        // Lever grid: path representation x lift x order x signature type x
        // rescaling. Representations act on the per-path growth index
        // exp(x_k - x_0) so that log-path recovers the baseline paths and
        // log-returns their increments; the realized-volatility extraction
        // needs daily paths and cannot apply to 13-node years.
        const PathSample hist_growth = rebase_growth(hist);
        const PathSample sims_growth = rebase_growth(sims);
        const Representation reps_grid[] = {Representation::original,
                                            Representation::log_path,
                                            Representation::log_returns};
        const Lift lifts_grid[] = {Lift::lead_lag, Lift::time_lead_lag,
                                   Lift::cumulative_lead_lag};
        const int orders_grid[] = {2, 3, 4};
        std::vector<EnsembleMember> members;
        for (Representation r : reps_grid) {
            for (Lift l : lifts_grid) {
                for (int o : orders_grid) {
                    for (int log_sig = 0; log_sig < 2; ++log_sig) {
                        for (int rescale = 0; rescale < 2; ++rescale) {
                            EnsembleMember mem;
                            mem.representation = r;
                            mem.lift = l;
                            mem.order = o;
                            mem.log_signature = log_sig != 0;
                            mem.rescale = rescale != 0;
                            members.push_back(mem);
                        }
                    }
                }
            }
        }
        parallel_for(static_cast<int>(members.size()), opts.threads,
                     [&](int i) {
                         EnsembleMember& mem = members[static_cast<std::size_t>(i)];
                         const TransformSpec spec{mem.representation, mem.lift,
                                                  mem.rescale};
                         const PathSample eh = apply_transform(hist_growth, spec);
                         const PathSample es = apply_transform(sims_growth, spec);
                         KernelConfig ekc;
                         ekc.signature_cfg =
                             SignatureConfig{mem.order, mem.log_signature};
                         ekc.transform = spec;
                         ekc.from_level = opts.from_level;
                         const TestResult t = two_sample_test_from_signatures(
                             batch_signatures(eh, ekc.signature_cfg),
                             batch_signatures(es, ekc.signature_cfg), ekc,
                             opts.level,
                             derive_seed(opts.seed,
                                         static_cast<std::uint64_t>(i),
                                         kRoleEnsembleDraws),
                             opts.null_draws, opts.top_eigenvalues);
                         mem.p_value = t.p_value;
                         mem.reject = t.reject;
                     });
        rep.ensemble = std::move(members);
        rep.ensemble_rejections = 0;
        for (const auto& mem : rep.ensemble) {
            if (mem.reject) ++rep.ensemble_rejections;
        }
        rep.ensemble_majority_reject =
            2 * rep.ensemble_rejections > static_cast<int>(rep.ensemble.size());
        stage("ensemble: " + std::to_string(rep.ensemble_rejections) + " of " +
              std::to_string(rep.ensemble.size()) +
              " lever combinations reject at level " + fmt(opts.level) +
              "; majority " +
              (rep.ensemble_majority_reject ? "rejects" : "does not reject"));
    }
    return rep;
}

} // namespace sigval
