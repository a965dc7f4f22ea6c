#include "sigval/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "json.hpp"

namespace sigval {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string csv_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

ordered_json model_json(const ModelSpec& spec) {
    ordered_json j;
    std::visit(
        [&j](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FBM>) {
                j = {{"kind", "fbm"}, {"hurst", s.hurst}};
            } else if constexpr (std::is_same_v<T, BSD>) {
                ordered_json times = ordered_json::array();
                ordered_json values = ordered_json::array();
                for (const auto& [t, v] : s.vol_knots) {
                    times.push_back(t);
                    values.push_back(v);
                }
                j = {{"kind", "bsd"},
                     {"mu", s.mu},
                     {"s0", s.s0},
                     {"vol_times", times},
                     {"vol_values", values}};
            } else if constexpr (std::is_same_v<T, BSDAutocorr>) {
                j = {{"kind", "bsd_autocorr"}, {"muC", s.muC},
                     {"gamma1", s.gamma1},     {"gamma2", s.gamma2},
                     {"rho", s.rho},           {"s0", s.s0}};
            } else if constexpr (std::is_same_v<T, Heston>) {
                j = {{"kind", "heston"},   {"s0", s.s0},
                     {"v0", s.v0},         {"theta", s.theta},
                     {"lambda", s.lambda}, {"sigma", s.sigma},
                     {"rho", s.rho}};
            } else if constexpr (std::is_same_v<T, RoughHeston>) {
                j = {{"kind", "rough_heston"}, {"s0", s.s0},
                     {"v0", s.v0},             {"theta", s.theta},
                     {"lambda", s.lambda},     {"sigma", s.sigma},
                     {"rho", s.rho},           {"hurst", s.hurst}};
            } else if constexpr (std::is_same_v<T, RSAR1>) {
                j = {{"kind", "rsar1"},
                     {"x0", s.x0},
                     {"mu", s.mu},
                     {"phi", s.phi},
                     {"sigma", s.sigma},
                     {"P", s.P}};
            } else if constexpr (std::is_same_v<T, GammaRW>) {
                j = {{"kind", "gamma_rw"},
                     {"gamma_shift", s.gamma_shift},
                     {"alpha_shape", s.alpha_shape},
                     {"beta_scale", s.beta_scale}};
            } else if constexpr (std::is_same_v<T, OU>) {
                j = {{"kind", "ou"},
                     {"theta", s.theta},
                     {"alpha", s.alpha},
                     {"sigma", s.sigma}};
                if (s.y0) j["y0"] = *s.y0;
            } else if constexpr (std::is_same_v<T, FOU>) {
                j = {{"kind", "fou"},
                     {"hurst", s.hurst},
                     {"theta", s.theta},
                     {"alpha", s.alpha},
                     {"sigma", s.sigma}};
                if (s.y0) j["y0"] = *s.y0;
            } else {
                static_assert(std::is_same_v<T, Joint2D>);
                j = {{"kind", "joint2d"},
                     {"corr", s.corr},
                     {"rough", model_json(ModelSpec(s.rough))},
                     {"rsar1", model_json(ModelSpec(s.rsar1))}};
            }
        },
        spec);
    return j;
}

ordered_json transform_json(const TransformSpec& t) {
    return {{"representation", to_string(t.representation)},
            {"lift", to_string(t.lift)},
            {"rescale", t.rescale}};
}

ordered_json kernel_json(const KernelConfig& cfg) {
    return {{"order", cfg.signature_cfg.order},
            {"log_signature", cfg.signature_cfg.use_log},
            {"from_level", cfg.from_level},
            {"transform", transform_json(cfg.transform)}};
}

ordered_json test_json(const TestResult& r) {
    ordered_json j{{"type", "two_sample_test"},
                   {"m", r.m},
                   {"n", r.n},
                   {"N", r.N},
                   {"mmd2", r.mmd2},
                   {"statistic", r.statistic},
                   {"threshold", r.threshold},
                   {"p_value", r.p_value},
                   {"reject", r.reject},
                   {"level", r.level},
                   {"null_draws", r.null_draw_count},
                   {"top_eigenvalues", r.top_eigenvalues},
                   {"seed", r.seed},
                   {"eigenvalues", r.eigenvalues},
                   {"kernel", kernel_json(r.config)}};
    return j;
}

ordered_json power_config_json(const PowerStudyConfig& cfg) {
    return {{"model_a", model_json(cfg.model_a)},
            {"model_b", model_json(cfg.model_b)},
            {"m_list", cfg.m_list},
            {"n", cfg.n},
            {"orders", cfg.order_list},
            {"transform", transform_json(cfg.transform)},
            {"log_signature", cfg.log_signature},
            {"from_level", cfg.from_level},
            {"level", cfg.level},
            {"repetitions", cfg.repetitions},
            {"null_draws", cfg.null_draws},
            {"top_eigenvalues", cfg.top_eigenvalues},
            {"seed", cfg.seed},
            {"grid",
             {{"horizon", cfg.grid.horizon},
              {"steps_per_year", cfg.grid.steps_per_year}}},
            {"stride", cfg.stride},
            {"threshold_per_rep", cfg.threshold_per_rep}};
}

ordered_json power_json(const PowerReport& report, bool include_timing) {
    ordered_json cells = ordered_json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"m", c.m},
                         {"order", c.order},
                         {"power", c.power},
                         {"power_se", c.power_se},
                         {"type1", c.type1},
                         {"type1_se", c.type1_se},
                         {"threshold", c.threshold},
                         {"repetitions", c.repetitions},
                         {"eigenvalues", c.eigenvalues}});
    }
    // Plot-ready coordinates: one power-versus-order series per m.
    ordered_json power_series = ordered_json::array();
    ordered_json type1_series = ordered_json::array();
    for (int m : report.config.m_list) {
        ordered_json orders = ordered_json::array();
        ordered_json power = ordered_json::array();
        ordered_json power_se = ordered_json::array();
        ordered_json type1 = ordered_json::array();
        ordered_json type1_se = ordered_json::array();
        for (const auto& c : report.cells) {
            if (c.m != m) continue;
            orders.push_back(c.order);
            power.push_back(c.power);
            power_se.push_back(c.power_se);
            type1.push_back(c.type1);
            type1_se.push_back(c.type1_se);
        }
        if (orders.empty()) continue;
        power_series.push_back({{"m", m},
                                {"orders", orders},
                                {"power", power},
                                {"se", power_se}});
        type1_series.push_back({{"m", m},
                                {"orders", orders},
                                {"type1", type1},
                                {"se", type1_se}});
    }
    ordered_json j{{"type", "power_study"},
                   {"config", power_config_json(report.config)},
                   {"cells", cells},
                   {"figures",
                    {{"power_vs_order", power_series},
                     {"type1_vs_order", type1_series}}}};
    if (include_timing) {
        ordered_json cell_seconds = ordered_json::array();
        for (const auto& c : report.cells) cell_seconds.push_back(c.seconds);
        j["timing"] = {{"total_seconds", report.total_seconds},
                       {"cell_seconds", cell_seconds}};
    }
    return j;
}

ordered_json validation_json(const ValidationReport& r) {
    ordered_json j{{"type", "validation"},
                   {"pipeline", to_string(r.pipeline)},
                   {"model_kind", r.model_kind},
                   {"model", model_json(r.model)}};
    if (r.hurst) {
        j["hurst"] = {{"estimate", r.hurst->hurst},
                      {"intercept", r.hurst->intercept},
                      {"q", r.hurst->q_list},
                      {"xi", r.hurst->xi},
                      {"max_lag", r.hurst->max_lag}};
    }
    if (r.loglik) j["loglik"] = *r.loglik;
    j["m"] = r.m;
    j["n"] = r.n;
    j["stages"] = r.stages;
    j["ks"] = {{"statistic", r.ks.statistic},
               {"p_value", r.ks.p_value},
               {"simulations", r.ks_simulations}};
    j["test"] = test_json(r.test);
    j["decisions"] = {{"reject_at_1pct", r.reject_at_1pct},
                      {"reject_at_5pct", r.reject_at_5pct}};
    if (!r.ensemble.empty()) {
        ordered_json members = ordered_json::array();
        for (const auto& mem : r.ensemble) {
            members.push_back({{"representation", to_string(mem.representation)},
                               {"lift", to_string(mem.lift)},
                               {"order", mem.order},
                               {"log_signature", mem.log_signature},
                               {"rescale", mem.rescale},
                               {"p_value", mem.p_value},
                               {"reject", mem.reject}});
        }
        j["ensemble"] = {{"size", static_cast<int>(r.ensemble.size())},
                         {"rejections", r.ensemble_rejections},
                         {"majority_reject", r.ensemble_majority_reject},
                         {"members", members}};
    }
    return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

} // namespace

std::string test_result_json(const TestResult& result) {
    return dump(test_json(result));
}

std::string power_report_json(const PowerReport& report, bool include_timing) {
    return dump(power_json(report, include_timing));
}

std::string validation_report_json(const ValidationReport& report) {
    return dump(validation_json(report));
}

std::string test_result_csv(const TestResult& r) {
    std::string out = "key,value\n";
    out += "m," + std::to_string(r.m) + "\n";
    out += "n," + std::to_string(r.n) + "\n";
    out += "N," + std::to_string(r.N) + "\n";
    out += "mmd2," + csv_num(r.mmd2) + "\n";
    out += "statistic," + csv_num(r.statistic) + "\n";
    out += "threshold," + csv_num(r.threshold) + "\n";
    out += "p_value," + csv_num(r.p_value) + "\n";
    out += std::string("reject,") + (r.reject ? "1" : "0") + "\n";
    out += "level," + csv_num(r.level) + "\n";
    out += "null_draws," + std::to_string(r.null_draw_count) + "\n";
    out += "top_eigenvalues," + std::to_string(r.top_eigenvalues) + "\n";
    out += "seed," + std::to_string(r.seed) + "\n";
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        out += "eigenvalue_" + std::to_string(i + 1) + "," +
               csv_num(r.eigenvalues[i]) + "\n";
    }
    return out;
}

std::string power_report_csv(const PowerReport& report) {
    std::string out =
        "m,order,power,power_se,type1,type1_se,threshold,repetitions\n";
    for (const auto& c : report.cells) {
        out += std::to_string(c.m) + "," + std::to_string(c.order) + "," +
               csv_num(c.power) + "," + csv_num(c.power_se) + "," +
               csv_num(c.type1) + "," + csv_num(c.type1_se) + "," +
               csv_num(c.threshold) + "," + std::to_string(c.repetitions) +
               "\n";
    }
    return out;
}

std::string validation_report_csv(const ValidationReport& r) {
    std::string out = "key,value\n";
    out += "pipeline," + to_string(r.pipeline) + "\n";
    out += "model_kind," + r.model_kind + "\n";
    out += "m," + std::to_string(r.m) + "\n";
    out += "n," + std::to_string(r.n) + "\n";
    out += "ks_statistic," + csv_num(r.ks.statistic) + "\n";
    out += "ks_p_value," + csv_num(r.ks.p_value) + "\n";
    out += "statistic," + csv_num(r.test.statistic) + "\n";
    out += "threshold," + csv_num(r.test.threshold) + "\n";
    out += "p_value," + csv_num(r.test.p_value) + "\n";
    out += std::string("reject,") + (r.test.reject ? "1" : "0") + "\n";
    out += std::string("reject_at_1pct,") + (r.reject_at_1pct ? "1" : "0") + "\n";
    out += std::string("reject_at_5pct,") + (r.reject_at_5pct ? "1" : "0") + "\n";
    if (!r.ensemble.empty()) {
        out += "ensemble_size," + std::to_string(r.ensemble.size()) + "\n";
        out += "ensemble_rejections," + std::to_string(r.ensemble_rejections) +
               "\n";
        out += std::string("ensemble_majority_reject,") +
               (r.ensemble_majority_reject ? "1" : "0") + "\n";
    }
    return out;
}

std::string calibration_json(const CalibrationOutcome& o) {
    ordered_json j{{"type", "calibration"},
                   {"pipeline", to_string(o.pipeline)},
                   {"model", model_json(o.model)}};
    if (o.hurst) {
        j["hurst"] = {{"estimate", o.hurst->hurst},
                      {"intercept", o.hurst->intercept},
                      {"q", o.hurst->q_list},
                      {"xi", o.hurst->xi},
                      {"max_lag", o.hurst->max_lag}};
    }
    if (o.moments) {
        j["annual_moments"] = {{"m1", o.moments->m1},
                               {"m2c", o.moments->m2c},
                               {"m3c", o.moments->m3c}};
    }
    if (o.loglik) j["loglik"] = *o.loglik;
    return dump(j);
}

std::string calibration_csv(const CalibrationOutcome& o) {
    std::string out = "key,value\n";
    out += "pipeline," + to_string(o.pipeline) + "\n";
    // model_to_config lines are `model.key = value`; reuse them as rows so
    // parameter names match the config schema exactly.
    std::istringstream lines(model_to_config(o.model, "model"));
    std::string line;
    while (std::getline(lines, line)) {
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        out += line.substr(0, eq) + "," + line.substr(eq + 3) + "\n";
    }
    if (o.hurst) out += "hurst," + csv_num(o.hurst->hurst) + "\n";
    if (o.moments) {
        out += "m1," + csv_num(o.moments->m1) + "\n";
        out += "m2c," + csv_num(o.moments->m2c) + "\n";
        out += "m3c," + csv_num(o.moments->m3c) + "\n";
    }
    if (o.loglik) out += "loglik," + csv_num(*o.loglik) + "\n";
    return out;
}

std::string human_summary(const CalibrationOutcome& o) {
    std::string out = "calibration [" + to_string(o.pipeline) + "]\n";
    std::istringstream lines(model_to_config(o.model, "model"));
    std::string line;
    while (std::getline(lines, line)) out += "  " + line + "\n";
    if (o.hurst) out += "  hurst estimate: " + short_num(o.hurst->hurst) + "\n";
    if (o.loglik) out += "  log-likelihood: " + short_num(*o.loglik) + "\n";
    return out;
}

std::string human_summary(const TestResult& r) {
    std::string out;
    out += "two-sample test: m=" + std::to_string(r.m) +
           " n=" + std::to_string(r.n) + " level=" + short_num(r.level) + "\n";
    out += "  transform: " + to_string(r.config.transform.lift) + " on " +
           to_string(r.config.transform.representation) +
           (r.config.transform.rescale ? ", rescaled" : "") + "\n";
    out += "  signature: order " + std::to_string(r.config.signature_cfg.order) +
           ", levels " + std::to_string(r.config.from_level) + ".." +
           std::to_string(r.config.signature_cfg.order) +
           (r.config.signature_cfg.use_log ? ", log-signature" : "") + "\n";
    out += "  MMD^2 = " + short_num(r.mmd2) +
           ", statistic = " + short_num(r.statistic) +
           ", threshold = " + short_num(r.threshold) + "\n";
    out += "  p-value = " + short_num(r.p_value) + "  ->  " +
           (r.reject ? "REJECT" : "no rejection") + "\n";
    return out;
}

std::string human_summary(const PowerReport& report) {
    std::string out;
    out += "power study: " + model_name(report.config.model_a) + " (null) vs " +
           model_name(report.config.model_b) + ", " +
           std::to_string(report.config.repetitions) +
           " repetitions, level " + short_num(report.config.level) + "\n";
    for (const auto& c : report.cells) {
        out += "  m=" + std::to_string(c.m) +
               " order=" + std::to_string(c.order) +
               ": power=" + short_num(c.power) + " (se " +
               short_num(c.power_se) + "), type I=" + short_num(c.type1) +
               " (se " + short_num(c.type1_se) + ")\n";
    }
    out += "wall time: " + short_num(report.total_seconds) + " s\n";
    return out;
}

std::string human_summary(const ValidationReport& r) {
    std::string out;
    out += "validation pipeline [" + to_string(r.pipeline) + "], model " +
           r.model_kind + "\n";
    for (const auto& line : r.stages) out += "  " + line + "\n";
    out += "decision: p-value " + short_num(r.test.p_value) + "; " +
           (r.reject_at_1pct ? "rejected" : "not rejected") + " at 1%, " +
           (r.reject_at_5pct ? "rejected" : "not rejected") + " at 5%\n";
    if (!r.ensemble.empty()) {
        out += "ensemble: " + std::to_string(r.ensemble_rejections) + "/" +
               std::to_string(r.ensemble.size()) + " reject; majority " +
               (r.ensemble_majority_reject ? "rejects" : "does not reject") +
               "\n";
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace sigval
