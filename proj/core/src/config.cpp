#include "sigval/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sigval {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": empty key");
        }
        cfg.entries_[key] = value;
    }
    return cfg;
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

void Config::set(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

std::string Config::get_string(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw std::runtime_error("missing config key '" + key + "'");
    }
    return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': bad number '" + v + "'");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
    const double v = get_double(key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw std::runtime_error("config key '" + key + "': expected integer");
    }
    return i;
}

int Config::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    try {
        std::size_t used = 0;
        const std::uint64_t x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': bad unsigned '" + v + "'");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("config key '" + key + "': bad boolean '" + v + "'");
}

std::vector<double> Config::get_list(const std::string& key) const {
    const std::string v = get_string(key);
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::runtime_error("config key '" + key + "': bad list item '" +
                                     item + "'");
        }
    }
    if (out.empty()) {
        throw std::runtime_error("config key '" + key + "': empty list");
    }
    return out;
}

std::vector<int> Config::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (const double v : get_list(key)) {
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) {
            throw std::runtime_error("config key '" + key +
                                     "': expected integer list");
        }
        out.push_back(i);
    }
    return out;
}

std::vector<std::string> Config::keys_with_prefix(
    const std::string& prefix) const {
    std::vector<std::string> out;
    const std::string full = prefix + ".";
    for (const auto& [key, value] : entries_) {
        if (key.rfind(full, 0) == 0) out.push_back(key);
    }
    return out;
}

namespace {

RSAR1 rsar1_from_config(const Config& cfg, const std::string& p) {
    RSAR1 spec;
    spec.x0 = cfg.get_double(p + ".x0", 0.0);
    spec.mu = cfg.get_list(p + ".mu");
    spec.phi = cfg.get_list(p + ".phi");
    spec.sigma = cfg.get_list(p + ".sigma");
    const std::size_t K = spec.mu.size();
    // Transition matrix given row by row: prefix.p_row1 = 0.95,0.05 etc.
    for (std::size_t i = 0; i < K; ++i) {
        spec.P.push_back(cfg.get_list(p + ".p_row" + std::to_string(i + 1)));
    }
    return spec;
}

RoughHeston rough_heston_from_config(const Config& cfg, const std::string& p) {
    RoughHeston spec;
    spec.s0 = cfg.get_double(p + ".s0", 1.0);
    spec.v0 = cfg.get_double(p + ".v0", 0.05);
    spec.theta = cfg.get_double(p + ".theta", 0.05);
    spec.lambda = cfg.get_double(p + ".lambda", 0.3);
    spec.sigma = cfg.get_double(p + ".sigma", 0.3);
    spec.rho = cfg.get_double(p + ".rho", -0.7);
    spec.hurst = cfg.get_double(p + ".hurst", 0.1);
    return spec;
}

std::string rsar1_to_config(const RSAR1& spec, const std::string& p) {
    std::string out;
    out += p + ".kind = rsar1\n";
    out += p + ".x0 = " + fmt(spec.x0) + "\n";
    auto join = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ",";
            s += fmt(v[i]);
        }
        return s;
    };
    out += p + ".mu = " + join(spec.mu) + "\n";
    out += p + ".phi = " + join(spec.phi) + "\n";
    out += p + ".sigma = " + join(spec.sigma) + "\n";
    for (std::size_t i = 0; i < spec.P.size(); ++i) {
        out += p + ".p_row" + std::to_string(i + 1) + " = " + join(spec.P[i]) + "\n";
    }
    return out;
}

} // namespace

ModelSpec model_from_config(const Config& cfg, const std::string& p) {
    const std::string kind = cfg.get_string(p + ".kind");
    if (kind == "fbm") {
        FBM spec;
        spec.hurst = cfg.get_double(p + ".hurst");
        return spec;
    }
    if (kind == "bsd") {
        BSD spec;
        spec.mu = cfg.get_double(p + ".mu", 0.0);
        spec.s0 = cfg.get_double(p + ".s0", 1.0);
        // Volatility knots: parallel lists of start times and values.
        const auto starts = cfg.get_list(p + ".vol_times");
        const auto values = cfg.get_list(p + ".vol_values");
        if (starts.size() != values.size()) {
            throw std::runtime_error(p + ": vol_times/vol_values length mismatch");
        }
        for (std::size_t i = 0; i < starts.size(); ++i) {
            spec.vol_knots.emplace_back(starts[i], values[i]);
        }
        return spec;
    }
    if (kind == "bsd_autocorr") {
        BSDAutocorr spec;
        spec.muC = cfg.get_double(p + ".muC");
        spec.gamma1 = cfg.get_double(p + ".gamma1");
        spec.gamma2 = cfg.get_double(p + ".gamma2");
        spec.rho = cfg.get_double(p + ".rho");
        spec.s0 = cfg.get_double(p + ".s0", 1.0);
        return spec;
    }
    if (kind == "heston") {
        Heston spec;
        spec.s0 = cfg.get_double(p + ".s0", 1.0);
        spec.v0 = cfg.get_double(p + ".v0", 0.05);
        spec.theta = cfg.get_double(p + ".theta", 0.05);
        spec.lambda = cfg.get_double(p + ".lambda", 0.3);
        spec.sigma = cfg.get_double(p + ".sigma", 0.3);
        spec.rho = cfg.get_double(p + ".rho", -0.7);
        return spec;
    }
    if (kind == "rough_heston") return rough_heston_from_config(cfg, p);
    if (kind == "rsar1") return rsar1_from_config(cfg, p);
    if (kind == "gamma_rw") {
        GammaRW spec;
        spec.gamma_shift = cfg.get_double(p + ".gamma_shift");
        spec.alpha_shape = cfg.get_double(p + ".alpha_shape");
        spec.beta_scale = cfg.get_double(p + ".beta_scale");
        return spec;
    }
    if (kind == "ou") {
        OU spec;
        spec.theta = cfg.get_double(p + ".theta");
        spec.alpha = cfg.get_double(p + ".alpha");
        spec.sigma = cfg.get_double(p + ".sigma");
        if (cfg.has(p + ".y0")) spec.y0 = cfg.get_double(p + ".y0");
        return spec;
    }
    if (kind == "fou") {
        FOU spec;
        spec.hurst = cfg.get_double(p + ".hurst");
        spec.theta = cfg.get_double(p + ".theta");
        spec.alpha = cfg.get_double(p + ".alpha");
        spec.sigma = cfg.get_double(p + ".sigma");
        if (cfg.has(p + ".y0")) spec.y0 = cfg.get_double(p + ".y0");
        return spec;
    }
    if (kind == "joint2d") {
        Joint2D spec;
        spec.rough = rough_heston_from_config(cfg, p + ".rough");
        spec.rsar1 = rsar1_from_config(cfg, p + ".rsar1");
        spec.corr = cfg.get_double(p + ".corr", 0.0);
        return spec;
    }
    throw std::runtime_error("unknown model kind '" + kind + "'");
}

std::string model_to_config(const ModelSpec& model, const std::string& p) {
    struct Visitor {
        const std::string& p;
        std::string operator()(const FBM& s) const {
            return p + ".kind = fbm\n" + p + ".hurst = " + fmt(s.hurst) + "\n";
        }
        std::string operator()(const BSD& s) const {
            std::string times, values;
            for (std::size_t i = 0; i < s.vol_knots.size(); ++i) {
                if (i) {
                    times += ",";
                    values += ",";
                }
                times += fmt(s.vol_knots[i].first);
                values += fmt(s.vol_knots[i].second);
            }
            return p + ".kind = bsd\n" + p + ".mu = " + fmt(s.mu) + "\n" + p +
                   ".s0 = " + fmt(s.s0) + "\n" + p + ".vol_times = " + times +
                   "\n" + p + ".vol_values = " + values + "\n";
        }
        std::string operator()(const BSDAutocorr& s) const {
            return p + ".kind = bsd_autocorr\n" + p + ".muC = " + fmt(s.muC) +
                   "\n" + p + ".gamma1 = " + fmt(s.gamma1) + "\n" + p +
                   ".gamma2 = " + fmt(s.gamma2) + "\n" + p +
                   ".rho = " + fmt(s.rho) + "\n" + p + ".s0 = " + fmt(s.s0) + "\n";
        }
        std::string operator()(const Heston& s) const {
            return p + ".kind = heston\n" + p + ".s0 = " + fmt(s.s0) + "\n" + p +
                   ".v0 = " + fmt(s.v0) + "\n" + p + ".theta = " + fmt(s.theta) +
                   "\n" + p + ".lambda = " + fmt(s.lambda) + "\n" + p +
                   ".sigma = " + fmt(s.sigma) + "\n" + p +
                   ".rho = " + fmt(s.rho) + "\n";
        }
        std::string operator()(const RoughHeston& s) const {
            return p + ".kind = rough_heston\n" + p + ".s0 = " + fmt(s.s0) +
                   "\n" + p + ".v0 = " + fmt(s.v0) + "\n" + p +
                   ".theta = " + fmt(s.theta) + "\n" + p +
                   ".lambda = " + fmt(s.lambda) + "\n" + p +
                   ".sigma = " + fmt(s.sigma) + "\n" + p +
                   ".rho = " + fmt(s.rho) + "\n" + p +
                   ".hurst = " + fmt(s.hurst) + "\n";
        }
        std::string operator()(const RSAR1& s) const {
            return rsar1_to_config(s, p);
        }
        std::string operator()(const GammaRW& s) const {
            return p + ".kind = gamma_rw\n" + p +
                   ".gamma_shift = " + fmt(s.gamma_shift) + "\n" + p +
                   ".alpha_shape = " + fmt(s.alpha_shape) + "\n" + p +
                   ".beta_scale = " + fmt(s.beta_scale) + "\n";
        }
        std::string operator()(const OU& s) const {
            std::string out = p + ".kind = ou\n" + p +
                              ".theta = " + fmt(s.theta) + "\n" + p +
                              ".alpha = " + fmt(s.alpha) + "\n" + p +
                              ".sigma = " + fmt(s.sigma) + "\n";
            if (s.y0) out += p + ".y0 = " + fmt(*s.y0) + "\n";
            return out;
        }
        std::string operator()(const FOU& s) const {
            std::string out = p + ".kind = fou\n" + p +
                              ".hurst = " + fmt(s.hurst) + "\n" + p +
                              ".theta = " + fmt(s.theta) + "\n" + p +
                              ".alpha = " + fmt(s.alpha) + "\n" + p +
                              ".sigma = " + fmt(s.sigma) + "\n";
            if (s.y0) out += p + ".y0 = " + fmt(*s.y0) + "\n";
            return out;
        }
        std::string operator()(const Joint2D& s) const {
            std::string out = p + ".kind = joint2d\n" + p +
                              ".corr = " + fmt(s.corr) + "\n";
            out += model_to_config(ModelSpec(s.rough), p + ".rough");
            out += rsar1_to_config(s.rsar1, p + ".rsar1");
            return out;
        }
    };
    return std::visit(Visitor{p}, model);
}

TransformSpec transform_from_config(const Config& cfg, const std::string& p) {
    TransformSpec spec;
    spec.representation = representation_from_string(
        cfg.get_string(p + ".representation", "original"));
    spec.lift = lift_from_string(cfg.get_string(p + ".lift", "lead_lag"));
    spec.rescale = cfg.get_bool(p + ".rescale", false);
    return spec;
}

SimGrid grid_from_config(const Config& cfg, const std::string& p,
                         const SimGrid& defaults) {
    SimGrid grid = defaults;
    grid.horizon = cfg.get_double(p + ".horizon", defaults.horizon);
    grid.steps_per_year = cfg.get_int(p + ".steps_per_year", defaults.steps_per_year);
    grid.paths = static_cast<std::size_t>(
        cfg.get_int(p + ".paths", static_cast<int>(defaults.paths)));
    grid.seed = cfg.get_u64(p + ".seed", defaults.seed);
    return grid;
}

} // namespace sigval
