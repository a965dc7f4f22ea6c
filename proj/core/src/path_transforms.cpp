#include "sigval/path_transforms.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace sigval {

Representation representation_from_string(const std::string& name) {
    if (name == "original") return Representation::original;
    if (name == "log_path") return Representation::log_path;
    if (name == "log_returns") return Representation::log_returns;
    if (name == "realized_volatility") return Representation::realized_volatility;
    throw std::invalid_argument("unknown representation: " + name);
}

Lift lift_from_string(const std::string& name) {
    if (name == "none") return Lift::none;
    if (name == "lead_lag") return Lift::lead_lag;
    if (name == "time") return Lift::time_augment;
    if (name == "time_lead_lag") return Lift::time_lead_lag;
    if (name == "cumulative_lead_lag") return Lift::cumulative_lead_lag;
    throw std::invalid_argument("unknown lift: " + name);
}

std::string to_string(Representation r) {
    switch (r) {
        case Representation::original: return "original";
        case Representation::log_path: return "log_path";
        case Representation::log_returns: return "log_returns";
        case Representation::realized_volatility: return "realized_volatility";
    }
    return "?";
}

std::string to_string(Lift l) {
    switch (l) {
        case Lift::none: return "none";
        case Lift::lead_lag: return "lead_lag";
        case Lift::time_augment: return "time";
        case Lift::time_lead_lag: return "time_lead_lag";
        case Lift::cumulative_lead_lag: return "cumulative_lead_lag";
    }
    return "?";
}

namespace {

void require_nodes(const PathSample& in, int minimum, const char* op) {
    if (in.nodes < minimum) {
        throw std::invalid_argument(std::string(op) + ": too few nodes");
    }
}

double time_span_start(const PathSample& in) {
    return in.times.empty() ? 0.0 : in.times.front();
}

double time_span_end(const PathSample& in) {
    return in.times.empty() ? 1.0 : in.times.back();
}

} // namespace

PathSample lead_lag(const PathSample& in) {
    require_nodes(in, 2, "lead_lag");
    const std::size_t paths = in.paths();
    const int N = in.nodes - 1;
    const int out_nodes = 2 * N + 1;
    const int d = in.dim;
    PathSample out = PathSample::zeros(paths, out_nodes, 2 * d);
    const double t0 = time_span_start(in);
    const double t1 = time_span_end(in);
    out.times.resize(static_cast<std::size_t>(out_nodes));
    for (int k = 0; k < out_nodes; ++k) {
        out.times[static_cast<std::size_t>(k)] =
            t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(out_nodes - 1);
    }
    for (std::size_t p = 0; p < paths; ++p) {
        for (int k = 0; k < out_nodes; ++k) {
            const int lead = (k + 1) / 2; // ceil(k/2)
            const int lag = k / 2;
            for (int j = 0; j < d; ++j) {
                out.at(p, k, 2 * j) = in.at(p, lead, j);
                out.at(p, k, 2 * j + 1) = in.at(p, lag, j);
            }
        }
    }
    return out;
}

PathSample time_augment(const PathSample& in) {
    require_nodes(in, 2, "time_augment");
    const std::size_t paths = in.paths();
    const int d = in.dim;
    PathSample out = PathSample::zeros(paths, in.nodes, d + 1);
    out.times = in.times;
    for (std::size_t p = 0; p < paths; ++p) {
        for (int k = 0; k < in.nodes; ++k) {
            out.at(p, k, 0) = in.times[static_cast<std::size_t>(k)];
            for (int j = 0; j < d; ++j) out.at(p, k, j + 1) = in.at(p, k, j);
        }
    }
    return out;
}

PathSample time_lead_lag(const PathSample& in) {
    return time_augment(lead_lag(in));
}

PathSample cumulative_lead_lag(const PathSample& in) {
    require_nodes(in, 1, "cumulative_lead_lag");
    const std::size_t paths = in.paths();
    const int d = in.dim;
    const int out_nodes = in.nodes + 1;
    PathSample sums = PathSample::zeros(paths, out_nodes, d);
    const double t0 = time_span_start(in);
    const double t1 = in.nodes >= 2 ? time_span_end(in) : t0 + 1.0;
    sums.times = PathSample::uniform_times(out_nodes, t1 - t0);
    for (auto& t : sums.times) t += t0;
    for (std::size_t p = 0; p < paths; ++p) {
        for (int j = 0; j < d; ++j) {
            double acc = 0.0;
            sums.at(p, 0, j) = 0.0;
            for (int k = 0; k < in.nodes; ++k) {
                acc += in.at(p, k, j);
                sums.at(p, k + 1, j) = acc;
            }
        }
    }
    return lead_lag(sums);
}

PathSample log_path(const PathSample& in) {
    PathSample out = in;
    for (double& x : out.data) {
        if (!(x > 0.0)) {
            throw std::domain_error("log_path: values must be positive");
        }
        x = std::log(x);
    }
    return out;
}

PathSample log_returns(const PathSample& in) {
    require_nodes(in, 2, "log_returns");
    const std::size_t paths = in.paths();
    const int d = in.dim;
    const int out_nodes = in.nodes - 1;
    PathSample out = PathSample::zeros(paths, out_nodes, d);
    out.times.assign(in.times.begin() + 1, in.times.end());
    for (std::size_t p = 0; p < paths; ++p) {
        for (int k = 0; k < out_nodes; ++k) {
            for (int j = 0; j < d; ++j) {
                const double prev = in.at(p, k, j);
                const double cur = in.at(p, k + 1, j);
                if (!(prev > 0.0) || !(cur > 0.0)) {
                    throw std::domain_error("log_returns: values must be positive");
                }
                out.at(p, k, j) = std::log(cur / prev);
            }
        }
    }
    return out;
}

PathSample realized_volatility(const PathSample& in) {
    constexpr int days_per_month = 21;
    constexpr int months = 12;
    if (in.dim != 1) {
        throw std::invalid_argument("realized_volatility: input must be 1-d");
    }
    if (in.nodes != days_per_month * months + 1) {
        throw std::invalid_argument(
            "realized_volatility: expected exactly 253 daily prices");
    }
    const std::size_t paths = in.paths();
    PathSample out = PathSample::zeros(paths, months, 1);
    out.times = PathSample::uniform_times(months, 1.0);
    for (std::size_t p = 0; p < paths; ++p) {
        for (int k = 0; k < months; ++k) {
            double sum = 0.0;
            for (int l = 0; l < days_per_month; ++l) {
                const int i = days_per_month * k + l;
                const double prev = in.at(p, i, 0);
                const double cur = in.at(p, i + 1, 0);
                if (!(prev > 0.0) || !(cur > 0.0)) {
                    throw std::domain_error(
                        "realized_volatility: prices must be positive");
                }
                const double r = std::log(cur / prev);
                sum += r * r;
            }
            out.at(p, k, 0) = std::sqrt(sum);
        }
    }
    return out;
}

PathSample apply_representation(const PathSample& in, Representation r) {
    switch (r) {
        case Representation::original: return in;
        case Representation::log_path: return log_path(in);
        case Representation::log_returns: return log_returns(in);
        case Representation::realized_volatility: return realized_volatility(in);
    }
    throw std::logic_error("apply_representation: unreachable");
}

PathSample apply_lift(const PathSample& in, Lift l) {
    switch (l) {
        case Lift::none: return in;
        case Lift::lead_lag: return lead_lag(in);
        case Lift::time_augment: return time_augment(in);
        case Lift::time_lead_lag: return time_lead_lag(in);
        case Lift::cumulative_lead_lag: return cumulative_lead_lag(in);
    }
    throw std::logic_error("apply_lift: unreachable");
}

PathSample apply_transform(const PathSample& in, const TransformSpec& spec) {
    return apply_lift(apply_representation(in, spec.representation), spec.lift);
}

void rescale_signatures(std::vector<TensorSeries>& a,
                        std::vector<TensorSeries>& b) {
    if (a.empty() && b.empty()) return;
    const TensorSeries& probe = a.empty() ? b.front() : a.front();
    const int R = probe.order();
    std::vector<std::vector<double>> maxima(static_cast<std::size_t>(R) + 1);
    for (int n = 0; n <= R; ++n) {
        maxima[static_cast<std::size_t>(n)].assign(probe.level(n).size(), 0.0);
    }
    auto absorb = [&](const std::vector<TensorSeries>& list) {
        for (const auto& t : list) {
            if (t.dim() != probe.dim() || t.order() != R) {
                throw std::invalid_argument(
                    "rescale_signatures: mixed dims or orders");
            }
            for (int n = 0; n <= R; ++n) {
                const auto& lv = t.level(n);
                auto& mx = maxima[static_cast<std::size_t>(n)];
                for (std::size_t i = 0; i < lv.size(); ++i) {
                    const double v = std::fabs(lv[i]);
                    if (v > mx[i]) mx[i] = v;
                }
            }
        }
    };
    absorb(a);
    absorb(b);
    auto scale = [&](std::vector<TensorSeries>& list) {
        for (auto& t : list) {
            for (int n = 0; n <= R; ++n) {
                auto& lv = t.level(n);
                const auto& mx = maxima[static_cast<std::size_t>(n)];
                for (std::size_t i = 0; i < lv.size(); ++i) {
                    if (mx[i] > 0.0) lv[i] /= mx[i];
                }
            }
        }
    };
    scale(a);
    scale(b);
}

PathSample split_years(const std::vector<double>& monthly) {
    if (monthly.size() < 13) {
        throw std::invalid_argument("split_years: need at least 13 observations");
    }
    const std::size_t years = (monthly.size() - 1) / 12;
    PathSample out = PathSample::zeros(years, 13, 1);
    out.times = PathSample::uniform_times(13, 1.0);
    for (std::size_t p = 0; p < years; ++p) {
        for (int k = 0; k <= 12; ++k) {
            out.at(p, k, 0) = monthly[12 * p + static_cast<std::size_t>(k)];
        }
    }
    return out;
}

} // namespace sigval
