#include "sigval/process_models.hpp"
#include "sigval/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "sigval/rng.hpp"

namespace sigval {

int SimGrid::total_steps() const {
    if (horizon <= 0.0) throw std::invalid_argument("SimGrid: horizon must be > 0");
    if (steps_per_year < 1) {
        throw std::invalid_argument("SimGrid: steps_per_year must be >= 1");
    }
    if (paths < 1) throw std::invalid_argument("SimGrid: paths must be >= 1");
    const double n = static_cast<double>(steps_per_year) * horizon;
    const int steps = static_cast<int>(std::lround(n));
    if (steps < 1 || std::fabs(n - static_cast<double>(steps)) > 1e-9) {
        throw std::invalid_argument(
            "SimGrid: steps_per_year * horizon must be a positive integer");
    }
    return steps;
}

std::vector<double> SimGrid::node_times() const {
    const int steps = total_steps();
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) {
        t[static_cast<std::size_t>(k)] =
            static_cast<double>(k) * horizon / static_cast<double>(steps);
    }
    return t;
}

namespace {

// Lower Cholesky factor of the covariance of fractional Gaussian noise
// increments on a uniform grid with spacing dt.
Eigen::MatrixXd fgn_cholesky(double hurst, int steps, double dt) {
    const double two_h = 2.0 * hurst;
    Eigen::MatrixXd cov(steps, steps);
    const double scale = 0.5 * std::pow(dt, two_h);
    for (int i = 0; i < steps; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double k = static_cast<double>(i - j);
            const double c = scale * (std::pow(k + 1.0, two_h) +
                                      (k > 0.0 ? std::pow(k - 1.0, two_h) : 1.0) -
                                      2.0 * std::pow(k, two_h));
            cov(i, j) = c;
            cov(j, i) = c;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("fgn_cholesky: covariance not positive definite");
    }
    return llt.matrixL();
}

Eigen::VectorXd draw_normals(Rng& rng, int n) {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    return z;
}

int pick_from_distribution(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

void validate_rsar1(const RSAR1& spec) {
    const std::size_t K = spec.mu.size();
    if (K == 0 || spec.phi.size() != K || spec.sigma.size() != K ||
        spec.P.size() != K) {
        throw std::invalid_argument("RSAR1: parameter arrays must share one size");
    }
    for (double s : spec.sigma) {
        if (!(s > 0.0)) throw std::invalid_argument("RSAR1: sigma must be > 0");
    }
    for (const auto& row : spec.P) {
        if (row.size() != K) throw std::invalid_argument("RSAR1: P must be KxK");
        double sum = 0.0;
        for (double p : row) {
            if (p < 0.0) throw std::invalid_argument("RSAR1: P entries must be >= 0");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument("RSAR1: P rows must sum to 1");
        }
    }
}

struct RegimeSampler {
    std::vector<double> stationary;
    const RSAR1* spec;

    int initial(Rng& rng) const { return pick_from_distribution(stationary, rng.uniform()); }
    int next(int current, Rng& rng) const {
        return pick_from_distribution(spec->P[static_cast<std::size_t>(current)],
                                      rng.uniform());
    }
};

} // namespace

std::string model_name(const ModelSpec& spec) {
    struct Visitor {
        std::string operator()(const FBM&) const { return "fbm"; }
        std::string operator()(const BSD&) const { return "bsd"; }
        std::string operator()(const BSDAutocorr&) const { return "bsd_autocorr"; }
        std::string operator()(const Heston&) const { return "heston"; }
        std::string operator()(const RoughHeston&) const { return "rough_heston"; }
        std::string operator()(const RSAR1&) const { return "rsar1"; }
        std::string operator()(const GammaRW&) const { return "gamma_rw"; }
        std::string operator()(const OU&) const { return "ou"; }
        std::string operator()(const FOU&) const { return "fou"; }
        std::string operator()(const Joint2D&) const { return "joint2d"; }
    };
    return std::visit(Visitor{}, spec);
}

PathSample simulate_fbm(const FBM& spec, const SimGrid& grid) {
    if (!(spec.hurst > 0.0 && spec.hurst < 1.0)) {
        throw std::invalid_argument("simulate_fbm: hurst must be in (0,1)");
    }
    const int steps = grid.total_steps();
    const double dt = grid.horizon / static_cast<double>(steps);
    const Eigen::MatrixXd L = fgn_cholesky(spec.hurst, steps, dt);
    PathSample out = PathSample::zeros(grid.paths, steps + 1, 1);
    out.times = grid.node_times();
    for (std::size_t p = 0; p < grid.paths; ++p) {
        Rng rng(grid.seed, p);
        // Draw order: one normal per step.
        const Eigen::VectorXd increments = L * draw_normals(rng, steps);
        double level = 0.0;
        out.at(p, 0, 0) = 0.0;
        for (int k = 0; k < steps; ++k) {
            level += increments(k);
            out.at(p, k + 1, 0) = level;
        }
    }
    return out;
}

namespace {

double vol_at(const std::vector<std::pair<double, double>>& knots, double t) {
    if (knots.empty()) throw std::invalid_argument("BSD: vol_knots empty");
    constexpr double tol = 1e-12;
    if (knots.front().first > tol) {
        throw std::invalid_argument("BSD: first vol knot must start at time 0");
    }
    double value = knots.front().second;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (knots[i].first <= knots[i - 1].first) {
            throw std::invalid_argument("BSD: vol knot times must increase");
        }
        if (t >= knots[i].first - tol) value = knots[i].second;
    }
    return value;
}

} // namespace

PathSample simulate_bsd(const BSD& spec, const SimGrid& grid) {
    if (!(spec.s0 > 0.0)) throw std::invalid_argument("simulate_bsd: s0 must be > 0");
    const int steps = grid.total_steps();
    const std::vector<double> times = grid.node_times();
    const double dt = grid.horizon / static_cast<double>(steps);
    const double sqdt = std::sqrt(dt);
    std::vector<double> gamma(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        gamma[static_cast<std::size_t>(k)] =
            vol_at(spec.vol_knots, times[static_cast<std::size_t>(k)]);
    }
    PathSample out = PathSample::zeros(grid.paths, steps + 1, 1);
    out.times = times;
    for (std::size_t p = 0; p < grid.paths; ++p) {
        Rng rng(grid.seed, p);
        double log_s = std::log(spec.s0);
        out.at(p, 0, 0) = spec.s0;
        for (int k = 0; k < steps; ++k) {
            const double g = gamma[static_cast<std::size_t>(k)];
            log_s += (spec.mu - 0.5 * g * g) * dt + g * sqdt * rng.normal();
            out.at(p, k + 1, 0) = std::exp(log_s);
        }
    }
    return out;
}

std::vector<double> toeplitz_eigenvalues(double rho, int N) {
    if (N < 1) throw std::invalid_argument("toeplitz_eigenvalues: N must be >= 1");
    std::vector<double> ev(static_cast<std::size_t>(N));
    const double pi = std::acos(-1.0);
    for (int k = 1; k <= N; ++k) {
        ev[static_cast<std::size_t>(k - 1)] =
            1.0 + 2.0 * rho * std::cos(static_cast<double>(k) * pi /
                                       static_cast<double>(N + 1));
    }
    return ev;
}

PathSample simulate_bsd_autocorr(const BSDAutocorr& spec, const SimGrid& grid) {
    if (!(spec.s0 > 0.0)) {
        throw std::invalid_argument("simulate_bsd_autocorr: s0 must be > 0");
    }
    const int steps = grid.total_steps();
    const auto eigenvalues = toeplitz_eigenvalues(spec.rho, steps);
    for (double ev : eigenvalues) {
        if (!(ev > 0.0)) {
            throw std::invalid_argument(
                "simulate_bsd_autocorr: shock covariance not positive definite "
                "(needs 1 + 2 rho cos(k pi/(N+1)) > 0 for all k)");
        }
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(steps, steps);
    for (int i = 0; i + 1 < steps; ++i) {
        cov(i, i + 1) = spec.rho;
        cov(i + 1, i) = spec.rho;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("simulate_bsd_autocorr: Cholesky failed");
    }
    const Eigen::MatrixXd L = llt.matrixL();

    const std::vector<double> times = grid.node_times();
    const double dt = grid.horizon / static_cast<double>(steps);
    const double sqdt = std::sqrt(dt);
    const int half = steps / 2;
    PathSample out = PathSample::zeros(grid.paths, steps + 1, 1);
    out.times = times;
    for (std::size_t p = 0; p < grid.paths; ++p) {
        Rng rng(grid.seed, p);
        // Draw order: one normal per step, correlated through L.
        const Eigen::VectorXd shocks = L * draw_normals(rng, steps);
        double log_s = std::log(spec.s0);
        out.at(p, 0, 0) = spec.s0;
        for (int k = 0; k < steps; ++k) {
            const double g = (k < half) ? spec.gamma1 : spec.gamma2;
            log_s += (spec.muC - 0.5 * g * g) * dt + g * sqdt * shocks(k);
            out.at(p, k + 1, 0) = std::exp(log_s);
        }
    }
    return out;
}

BSDAutocorr match_bsd_autocorr(double mu, double sigma, double rho, double s0,
                               int steps) {
    if (steps < 2 || steps % 2 != 0) {
        throw std::invalid_argument("match_bsd_autocorr: steps must be even and >= 2");
    }
    const double gamma1 = sigma / std::sqrt(2.0);
    const double half = static_cast<double>(steps) / 2.0;
    // Var(sum of correlated monthly shocks) == sigma^2 over the year:
    //   (half + 2 rho (half-1)) (g1^2 + g2^2) + 2 rho g1 g2 == steps sigma^2,
    // a quadratic in g2 with g1 fixed at sigma/sqrt(2).
    const double a = half + 2.0 * rho * (half - 1.0);
    const double b = 2.0 * rho * gamma1;
    const double c = a * gamma1 * gamma1 - static_cast<double>(steps) * sigma * sigma;
    const double disc = b * b - 4.0 * a * c;
    if (!(disc >= 0.0) || a == 0.0) {
        throw NumericalError("match_bsd_autocorr: no real solution for gamma2");
    }
    const double gamma2 = (-b + std::sqrt(disc)) / (2.0 * a);
    // Mean of the annual log-return matches mu - sigma^2/2.
    const double muC = mu - 0.5 * sigma * sigma +
                       0.25 * (gamma1 * gamma1 + gamma2 * gamma2);
    BSDAutocorr spec;
    spec.muC = muC;
    spec.gamma1 = gamma1;
    spec.gamma2 = gamma2;
    spec.rho = rho;
    spec.s0 = s0;
    return spec;
}

PathSample simulate_heston(const Heston& spec, const SimGrid& grid) {
    if (!(spec.theta >= spec.sigma * spec.sigma / 4.0)) {
        throw std::invalid_argument(
            "simulate_heston: requires theta >= sigma^2/4 for positivity");
    }
    if (!(spec.s0 > 0.0) || spec.v0 < 0.0) {
        throw std::invalid_argument("simulate_heston: invalid s0 or v0");
    }
    if (std::fabs(spec.rho) > 1.0) {
        throw std::invalid_argument("simulate_heston: |rho| must be <= 1");
    }
    const int steps = grid.total_steps();
    const double dt = grid.horizon / static_cast<double>(steps);
    const double sqdt = std::sqrt(dt);
    const double damp = 1.0 - spec.lambda * dt / 2.0;
    if (!(damp > 0.0)) {
        throw std::invalid_argument("simulate_heston: step too coarse for scheme");
    }
    const double floor_term = (spec.theta - spec.sigma * spec.sigma / 4.0) * dt;
    const double rho_perp = std::sqrt(1.0 - spec.rho * spec.rho);
    PathSample out = PathSample::zeros(grid.paths, steps + 1, 1);
    out.times = grid.node_times();
    for (std::size_t p = 0; p < grid.paths; ++p) {
        Rng rng(grid.seed, p);
        double v = spec.v0;
        double log_s = std::log(spec.s0);
        out.at(p, 0, 0) = spec.s0;
        // Draw order per step: vol shock, then price-idiosyncratic shock.
        for (int k = 0; k < steps; ++k) {
            const double zb = rng.normal();
            const double zp = rng.normal();
            const double db = sqdt * zb;
            const double dw = spec.rho * db + rho_perp * sqdt * zp;
            log_s += -0.5 * v * dt + std::sqrt(v) * dw;
            const double root = std::sqrt(v) + spec.sigma * db / (2.0 * damp);
            v = damp * root * root + floor_term;
            out.at(p, k + 1, 0) = std::exp(log_s);
        }
    }
    return out;
}

PathSample simulate_rough_heston(const RoughHeston& spec, const SimGrid& grid) {
    if (!(spec.hurst > 0.0 && spec.hurst <= 0.5)) {
        throw std::invalid_argument("simulate_rough_heston: hurst must be in (0, 1/2]");
    }
    if (!(spec.s0 > 0.0) || spec.v0 < 0.0) {
        throw std::invalid_argument("simulate_rough_heston: invalid s0 or v0");
    }
    if (std::fabs(spec.rho) > 1.0) {
        throw std::invalid_argument("simulate_rough_heston: |rho| must be <= 1");
    }
    const int steps = grid.total_steps();
    const double dt = grid.horizon / static_cast<double>(steps);
    const double sqdt = std::sqrt(dt);
    const double rho_perp = std::sqrt(1.0 - spec.rho * spec.rho);
    // Exact integrals of the power kernel over each step:
    // weight for lag i is ((i dt)^(H+1/2) - ((i-1) dt)^(H+1/2)) / (dt Gamma(H+3/2)).
    const double expo = spec.hurst + 0.5;
    const double norm = dt * std::tgamma(spec.hurst + 1.5);
    std::vector<double> weight(static_cast<std::size_t>(steps) + 1, 0.0);
    for (int i = 1; i <= steps; ++i) {
        weight[static_cast<std::size_t>(i)] =
            (std::pow(static_cast<double>(i) * dt, expo) -
             std::pow(static_cast<double>(i - 1) * dt, expo)) /
            norm;
    }
    PathSample out = PathSample::zeros(grid.paths, steps + 1, 1);
    out.times = grid.node_times();
    std::vector<double> innovation(static_cast<std::size_t>(steps));
    std::vector<double> v(static_cast<std::size_t>(steps) + 1);
    for (std::size_t p = 0; p < grid.paths; ++p) {
        Rng rng(grid.seed, p);
        v[0] = spec.v0;
        double log_s = std::log(spec.s0);
        out.at(p, 0, 0) = spec.s0;
        // Draw order per step: vol shock, then price-idiosyncratic shock.
        for (int k = 0; k < steps; ++k) {
            const double vk = std::max(v[static_cast<std::size_t>(k)], 0.0);
            const double zb = rng.normal();
            const double zp = rng.normal();
            const double db = sqdt * zb;
            const double dw = spec.rho * db + rho_perp * sqdt * zp;
            log_s += -0.5 * vk * dt + std::sqrt(vk) * dw;
            out.at(p, k + 1, 0) = std::exp(log_s);
            innovation[static_cast<std::size_t>(k)] =
                (spec.theta - spec.lambda * vk) * dt + spec.sigma * std::sqrt(vk) * db;
            double conv = 0.0;
            for (int j = 0; j <= k; ++j) {
                conv += weight[static_cast<std::size_t>(k + 1 - j)] *
                        innovation[static_cast<std::size_t>(j)];
            }
            v[static_cast<std::size_t>(k + 1)] = spec.v0 + conv;
        }
    }
    return out;
}

PathSample simulate_rsar1(const RSAR1& spec, const SimGrid& grid,
                          PathSample* raw_x) {
    validate_rsar1(spec);
    RegimeSampler sampler{stationary_distribution(spec.P), &spec};
    const int steps = grid.total_steps();
    PathSample out = PathSample::zeros(grid.paths, steps + 1, 1);
    out.times = grid.node_times();
    if (raw_x != nullptr) {
        *raw_x = PathSample::zeros(grid.paths, steps, 1);
        raw_x->times.assign(out.times.begin() + 1, out.times.end());
    }
    for (std::size_t p = 0; p < grid.paths; ++p) {
        Rng rng(grid.seed, p);
        // Draw order: one uniform for the initial regime, then per step one
        // uniform (regime transition) followed by one normal (AR noise).
        int regime = sampler.initial(rng);
        double x = spec.x0;
        double level = 0.0;
        out.at(p, 0, 0) = 0.0;
        for (int k = 0; k < steps; ++k) {
            regime = sampler.next(regime, rng);
            const std::size_t r = static_cast<std::size_t>(regime);
            x = spec.mu[r] + spec.phi[r] * (x - spec.mu[r]) +
                spec.sigma[r] * rng.normal();
            level += x;
            out.at(p, k + 1, 0) = level;
            if (raw_x != nullptr) raw_x->at(p, k, 0) = x;
        }
    }
    return out;
}

PathSample simulate_gamma_rw(const GammaRW& spec, const SimGrid& grid) {
    if (!(spec.alpha_shape > 0.0) || !(spec.beta_scale > 0.0)) {
        throw std::invalid_argument("simulate_gamma_rw: shape and scale must be > 0");
    }
    const int steps = grid.total_steps();
    PathSample out = PathSample::zeros(grid.paths, steps + 1, 1);
    out.times = grid.node_times();
    for (std::size_t p = 0; p < grid.paths; ++p) {
        Rng rng(grid.seed, p);
        double level = 0.0;
        out.at(p, 0, 0) = 0.0;
        for (int k = 0; k < steps; ++k) {
            level += spec.gamma_shift + rng.gamma(spec.alpha_shape, spec.beta_scale);
            out.at(p, k + 1, 0) = level;
        }
    }
    return out;
}

PathSample simulate_ou(const OU& spec, const SimGrid& grid) {
    if (!(spec.alpha > 0.0)) {
        throw std::invalid_argument("simulate_ou: alpha must be > 0");
    }
    if (!(spec.sigma >= 0.0)) {
        throw std::invalid_argument("simulate_ou: sigma must be >= 0");
    }
    const int steps = grid.total_steps();
    const double dt = grid.horizon / static_cast<double>(steps);
    const double decay = std::exp(-spec.alpha * dt);
    const double sd = spec.sigma * std::sqrt((1.0 - decay * decay) / (2.0 * spec.alpha));
    const double y0 = spec.y0.value_or(spec.theta);
    PathSample out = PathSample::zeros(grid.paths, steps + 1, 1);
    out.times = grid.node_times();
    for (std::size_t p = 0; p < grid.paths; ++p) {
        Rng rng(grid.seed, p);
        double y = y0;
        out.at(p, 0, 0) = y;
        for (int k = 0; k < steps; ++k) {
            y = spec.theta + (y - spec.theta) * decay + sd * rng.normal();
            out.at(p, k + 1, 0) = y;
        }
    }
    return out;
}

PathSample simulate_fou(const FOU& spec, const SimGrid& grid) {
    if (!(spec.hurst > 0.0 && spec.hurst < 1.0)) {
        throw std::invalid_argument("simulate_fou: hurst must be in (0,1)");
    }
    if (!(spec.alpha > 0.0) || !(spec.sigma >= 0.0)) {
        throw std::invalid_argument("simulate_fou: invalid alpha or sigma");
    }
    const int steps = grid.total_steps();
    const double dt = grid.horizon / static_cast<double>(steps);
    const Eigen::MatrixXd L = fgn_cholesky(spec.hurst, steps, dt);
    const double y0 = spec.y0.value_or(spec.theta);
    PathSample out = PathSample::zeros(grid.paths, steps + 1, 1);
    out.times = grid.node_times();
    for (std::size_t p = 0; p < grid.paths; ++p) {
        Rng rng(grid.seed, p);
        // Euler drift with exact fractional Gaussian increments.
        const Eigen::VectorXd increments = L * draw_normals(rng, steps);
        double y = y0;
        out.at(p, 0, 0) = y;
        for (int k = 0; k < steps; ++k) {
            y += spec.alpha * (spec.theta - y) * dt + spec.sigma * increments(k);
            out.at(p, k + 1, 0) = y;
        }
    }
    return out;
}

PathSample simulate_joint2d(const Joint2D& spec, const SimGrid& grid) {
    if (std::fabs(spec.corr) > 1.0) {
        throw std::invalid_argument("simulate_joint2d: |corr| must be <= 1");
    }
    const RoughHeston& rh = spec.rough;
    if (!(rh.hurst > 0.0 && rh.hurst <= 0.5)) {
        throw std::invalid_argument("simulate_joint2d: hurst must be in (0, 1/2]");
    }
    validate_rsar1(spec.rsar1);
    RegimeSampler sampler{stationary_distribution(spec.rsar1.P), &spec.rsar1};
    const int steps = grid.total_steps();
    const double dt = grid.horizon / static_cast<double>(steps);
    const double sqdt = std::sqrt(dt);
    const double rho = rh.rho;
    const double rho_perp = std::sqrt(1.0 - rho * rho);
    const double corr = spec.corr;
    const double corr_perp = std::sqrt(1.0 - corr * corr);
    const double expo = rh.hurst + 0.5;
    const double norm = dt * std::tgamma(rh.hurst + 1.5);
    std::vector<double> weight(static_cast<std::size_t>(steps) + 1, 0.0);
    for (int i = 1; i <= steps; ++i) {
        weight[static_cast<std::size_t>(i)] =
            (std::pow(static_cast<double>(i) * dt, expo) -
             std::pow(static_cast<double>(i - 1) * dt, expo)) /
            norm;
    }
    PathSample out = PathSample::zeros(grid.paths, steps + 1, 2);
    out.times = grid.node_times();
    std::vector<double> innovation(static_cast<std::size_t>(steps));
    std::vector<double> v(static_cast<std::size_t>(steps) + 1);
    for (std::size_t p = 0; p < grid.paths; ++p) {
        Rng rng(grid.seed, p);
        // Draw order: one uniform for the initial regime; per step one
        // uniform (regime) then three normals (vol shock, price shock,
        // AR-idiosyncratic shock).
        int regime = sampler.initial(rng);
        v[0] = rh.v0;
        double log_s = std::log(rh.s0);
        double x = spec.rsar1.x0;
        double level = 0.0;
        out.at(p, 0, 0) = rh.s0;
        out.at(p, 0, 1) = 1.0;
        for (int k = 0; k < steps; ++k) {
            regime = sampler.next(regime, rng);
            const double z1 = rng.normal(); // drives dB
            const double z2 = rng.normal(); // price-idiosyncratic
            const double z3 = rng.normal(); // AR-idiosyncratic
            const double zw = rho * z1 + rho_perp * z2; // price shock, N(0,1)
            const double eps = corr * zw + corr_perp * z3;
            const double vk = std::max(v[static_cast<std::size_t>(k)], 0.0);
            const double db = sqdt * z1;
            log_s += -0.5 * vk * dt + std::sqrt(vk) * sqdt * zw;
            innovation[static_cast<std::size_t>(k)] =
                (rh.theta - rh.lambda * vk) * dt + rh.sigma * std::sqrt(vk) * db;
            double conv = 0.0;
            for (int j = 0; j <= k; ++j) {
                conv += weight[static_cast<std::size_t>(k + 1 - j)] *
                        innovation[static_cast<std::size_t>(j)];
            }
            v[static_cast<std::size_t>(k + 1)] = rh.v0 + conv;
            const std::size_t r = static_cast<std::size_t>(regime);
            x = spec.rsar1.mu[r] + spec.rsar1.phi[r] * (x - spec.rsar1.mu[r]) +
                spec.rsar1.sigma[r] * eps;
            level += x;
            out.at(p, k + 1, 0) = std::exp(log_s);
            out.at(p, k + 1, 1) = std::exp(level);
        }
    }
    return out;
}

PathSample simulate(const ModelSpec& spec, const SimGrid& grid) {
    struct Visitor {
        const SimGrid& grid;
        PathSample operator()(const FBM& s) const { return simulate_fbm(s, grid); }
        PathSample operator()(const BSD& s) const { return simulate_bsd(s, grid); }
        PathSample operator()(const BSDAutocorr& s) const {
            return simulate_bsd_autocorr(s, grid);
        }
        PathSample operator()(const Heston& s) const { return simulate_heston(s, grid); }
        PathSample operator()(const RoughHeston& s) const {
            return simulate_rough_heston(s, grid);
        }
        PathSample operator()(const RSAR1& s) const { return simulate_rsar1(s, grid); }
        PathSample operator()(const GammaRW& s) const {
            return simulate_gamma_rw(s, grid);
        }
        PathSample operator()(const OU& s) const { return simulate_ou(s, grid); }
        PathSample operator()(const FOU& s) const { return simulate_fou(s, grid); }
        PathSample operator()(const Joint2D& s) const {
            return simulate_joint2d(s, grid);
        }
    };
    return std::visit(Visitor{grid}, spec);
}

std::vector<double> stationary_distribution(
    const std::vector<std::vector<double>>& P) {
    const std::size_t K = P.size();
    if (K == 0) throw std::invalid_argument("stationary_distribution: empty matrix");
    Eigen::MatrixXd A(K, K);
    for (std::size_t i = 0; i < K; ++i) {
        if (P[i].size() != K) {
            throw std::invalid_argument("stationary_distribution: matrix not square");
        }
        for (std::size_t j = 0; j < K; ++j) {
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = P[i][j];
        }
    }
    // Solve pi (P - I) = 0 with sum(pi) = 1; uniqueness requires the kernel
    // of (P^T - I) to be one-dimensional.
    Eigen::MatrixXd M = A.transpose() - Eigen::MatrixXd::Identity(
                                            static_cast<Eigen::Index>(K),
                                            static_cast<Eigen::Index>(K));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    if (lu.dimensionOfKernel() != 1) {
        throw std::invalid_argument(
            "stationary_distribution: chain has no unique stationary law");
    }
    Eigen::VectorXd pi = lu.kernel().col(0);
    const double total = pi.sum();
    if (std::fabs(total) < 1e-12) {
        throw NumericalError("stationary_distribution: degenerate kernel");
    }
    pi /= total;
    std::vector<double> out(K);
    for (std::size_t i = 0; i < K; ++i) {
        const double v = pi(static_cast<Eigen::Index>(i));
        if (v < -1e-10) {
            throw NumericalError(
                "stationary_distribution: negative stationary mass");
        }
        out[i] = std::max(v, 0.0);
    }
    return out;
}

PathSample extract_stride(const PathSample& sample, int stride) {
    if (stride < 1) throw std::invalid_argument("extract_stride: stride must be >= 1");
    if ((sample.nodes - 1) % stride != 0) {
        throw std::invalid_argument(
            "extract_stride: nodes-1 must be divisible by stride");
    }
    const int out_nodes = (sample.nodes - 1) / stride + 1;
    PathSample out = PathSample::zeros(sample.paths(), out_nodes, sample.dim);
    for (int k = 0; k < out_nodes; ++k) {
        out.times[static_cast<std::size_t>(k)] =
            sample.times[static_cast<std::size_t>(k) * static_cast<std::size_t>(stride)];
    }
    for (std::size_t p = 0; p < sample.paths(); ++p) {
        for (int k = 0; k < out_nodes; ++k) {
            for (int j = 0; j < sample.dim; ++j) {
                out.at(p, k, j) = sample.at(p, k * stride, j);
            }
        }
    }
    return out;
}

} // namespace sigval
