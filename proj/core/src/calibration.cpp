#include "sigval/calibration.hpp"
#include "sigval/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sigval/rng.hpp"

namespace sigval {

namespace {

// OLS slope and intercept of y on x.
std::pair<double, double> ols(const std::vector<double>& x,
                              const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw NumericalError("ols: degenerate regressor");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    return {slope, intercept};
}

} // namespace

HurstFit estimate_hurst(const std::vector<double>& y,
                        const std::vector<double>& q_list, int max_lag,
                        double dt) {
    const int N = static_cast<int>(y.size()) - 1;
    if (N < 2 * max_lag) {
        throw std::invalid_argument("estimate_hurst: series too short");
    }
    if (q_list.empty()) throw std::invalid_argument("estimate_hurst: empty q list");
    HurstFit fit;
    fit.q_list = q_list;
    fit.max_lag = max_lag;
    for (const double q : q_list) {
        std::vector<double> lx, ly;
        for (int lag = 1; lag <= max_lag; ++lag) {
            const int k = N / lag;
            if (k < 1) break;
            double moment = 0.0;
            for (int j = 0; j < k; ++j) {
                const double d = y[static_cast<std::size_t>((j + 1) * lag)] -
                                 y[static_cast<std::size_t>(j * lag)];
                moment += std::pow(std::fabs(d), q);
            }
            moment /= static_cast<double>(k);
            if (!(moment > 0.0)) continue; // zero differences: point dropped
            lx.push_back(std::log(static_cast<double>(lag) * dt));
            ly.push_back(std::log(moment));
        }
        if (lx.size() < 10) {
            throw NumericalError("estimate_hurst: fewer than 10 usable lags");
        }
        const auto [slope, intercept] = ols(lx, ly);
        fit.xi.push_back(slope);
        fit.beta.push_back(intercept);
    }
    const auto [slope, intercept] = ols(q_list, fit.xi);
    fit.hurst = slope;
    fit.intercept = intercept;
    return fit;
}

FOU fit_fou_moments(const std::vector<double>& y, double hurst, double dt) {
    const int N = static_cast<int>(y.size()) - 1;
    if (N < 3) throw std::invalid_argument("fit_fou_moments: series too short");
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw std::invalid_argument("fit_fou_moments: hurst must be in (0,1)");
    }
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 1; k <= N; ++k) {
        const double v = y[static_cast<std::size_t>(k)];
        sum += v;
        sum_sq += v * v;
    }
    const double theta = sum / static_cast<double>(N);
    // Second differences of y_1..y_N.
    double dd_sq = 0.0;
    for (int k = 1; k + 2 <= N; ++k) {
        const double d = y[static_cast<std::size_t>(k + 2)] -
                         2.0 * y[static_cast<std::size_t>(k + 1)] +
                         y[static_cast<std::size_t>(k)];
        dd_sq += d * d;
    }
    const double two_h = 2.0 * hurst;
    const double sigma2 =
        dd_sq / (static_cast<double>(N) * (4.0 - std::pow(2.0, two_h)) *
                 std::pow(dt, two_h));
    const double den = static_cast<double>(N) * sum_sq - sum * sum;
    if (!(den > 0.0) || !(sigma2 > 0.0)) {
        throw NumericalError("fit_fou_moments: degenerate variance");
    }
    const double num = static_cast<double>(N) * static_cast<double>(N) * sigma2 *
                       hurst * std::tgamma(two_h);
    FOU spec;
    spec.hurst = hurst;
    spec.theta = theta;
    spec.sigma = std::sqrt(sigma2);
    spec.alpha = std::pow(num / den, 1.0 / two_h);
    return spec;
}

OU fit_ou_mle(const std::vector<double>& y, double dt) {
    if (y.size() < 3) throw std::invalid_argument("fit_ou_mle: series too short");
    const std::size_t n = y.size() - 1;
    double mx = 0.0, mz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += y[i];
        mz += y[i + 1];
    }
    mx /= static_cast<double>(n);
    mz /= static_cast<double>(n);
    double vx = 0.0, cxz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        vx += (y[i] - mx) * (y[i] - mx);
        cxz += (y[i] - mx) * (y[i + 1] - mz);
    }
    vx /= static_cast<double>(n);
    cxz /= static_cast<double>(n);
    if (!(vx > 0.0)) throw NumericalError("fit_ou_mle: constant series");
    const double a = cxz / vx;
    if (!(a > 0.0 && a < 1.0)) {
        throw NumericalError(
            "fit_ou_mle: AR(1) slope outside (0,1), series not mean-reverting");
    }
    const double b = mz - a * mx;
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i + 1] - a * y[i] - b;
        s2 += r * r;
    }
    s2 /= static_cast<double>(n);
    OU spec;
    spec.alpha = -std::log(a) / dt;
    spec.theta = b / (1.0 - a);
    spec.sigma = std::sqrt(s2 * 2.0 * spec.alpha / (1.0 - a * a));
    return spec;
}

AnnualMoments rsar1_annual_moments(const RSAR1& spec, int months) {
    const std::size_t K = spec.mu.size();
    if (K == 0 || spec.phi.size() != K || spec.sigma.size() != K ||
        spec.P.size() != K) {
        throw std::invalid_argument("rsar1_annual_moments: invalid spec");
    }
    if (months < 1 || months > 18) {
        throw std::invalid_argument("rsar1_annual_moments: months out of range");
    }
    double paths_count = 1.0;
    for (int k = 0; k <= months; ++k) paths_count *= static_cast<double>(K);
    if (paths_count > 2e7) {
        throw std::invalid_argument("rsar1_annual_moments: enumeration too large");
    }
    const std::vector<double> pi = stationary_distribution(spec.P);

    // Enumerate regime sequences (s_0, ..., s_months). Conditional on the
    // sequence the annual sum is Gaussian; accumulate the mixture moments.
    std::vector<int> seq(static_cast<std::size_t>(months) + 1, 0);
    struct Component {
        double weight;
        double mean;
        double var;
    };
    std::vector<Component> comps;
    comps.reserve(static_cast<std::size_t>(paths_count));
    for (;;) {
        double w = pi[static_cast<std::size_t>(seq[0])];
        for (int k = 1; k <= months; ++k) {
            w *= spec.P[static_cast<std::size_t>(seq[static_cast<std::size_t>(k - 1)])]
                       [static_cast<std::size_t>(seq[static_cast<std::size_t>(k)])];
        }
        if (w > 0.0) {
            // Conditional mean: M_k = mu_k + phi_k (M_{k-1} - mu_k).
            double m = spec.x0;
            double mean_sum = 0.0;
            for (int k = 1; k <= months; ++k) {
                const std::size_t r = static_cast<std::size_t>(seq[static_cast<std::size_t>(k)]);
                m = spec.mu[r] + spec.phi[r] * (m - spec.mu[r]);
                mean_sum += m;
            }
            // Noise eps_j enters X_j..X_months through phi products:
            // its coefficient in the sum is sigma_{s_j} * tail_j with
            // tail_j = 1 + phi_{s_{j+1}} tail_{j+1}, tail_months = 1.
            double var = 0.0;
            double tail = 1.0;
            for (int j = months; j >= 1; --j) {
                const std::size_t r = static_cast<std::size_t>(seq[static_cast<std::size_t>(j)]);
                const double c = spec.sigma[r] * tail;
                var += c * c;
                tail = 1.0 + spec.phi[r] * tail;
            }
            comps.push_back({w, mean_sum, var});
        }
        int pos = months;
        while (pos >= 0) {
            seq[static_cast<std::size_t>(pos)]++;
            if (seq[static_cast<std::size_t>(pos)] < static_cast<int>(K)) break;
            seq[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }

    double m1 = 0.0;
    for (const auto& c : comps) m1 += c.weight * c.mean;
    double m2c = 0.0, m3c = 0.0;
    for (const auto& c : comps) {
        const double d = c.mean - m1;
        m2c += c.weight * (d * d + c.var);
        m3c += c.weight * (d * d * d + 3.0 * d * c.var);
    }
    AnnualMoments out;
    out.m1 = m1;
    out.m2c = m2c;
    out.m3c = m3c;
    return out;
}

GammaRW fit_gamma_rw(const AnnualMoments& moments) {
    if (!(moments.m2c > 0.0)) {
        throw std::invalid_argument("fit_gamma_rw: m2c must be positive");
    }
    if (!(moments.m3c > 0.0)) {
        throw std::invalid_argument(
            "fit_gamma_rw: m3c must be positive (Gamma noise is right-skewed)");
    }
    GammaRW spec;
    spec.beta_scale = moments.m3c / (2.0 * moments.m2c);
    spec.alpha_shape = moments.m2c / (12.0 * spec.beta_scale * spec.beta_scale);
    spec.gamma_shift = (moments.m1 - 12.0 * spec.alpha_shape * spec.beta_scale) / 12.0;
    return spec;
}

AnnualMoments sample_annual_moments(const std::vector<double>& returns,
                                    int step) {
    if (step < 1) throw std::invalid_argument("sample_annual_moments: step >= 1");
    if (returns.size() < 12) {
        throw std::invalid_argument("sample_annual_moments: need >= 12 returns");
    }
    std::vector<double> annual;
    for (std::size_t k = 0; k + 12 <= returns.size();
         k += static_cast<std::size_t>(step)) {
        double s = 0.0;
        for (std::size_t i = 0; i < 12; ++i) s += returns[k + i];
        annual.push_back(s);
    }
    const double n = static_cast<double>(annual.size());
    double m1 = 0.0;
    for (double a : annual) m1 += a;
    m1 /= n;
    double m2c = 0.0, m3c = 0.0;
    for (double a : annual) {
        const double d = a - m1;
        m2c += d * d;
        m3c += d * d * d;
    }
    AnnualMoments out;
    out.m1 = m1;
    out.m2c = m2c / n;
    out.m3c = m3c / n;
    return out;
}

double rsar1_negative_loglik(const double* p,
                             const std::vector<double>& returns) {
    const double mu[2] = {p[0], p[1]};
    const double phi[2] = {p[2], p[3]};
    const double sg[2] = {p[4], p[5]};
    const double p11 = p[6];
    const double p22 = p[7];
    if (!(sg[0] > 0.0) || !(sg[1] > 0.0) || !(p11 > 0.0 && p11 < 1.0) ||
        !(p22 > 0.0 && p22 < 1.0)) {
        return 1e12;
    }
    // Stationary start: pi proportional to (1-p22, 1-p11).
    const double norm0 = (1.0 - p22) + (1.0 - p11);
    double f0 = (1.0 - p22) / norm0;
    double f1 = (1.0 - p11) / norm0;
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    double ll = 0.0;
    for (std::size_t t = 1; t < returns.size(); ++t) {
        const double pr0 = f0 * p11 + f1 * (1.0 - p22);
        const double pr1 = f0 * (1.0 - p11) + f1 * p22;
        const double e0 = (returns[t] - mu[0] - phi[0] * (returns[t - 1] - mu[0])) / sg[0];
        const double e1 = (returns[t] - mu[1] - phi[1] * (returns[t - 1] - mu[1])) / sg[1];
        const double d0 = std::exp(-0.5 * e0 * e0) * inv_sqrt_2pi / sg[0];
        const double d1 = std::exp(-0.5 * e1 * e1) * inv_sqrt_2pi / sg[1];
        const double j0 = pr0 * d0;
        const double j1 = pr1 * d1;
        const double s = j0 + j1;
        if (!(s > 0.0) || !std::isfinite(s)) return 1e12;
        ll += std::log(s);
        f0 = j0 / s;
        f1 = j1 / s;
    }
    return -ll;
}

std::vector<double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, int max_iter, double xatol, double fatol,
    double* best_value) {
    const std::size_t n = x0.size();
    if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");
    const double reflect = 1.0, expand = 2.0, contract = 0.5, shrink = 0.5;
    // Initial simplex: 5% perturbation per coordinate (absolute step for
    // zero coordinates).
    std::vector<std::vector<double>> sim(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        if (sim[i + 1][i] != 0.0) {
            sim[i + 1][i] *= 1.05;
        } else {
            sim[i + 1][i] = 0.00025;
        }
    }
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fs[i] = f(sim[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&]() {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s2[i] = sim[order[i]];
            f2[i] = fs[order[i]];
        }
        sim.swap(s2);
        fs.swap(f2);
    };
    sort_simplex();

    std::vector<double> centroid(n), candidate(n);
    for (int iter = 0; iter < max_iter; ++iter) {
        double max_dx = 0.0, max_df = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            max_df = std::max(max_df, std::fabs(fs[i] - fs[0]));
            for (std::size_t j = 0; j < n; ++j) {
                max_dx = std::max(max_dx, std::fabs(sim[i][j] - sim[0][j]));
            }
        }
        if (max_dx <= xatol && max_df <= fatol) break;

        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += sim[i][j];
            centroid[j] = s / static_cast<double>(n);
        }
        auto blend = [&](double coeff) {
            for (std::size_t j = 0; j < n; ++j) {
                candidate[j] = centroid[j] + coeff * (centroid[j] - sim[n][j]);
            }
        };
        blend(reflect);
        const std::vector<double> xr = candidate;
        const double fr = f(xr);
        bool do_shrink = false;
        if (fr < fs[0]) {
            blend(reflect * expand);
            const double fe = f(candidate);
            if (fe < fr) {
                sim[n] = candidate;
                fs[n] = fe;
            } else {
                sim[n] = xr;
                fs[n] = fr;
            }
        } else if (fr < fs[n - 1]) {
            sim[n] = xr;
            fs[n] = fr;
        } else if (fr < fs[n]) {
            blend(reflect * contract);
            const double fc = f(candidate);
            if (fc <= fr) {
                sim[n] = candidate;
                fs[n] = fc;
            } else {
                do_shrink = true;
            }
        } else {
            // Inside contraction toward the worst vertex.
            for (std::size_t j = 0; j < n; ++j) {
                candidate[j] = centroid[j] - contract * (centroid[j] - sim[n][j]);
            }
            const double fcc = f(candidate);
            if (fcc < fs[n]) {
                sim[n] = candidate;
                fs[n] = fcc;
            } else {
                do_shrink = true;
            }
        }
        if (do_shrink) {
            for (std::size_t i = 1; i <= n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    sim[i][j] = sim[0][j] + shrink * (sim[i][j] - sim[0][j]);
                }
                fs[i] = f(sim[i]);
            }
        }
        sort_simplex();
    }
    if (best_value != nullptr) *best_value = fs[0];
    return sim[0];
}

Rsar1Fit fit_rsar1_mle(const std::vector<double>& returns, int starts,
                       std::uint64_t seed) {
    if (returns.size() < 20) {
        throw std::invalid_argument("fit_rsar1_mle: series too short");
    }
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(returns.size());
    double var = 0.0;
    for (double r : returns) var += (r - mean) * (r - mean);
    var /= static_cast<double>(returns.size());
    const double sd = std::sqrt(var);
    if (!(sd > 0.0)) throw std::invalid_argument("fit_rsar1_mle: constant series");

    // Unconstrained parametrization: (mu1, mu2, atanh(phi1), atanh(phi2),
    // log(sg1), log(sg2), logit(p11), logit(p22)).
    auto unpack = [](const std::vector<double>& u, double* p) {
        p[0] = u[0];
        p[1] = u[1];
        p[2] = std::tanh(u[2]);
        p[3] = std::tanh(u[3]);
        p[4] = std::exp(u[4]);
        p[5] = std::exp(u[5]);
        p[6] = 1.0 / (1.0 + std::exp(-u[6]));
        p[7] = 1.0 / (1.0 + std::exp(-u[7]));
    };
    auto objective = [&](const std::vector<double>& u) {
        double p[8];
        unpack(u, p);
        return rsar1_negative_loglik(p, returns);
    };

    std::vector<double> best_u;
    double best_f = std::numeric_limits<double>::infinity();
    for (int s = 0; s < starts; ++s) {
        Rng rng(seed, static_cast<std::uint64_t>(s));
        std::vector<double> u0(8);
        u0[0] = mean + rng.normal() * sd;
        u0[1] = mean + rng.normal() * sd;
        u0[2] = std::atanh(0.8 * rng.uniform());
        u0[3] = std::atanh(0.8 * rng.uniform());
        u0[4] = std::log(sd * (0.3 + 1.2 * rng.uniform()));
        u0[5] = std::log(sd * (0.3 + 1.2 * rng.uniform()));
        u0[6] = 2.5 + rng.normal();
        u0[7] = 2.5 + rng.normal();
        double fbest = 0.0;
        std::vector<double> u = nelder_mead(objective, std::move(u0), 4000,
                                            1e-8, 1e-10, &fbest);
        if (fbest < best_f) {
            best_f = fbest;
            best_u = std::move(u);
        }
    }
    double p[8];
    unpack(best_u, p);
    if (p[0] > p[1]) {
        std::swap(p[0], p[1]);
        std::swap(p[2], p[3]);
        std::swap(p[4], p[5]);
        std::swap(p[6], p[7]);
    }
    Rsar1Fit fit;
    fit.spec.x0 = 0.0;
    fit.spec.mu = {p[0], p[1]};
    fit.spec.phi = {p[2], p[3]};
    fit.spec.sigma = {p[4], p[5]};
    fit.spec.P = {{p[6], 1.0 - p[6]}, {1.0 - p[7], p[7]}};
    fit.loglik = -best_f;
    return fit;
}

} // namespace sigval
