#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sigval/process_models.hpp"

namespace sigval {

// Mean and central second/third moments of the annual (12-month) log-return.
struct AnnualMoments {
    double m1 = 0.0;
    double m2c = 0.0;
    double m3c = 0.0;
};

struct HurstFit {
    double hurst = 0.0;
    double intercept = 0.0;         // of the xi-on-q regression
    std::vector<double> q_list;
    std::vector<double> xi;         // scaling slope per q
    std::vector<double> beta;       // regression intercept per q
    int max_lag = 0;
};

// Scaling-exponent regression: for each lag L the stride-subsampled q-th
// absolute moment of differences y[(j+1)L] - y[jL] is regressed in log-log
// coordinates against L*dt, giving xi_q; the slope of xi_q against q is the
// Hurst estimate. Lags whose moment vanishes are dropped; at least 10 must
// survive per q.
HurstFit estimate_hurst(const std::vector<double>& y,
                        const std::vector<double>& q_list = {0.5, 1.0, 1.5,
                                                             2.0, 3.0},
                        int max_lag = 252, double dt = 1.0 / 252.0);

// Method of moments for the fractional OU process given the Hurst estimate;
// theta from the mean, sigma from second differences, then alpha from the
// sample variance (alpha depends on sigma, so sigma is computed first).
FOU fit_fou_moments(const std::vector<double>& y, double hurst,
                    double dt = 1.0 / 252.0);

// Conditional MLE of the exact OU AR(1) transition: OLS slope a and
// intercept b of y_{k+1} on y_k with a required in (0,1), mapped back to
// (theta, alpha, sigma).
OU fit_ou_mle(const std::vector<double>& y, double dt = 1.0 / 252.0);

// Exact annual log-return moments of the regime-switching AR(1) by
// enumerating every regime sequence (s_0, ..., s_months) with its chain
// probability; X_0 = spec.x0 and the annual return is X_1 + ... + X_months.
AnnualMoments rsar1_annual_moments(const RSAR1& spec, int months = 12);

// Three-moment match of the Gamma random walk: the annual law 12*gamma +
// Gamma(12*alpha, beta) reproduces the given moments. Requires m2c > 0 and
// m3c > 0.
GammaRW fit_gamma_rw(const AnnualMoments& moments);

// Sample annual moments of a monthly log-return series using 12-month
// windows whose starts step by `step` months.
AnnualMoments sample_annual_moments(const std::vector<double>& returns,
                                    int step = 1);

// Hamilton-filter negative log-likelihood of the two-regime AR(1) with
// regime drawn before the AR update. params order:
// (mu1, mu2, phi1, phi2, sigma1, sigma2, p11, p22). Returns 1e12 when the
// filter degenerates.
double rsar1_negative_loglik(const double* params,
                             const std::vector<double>& returns);

struct Rsar1Fit {
    RSAR1 spec;      // two regimes ordered by mu ascending, x0 = 0
    double loglik = 0.0;
};

// Maximum likelihood via Nelder-Mead on an unconstrained reparametrization
// (tanh for phi, exp for sigma, logistic for the transition diagonal), with
// `starts` random restarts drawn from Rng(seed, start).
Rsar1Fit fit_rsar1_mle(const std::vector<double>& returns, int starts = 20,
                       std::uint64_t seed = 0);

// Derivative-free Nelder-Mead minimizer used by the MLE; exposed for reuse
// and testing. Returns the best point found; fills best_value if non-null.
std::vector<double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, int max_iter = 4000, double xatol = 1e-8,
    double fatol = 1e-10, double* best_value = nullptr);

} // namespace sigval
