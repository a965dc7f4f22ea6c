#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sigval/signature.hpp"

namespace sigval {

// Simulation grid shared by all models. Node times are k * horizon / steps
// computed directly from integers (never accumulated), so dyadic knots such
// as 0.5 are hit exactly.
struct SimGrid {
    double horizon = 1.0;     // years
    int steps_per_year = 12;  // 12 monthly, 252 daily
    std::size_t paths = 1;
    std::uint64_t seed = 0;

    int total_steps() const;
    std::vector<double> node_times() const; // total_steps() + 1 values
};

struct FBM {
    double hurst = 0.5; // in (0,1)
};

// Piecewise-constant volatility: knots are (start_time, value) pairs with
// strictly increasing start times; the first must start at or before 0 and
// each value applies on [start_i, start_{i+1}). Stepping reads gamma at the
// left endpoint of each step.
struct BSD {
    double mu = 0.0;
    std::vector<std::pair<double, double>> vol_knots;
    double s0 = 1.0;
};

// Monthly Gaussian shocks with lag-1 correlation rho (tridiagonal Toeplitz
// covariance), vol gamma1 on the first half of the year and gamma2 on the
// second.
struct BSDAutocorr {
    double muC = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double rho = 0.0;
    double s0 = 1.0;
};

struct Heston {
    double s0 = 1.0;
    double v0 = 0.05;
    double theta = 0.05;
    double lambda = 0.3;
    double sigma = 0.3;
    double rho = -0.7;
};

struct RoughHeston {
    double s0 = 1.0;
    double v0 = 0.05;
    double theta = 0.05;
    double lambda = 0.3;
    double sigma = 0.3;
    double rho = -0.7;
    double hurst = 0.1; // in (0, 1/2]
};

// Regime-switching AR(1) on monthly log-returns. The regime for step k+1 is
// drawn first, then X_{k+1} = mu_S + phi_S (X_k - mu_S) + sigma_S eps.
struct RSAR1 {
    double x0 = 0.0;
    std::vector<double> mu;
    std::vector<double> phi;
    std::vector<double> sigma;
    std::vector<std::vector<double>> P; // row-stochastic transition matrix
};

// I.i.d. monthly log-returns gamma_shift + Gamma(alpha_shape, beta_scale).
struct GammaRW {
    double gamma_shift = 0.0;
    double alpha_shape = 1.0;
    double beta_scale = 1.0;
};

struct OU {
    double theta = 0.0;
    double alpha = 1.0;
    double sigma = 1.0;
    std::optional<double> y0; // defaults to theta
};

struct FOU {
    double hurst = 0.5;
    double theta = 0.0;
    double alpha = 1.0;
    double sigma = 1.0;
    std::optional<double> y0; // defaults to theta
};

// Correlated pair (S, I): rough-Heston price S and regime-switching index
// I = exp(accumulated log-returns), coupled through jointly Gaussian
// monthly shocks with Corr(price shock, AR noise) = corr. Marginal laws of
// both coordinates do not depend on corr.
struct Joint2D {
    RoughHeston rough;
    RSAR1 rsar1;
    double corr = 0.0;
};

using ModelSpec = std::variant<FBM, BSD, BSDAutocorr, Heston, RoughHeston,
                               RSAR1, GammaRW, OU, FOU, Joint2D>;

std::string model_name(const ModelSpec& spec);

// Every simulator derives the stream for path p as Rng(grid.seed, p), so a
// path's draw sequence is independent of the batch size and of how paths
// are distributed over threads. Per-path draw order is documented in each
// implementation.
PathSample simulate_fbm(const FBM& spec, const SimGrid& grid);
PathSample simulate_bsd(const BSD& spec, const SimGrid& grid);
PathSample simulate_bsd_autocorr(const BSDAutocorr& spec, const SimGrid& grid);
PathSample simulate_heston(const Heston& spec, const SimGrid& grid);
PathSample simulate_rough_heston(const RoughHeston& spec, const SimGrid& grid);
// raw_x, if given, receives the AR(1) state series (steps nodes per path).
PathSample simulate_rsar1(const RSAR1& spec, const SimGrid& grid,
                          PathSample* raw_x = nullptr);
PathSample simulate_gamma_rw(const GammaRW& spec, const SimGrid& grid);
PathSample simulate_ou(const OU& spec, const SimGrid& grid);
PathSample simulate_fou(const FOU& spec, const SimGrid& grid);
PathSample simulate_joint2d(const Joint2D& spec, const SimGrid& grid);

PathSample simulate(const ModelSpec& spec, const SimGrid& grid);

// Eigenvalues 1 + 2 rho cos(k pi / (N+1)), k = 1..N, of the N x N unit
// tridiagonal Toeplitz correlation matrix; all must be positive for the
// autocorrelated model to be well defined.
std::vector<double> toeplitz_eigenvalues(double rho, int N);

// Chooses (muC, gamma2) for the autocorrelated model with gamma1 = sigma/sqrt(2)
// so that the annual Gaussian log-return matches the constant-vol model
// N(mu - sigma^2/2, sigma^2) in mean and variance.
BSDAutocorr match_bsd_autocorr(double mu, double sigma, double rho,
                               double s0 = 1.0, int steps = 12);

// Stationary distribution of a row-stochastic matrix; errors unless it is
// unique and non-negative.
std::vector<double> stationary_distribution(
    const std::vector<std::vector<double>>& P);

// Keeps every stride-th node (both endpoints included); (nodes-1) must be
// divisible by stride.
PathSample extract_stride(const PathSample& sample, int stride);

} // namespace sigval
