#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sigval/path_transforms.hpp"
#include "sigval/rng.hpp"
#include "sigval/signature.hpp"
#include "sigval/tensor_series.hpp"

namespace sigval {

struct KernelConfig {
    SignatureConfig signature_cfg;
    TransformSpec transform;
    // First signature level entering the kernel; level 0 is always excluded.
    int from_level = 1;
};

struct TestResult {
    double mmd2 = 0.0;      // unbiased MMD^2 estimate, may be negative
    double statistic = 0.0; // N * mmd2, compared against the null draws
    double threshold = 0.0;
    double p_value = 1.0;
    bool reject = false;
    int m = 0;
    int n = 0;
    int N = 0;
    double level = 0.01;
    std::vector<double> eigenvalues;
    std::uint64_t seed = 0;
    int null_draw_count = 10000;
    int top_eigenvalues = 20;
    KernelConfig config;
};

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Rows are the flattened signature coefficients of levels
// from_level..order, so kernel values are plain dot products of rows.
Eigen::MatrixXd feature_matrix(const std::vector<TensorSeries>& sigs,
                               int from_level);

// Pooled Gram matrix of the stacked feature rows.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& features);

// Unbiased two-sample MMD^2 from a pooled (m+n)x(m+n) Gram matrix whose
// first m rows belong to sample a.
double mmd2_unbiased(const Eigen::MatrixXd& gram, int m, int n);

// Same quantity straight from the two feature matrices, O(rows x cols);
// avoids materializing the Gram matrix in repeated power-study use.
double mmd2_unbiased_features(const Eigen::MatrixXd& fa,
                              const Eigen::MatrixXd& fb);

// Top eigenvalues of the centred Gram matrix HAH, H = I - (1/N)11^T,
// in decreasing order. Returns at most top_count values (fewer if N is
// smaller).
std::vector<double> null_spectrum(const Eigen::MatrixXd& gram, int top_count = 20);

// Draws from the asymptotic null law of N*MMD^2:
//   (1/(rho(1-rho))) * sum_l (nu_l/N) * (G_l^2 - 1),  rho = m/N.
// Draw r consumes its own substream (seed, tag, r) so results do not
// depend on evaluation order or thread count.
std::vector<double> null_draws(const std::vector<double>& eigenvalues, int m,
                               int n, int count, std::uint64_t seed,
                               std::uint64_t stream_tag = 0);

// Empirical (1-level) quantile: sorted_draws[ceil((1-level)*D) - 1].
double threshold_from_draws(std::vector<double> draws, double level);

// (1 + #{draws >= statistic}) / (1 + #draws); never exactly zero, with
// resolution 1/(#draws + 1).
double p_value_from_draws(const std::vector<double>& draws, double statistic);

// Full test between two path samples: applies cfg.transform to both,
// computes signatures (log-signatures if requested), optionally rescales
// them jointly, then runs the spectral test with the null spectrum taken
// from the pooled Gram matrix of the two actual samples.
TestResult two_sample_test(const PathSample& sample_a,
                           const PathSample& sample_b, const KernelConfig& cfg,
                           double level, std::uint64_t seed,
                           int null_draw_count = 10000,
                           int top_eigenvalues = 20);

// Same test, starting from already-computed signature lists.
TestResult two_sample_test_from_signatures(std::vector<TensorSeries> sigs_a,
                                           std::vector<TensorSeries> sigs_b,
                                           const KernelConfig& cfg, double level,
                                           std::uint64_t seed,
                                           int null_draw_count = 10000,
                                           int top_eigenvalues = 20);

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
// 2 sum_k (-1)^(k-1) exp(-2 k^2 x^2) at x = sqrt(mn/(m+n)) * D.
KsResult ks_two_sample(std::vector<double> xs, std::vector<double> ys);

} // namespace sigval
