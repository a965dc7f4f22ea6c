#include "sigval/mmd_test.hpp"
#include "sigval/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigval {

Eigen::MatrixXd feature_matrix(const std::vector<TensorSeries>& sigs,
                               int from_level) {
    if (sigs.empty()) {
        throw std::invalid_argument("feature_matrix: empty signature list");
    }
    const auto first = flatten_from(sigs.front(), from_level);
    Eigen::MatrixXd F(static_cast<Eigen::Index>(sigs.size()),
                      static_cast<Eigen::Index>(first.size()));
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        const auto row = flatten_from(sigs[i], from_level);
        if (row.size() != first.size()) {
            throw std::invalid_argument("feature_matrix: inconsistent shapes");
        }
        for (std::size_t j = 0; j < row.size(); ++j) {
            F(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
        }
    }
    return F;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& features) {
    return features * features.transpose();
}

double mmd2_unbiased(const Eigen::MatrixXd& gram, int m, int n) {
    if (m < 2 || n < 2) {
        throw std::invalid_argument("mmd2_unbiased: m and n must be >= 2");
    }
    if (gram.rows() != gram.cols() || gram.rows() != m + n) {
        throw std::invalid_argument("mmd2_unbiased: gram must be (m+n) square");
    }
    double within_a = 0.0;
    double within_b = 0.0;
    double cross = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i != j) within_a += gram(i, j);
        }
    }
    for (int i = m; i < m + n; ++i) {
        for (int j = m; j < m + n; ++j) {
            if (i != j) within_b += gram(i, j);
        }
    }
    for (int i = 0; i < m; ++i) {
        for (int j = m; j < m + n; ++j) cross += gram(i, j);
    }
    return within_a / (static_cast<double>(m) * (m - 1)) +
           within_b / (static_cast<double>(n) * (n - 1)) -
           2.0 * cross / (static_cast<double>(m) * n);
}

double mmd2_unbiased_features(const Eigen::MatrixXd& fa,
                              const Eigen::MatrixXd& fb) {
    const int m = static_cast<int>(fa.rows());
    const int n = static_cast<int>(fb.rows());
    if (m < 2 || n < 2) {
        throw std::invalid_argument("mmd2_unbiased_features: m and n must be >= 2");
    }
    if (fa.cols() != fb.cols()) {
        throw std::invalid_argument("mmd2_unbiased_features: feature dim mismatch");
    }
    // sum_{i != j} k(a_i, a_j) = ||sum_i phi_i||^2 - sum_i ||phi_i||^2.
    const Eigen::VectorXd sa = fa.colwise().sum();
    const Eigen::VectorXd sb = fb.colwise().sum();
    const double norms_a = fa.array().square().sum();
    const double norms_b = fb.array().square().sum();
    const double within_a = sa.squaredNorm() - norms_a;
    const double within_b = sb.squaredNorm() - norms_b;
    const double cross = sa.dot(sb);
    return within_a / (static_cast<double>(m) * (m - 1)) +
           within_b / (static_cast<double>(n) * (n - 1)) -
           2.0 * cross / (static_cast<double>(m) * n);
}

std::vector<double> null_spectrum(const Eigen::MatrixXd& gram, int top_count) {
    if (gram.rows() != gram.cols() || gram.rows() < 1) {
        throw std::invalid_argument("null_spectrum: gram must be square");
    }
    if (top_count < 1) {
        throw std::invalid_argument("null_spectrum: top_count must be >= 1");
    }
    const Eigen::Index N = gram.rows();
    // Double centering: HAH = A - row means - column means + grand mean.
    const Eigen::VectorXd row_mean = gram.rowwise().mean();
    const double grand_mean = gram.mean();
    Eigen::MatrixXd centered = gram;
    centered.colwise() -= row_mean;
    centered.rowwise() -= row_mean.transpose();
    centered.array() += grand_mean;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(centered,
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("null_spectrum: eigensolver failed");
    }
    const Eigen::VectorXd ev = solver.eigenvalues(); // ascending
    const int keep = std::min<int>(top_count, static_cast<int>(N));
    std::vector<double> out(static_cast<std::size_t>(keep));
    for (int i = 0; i < keep; ++i) {
        out[static_cast<std::size_t>(i)] = ev(N - 1 - i);
    }
    return out;
}

std::vector<double> null_draws(const std::vector<double>& eigenvalues, int m,
                               int n, int count, std::uint64_t seed,
                               std::uint64_t stream_tag) {
    if (eigenvalues.empty()) {
        throw std::invalid_argument("null_draws: empty eigenvalue list");
    }
    if (m < 1 || n < 1) {
        throw std::invalid_argument("null_draws: m and n must be >= 1");
    }
    const double N = static_cast<double>(m) + static_cast<double>(n);
    const double rho = static_cast<double>(m) / N;
    const double scale = 1.0 / (rho * (1.0 - rho));
    std::vector<double> draws(static_cast<std::size_t>(count));
    for (int r = 0; r < count; ++r) {
        Rng rng(seed, stream_tag, static_cast<std::uint64_t>(r));
        double sum = 0.0;
        for (const double nu : eigenvalues) {
            const double g = rng.normal();
            sum += (nu / N) * (g * g - 1.0);
        }
        draws[static_cast<std::size_t>(r)] = scale * sum;
    }
    return draws;
}

double threshold_from_draws(std::vector<double> draws, double level) {
    if (draws.empty()) {
        throw std::invalid_argument("threshold_from_draws: no draws");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("threshold_from_draws: level must be in (0,1)");
    }
    std::sort(draws.begin(), draws.end());
    const double D = static_cast<double>(draws.size());
    std::size_t idx = static_cast<std::size_t>(std::ceil((1.0 - level) * D));
    if (idx == 0) idx = 1;
    if (idx > draws.size()) idx = draws.size();
    return draws[idx - 1];
}

double p_value_from_draws(const std::vector<double>& draws, double statistic) {
    if (draws.empty()) {
        throw std::invalid_argument("p_value_from_draws: no draws");
    }
    std::size_t count = 0;
    for (const double d : draws) {
        if (d >= statistic) ++count;
    }
    return (1.0 + static_cast<double>(count)) /
           (1.0 + static_cast<double>(draws.size()));
}

TestResult two_sample_test_from_signatures(std::vector<TensorSeries> sigs_a,
                                           std::vector<TensorSeries> sigs_b,
                                           const KernelConfig& cfg, double level,
                                           std::uint64_t seed,
                                           int null_draw_count,
                                           int top_eigenvalues) {
    const int m = static_cast<int>(sigs_a.size());
    const int n = static_cast<int>(sigs_b.size());
    if (m < 2 || n < 2) {
        throw std::invalid_argument("two_sample_test: m and n must be >= 2");
    }
    if (cfg.transform.rescale) rescale_signatures(sigs_a, sigs_b);

    const Eigen::MatrixXd fa = feature_matrix(sigs_a, cfg.from_level);
    const Eigen::MatrixXd fb = feature_matrix(sigs_b, cfg.from_level);
    Eigen::MatrixXd pooled(m + n, fa.cols());
    pooled.topRows(m) = fa;
    pooled.bottomRows(n) = fb;
    const Eigen::MatrixXd gram = gram_matrix(pooled);

    TestResult res;
    res.m = m;
    res.n = n;
    res.N = m + n;
    res.level = level;
    res.seed = seed;
    res.null_draw_count = null_draw_count;
    res.top_eigenvalues = top_eigenvalues;
    res.config = cfg;
    res.mmd2 = mmd2_unbiased(gram, m, n);
    res.statistic = static_cast<double>(res.N) * res.mmd2;
    res.eigenvalues = null_spectrum(gram, top_eigenvalues);
    const auto draws = null_draws(res.eigenvalues, m, n, null_draw_count, seed);
    res.threshold = threshold_from_draws(draws, level);
    res.p_value = p_value_from_draws(draws, res.statistic);
    res.reject = res.statistic > res.threshold;
    return res;
}

TestResult two_sample_test(const PathSample& sample_a,
                           const PathSample& sample_b, const KernelConfig& cfg,
                           double level, std::uint64_t seed, int null_draw_count,
                           int top_eigenvalues) {
    const PathSample ta = apply_transform(sample_a, cfg.transform);
    const PathSample tb = apply_transform(sample_b, cfg.transform);
    return two_sample_test_from_signatures(
        batch_signatures(ta, cfg.signature_cfg),
        batch_signatures(tb, cfg.signature_cfg), cfg, level, seed,
        null_draw_count, top_eigenvalues);
}

KsResult ks_two_sample(std::vector<double> xs, std::vector<double> ys) {
    if (xs.empty() || ys.empty()) {
        throw std::invalid_argument("ks_two_sample: empty sample");
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const std::size_t m = xs.size();
    const std::size_t n = ys.size();
    double d = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < m && j < n) {
        const double x = (xs[i] <= ys[j]) ? xs[i] : ys[j];
        while (i < m && xs[i] <= x) ++i;
        while (j < n && ys[j] <= x) ++j;
        const double diff = std::fabs(static_cast<double>(i) / static_cast<double>(m) -
                                      static_cast<double>(j) / static_cast<double>(n));
        if (diff > d) d = diff;
    }
    KsResult res;
    res.statistic = d;
    const double en = std::sqrt(static_cast<double>(m) * static_cast<double>(n) /
                                static_cast<double>(m + n));
    const double x = en * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        p += sign * 2.0 * std::exp(-2.0 * x * x * static_cast<double>(k) *
                                   static_cast<double>(k));
        sign = -sign;
    }
    res.p_value = std::min(1.0, std::max(0.0, p));
    return res;
}

} // namespace sigval
