#pragma once

#include <cstddef>
#include <vector>

#include "sigval/tensor_series.hpp"

namespace sigval {

// Single piecewise-linear path: node times plus node values.
struct PiecewisePath {
    std::vector<double> times;               // strictly increasing, size >= 2
    std::vector<std::vector<double>> values; // one vector of size dim per node

    int dim() const {
        return values.empty() ? 0 : static_cast<int>(values.front().size());
    }
    std::size_t nodes() const { return times.size(); }
};

// Batch of piecewise-linear paths sharing one node grid. Data is stored
// row-major as (path, node, coordinate).
struct PathSample {
    int dim = 1;
    int nodes = 0;
    std::vector<double> times; // size == nodes
    std::vector<double> data;  // size == paths() * nodes * dim

    std::size_t paths() const {
        const std::size_t stride =
            static_cast<std::size_t>(nodes) * static_cast<std::size_t>(dim);
        return stride == 0 ? 0 : data.size() / stride;
    }
    double& at(std::size_t p, int k, int j) {
        return data[(p * static_cast<std::size_t>(nodes) +
                     static_cast<std::size_t>(k)) * static_cast<std::size_t>(dim) +
                    static_cast<std::size_t>(j)];
    }
    double at(std::size_t p, int k, int j) const {
        return data[(p * static_cast<std::size_t>(nodes) +
                     static_cast<std::size_t>(k)) * static_cast<std::size_t>(dim) +
                    static_cast<std::size_t>(j)];
    }
    const double* node_ptr(std::size_t p, int k) const {
        return data.data() + (p * static_cast<std::size_t>(nodes) +
                              static_cast<std::size_t>(k)) *
                                 static_cast<std::size_t>(dim);
    }

    PiecewisePath path(std::size_t p) const;

    static PathSample zeros(std::size_t paths, int nodes, int dim);
    // Uniform times 0, T/N, ..., T over the node count.
    static std::vector<double> uniform_times(int nodes, double horizon);
};

struct SignatureConfig {
    int order = 2; // truncation level, 1..8
    bool use_log = false;
};

// Signature of the piecewise-linear interpolation of `count` nodes laid out
// as node-major, dim-minor doubles. Computed with Chen's identity: the
// tensor product of per-segment exponentials.
TensorSeries signature(const double* nodes, int count, int dim, int order);

TensorSeries signature(const PiecewisePath& path, int order);

// Logarithm of the signature in the same truncated algebra.
TensorSeries log_signature(const PiecewisePath& path, int order);

// Signatures (or log-signatures) of every path in the batch.
std::vector<TensorSeries> batch_signatures(const PathSample& sample,
                                           const SignatureConfig& config);

// Left-point Riemann approximation of the iterated integrals on a refined
// grid with `refinement` sub-steps per segment. Slow; used as an
// independent cross-check of `signature`.
TensorSeries signature_bruteforce(const PiecewisePath& path, int order,
                                  int refinement);

// Same nodes, new strictly increasing times with identical endpoints.
PiecewisePath reparametrize(const PiecewisePath& path,
                            const std::vector<double>& new_times);

} // namespace sigval
