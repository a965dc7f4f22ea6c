#include "sigval/signature.hpp"

#include <cstddef>
#include <stdexcept>

namespace sigval {

PiecewisePath PathSample::path(std::size_t p) const {
    PiecewisePath out;
    out.times = times;
    out.values.resize(static_cast<std::size_t>(nodes));
    for (int k = 0; k < nodes; ++k) {
        const double* src = node_ptr(p, k);
        out.values[static_cast<std::size_t>(k)].assign(src, src + dim);
    }
    return out;
}

PathSample PathSample::zeros(std::size_t paths, int nodes, int dim) {
    if (nodes < 1 || dim < 1) {
        throw std::invalid_argument("PathSample: nodes and dim must be positive");
    }
    PathSample s;
    s.dim = dim;
    s.nodes = nodes;
    s.times = uniform_times(nodes, 1.0);
    s.data.assign(paths * static_cast<std::size_t>(nodes) *
                      static_cast<std::size_t>(dim),
                  0.0);
    return s;
}

std::vector<double> PathSample::uniform_times(int nodes, double horizon) {
    std::vector<double> t(static_cast<std::size_t>(nodes));
    if (nodes == 1) {
        t[0] = 0.0;
        return t;
    }
    for (int k = 0; k < nodes; ++k) {
        t[static_cast<std::size_t>(k)] =
            horizon * static_cast<double>(k) / static_cast<double>(nodes - 1);
    }
    return t;
}

TensorSeries signature(const double* nodes, int count, int dim, int order) {
    if (count < 2) {
        throw std::invalid_argument("signature: need at least two nodes");
    }
    if (order < 1) {
        throw std::invalid_argument("signature: order must be >= 1");
    }
    std::vector<double> inc(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) inc[static_cast<std::size_t>(j)] = nodes[dim + j] - nodes[j];
    TensorSeries sig = segment_exp(inc.data(), dim, order);
    for (int k = 1; k + 1 < count; ++k) {
        const double* a = nodes + static_cast<std::size_t>(k) * dim;
        const double* b = a + dim;
        for (int j = 0; j < dim; ++j) inc[static_cast<std::size_t>(j)] = b[j] - a[j];
        sig = tensor_mul(sig, segment_exp(inc.data(), dim, order));
    }
    return sig;
}

namespace {

void validate_path(const PiecewisePath& path) {
    if (path.times.size() < 2) {
        throw std::invalid_argument("signature: need at least two nodes");
    }
    if (path.values.size() != path.times.size()) {
        throw std::invalid_argument("signature: times/values size mismatch");
    }
    const std::size_t d = path.values.front().size();
    if (d == 0) throw std::invalid_argument("signature: empty values");
    for (const auto& v : path.values) {
        if (v.size() != d) {
            throw std::invalid_argument("signature: inconsistent dimensions");
        }
    }
    for (std::size_t k = 1; k < path.times.size(); ++k) {
        if (!(path.times[k] > path.times[k - 1])) {
            throw std::invalid_argument("signature: times must strictly increase");
        }
    }
}

std::vector<double> flatten_nodes(const PiecewisePath& path) {
    const std::size_t d = path.values.front().size();
    std::vector<double> flat;
    flat.reserve(path.values.size() * d);
    for (const auto& v : path.values) flat.insert(flat.end(), v.begin(), v.end());
    return flat;
}

} // namespace

TensorSeries signature(const PiecewisePath& path, int order) {
    validate_path(path);
    const auto flat = flatten_nodes(path);
    return signature(flat.data(), static_cast<int>(path.times.size()),
                     path.dim(), order);
}

TensorSeries log_signature(const PiecewisePath& path, int order) {
    return tensor_log(signature(path, order));
}

std::vector<TensorSeries> batch_signatures(const PathSample& sample,
                                           const SignatureConfig& config) {
    const std::size_t paths = sample.paths();
    std::vector<TensorSeries> out;
    out.reserve(paths);
    for (std::size_t p = 0; p < paths; ++p) {
        TensorSeries sig = signature(sample.node_ptr(p, 0), sample.nodes,
                                     sample.dim, config.order);
        if (config.use_log) sig = tensor_log(sig);
        out.push_back(std::move(sig));
    }
    return out;
}

TensorSeries signature_bruteforce(const PiecewisePath& path, int order,
                                  int refinement) {
    validate_path(path);
    if (refinement < 1) {
        throw std::invalid_argument("signature_bruteforce: refinement must be >= 1");
    }
    const int d = path.dim();
    // Left-point Riemann update of all iterated integrals at once: for each
    // refined step, level n gains (level n-1 before the step) tensor dx.
    // Updating from the top level down keeps the pre-step values intact.
    TensorSeries acc = TensorSeries::unit(d, order);
    std::vector<double> dx(static_cast<std::size_t>(d));
    for (std::size_t seg = 0; seg + 1 < path.times.size(); ++seg) {
        for (int j = 0; j < d; ++j) {
            dx[static_cast<std::size_t>(j)] =
                (path.values[seg + 1][static_cast<std::size_t>(j)] -
                 path.values[seg][static_cast<std::size_t>(j)]) /
                static_cast<double>(refinement);
        }
        for (int s = 0; s < refinement; ++s) {
            for (int n = order; n >= 1; --n) {
                const auto& prev = acc.level(n - 1);
                auto& cur = acc.level(n);
                for (std::size_t u = 0; u < prev.size(); ++u) {
                    const double base = prev[u];
                    if (base == 0.0) continue;
                    double* dst = cur.data() + u * static_cast<std::size_t>(d);
                    for (int j = 0; j < d; ++j) {
                        dst[j] += base * dx[static_cast<std::size_t>(j)];
                    }
                }
            }
        }
    }
    return acc;
}

PiecewisePath reparametrize(const PiecewisePath& path,
                            const std::vector<double>& new_times) {
    validate_path(path);
    if (new_times.size() != path.times.size()) {
        throw std::invalid_argument("reparametrize: node count mismatch");
    }
    for (std::size_t k = 1; k < new_times.size(); ++k) {
        if (!(new_times[k] > new_times[k - 1])) {
            throw std::invalid_argument("reparametrize: times must strictly increase");
        }
    }
    PiecewisePath out = path;
    out.times = new_times;
    return out;
}

} // namespace sigval
