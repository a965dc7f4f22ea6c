#include "sigval/tensor_series.hpp"

#include <cmath>
#include <stdexcept>

namespace sigval {

std::size_t level_size(int dim, int level) {
    std::size_t s = 1;
    for (int i = 0; i < level; ++i) s *= static_cast<std::size_t>(dim);
    return s;
}

TensorSeries::TensorSeries(int dim, int order) : dim_(dim), order_(order) {
    if (dim < 1) throw std::invalid_argument("TensorSeries: dim must be >= 1");
    if (order < 0) throw std::invalid_argument("TensorSeries: order must be >= 0");
    levels_.resize(static_cast<std::size_t>(order) + 1);
    for (int n = 0; n <= order; ++n) {
        levels_[static_cast<std::size_t>(n)].assign(level_size(dim, n), 0.0);
    }
}

TensorSeries TensorSeries::unit(int dim, int order) {
    TensorSeries t(dim, order);
    t.levels_[0][0] = 1.0;
    return t;
}

std::size_t TensorSeries::size() const {
    std::size_t total = 0;
    for (const auto& lv : levels_) total += lv.size();
    return total;
}

namespace {

void check_compatible(const TensorSeries& a, const TensorSeries& b) {
    if (a.dim() != b.dim() || a.order() != b.order()) {
        throw std::invalid_argument("TensorSeries: dim/order mismatch");
    }
}

} // namespace

TensorSeries& TensorSeries::operator+=(const TensorSeries& other) {
    check_compatible(*this, other);
    for (int n = 0; n <= order_; ++n) {
        auto& dst = levels_[static_cast<std::size_t>(n)];
        const auto& src = other.level(n);
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
    return *this;
}

TensorSeries& TensorSeries::operator-=(const TensorSeries& other) {
    check_compatible(*this, other);
    for (int n = 0; n <= order_; ++n) {
        auto& dst = levels_[static_cast<std::size_t>(n)];
        const auto& src = other.level(n);
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
    }
    return *this;
}

TensorSeries& TensorSeries::operator*=(double c) {
    for (auto& lv : levels_) {
        for (double& x : lv) x *= c;
    }
    return *this;
}

TensorSeries tensor_mul(const TensorSeries& a, const TensorSeries& b) {
    check_compatible(a, b);
    const int d = a.dim();
    const int R = a.order();
    TensorSeries c(d, R);
    for (int n = 0; n <= R; ++n) {
        auto& out = c.level(n);
        for (int i = 0; i <= n; ++i) {
            const auto& ai = a.level(i);
            const auto& bj = b.level(n - i);
            const std::size_t block = bj.size();
            for (std::size_t u = 0; u < ai.size(); ++u) {
                const double au = ai[u];
                if (au == 0.0) continue;
                double* dst = out.data() + u * block;
                for (std::size_t v = 0; v < block; ++v) dst[v] += au * bj[v];
            }
        }
    }
    return c;
}

TensorSeries tensor_exp(const TensorSeries& x) {
    if (x.scalar() != 0.0) {
        throw std::invalid_argument("tensor_exp: level-0 term must be zero");
    }
    const int R = x.order();
    TensorSeries result = TensorSeries::unit(x.dim(), R);
    TensorSeries term = TensorSeries::unit(x.dim(), R);
    for (int k = 1; k <= R; ++k) {
        term = tensor_mul(term, x);
        term *= 1.0 / static_cast<double>(k);
        result += term;
    }
    return result;
}

TensorSeries tensor_log(const TensorSeries& t) {
    if (t.scalar() != 1.0) {
        throw std::invalid_argument("tensor_log: level-0 term must be one");
    }
    const int R = t.order();
    TensorSeries y = t;
    y.level(0)[0] = 0.0;
    TensorSeries result(t.dim(), R);
    TensorSeries power = y;
    double sign = 1.0;
    for (int k = 1; k <= R; ++k) {
        TensorSeries term = power;
        term *= sign / static_cast<double>(k);
        result += term;
        if (k < R) power = tensor_mul(power, y);
        sign = -sign;
    }
    return result;
}

double inner_product(const TensorSeries& a, const TensorSeries& b,
                     int from_level) {
    check_compatible(a, b);
    if (from_level < 0 || from_level > a.order()) {
        throw std::invalid_argument("inner_product: from_level out of range");
    }
    double total = 0.0;
    for (int n = from_level; n <= a.order(); ++n) {
        const auto& an = a.level(n);
        const auto& bn = b.level(n);
        double s = 0.0;
        for (std::size_t i = 0; i < an.size(); ++i) s += an[i] * bn[i];
        total += s;
    }
    return total;
}

TensorSeries dilate(const TensorSeries& t, double lambda) {
    TensorSeries out = t;
    double factor = 1.0;
    for (int n = 1; n <= t.order(); ++n) {
        factor *= lambda;
        for (double& x : out.level(n)) x *= factor;
    }
    return out;
}

TensorSeries segment_exp(const double* increment, int dim, int order) {
    TensorSeries out = TensorSeries::unit(dim, order);
    if (order == 0) return out;
    // Level n is the n-fold outer power of the increment divided by n!.
    auto& l1 = out.level(1);
    for (int j = 0; j < dim; ++j) l1[static_cast<std::size_t>(j)] = increment[j];
    for (int n = 2; n <= order; ++n) {
        const auto& prev = out.level(n - 1);
        auto& cur = out.level(n);
        // prev already carries 1/(n-1)!, so scale the new outer factor by 1/n.
        for (std::size_t u = 0; u < prev.size(); ++u) {
            const double base = prev[u] / static_cast<double>(n);
            double* dst = cur.data() + u * static_cast<std::size_t>(dim);
            for (int j = 0; j < dim; ++j) dst[j] = base * increment[j];
        }
    }
    return out;
}

std::vector<double> flatten_from(const TensorSeries& t, int from_level) {
    if (from_level < 0 || from_level > t.order()) {
        throw std::invalid_argument("flatten_from: from_level out of range");
    }
    std::vector<double> out;
    std::size_t total = 0;
    for (int n = from_level; n <= t.order(); ++n) total += t.level(n).size();
    out.reserve(total);
    for (int n = from_level; n <= t.order(); ++n) {
        const auto& lv = t.level(n);
        out.insert(out.end(), lv.begin(), lv.end());
    }
    return out;
}

} // namespace sigval
