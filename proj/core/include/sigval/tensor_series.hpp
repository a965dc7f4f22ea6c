#pragma once

#include <cstddef>
#include <vector>

namespace sigval {

// Number of coefficients at a single tensor level, dim^level.
std::size_t level_size(int dim, int level);

// Element of the truncated tensor algebra over R^dim, with all levels from
// 0 (scalars) through `order` stored densely. Level n holds the dim^n
// coefficients indexed lexicographically by words (i_1, ..., i_n), i.e. the
// coefficient of the word w sits at position sum_k i_k * dim^(n-1-k).
class TensorSeries {
public:
    TensorSeries(int dim, int order);

    // Multiplicative unit: 1 at level 0, zero elsewhere.
    static TensorSeries unit(int dim, int order);

    int dim() const { return dim_; }
    int order() const { return order_; }

    std::vector<double>& level(int n) { return levels_[static_cast<std::size_t>(n)]; }
    const std::vector<double>& level(int n) const {
        return levels_[static_cast<std::size_t>(n)];
    }

    double scalar() const { return levels_[0][0]; }

    // Total number of stored coefficients across all levels.
    std::size_t size() const;

    TensorSeries& operator+=(const TensorSeries& other);
    TensorSeries& operator-=(const TensorSeries& other);
    TensorSeries& operator*=(double c);

private:
    int dim_;
    int order_;
    std::vector<std::vector<double>> levels_;
};

// Truncated tensor product: levels above a.order() are dropped. Both
// operands must share dim and order.
TensorSeries tensor_mul(const TensorSeries& a, const TensorSeries& b);

// exp(x) = sum x^k / k! truncated at the common order. Requires the level-0
// coefficient of x to be exactly representable as 0.
TensorSeries tensor_exp(const TensorSeries& x);

// log(t) = sum (-1)^(k+1) (t - 1)^k / k truncated at the common order.
// Requires the level-0 coefficient of t to be 1. Only the first `order`
// powers contribute because (t - 1) starts at level 1.
TensorSeries tensor_log(const TensorSeries& t);

// Euclidean inner product of the stacked coefficients of levels
// from_level..order. from_level = 0 includes the scalar term.
double inner_product(const TensorSeries& a, const TensorSeries& b,
                     int from_level = 0);

// Scales level n by lambda^n.
TensorSeries dilate(const TensorSeries& t, double lambda);

// exp of the level-1 element v (a straight-line segment increment):
// level n equals v^(tensor n) / n!.
TensorSeries segment_exp(const double* increment, int dim, int order);

// Coefficients of levels from_level..order flattened into one vector, in
// level order. inner_product(a, b, f) equals the dot product of
// flatten_from(a, f) and flatten_from(b, f).
std::vector<double> flatten_from(const TensorSeries& t, int from_level);

} // namespace sigval
