#pragma once

#include <string>
#include <vector>

#include "sigval/signature.hpp"
#include "sigval/tensor_series.hpp"

namespace sigval {

enum class Representation { original, log_path, log_returns, realized_volatility };
enum class Lift { none, lead_lag, time_augment, time_lead_lag, cumulative_lead_lag };

struct TransformSpec {
    Representation representation = Representation::original;
    Lift lift = Lift::lead_lag;
    bool rescale = false;
};

Representation representation_from_string(const std::string& name);
Lift lift_from_string(const std::string& name);
std::string to_string(Representation r);
std::string to_string(Lift l);

// Lead-lag embedding. Each input coordinate j becomes the pair
// (lead_j, lag_j); for multi-dimensional input the output interleaves the
// pairs as (lead_1, lag_1, lead_2, lag_2, ...). N+1 observations produce
// 2N+1 nodes: node 2k carries (x_k, x_k) and node 2k+1 carries
// (x_{k+1}, x_k). Node times are uniform on the original span.
PathSample lead_lag(const PathSample& in);

// Prepends the node time as coordinate 0: (t_k, x_k).
PathSample time_augment(const PathSample& in);

// Lead-lag followed by a time coordinate over the pseudo-time grid,
// giving (t, lead, lag, ...) with t spanning the original time range.
PathSample time_lead_lag(const PathSample& in);

// Treats observations as increments: prefixes a zero, takes partial sums
// (N+1 observations become N+2 cumulative values), then applies lead_lag.
PathSample cumulative_lead_lag(const PathSample& in);

// Elementwise natural log; all values must be positive.
PathSample log_path(const PathSample& in);

// Per-coordinate log-returns r_k = log(x_k / x_{k-1}); N+1 nodes become N.
PathSample log_returns(const PathSample& in);

// Monthly realized volatility from one year of daily prices. Requires
// exactly 253 nodes (12 months of 21 trading days plus the initial price)
// and one coordinate; month k maps to
// sqrt(sum_{l=0}^{20} log(x_{21k+l+1}/x_{21k+l})^2), giving 12 nodes.
PathSample realized_volatility(const PathSample& in);

PathSample apply_representation(const PathSample& in, Representation r);
PathSample apply_lift(const PathSample& in, Lift l);
PathSample apply_transform(const PathSample& in, const TransformSpec& spec);

// Divides every signature coefficient by the largest absolute value that
// the coefficient attains across BOTH lists (pooled per-coordinate max).
// Coefficients whose pooled max is zero are left at zero.
void rescale_signatures(std::vector<TensorSeries>& a,
                        std::vector<TensorSeries>& b);

// Splits a monthly series into consecutive one-year paths of 13 nodes;
// path i holds observations 12i..12i+12, so neighbours share an endpoint.
// A trailing partial year is dropped.
PathSample split_years(const std::vector<double>& monthly);

} // namespace sigval
