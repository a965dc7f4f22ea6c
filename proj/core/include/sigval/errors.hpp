#pragma once

#include <stdexcept>
#include <string>

namespace sigval {

// Failure of a numerical procedure on otherwise well-formed input: an
// eigensolver or Cholesky factorization that does not converge, a moment
// match without a real root, an estimator hitting a degenerate sample.
// Kept distinct from std::invalid_argument (caller errors) and plain
// std::runtime_error (I/O and parse errors) so the CLI can map the three
// families to different exit codes.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace sigval
