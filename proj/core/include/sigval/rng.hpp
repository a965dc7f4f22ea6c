#pragma once

#include <cstdint>
#include <random>

namespace sigval {

// Inverse normal CDF (Wichura's double-precision rational approximation).
// Accurate to roughly 1e-15 over (0, 1); throws std::invalid_argument
// outside the open interval.
double normal_quantile(double p);

// Collapses (seed, stream, substream) into one well-mixed 64-bit seed.
// Used to hand a component that derives its own substreams (for example a
// simulator that seeds per path) an independent seed per (repetition, role).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t substream = 0);

// Deterministic random stream. A stream is identified by a master seed plus
// up to two stream indices; the triple is hashed into the generator state so
// that (seed, i) and (seed, j) are statistically independent for i != j.
// This is the substream contract used everywhere: simulators give path i the
// stream (seed, i), the power study gives repetition r and role q the stream
// (seed, r, q). Results are therefore reproducible path by path regardless
// of batch size or thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : Rng(seed, 0, 0) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : Rng(seed, stream, 0) {}
    Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream);

    // Raw 64 uniform bits.
    std::uint64_t next_u64() { return gen_(); }

    // Uniform on the open interval (0, 1); safe to feed to normal_quantile.
    double uniform();

    // Standard normal via inversion, one uniform per variate.
    double normal();

    // Gamma(shape, scale) by Marsaglia-Tsang squeeze; shape < 1 handled by
    // the usual boosting identity. Consumes a variable number of uniforms.
    double gamma(double shape, double scale = 1.0);

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 gen_;
};

} // namespace sigval
