#ifndef PKMECH_SAMPLING_HPP
#define PKMECH_SAMPLING_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "pkmech/execution.hpp"
#include "pkmech/expr.hpp"

namespace pkmech {

inline constexpr double kSampleLow = -2.0;
inline constexpr double kSampleHigh = 2.0;
inline constexpr double kEqualityTolerance = 1e-9;
inline constexpr int kMaxResamples = 10;

/// Thrown when a trial keeps landing on domain errors.
class SamplingExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// splitmix64 finalizer; derives independent stream seeds from (seed, stream).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

using Rng = std::mt19937_64;

/// Uniform point in [lo, hi]^(2n).
std::vector<double> sample_point(int n, Rng& rng, double lo = kSampleLow, double hi = kSampleHigh);

/// Relative closeness |a-b| < tol*(1+|a|+|b|).
bool close(double a, double b, double tol = kEqualityTolerance);

struct SampleOptions {
    int trials = 100;
    std::uint64_t seed = 0;
    double tolerance = kEqualityTolerance;
    /// Number of coordinate pairs; 0 infers it from the largest index used.
    int n = 0;
    Execution execution = Execution::Parallel;
};

/// Identity oracle: true iff a and b agree at every sampled point of [-2,2]^(2n).
/// Trial t draws from its own stream mix_seed(seed, t), so the answer does not
/// depend on the execution mode.
bool equal_on_samples(const Expr& a, const Expr& b, const SampleOptions& opts);
bool equal_on_samples(const Expr& a, const Expr& b, int trials = 100, std::uint64_t seed = 0);

/// Largest |a-b| seen over the sampled points (same sampling as equal_on_samples).
double max_difference_on_samples(const Expr& a, const Expr& b, const SampleOptions& opts);

/// Evaluate many expressions at one point.
std::vector<double> evaluate_all(std::span<const Expr> exprs, std::span<const double> point,
                                 Execution ex = Execution::Serial);

}  // namespace pkmech

#endif  // PKMECH_SAMPLING_HPP
