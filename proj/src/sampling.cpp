#include "pkmech/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace pkmech {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> sample_point(int n, Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> p(static_cast<std::size_t>(2 * n));
    for (double& v : p) v = dist(rng);
    return p;
}

bool close(double a, double b, double tol) {
    return std::abs(a - b) < tol * (1.0 + std::abs(a) + std::abs(b));
}

namespace {

struct TrialResult {
    double a = 0.0;
    double b = 0.0;
    bool exhausted = false;
};

TrialResult run_trial(const Expr& a, const Expr& b, int n, std::uint64_t seed, std::size_t trial) {
    Rng rng(mix_seed(seed, trial));
    for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
        const auto p = sample_point(n, rng);
        try {
            return {evaluate(a, p), evaluate(b, p), false};
        } catch (const DomainError&) {
        }
    }
    return {0.0, 0.0, true};
}

std::vector<TrialResult> run_trials(const Expr& a, const Expr& b, const SampleOptions& opts) {
    if (opts.trials < 1) throw std::invalid_argument("equal_on_samples needs at least one trial");
    const int n = opts.n > 0 ? opts.n : std::max({1, max_index(a), max_index(b)});
    std::vector<TrialResult> out(static_cast<std::size_t>(opts.trials));
    for_each_index(out.size(), opts.execution,
                   [&](std::size_t t) { out[t] = run_trial(a, b, n, opts.seed, t); });
    return out;
}

[[noreturn]] void exhausted(std::size_t trial) {
    throw SamplingExhausted("expression undefined at " + std::to_string(kMaxResamples + 1) +
                            " consecutive sample points (trial " + std::to_string(trial) + ")");
}

}  // namespace

bool equal_on_samples(const Expr& a, const Expr& b, const SampleOptions& opts) {
    const auto results = run_trials(a, b, opts);
    for (std::size_t t = 0; t < results.size(); ++t) {
        if (results[t].exhausted) exhausted(t);
        if (!close(results[t].a, results[t].b, opts.tolerance)) return false;
    }
    return true;
}

bool equal_on_samples(const Expr& a, const Expr& b, int trials, std::uint64_t seed) {
    SampleOptions opts;
    opts.trials = trials;
    opts.seed = seed;
    return equal_on_samples(a, b, opts);
}

double max_difference_on_samples(const Expr& a, const Expr& b, const SampleOptions& opts) {
    const auto results = run_trials(a, b, opts);
    double worst = 0.0;
    for (std::size_t t = 0; t < results.size(); ++t) {
        if (results[t].exhausted) exhausted(t);
        worst = std::max(worst, std::abs(results[t].a - results[t].b));
    }
    return worst;
}

std::vector<double> evaluate_all(std::span<const Expr> exprs, std::span<const double> point, Execution ex) {
    std::vector<double> out(exprs.size());
    for_each_index(exprs.size(), ex, [&](std::size_t i) { out[i] = evaluate(exprs[i], point); });
    return out;
}

}  // namespace pkmech
