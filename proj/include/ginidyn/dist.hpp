#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ginidyn {

/// Validation tolerances shared by every constructor of Dist.
struct Tolerances {
    double mass = 1e-9;  ///< allowed |sum - 1|
    double neg = 1e-12;  ///< entries in [-neg, 0) count as zero
};

/// Probability mass function on {0, ..., trunc}. Mass beyond trunc is zero.
///
/// Instances are only produced by validating constructors, so every Dist
/// has nonnegative entries summing to 1 within the tolerance it was built
/// with. Entries are never renormalized.
class Dist {
public:
    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t trunc() const noexcept { return probs_.size() - 1; }
    std::size_t size() const noexcept { return probs_.size(); }

    /// Mass at n, or 0 past the truncation.
    double operator[](std::size_t n) const noexcept { return n < probs_.size() ? probs_[n] : 0.0; }

    /// Same distribution on {0, ..., new_trunc}; new_trunc must not cut support.
    Dist padded(std::size_t new_trunc) const;

    double total_mass() const noexcept;

    friend bool operator==(const Dist&, const Dist&) = default;

private:
    friend Dist make_dist(std::vector<double> weights, const Tolerances& tol);
    explicit Dist(std::vector<double> probs) : probs_(std::move(probs)) {}

    std::vector<double> probs_;
};

struct Cdf {
    std::vector<double> values;  ///< F_0 .. F_N
};

/// Validates weights as a distribution. Throws NegativeMass or MassDefect.
Dist make_dist(std::vector<double> weights, const Tolerances& tol = {});

double mean(const Dist& d) noexcept;
Cdf cdf(const Dist& d);

/// Tail sums T_n = sum_{m > n} p_m for n = 0 .. N-1 (equal to 1 - F_n at unit mass).
std::vector<double> tail_sums(const Dist& d);

/// Two-point Gini minimizer on {floor(mu), floor(mu)+1} with mean mu.
Dist shifted_bernoulli(double mu, std::size_t trunc);

Dist dirac(std::size_t n, std::size_t trunc);

Dist uniform(std::size_t trunc);

/// p_n proportional to q^n on {0..trunc} with q = mean / (1 + mean).
/// The mean matches `target_mean` up to the truncated geometric tail.
Dist geometric(double target_mean, std::size_t trunc);

/// G[p*] for the shifted Bernoulli distribution of mean mu; 0 at integers.
double gini_equilibrium_value(double mu);

}  // namespace ginidyn
