#pragma once

#include "ginidyn/dist.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ginidyn {

/// Slack below which a bound counts as violated rather than rounded.
inline constexpr double kSlackTolerance = 1e-12;
/// Slack below which a passing bound is recorded as a tightness witness.
inline constexpr double kTightTolerance = 1e-9;
/// |mu - round(mu)| below which a mean is treated as an integer.
inline constexpr double kIntegerMeanTolerance = 1e-9;

enum class BoundKind {
    Inequality,  ///< lhs <= rhs, slack = rhs - lhs
    Identity,    ///< lhs == rhs, slack = -|rhs - lhs|
};

/// Both sides of one inequality evaluated on one distribution.
/// pass <=> slack >= -kSlackTolerance for either kind.
struct BoundReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = true;
    BoundKind kind = BoundKind::Inequality;
    std::string branch;  ///< which case of a piecewise bound was evaluated, if any
};

BoundReport inequality_report(std::string name, double lhs, double rhs, std::string branch = {});
BoundReport identity_report(std::string name, double lhs, double rhs);

/// The same report with its sides swapped. Used to self-test the harness.
BoundReport flipped(const BoundReport& r);

bool is_integer_mean(double mu) noexcept;

/// Distance from mu to the nearest integer. Throws IntegerMean at integers.
double c_mu(double mu);

BoundReport check_thm1(const Dist& d);
BoundReport check_thm2(const Dist& d);
BoundReport check_weak_bound(const Dist& d);
/// W1(p, delta_mu) <= 2 sqrt(2) sqrt(mu) sqrt(Var[sqrt X]), integer mu.
BoundReport check_weak_var_sqrt(const Dist& d);
/// 2 Var[sqrt X] <= 2 mu G[p].
BoundReport check_var_sqrt_gini(const Dist& d);
BoundReport check_reverse_bound(const Dist& d);
BoundReport check_key_inequality(const Dist& d);
/// First: W1 upper bound through the below-floor moments A and B.
/// Second: the matching lower bound on mu (G - G*). Non-integer mu only.
std::pair<BoundReport, BoundReport> check_prop2_intermediates(const Dist& d);
BoundReport check_w1_dirac0(const Dist& d);
/// W1(p, p*) <= 2 (G - G*) for mu in (0, 1).
BoundReport check_lemma1(const Dist& d);
/// G[p*] <= G[p].
BoundReport check_gini_minimizer(const Dist& d);

enum class Check {
    Thm1,
    Thm2,
    WeakBound,
    WeakVarSqrt,
    VarSqrtGini,
    ReverseBound,
    KeyInequality,
    Prop2W1Upper,
    Prop2GiniLower,
    W1Dirac0,
    Lemma1,
    GiniMinimizer,
};

std::span<const Check> all_checks() noexcept;
std::string_view check_name(Check c) noexcept;
std::optional<Check> parse_check(std::string_view name) noexcept;

/// Whether the check's hypotheses hold for a distribution with this mean.
bool applicable(Check c, double mu) noexcept;

BoundReport run_check(Check c, const Dist& d);

/// Random member of V_mu on {0..trunc}; deterministic in seed.
Dist sample_vmu(double mu, std::size_t trunc, std::uint64_t seed);

/// Largest support (nonzero entries) w1_bruteforce accepts.
inline constexpr std::size_t kBruteForceMaxSupport = 16;

/// Transport cost of the monotone coupling, built by matching mass greedily
/// along the two sorted supports. Test oracle for wasserstein1.
double w1_bruteforce(const Dist& a, const Dist& b);

struct SweepEntry {
    std::size_t count = 0;
    std::size_t failures = 0;
    double min_slack = 0.0;
    std::size_t tight = 0;
    std::vector<Dist> witnesses;
};

using SweepReport = std::map<std::string, SweepEntry>;

struct SweepOptions {
    std::vector<double> mu_grid;
    std::size_t trunc = 50;
    std::size_t n_samples = 1000;
    std::uint64_t seed = 0;
    std::vector<Check> checks;       ///< empty selects every check
    std::optional<Check> flip;       ///< harness self-test: reverse this inequality
    unsigned threads = 0;            ///< 0 = hardware concurrency
    std::size_t witness_limit = 3;   ///< witnesses stored per inequality
};

/// Runs the enabled checks on n_samples members of V_mu per grid point.
/// Sample i of grid point g uses seed + g * n_samples + i, so the report
/// does not depend on the thread count.
SweepReport sweep(const SweepOptions& options);

/// Same aggregation over caller-provided distributions.
SweepReport sweep_distributions(std::span<const Dist> dists, const SweepOptions& options);

std::size_t total_failures(const SweepReport& report) noexcept;

}  // namespace ginidyn
