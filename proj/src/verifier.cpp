#include "ginidyn/verifier.hpp"

#include "ginidyn/error.hpp"
#include "ginidyn/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace ginidyn {
namespace {

constexpr std::array kAllChecks{
    Check::Thm1,          Check::Thm2,           Check::WeakBound,     Check::WeakVarSqrt,
    Check::VarSqrtGini,   Check::ReverseBound,   Check::KeyInequality, Check::Prop2W1Upper,
    Check::Prop2GiniLower, Check::W1Dirac0,      Check::Lemma1,        Check::GiniMinimizer,
};

double positive_mean(const Dist& d) {
    const double mu = mean(d);
    if (!(mu > 0.0)) {
        throw Error(ErrorCode::ZeroMean, "bound requires a positive mean");
    }
    return mu;
}

std::size_t integer_mean(const Dist& d) {
    const double mu = mean(d);
    if (!is_integer_mean(mu) || std::llround(mu) < 1) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "mean " << mu << " is not a positive integer";
        throw Error(ErrorCode::NonIntegerMean, msg.str());
    }
    return static_cast<std::size_t>(std::llround(mu));
}

double w1_to_integer_dirac(const Dist& d, std::size_t at) {
    return wasserstein1(d, dirac(at, std::max(at, d.trunc())));
}

Dist equilibrium_for(const Dist& d, double mu) {
    return shifted_bernoulli(mu, std::max(d.trunc(), static_cast<std::size_t>(std::floor(mu)) + 1));
}

// Uniform on (0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations so samples are portable.
double open_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

BoundReport inequality_report(std::string name, double lhs, double rhs, std::string branch) {
    BoundReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.pass = r.slack >= -kSlackTolerance;
    r.kind = BoundKind::Inequality;
    r.branch = std::move(branch);
    return r;
}

BoundReport identity_report(std::string name, double lhs, double rhs) {
    BoundReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = -std::abs(rhs - lhs);
    r.pass = r.slack >= -kSlackTolerance;
    r.kind = BoundKind::Identity;
    return r;
}

BoundReport flipped(const BoundReport& r) {
    if (r.kind == BoundKind::Identity) {
        // An identity is symmetric; perturb it instead so the flip is observable.
        return identity_report(r.name, r.lhs, r.rhs + 1.0);
    }
    return inequality_report(r.name, r.rhs, r.lhs, r.branch);
}

bool is_integer_mean(double mu) noexcept {
    return std::abs(mu - std::round(mu)) < kIntegerMeanTolerance;
}

double c_mu(double mu) {
    if (is_integer_mean(mu)) {
        throw Error(ErrorCode::IntegerMean, "C_mu is undefined at integer means");
    }
    const double floor_mu = std::floor(mu);
    return std::min(mu - floor_mu, floor_mu + 1.0 - mu);
}

BoundReport check_thm1(const Dist& d) {
    const double mu = positive_mean(d);
    const double w1 = wasserstein1(d, equilibrium_for(d, mu));
    const double excess = gini_cdf(d) - gini_equilibrium_value(mu);
    if (is_integer_mean(mu)) {
        return inequality_report("thm1", w1, 2.0 * mu * excess, "integer");
    }
    return inequality_report("thm1", w1, 2.0 * mu / c_mu(mu) * excess, "non_integer");
}

BoundReport check_thm2(const Dist& d) {
    const double mu = positive_mean(d);
    const double l1 = lp_distance(d, dirac(0, d.trunc()), 1.0);
    const double room = std::max(0.0, 1.0 - gini_cdf(d));
    return inequality_report("thm2", l1, 2.0 * std::sqrt(mu) * std::sqrt(room));
}

BoundReport check_weak_bound(const Dist& d) {
    const std::size_t m = integer_mean(d);
    const double mu = mean(d);
    const double g = std::max(0.0, gini_cdf(d));
    return inequality_report("weak_bound", w1_to_integer_dirac(d, m),
                             2.0 * std::sqrt(2.0) * mu * std::sqrt(g));
}

BoundReport check_weak_var_sqrt(const Dist& d) {
    const std::size_t m = integer_mean(d);
    const double mu = mean(d);
    const double v = std::max(0.0, var_sqrt(d));
    return inequality_report("weak_var_sqrt", w1_to_integer_dirac(d, m),
                             2.0 * std::sqrt(2.0) * std::sqrt(mu) * std::sqrt(v));
}

BoundReport check_var_sqrt_gini(const Dist& d) {
    const double mu = positive_mean(d);
    return inequality_report("var_sqrt_gini", 2.0 * var_sqrt(d), 2.0 * mu * gini_cdf(d));
}

BoundReport check_reverse_bound(const Dist& d) {
    const double mu = positive_mean(d);
    const double lhs = 2.0 * mu * gini_cdf(d);
    if (is_integer_mean(mu)) {
        const auto m = static_cast<std::size_t>(std::llround(mu));
        return inequality_report("reverse_bound", lhs, 2.0 * w1_to_integer_dirac(d, m), "integer");
    }
    return inequality_report("reverse_bound", lhs, 2.0 * mean_abs_deviation(d, mu), "non_integer");
}

BoundReport check_key_inequality(const Dist& d) {
    const double mu = positive_mean(d);
    const auto tails = key_tail_functionals(d);
    return inequality_report("key_inequality", std::max(tails.upper, tails.lower), mu * gini_cdf(d));
}

std::pair<BoundReport, BoundReport> check_prop2_intermediates(const Dist& d) {
    const double mu = positive_mean(d);
    const double cm = c_mu(mu);
    const double floor_mu = std::floor(mu);
    const auto lo = static_cast<std::size_t>(floor_mu);
    double a = 0.0;
    double b = 0.0;
    for (std::size_t n = 0; n <= lo; ++n) {
        const double x = static_cast<double>(n);
        a += (floor_mu + 1.0 - x) * d[n];
        b += (floor_mu - x) * d[n];
    }
    const double a_excess = a - (floor_mu + 1.0 - mu);
    const double w1 = wasserstein1(d, equilibrium_for(d, mu));
    auto upper = inequality_report("prop2_w1_upper", w1, 2.0 * std::max(a_excess, b));
    auto lower = inequality_report("prop2_gini_lower", cm * (a_excess + b),
                                   mu * (gini_cdf(d) - gini_equilibrium_value(mu)));
    return {std::move(upper), std::move(lower)};
}

BoundReport check_w1_dirac0(const Dist& d) {
    return identity_report("w1_dirac0", wasserstein1(d, dirac(0, d.trunc())), mean(d));
}

BoundReport check_lemma1(const Dist& d) {
    const double mu = positive_mean(d);
    if (!(mu < 1.0) || is_integer_mean(mu)) {
        throw Error(ErrorCode::InvalidArgument, "lemma1 needs a mean in (0, 1)");
    }
    const double w1 = wasserstein1(d, equilibrium_for(d, mu));
    return inequality_report("lemma1", w1, 2.0 * (gini_cdf(d) - gini_equilibrium_value(mu)));
}

BoundReport check_gini_minimizer(const Dist& d) {
    const double mu = positive_mean(d);
    return inequality_report("gini_minimizer", gini_equilibrium_value(mu), gini_cdf(d));
}

std::span<const Check> all_checks() noexcept { return kAllChecks; }

std::string_view check_name(Check c) noexcept {
    switch (c) {
    case Check::Thm1: return "thm1";
    case Check::Thm2: return "thm2";
    case Check::WeakBound: return "weak_bound";
    case Check::WeakVarSqrt: return "weak_var_sqrt";
    case Check::VarSqrtGini: return "var_sqrt_gini";
    case Check::ReverseBound: return "reverse_bound";
    case Check::KeyInequality: return "key_inequality";
    case Check::Prop2W1Upper: return "prop2_w1_upper";
    case Check::Prop2GiniLower: return "prop2_gini_lower";
    case Check::W1Dirac0: return "w1_dirac0";
    case Check::Lemma1: return "lemma1";
    case Check::GiniMinimizer: return "gini_minimizer";
    }
    return "unknown";
}

std::optional<Check> parse_check(std::string_view name) noexcept {
    for (Check c : kAllChecks) {
        if (check_name(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

bool applicable(Check c, double mu) noexcept {
    const bool positive = mu > 0.0;
    const bool integer = is_integer_mean(mu);
    switch (c) {
    case Check::W1Dirac0:
        return true;
    case Check::WeakBound:
    case Check::WeakVarSqrt:
        return positive && integer && std::llround(mu) >= 1;
    case Check::Prop2W1Upper:
    case Check::Prop2GiniLower:
        return positive && !integer;
    case Check::Lemma1:
        return positive && mu < 1.0 && !integer;
    default:
        return positive;
    }
}

BoundReport run_check(Check c, const Dist& d) {
    switch (c) {
    case Check::Thm1: return check_thm1(d);
    case Check::Thm2: return check_thm2(d);
    case Check::WeakBound: return check_weak_bound(d);
    case Check::WeakVarSqrt: return check_weak_var_sqrt(d);
    case Check::VarSqrtGini: return check_var_sqrt_gini(d);
    case Check::ReverseBound: return check_reverse_bound(d);
    case Check::KeyInequality: return check_key_inequality(d);
    case Check::Prop2W1Upper: return check_prop2_intermediates(d).first;
    case Check::Prop2GiniLower: return check_prop2_intermediates(d).second;
    case Check::W1Dirac0: return check_w1_dirac0(d);
    case Check::Lemma1: return check_lemma1(d);
    case Check::GiniMinimizer: return check_gini_minimizer(d);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown check");
}

Dist sample_vmu(double mu, std::size_t trunc, std::uint64_t seed) {
    if (!(mu > 0.0) || !(mu < static_cast<double>(trunc))) {
        std::ostringstream msg;
        msg << "mean " << mu << " not in (0, " << trunc << ")";
        throw Error(ErrorCode::InfeasibleMean, msg.str());
    }
    std::mt19937_64 rng(seed);
    const double n_max = static_cast<double>(trunc);

    // Exponential weights under a random decay envelope and random sparsity.
    const double scale = std::exp(std::log(0.3) + open_unit(rng) * (std::log(n_max + 1.0) - std::log(0.3)));
    const double keep = 0.15 + 0.85 * open_unit(rng);
    std::vector<double> w(trunc + 1, 0.0);
    bool any = false;
    for (std::size_t n = 0; n <= trunc; ++n) {
        const double u_keep = open_unit(rng);
        const double u_size = open_unit(rng);
        if (u_keep < keep) {
            w[n] = -std::log(u_size) * std::exp(-static_cast<double>(n) / scale);
            any = any || w[n] > 0.0;
        }
    }
    if (!any) {
        w[static_cast<std::size_t>(open_unit(rng) * n_max)] = 1.0;
    }
    double total = 0.0;
    for (double x : w) {
        total += x;
    }
    double m = 0.0;
    for (std::size_t n = 0; n <= trunc; ++n) {
        w[n] /= total;
        m += static_cast<double>(n) * w[n];
    }

    // Mean correction: mix toward the endpoint on the far side of mu.
    if (m > mu) {
        const double keep_q = mu / m;
        for (double& x : w) {
            x *= keep_q;
        }
        w[0] += 1.0 - keep_q;
    } else if (m < mu) {
        const double lambda = (mu - m) / (n_max - m);
        for (double& x : w) {
            x *= 1.0 - lambda;
        }
        w[trunc] += lambda;
    }

    // One draw in five is pulled toward the minimizer to probe near-tight cases.
    if (open_unit(rng) < 0.2) {
        const double t = open_unit(rng);
        const auto eq = shifted_bernoulli(mu, trunc);
        for (std::size_t n = 0; n <= trunc; ++n) {
            w[n] = (1.0 - t) * eq[n] + t * w[n];
        }
    }
    return make_dist(std::move(w));
}

double w1_bruteforce(const Dist& a, const Dist& b) {
    struct Atom {
        double at;
        double mass;
    };
    auto support = [](const Dist& d) {
        std::vector<Atom> atoms;
        for (std::size_t n = 0; n < d.size(); ++n) {
            if (d[n] > 0.0) {
                atoms.push_back({static_cast<double>(n), d[n]});
            }
        }
        if (atoms.size() > kBruteForceMaxSupport) {
            throw Error(ErrorCode::SupportTooLarge, "brute-force coupling is limited to 16 atoms");
        }
        return atoms;
    };
    auto src = support(a);
    auto dst = support(b);

    double cost = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < src.size() && j < dst.size()) {
        const double gap = std::abs(src[i].at - dst[j].at);
        if (src[i].mass < dst[j].mass) {
            cost += src[i].mass * gap;
            dst[j].mass -= src[i].mass;
            ++i;
        } else if (dst[j].mass < src[i].mass) {
            cost += dst[j].mass * gap;
            src[i].mass -= dst[j].mass;
            ++j;
        } else {
            cost += src[i].mass * gap;
            ++i;
            ++j;
        }
    }
    return cost;
}

namespace {

std::vector<Check> enabled_checks(const SweepOptions& options) {
    if (options.checks.empty()) {
        return {kAllChecks.begin(), kAllChecks.end()};
    }
    return options.checks;
}

std::vector<BoundReport> evaluate(const Dist& d, std::span<const Check> checks,
                                  const std::optional<Check>& flip) {
    std::vector<BoundReport> out;
    const double mu = mean(d);
    for (Check c : checks) {
        if (!applicable(c, mu)) {
            continue;
        }
        auto report = run_check(c, d);
        out.push_back(flip && *flip == c ? flipped(report) : std::move(report));
    }
    return out;
}

SweepReport aggregate(std::span<const Dist> dists, std::span<const std::vector<BoundReport>> results,
                      std::size_t witness_limit) {
    SweepReport report;
    for (std::size_t s = 0; s < results.size(); ++s) {
        for (const auto& r : results[s]) {
            auto [it, fresh] = report.try_emplace(r.name);
            SweepEntry& e = it->second;
            if (fresh) {
                e.min_slack = std::numeric_limits<double>::infinity();
            }
            ++e.count;
            e.min_slack = std::min(e.min_slack, r.slack);
            // Witnesses are counterexamples when the check fails, tight cases otherwise.
            bool keep = false;
            if (!r.pass) {
                ++e.failures;
                keep = true;
            } else if (r.kind == BoundKind::Inequality && r.slack < kTightTolerance) {
                ++e.tight;
                keep = true;
            }
            if (keep && e.witnesses.size() < witness_limit) {
                e.witnesses.push_back(dists[s]);
            }
        }
    }
    return report;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (count + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    const std::size_t end = std::min(count, (t + 1) * chunk);
                    for (std::size_t i = t * chunk; i < end; ++i) {
                        fn(i);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace

SweepReport sweep_distributions(std::span<const Dist> dists, const SweepOptions& options) {
    const auto checks = enabled_checks(options);
    std::vector<std::vector<BoundReport>> results(dists.size());
    parallel_for(dists.size(), options.threads,
                 [&](std::size_t i) { results[i] = evaluate(dists[i], checks, options.flip); });
    return aggregate(dists, results, options.witness_limit);
}

SweepReport sweep(const SweepOptions& options) {
    for (double mu : options.mu_grid) {
        if (!(mu > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "sweep grid must avoid mu <= 0");
        }
    }
    const std::size_t per_mu = options.n_samples;
    const std::size_t total = per_mu * options.mu_grid.size();
    std::vector<std::optional<Dist>> samples(total);
    parallel_for(total, options.threads, [&](std::size_t i) {
        samples[i] = sample_vmu(options.mu_grid[i / per_mu], options.trunc, options.seed + i);
    });
    std::vector<Dist> dists;
    dists.reserve(total);
    for (auto& s : samples) {
        dists.push_back(std::move(*s));
    }
    return sweep_distributions(dists, options);
}

std::size_t total_failures(const SweepReport& report) noexcept {
    std::size_t n = 0;
    for (const auto& [name, entry] : report) {
        n += entry.failures;
    }
    return n;
}

}  // namespace ginidyn
