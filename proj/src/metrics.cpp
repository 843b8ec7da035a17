#include "ginidyn/metrics.hpp"

#include "ginidyn/error.hpp"

#include <algorithm>
#include <cmath>

namespace ginidyn {
namespace {

// Guards the 1/mu prefactor. The point mass at 0 has Gini 0 by convention.
bool is_dirac_zero(const Dist& d, double mu) {
    if (mu > 0.0) {
        return false;
    }
    const auto p = d.probs();
    if (std::any_of(p.begin() + 1, p.end(), [](double x) { return x != 0.0; })) {
        throw Error(ErrorCode::ZeroMean, "zero mean but mass away from 0");
    }
    return true;
}

}  // namespace

double gini_double_sum(const Dist& d) {
    const double mu = mean(d);
    if (is_dirac_zero(d, mu)) {
        return 0.0;
    }
    // sum_{i<j} (j - i) p_i p_j = sum_j p_j (j F_{j-1} - S_{j-1}),
    // with F and S the running mass and first moment below j.
    const auto p = d.probs();
    double below_mass = 0.0;
    double below_moment = 0.0;
    double half_sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double x = static_cast<double>(j);
        half_sum += p[j] * (x * below_mass - below_moment);
        below_mass += p[j];
        below_moment += x * p[j];
    }
    return half_sum / mu;
}

double gini_cdf(const Dist& d) {
    const double mu = mean(d);
    if (is_dirac_zero(d, mu)) {
        return 0.0;
    }
    double sq = 0.0;
    for (double t : tail_sums(d)) {
        sq += t * t;
    }
    return 1.0 - sq / mu;
}

double gini_iid_form(const Dist& d) {
    const double mu = mean(d);
    if (is_dirac_zero(d, mu)) {
        return 0.0;
    }
    const auto p = d.probs();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double gap = std::abs(static_cast<double>(i) - static_cast<double>(j));
            acc += gap * p[i] * p[j];
        }
    }
    return acc / (2.0 * mu);
}

double wasserstein1(const Dist& a, const Dist& b) {
    const std::size_t n = std::max(a.size(), b.size());
    double fa = 0.0;
    double fb = 0.0;
    double w = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        fa += a[i];
        fb += b[i];
        w += std::abs(fa - fb);
    }
    return w;
}

double lp_distance(const Dist& a, const Dist& b, double p) {
    if (!(p >= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "lp distance needs p >= 1");
    }
    const std::size_t n = std::max(a.size(), b.size());
    double acc = 0.0;
    if (p == 1.0) {
        for (std::size_t i = 0; i < n; ++i) {
            acc += std::abs(a[i] - b[i]);
        }
        return acc;
    }
    for (std::size_t i = 0; i < n; ++i) {
        acc += std::pow(std::abs(a[i] - b[i]), p);
    }
    return std::pow(acc, 1.0 / p);
}

double var_sqrt(const Dist& d) {
    const auto p = d.probs();
    double root_mean = 0.0;
    for (std::size_t n = 1; n < p.size(); ++n) {
        root_mean += std::sqrt(static_cast<double>(n)) * p[n];
    }
    return mean(d) - root_mean * root_mean;
}

double mean_abs_deviation(const Dist& d, double x) {
    const auto p = d.probs();
    double acc = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        acc += std::abs(static_cast<double>(n) - x) * p[n];
    }
    return acc;
}

TailFunctionals key_tail_functionals(const Dist& d) {
    const double mu = mean(d);
    const double floor_mu = std::floor(mu);
    const auto p = d.probs();
    TailFunctionals out;
    for (std::size_t n = 0; n < p.size(); ++n) {
        const double x = static_cast<double>(n);
        if (x <= floor_mu) {
            out.lower += (mu - x) * p[n];
        } else {
            out.upper += (x - mu) * p[n];
        }
    }
    return out;
}

}  // namespace ginidyn
