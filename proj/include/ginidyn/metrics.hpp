#pragma once

#include "ginidyn/dist.hpp"

namespace ginidyn {

/// Gini index (1/2mu) sum_ij |i-j| p_i p_j, evaluated in O(N) with prefix sums.
/// Returns 0 for the point mass at 0; throws ZeroMean for any other zero-mean input.
double gini_double_sum(const Dist& d);

/// Gini index via 1 - (1/mu) sum_{n<N} (1 - F_n)^2.
double gini_cdf(const Dist& d);

/// Literal O(N^2) double sum (1/2mu) E|X - X'|. Reference form, kept for cross-checks.
double gini_iid_form(const Dist& d);

/// Order-1 Wasserstein distance sum_n |F_a(n) - F_b(n)|; inputs are zero-padded
/// to a common truncation.
double wasserstein1(const Dist& a, const Dist& b);

/// (sum_n |a_n - b_n|^p)^(1/p), p >= 1.
double lp_distance(const Dist& a, const Dist& b, double p);

/// Var[sqrt X] = mu - (E sqrt X)^2.
double var_sqrt(const Dist& d);

/// E|X - x| for a real location x (the transport cost to a point mass at x).
double mean_abs_deviation(const Dist& d, double x);

struct TailFunctionals {
    double upper = 0.0;  ///< sum_{j > floor(mu)} (j - mu) p_j
    double lower = 0.0;  ///< sum_{i <= floor(mu)} (mu - i) p_i
};

/// The two one-sided deviation sums around mu = mean(d). They coincide exactly
/// in exact arithmetic; both are returned so the identity can be checked.
TailFunctionals key_tail_functionals(const Dist& d);

}  // namespace ginidyn
