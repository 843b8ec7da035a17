#include "ginidyn/dist.hpp"

#include "ginidyn/error.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace ginidyn {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::MassDefect: return "MassDefect";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ZeroMean: return "ZeroMean";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TruncationMismatch: return "TruncationMismatch";
    case ErrorCode::PositivityViolation: return "PositivityViolation";
    case ErrorCode::MassDrift: return "MassDrift";
    case ErrorCode::MeanDrift: return "MeanDrift";
    case ErrorCode::InvalidInitialDatum: return "InvalidInitialDatum";
    case ErrorCode::NonIntegerMean: return "NonIntegerMean";
    case ErrorCode::IntegerMean: return "IntegerMean";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::InfeasibleMean: return "InfeasibleMean";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Dist make_dist(std::vector<double> weights, const Tolerances& tol) {
    if (weights.empty()) {
        throw Error(ErrorCode::InvalidArgument, "distribution needs at least one entry");
    }
    for (std::size_t n = 0; n < weights.size(); ++n) {
        double& w = weights[n];
        if (!std::isfinite(w)) {
            std::ostringstream msg;
            msg << "entry " << n << " is not finite";
            throw Error(ErrorCode::InvalidArgument, msg.str());
        }
        if (w < -tol.neg) {
            std::ostringstream msg;
            msg << "entry " << n << " = " << w << " below -" << tol.neg;
            throw Error(ErrorCode::NegativeMass, msg.str());
        }
        if (w < 0.0) {
            w = 0.0;
        }
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > tol.mass) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "total mass " << total << " deviates from 1 by more than " << tol.mass;
        throw Error(ErrorCode::MassDefect, msg.str());
    }
    return Dist(std::move(weights));
}

Dist Dist::padded(std::size_t new_trunc) const {
    if (new_trunc == trunc()) {
        return *this;
    }
    std::vector<double> p(new_trunc + 1, 0.0);
    for (std::size_t n = 0; n < probs_.size(); ++n) {
        if (n <= new_trunc) {
            p[n] = probs_[n];
        } else if (probs_[n] != 0.0) {
            throw Error(ErrorCode::TruncationTooSmall, "padding would drop nonzero mass");
        }
    }
    return Dist(std::move(p));
}

double Dist::total_mass() const noexcept {
    return std::accumulate(probs_.begin(), probs_.end(), 0.0);
}

double mean(const Dist& d) noexcept {
    const auto p = d.probs();
    double m = 0.0;
    for (std::size_t n = 1; n < p.size(); ++n) {
        m += static_cast<double>(n) * p[n];
    }
    return m;
}

Cdf cdf(const Dist& d) {
    Cdf out;
    out.values.resize(d.size());
    std::partial_sum(d.probs().begin(), d.probs().end(), out.values.begin());
    return out;
}

std::vector<double> tail_sums(const Dist& d) {
    const auto p = d.probs();
    std::vector<double> tail(p.size() - 1, 0.0);
    double acc = 0.0;
    for (std::size_t n = p.size() - 1; n > 0; --n) {
        acc += p[n];
        tail[n - 1] = acc;
    }
    return tail;
}

Dist shifted_bernoulli(double mu, std::size_t trunc) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw Error(ErrorCode::InvalidArgument, "mean must be a finite nonnegative number");
    }
    const double floor_mu = std::floor(mu);
    const auto lo = static_cast<std::size_t>(floor_mu);
    if (trunc < lo + 1) {
        std::ostringstream msg;
        msg << "trunc " << trunc << " < floor(mu) + 1 = " << lo + 1;
        throw Error(ErrorCode::TruncationTooSmall, msg.str());
    }
    std::vector<double> p(trunc + 1, 0.0);
    const double frac = mu - floor_mu;
    p[lo] = 1.0 - frac;
    p[lo + 1] = frac;
    return make_dist(std::move(p));
}

Dist dirac(std::size_t n, std::size_t trunc) {
    if (n > trunc) {
        std::ostringstream msg;
        msg << "dirac index " << n << " exceeds trunc " << trunc;
        throw Error(ErrorCode::IndexOutOfRange, msg.str());
    }
    std::vector<double> p(trunc + 1, 0.0);
    p[n] = 1.0;
    return make_dist(std::move(p));
}

Dist uniform(std::size_t trunc) {
    return make_dist(std::vector<double>(trunc + 1, 1.0 / static_cast<double>(trunc + 1)));
}

Dist geometric(double target_mean, std::size_t trunc) {
    if (!(target_mean > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "geometric datum needs a positive mean");
    }
    const double q = target_mean / (1.0 + target_mean);
    std::vector<double> w(trunc + 1);
    double pw = 1.0;
    for (auto& x : w) {
        x = pw;
        pw *= q;
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) {
        x /= total;
    }
    return make_dist(std::move(w));
}

double gini_equilibrium_value(double mu) {
    if (!(mu >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "mean must be nonnegative");
    }
    const double floor_mu = std::floor(mu);
    if (mu == floor_mu) {
        return 0.0;
    }
    return (1.0 - mu + floor_mu) * (mu - floor_mu) / mu;
}

}  // namespace ginidyn
