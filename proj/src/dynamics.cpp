#include "ginidyn/dynamics.hpp"

#include "ginidyn/error.hpp"
#include "ginidyn/log.hpp"
#include "ginidyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ginidyn {

std::string_view model_name(ModelKind kind) noexcept {
    switch (kind) {
    case ModelKind::RichBiased: return "rich_biased";
    case ModelKind::PersuasionPolarization: return "persuasion_polarization";
    case ModelKind::StickyDispersion: return "sticky_dispersion";
    }
    return "unknown";
}

std::optional<ModelKind> parse_model(std::string_view name) noexcept {
    for (auto kind : {ModelKind::RichBiased, ModelKind::PersuasionPolarization, ModelKind::StickyDispersion}) {
        if (model_name(kind) == name) {
            return kind;
        }
    }
    return std::nullopt;
}

namespace {

double wbar(std::span<const double> p) {
    double w = 0.0;
    for (std::size_t n = 1; n < p.size(); ++n) {
        w += p[n] / static_cast<double>(n);
    }
    return w;
}

}  // namespace

std::vector<double> rhs_rich_biased(std::span<const double> p) {
    const std::size_t last = p.size() - 1;
    std::vector<double> dp(p.size(), 0.0);
    if (last == 0) {
        return dp;
    }
    const double w = wbar(p);
    dp[0] = p[1] - w * p[0];
    for (std::size_t n = 1; n < last; ++n) {
        const double x = static_cast<double>(n);
        dp[n] = p[n + 1] / (x + 1.0) + w * p[n - 1] - (1.0 / x + w) * p[n];
    }
    dp[last] = w * p[last - 1] - p[last] / static_cast<double>(last);
    return dp;
}

std::vector<double> rhs_ipp(std::span<const double> p) {
    const std::size_t last = p.size() - 1;
    if (last < 2 || last % 2 != 0) {
        throw Error(ErrorCode::TruncationMismatch, "persuasion-polarization needs 2k + 1 states, k >= 1");
    }
    // The loss rate p_n (1 - p_n) is written as p_n * sum_{j != n} p_j. The two
    // agree on the simplex, but only the latter keeps total mass invariant off
    // it; with the literal form, rounding in the mass grows like e^t.
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    std::vector<double> at_most(p.size());
    std::partial_sum(p.begin(), p.end(), at_most.begin());
    std::vector<double> dp(p.size(), 0.0);
    dp[0] = p[0] * p[1] - p[0] * (total - p[0]);
    for (std::size_t n = 1; n < last; ++n) {
        const double at_least = total - at_most[n - 1];
        dp[n] = p[n - 1] * at_least + p[n + 1] * at_most[n] - p[n] * (total - p[n]);
    }
    dp[last] = p[last] * p[last - 1] - p[last] * (total - p[last]);
    return dp;
}

std::vector<double> rhs_sticky(std::span<const double> p, double mu) {
    const std::size_t last = p.size() - 1;
    std::vector<double> dp(p.size(), 0.0);
    const double a = mu - 1.0 + p[0];
    dp[0] = -a * p[0];
    if (last == 0) {
        return dp;
    }
    for (std::size_t n = 1; n < last; ++n) {
        const double x = static_cast<double>(n);
        dp[n] = x * p[n + 1] + a * p[n - 1] - (x - 1.0) * p[n] - a * p[n];
    }
    dp[last] = a * p[last - 1] - static_cast<double>(last - 1) * p[last];
    return dp;
}

std::vector<double> rhs_rich_biased(const Dist& d) { return rhs_rich_biased(d.probs()); }

std::vector<double> rhs_ipp(const Dist& d, std::size_t k) {
    if (d.trunc() != 2 * k) {
        std::ostringstream msg;
        msg << "trunc " << d.trunc() << " != 2k = " << 2 * k;
        throw Error(ErrorCode::TruncationMismatch, msg.str());
    }
    return rhs_ipp(d.probs());
}

std::vector<double> rhs_sticky(const Dist& d, double mu) {
    if (!(mu > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "sticky dispersion needs mu > 0");
    }
    return rhs_sticky(d.probs(), mu);
}

double boundary_leak_rate(const ModelSpec& spec, std::span<const double> p) {
    switch (spec.kind) {
    case ModelKind::RichBiased: return wbar(p);
    case ModelKind::PersuasionPolarization: return 0.0;
    case ModelKind::StickyDispersion: return std::abs(spec.mu - 1.0 + p[0]);
    }
    return 0.0;
}

void validate(const ModelSpec& spec, std::size_t trunc) {
    switch (spec.kind) {
    case ModelKind::RichBiased:
        return;
    case ModelKind::PersuasionPolarization:
        if (spec.k < 1) {
            throw Error(ErrorCode::InvalidArgument, "persuasion-polarization needs k >= 1");
        }
        if (trunc != 2 * spec.k) {
            std::ostringstream msg;
            msg << "trunc " << trunc << " != 2k = " << 2 * spec.k;
            throw Error(ErrorCode::TruncationMismatch, msg.str());
        }
        return;
    case ModelKind::StickyDispersion:
        if (!(spec.mu > 0.0) || !std::isfinite(spec.mu)) {
            throw Error(ErrorCode::InvalidArgument, "sticky dispersion needs mu > 0");
        }
        return;
    }
}

Rhs make_rhs(const ModelSpec& spec) {
    switch (spec.kind) {
    case ModelKind::RichBiased:
        return [](std::span<const double> p) { return rhs_rich_biased(p); };
    case ModelKind::PersuasionPolarization:
        return [](std::span<const double> p) { return rhs_ipp(p); };
    case ModelKind::StickyDispersion:
        return [mu = spec.mu](std::span<const double> p) { return rhs_sticky(p, mu); };
    }
    throw Error(ErrorCode::InvalidArgument, "unknown model");
}

namespace {

Dist accept_step(std::vector<double> next, const Tolerances& tol) {
    for (std::size_t n = 0; n < next.size(); ++n) {
        if (!std::isfinite(next[n]) || next[n] < -tol.neg) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "entry " << n << " = " << next[n] << " after step; reduce dt";
            throw Error(ErrorCode::PositivityViolation, msg.str());
        }
        if (next[n] < 0.0) {
            next[n] = 0.0;
        }
    }
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    if (std::abs(total - 1.0) > tol.mass) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "mass " << total << " after step";
        throw Error(ErrorCode::MassDrift, msg.str());
    }
    return make_dist(std::move(next), tol);
}

void axpy(std::vector<double>& out, std::span<const double> x, double a, std::span<const double> y) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = x[i] + a * y[i];
    }
}

}  // namespace

Dist step_rk4(const Rhs& rhs, const Dist& d, double dt, const Tolerances& tol) {
    const auto p = d.probs();
    std::vector<double> stage(p.size());
    const auto k1 = rhs(p);
    axpy(stage, p, 0.5 * dt, k1);
    const auto k2 = rhs(stage);
    axpy(stage, p, 0.5 * dt, k2);
    const auto k3 = rhs(stage);
    axpy(stage, p, dt, k3);
    const auto k4 = rhs(stage);
    std::vector<double> next(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        next[i] = p[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return accept_step(std::move(next), tol);
}

Dist step_euler(const Rhs& rhs, const Dist& d, double dt, const Tolerances& tol) {
    const auto p = d.probs();
    std::vector<double> next(p.size());
    axpy(next, p, dt, rhs(p));
    return accept_step(std::move(next), tol);
}

Dist rich_biased_default_datum(std::size_t trunc) { return geometric(1.0, trunc); }

namespace {

struct RowContext {
    const Dist& equilibrium;
    const Dist& origin;
    std::span<const Check> checks;
};

TrajectoryRow make_row(double t, const Dist& d, const RowContext& ctx, std::size_t& failures) {
    TrajectoryRow row;
    row.t = t;
    row.mass = d.total_mass();
    row.mean = mean(d);
    row.gini = gini_cdf(d);
    row.w1_equil = wasserstein1(d, ctx.equilibrium);
    row.l1_dirac0 = lp_distance(d, ctx.origin, 1.0);
    row.tail_mass = d[d.trunc()];
    for (Check c : ctx.checks) {
        row.bounds.push_back(run_check(c, d));
        if (!row.bounds.back().pass) {
            ++failures;
        }
    }
    return row;
}

}  // namespace

TrajectoryRecord simulate(const ModelSpec& spec, const Dist& d0, const SimConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.t_end >= 0.0) || cfg.record_every == 0) {
        throw Error(ErrorCode::InvalidArgument, "need dt > 0, t_end >= 0 and record_every >= 1");
    }
    std::size_t trunc = cfg.trunc.value_or(d0.trunc());
    if (!cfg.trunc && spec.kind == ModelKind::PersuasionPolarization) {
        trunc = 2 * spec.k;
    }
    if (trunc < 2) {
        throw Error(ErrorCode::InvalidArgument, "simulation needs trunc >= 2");
    }
    validate(spec, trunc);

    const Tolerances tol{cfg.tol_mass, cfg.tol_neg};
    Dist state = [&] {
        try {
            return make_dist(std::vector<double>(d0.probs().begin(), d0.probs().end()), tol).padded(trunc);
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidInitialDatum, e.what());
        }
    }();
    const double mu0 = mean(state);
    if (spec.kind == ModelKind::StickyDispersion && std::abs(mu0 - spec.mu) > cfg.tol_mean) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "initial mean " << mu0 << " differs from the model's mu = " << spec.mu;
        throw Error(ErrorCode::InvalidInitialDatum, msg.str());
    }
    if (std::floor(mu0) + 1.0 > static_cast<double>(trunc)) {
        throw Error(ErrorCode::InvalidInitialDatum, "trunc must exceed floor(mean) + 1");
    }
    for (Check c : cfg.bounds) {
        if (!applicable(c, mu0)) {
            std::ostringstream msg;
            msg << "bound " << check_name(c) << " does not apply at mean " << mu0;
            throw Error(ErrorCode::InvalidArgument, msg.str());
        }
    }

    const Dist equilibrium = shifted_bernoulli(mu0, trunc);
    const Dist origin = dirac(0, trunc);
    const RowContext ctx{equilibrium, origin, cfg.bounds};
    const Rhs rhs = make_rhs(spec);
    const bool may_stop = cfg.stop_on_convergence && spec.kind != ModelKind::RichBiased;

    TrajectoryRecord record;
    record.bound_checks = cfg.bounds;
    record.rows.push_back(make_row(0.0, state, ctx, record.bound_failures));

    const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    Dist last_recorded = state;
    auto log = logger();
    for (std::size_t i = 1; i <= steps; ++i) {
        const double t = static_cast<double>(i) * cfg.dt;
        try {
            const double leak_before = boundary_leak_rate(spec, state.probs()) * state[trunc];
            state = cfg.integrator == Integrator::Rk4 ? step_rk4(rhs, state, cfg.dt, tol)
                                                      : step_euler(rhs, state, cfg.dt, tol);
            const double leak_after = boundary_leak_rate(spec, state.probs()) * state[trunc];
            record.leak_bound += cfg.dt * std::max(leak_before, leak_after);
            const double drift = std::abs(mean(state) - mu0);
            if (drift > record.leak_bound + cfg.tol_mean) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "mean drift " << drift << " exceeds boundary allowance " << record.leak_bound;
                throw Error(ErrorCode::MeanDrift, msg.str());
            }
        } catch (const Error& e) {
            std::ostringstream msg;
            msg.precision(17);
            msg << e.detail() << " (step " << i << ", t = " << t << ")";
            throw Error(e.code(), msg.str());
        }
        record.steps = i;

        // The persuasion model lives on {0..2k} exactly; its last state is not a cut.
        if (spec.kind != ModelKind::PersuasionPolarization && !record.tail_warning &&
            state[trunc] > cfg.tail_warn) {
            record.tail_warning = true;
            log->warn("tail mass p_N = {} exceeds {} at t = {}; consider a larger trunc", state[trunc],
                      cfg.tail_warn, t);
        }

        if (i % cfg.record_every == 0 || i == steps) {
            record.rows.push_back(make_row(t, state, ctx, record.bound_failures));
            if (may_stop) {
                if (lp_distance(state, last_recorded, 1.0) < kConvergenceThreshold) {
                    record.stopped_early = i < steps;
                    break;
                }
                last_recorded = state;
            }
        }
    }
    record.final_state = state;
    log->debug("{}: {} steps, final gini {}", model_name(spec.kind), record.steps, record.rows.back().gini);
    return record;
}

}  // namespace ginidyn
