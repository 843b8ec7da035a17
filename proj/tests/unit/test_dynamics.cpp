#include "ginidyn/dynamics.hpp"
#include "ginidyn/error.hpp"
#include "ginidyn/metrics.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace ginidyn {
namespace {

void expect_vec_near(const std::vector<double>& got, const std::vector<double>& want, double tol) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_NEAR(got[i], want[i], tol) << "entry " << i;
    }
}

TEST(RhsRichBiased, HandEvaluation) {
    const auto d = make_dist({0.5, 0.5}).padded(2);
    const auto dp = rhs_rich_biased(d);
    expect_vec_near(dp, {0.25, -0.5, 0.25}, 1e-15);
    EXPECT_NEAR(oracle::sum(dp), 0.0, 1e-16);
    EXPECT_NEAR(oracle::first_moment(dp), 0.0, 1e-16);
}

TEST(RhsRichBiased, OriginIsAbsorbing) {
    expect_vec_near(rhs_rich_biased(dirac(0, 6)), std::vector<double>(7, 0.0), 0.0);
}

TEST(RhsRichBiased, ConservesMassAndLeaksMeanAtBoundary) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = oracle::random_dist(rng, 2 + trial % 30);
        const auto dp = rhs_rich_biased(d);
        EXPECT_LE(std::abs(oracle::sum(dp)), 1e-13);
        const double leak = boundary_leak_rate(ModelSpec{ModelKind::RichBiased}, d.probs()) * d[d.trunc()];
        EXPECT_LE(std::abs(oracle::first_moment(dp)), leak + 1e-13);
        // The defect is exactly the cut flux: -wbar p_N.
        EXPECT_NEAR(static_cast<double>(oracle::first_moment(dp)), -leak, 1e-13);
    }
}

TEST(RhsIpp, EquilibriumIsFixed) {
    expect_vec_near(rhs_ipp(make_dist({0.0, 1.0, 0.0}), 1), {0.0, 0.0, 0.0}, 0.0);
}

TEST(RhsIpp, HandEvaluation) {
    const auto dp = rhs_ipp(make_dist({0.5, 0.0, 0.5}), 1);
    expect_vec_near(dp, {-0.25, 0.5, -0.25}, 1e-15);
    EXPECT_NEAR(oracle::sum(dp), 0.0, 1e-16);
    EXPECT_NEAR(oracle::first_moment(dp), 0.0, 1e-16);
}

TEST(RhsIpp, TruncationMismatch) {
    EXPECT_THROW(rhs_ipp(make_dist({0.5, 0.5}), 1), Error);
    EXPECT_THROW(rhs_ipp(uniform(4), 1), Error);
}

TEST(RhsIpp, ConservesMassAndMean) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 1 + trial % 6;
        const auto d = oracle::random_dist(rng, 2 * k);
        const auto dp = rhs_ipp(d, k);
        EXPECT_LE(std::abs(oracle::sum(dp)), 1e-13);
        EXPECT_LE(std::abs(oracle::first_moment(dp)), 1e-13);
    }
}

TEST(RhsIpp, MassIsInvariantOffTheSimplex) {
    // Rounding pushes states slightly off unit mass; the operator must not amplify it.
    const std::vector<double> p{0.3, 0.2, 0.25, 0.1, 0.25 + 1e-9};
    EXPECT_LE(std::abs(oracle::sum(rhs_ipp(p))), 1e-16);
}

TEST(RhsIpp, ShiftedBernoulliIsStationary) {
    for (std::size_t k : {1u, 2u, 3u}) {
        for (double mu = 0.05; mu < 2.0 * k - 1.0; mu += 0.17) {
            const auto dp = rhs_ipp(shifted_bernoulli(mu, 2 * k), k);
            expect_vec_near(dp, std::vector<double>(2 * k + 1, 0.0), 1e-14);
        }
    }
}

TEST(RhsSticky, EquilibriumIsFixed) {
    expect_vec_near(rhs_sticky(make_dist({0.3, 0.7}), 0.7), {0.0, 0.0}, 1e-16);
}

TEST(RhsSticky, HandEvaluation) {
    const auto dp = rhs_sticky(make_dist({0.6, 0.3, 0.1, 0.0}), 0.5);
    expect_vec_near(dp, {-0.06, 0.13, -0.08, 0.01}, 1e-15);
    EXPECT_NEAR(oracle::sum(dp), 0.0, 1e-16);
    EXPECT_NEAR(oracle::first_moment(dp), 0.0, 1e-15);
}

TEST(RhsSticky, OriginIsNotStationaryAtMuOne) {
    const auto dp = rhs_sticky(dirac(0, 3), 1.0);
    EXPECT_EQ(dp[0], -1.0);
    EXPECT_EQ(dp[1], 1.0);
}

TEST(RhsSticky, ShiftedBernoulliIsStationaryForMuAtMostOne) {
    for (double mu = 0.05; mu <= 1.0; mu += 0.05) {
        const auto dp = rhs_sticky(shifted_bernoulli(mu, 6), mu);
        expect_vec_near(dp, std::vector<double>(7, 0.0), 1e-14);
    }
    expect_vec_near(rhs_sticky(shifted_bernoulli(1.0, 6), 1.0), std::vector<double>(7, 0.0), 1e-14);
}

TEST(RhsSticky, ConservesMassAndLeaksMeanAtBoundary) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = oracle::random_dist(rng, 2 + trial % 20);
        const ModelSpec spec{ModelKind::StickyDispersion, 1, mean(d)};
        if (!(spec.mu > 0.0)) {
            continue;
        }
        const auto dp = rhs_sticky(d, spec.mu);
        EXPECT_LE(std::abs(oracle::sum(dp)), 1e-13);
        const double leak = boundary_leak_rate(spec, d.probs()) * d[d.trunc()];
        EXPECT_LE(std::abs(oracle::first_moment(dp)), leak + 1e-13);
    }
}

TEST(StepRk4, ZeroFieldIsExactFixedPoint) {
    const Rhs zero = [](std::span<const double> p) { return std::vector<double>(p.size(), 0.0); };
    const auto d = make_dist({0.1, 0.2, 0.3, 0.4});
    EXPECT_EQ(step_rk4(zero, d, 0.37), d);
}

TEST(StepRk4, IppEquilibriumStays) {
    const auto d = make_dist({0.0, 1.0, 0.0});
    EXPECT_EQ(step_rk4(make_rhs({ModelKind::PersuasionPolarization, 1}), d, 0.01), d);
}

TEST(StepRk4, MassChangePerStepIsRounding) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 1 + trial % 4;
        const auto d = oracle::random_dist(rng, 2 * k);
        ModelSpec spec;
        switch (trial % 3) {
        case 0: spec = {ModelKind::RichBiased}; break;
        case 1: spec = {ModelKind::PersuasionPolarization, k}; break;
        default: spec = {ModelKind::StickyDispersion, 1, std::max(mean(d), 0.1)}; break;
        }
        const auto next = step_rk4(make_rhs(spec), d, 0.01);
        EXPECT_LT(std::abs(next.total_mass() - d.total_mass()), 1e-14);
    }
}

TEST(StepRk4, RaisesPositivityViolationForHugeStep) {
    const auto d = make_dist({0.2, 0.2, 0.2, 0.2, 0.2}).padded(30);
    try {
        step_rk4(make_rhs({ModelKind::StickyDispersion, 1, 2.0}), d, 5.0);
        FAIL() << "expected PositivityViolation";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PositivityViolation);
    }
}

TEST(StepRk4, RaisesMassDrift) {
    const Rhs leaky = [](std::span<const double> p) { return std::vector<double>(p.size(), 1e-3); };
    try {
        step_rk4(leaky, make_dist({0.5, 0.5}), 0.1);
        FAIL() << "expected MassDrift";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MassDrift);
    }
}

// Self-convergence: halving dt shrinks the error by ~2^order.
Dist integrate(const Rhs& rhs, Dist d, double dt, double t_end, Integrator integ) {
    const auto steps = static_cast<int>(std::lround(t_end / dt));
    for (int i = 0; i < steps; ++i) {
        d = integ == Integrator::Rk4 ? step_rk4(rhs, d, dt) : step_euler(rhs, d, dt);
    }
    return d;
}

TEST(Integrators, ObservedOrderOfAccuracy) {
    const Rhs rhs = make_rhs({ModelKind::PersuasionPolarization, 2});
    const auto d0 = make_dist({0.36, 0.16, 0.16, 0.16, 0.16});
    const double t_end = 2.0;
    const auto reference = integrate(rhs, d0, 1e-4, t_end, Integrator::Rk4);
    const auto err = [&](double dt, Integrator integ) {
        return lp_distance(integrate(rhs, d0, dt, t_end, integ), reference, 1.0);
    };

    EXPECT_NEAR(std::log2(err(0.1, Integrator::Rk4) / err(0.05, Integrator::Rk4)), 4.0, 0.5);
    EXPECT_NEAR(std::log2(err(0.02, Integrator::Euler) / err(0.01, Integrator::Euler)), 1.0, 0.2);
}

TEST(Simulate, IppUniformGiniNonincreasing) {
    SimConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 200.0;
    cfg.record_every = 1;
    const auto rec = simulate({ModelKind::PersuasionPolarization, 2}, uniform(4), cfg);
    ASSERT_EQ(rec.rows.size(), 20001u);
    for (std::size_t i = 1; i < rec.rows.size(); ++i) {
        ASSERT_LE(rec.rows[i].gini, rec.rows[i - 1].gini + 1e-10) << "row " << i;
        ASSERT_GT(rec.rows[i].t, rec.rows[i - 1].t);
    }
    // Integer mean: p_1 = p_3 = x obeys x' = -x^2, so the approach to the
    // point mass at 2 is algebraic, G ~ x ~ 1/t.
    EXPECT_GT(rec.rows.back().gini, 1e-3);
    EXPECT_LT(rec.rows.back().gini, 1e-2);
    EXPECT_NEAR(rec.rows.back().mass, 1.0, 1e-12);
    EXPECT_NEAR(rec.rows.back().mean, 2.0, 1e-12);
}

TEST(Simulate, StickyConvergesToShiftedBernoulli) {
    SimConfig cfg;
    cfg.trunc = 10;
    cfg.t_end = 100.0;
    cfg.record_every = 100;
    const auto rec = simulate({ModelKind::StickyDispersion, 1, 0.7}, make_dist({0.5, 0.3, 0.2}), cfg);
    ASSERT_TRUE(rec.final_state);
    EXPECT_LT(lp_distance(*rec.final_state, shifted_bernoulli(0.7, 10), 1.0), 1e-6);
    EXPECT_NEAR(rec.rows.back().gini, 0.3, 1e-6);
    EXPECT_LT(rec.rows.back().w1_equil, 1e-6);
}

TEST(Simulate, StickyRejectsDatumWithOtherMean) {
    SimConfig cfg;
    cfg.trunc = 10;
    try {
        simulate({ModelKind::StickyDispersion, 1, 0.7}, make_dist({0.3, 0.2, 0.5}), cfg);
        FAIL() << "expected InvalidInitialDatum";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidInitialDatum);
    }
}

TEST(Simulate, RichBiasedGiniNondecreasing) {
    SimConfig cfg;
    cfg.dt = 0.005;
    cfg.t_end = 10.0;
    cfg.record_every = 10;
    const auto rec = simulate({ModelKind::RichBiased}, rich_biased_default_datum(200), cfg);
    for (std::size_t i = 1; i < rec.rows.size(); ++i) {
        ASSERT_GE(rec.rows[i].gini, rec.rows[i - 1].gini - 1e-10) << "row " << i;
    }
    EXPECT_FALSE(rec.tail_warning);
}

TEST(Simulate, RecordsEveryStrideAndFinalStep) {
    SimConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 1.05;  // 11 steps after rounding t_end / dt
    cfg.record_every = 4;
    const auto rec = simulate({ModelKind::PersuasionPolarization, 1}, make_dist({0.2, 0.5, 0.3}), cfg);
    std::vector<double> times;
    for (const auto& r : rec.rows) {
        times.push_back(r.t);
    }
    ASSERT_EQ(times.size(), 4u);
    EXPECT_EQ(times[0], 0.0);
    EXPECT_NEAR(times[1], 0.4, 1e-15);
    EXPECT_NEAR(times[2], 0.8, 1e-15);
    EXPECT_NEAR(times[3], 1.1, 1e-15);
}

TEST(Simulate, IppTruncationMustBeTwoK) {
    SimConfig cfg;
    cfg.trunc = 6;
    EXPECT_THROW(simulate({ModelKind::PersuasionPolarization, 2}, uniform(4), cfg), Error);
    SimConfig inferred;
    inferred.t_end = 0.1;
    EXPECT_NO_THROW(simulate({ModelKind::PersuasionPolarization, 3}, uniform(4), inferred));
}

TEST(Simulate, AttachesBoundReports) {
    SimConfig cfg;
    cfg.t_end = 5.0;
    cfg.record_every = 50;
    cfg.bounds = {Check::Thm1, Check::Thm2, Check::KeyInequality, Check::Prop2W1Upper};
    const auto rec = simulate({ModelKind::PersuasionPolarization, 2}, make_dist({0.36, 0.16, 0.16, 0.16, 0.16}), cfg);
    EXPECT_EQ(rec.bound_failures, 0u);
    for (const auto& row : rec.rows) {
        ASSERT_EQ(row.bounds.size(), 4u);
        EXPECT_EQ(row.bounds[0].name, "thm1");
    }
}

TEST(Simulate, RejectsInapplicableBound) {
    SimConfig cfg;
    cfg.bounds = {Check::WeakBound};
    EXPECT_THROW(simulate({ModelKind::PersuasionPolarization, 2}, make_dist({0.36, 0.16, 0.16, 0.16, 0.16}), cfg),
                 Error);
}

TEST(Simulate, StopsOnConvergenceExceptRichBiased) {
    SimConfig cfg;
    cfg.trunc = 6;
    cfg.t_end = 500.0;
    cfg.record_every = 100;
    cfg.stop_on_convergence = true;
    const auto sticky = simulate({ModelKind::StickyDispersion, 1, 0.7}, make_dist({0.5, 0.3, 0.2}), cfg);
    EXPECT_TRUE(sticky.stopped_early);
    EXPECT_LT(sticky.steps, 50000u);

    cfg.trunc = 40;
    cfg.t_end = 2.0;
    const auto rich = simulate({ModelKind::RichBiased}, rich_biased_default_datum(40), cfg);
    EXPECT_FALSE(rich.stopped_early);
    EXPECT_EQ(rich.steps, 200u);
}

TEST(Simulate, TailWarningAndBoundedMeanDrift) {
    SimConfig cfg;
    cfg.trunc = 8;
    cfg.t_end = 20.0;
    cfg.record_every = 100;
    const auto rec = simulate({ModelKind::RichBiased}, rich_biased_default_datum(8), cfg);
    EXPECT_TRUE(rec.tail_warning);
    EXPECT_GT(rec.leak_bound, 0.0);
    const double mu0 = rec.rows.front().mean;
    for (const auto& row : rec.rows) {
        EXPECT_LE(std::abs(row.mean - mu0), rec.leak_bound + cfg.tol_mean);
        EXPECT_NEAR(row.mass, 1.0, cfg.tol_mass);
    }
}

TEST(Simulate, StepErrorsCarryStepAndTime) {
    SimConfig cfg;
    cfg.trunc = 30;
    cfg.dt = 5.0;
    cfg.t_end = 10.0;
    try {
        simulate({ModelKind::StickyDispersion, 1, 2.0}, make_dist({0.2, 0.2, 0.2, 0.2, 0.2}), cfg);
        FAIL() << "expected an integrator error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PositivityViolation);
        EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos) << e.what();
    }
}

TEST(Simulate, RejectsBadConfig) {
    SimConfig cfg;
    cfg.dt = 0.0;
    EXPECT_THROW(simulate({ModelKind::RichBiased}, uniform(4), cfg), Error);
    SimConfig tiny;
    EXPECT_THROW(simulate({ModelKind::RichBiased}, make_dist({0.5, 0.5}), tiny), Error);
}

TEST(ModelNames, RoundTrip) {
    for (auto k : {ModelKind::RichBiased, ModelKind::PersuasionPolarization, ModelKind::StickyDispersion}) {
        EXPECT_EQ(parse_model(model_name(k)), k);
    }
    EXPECT_FALSE(parse_model("brownian"));
}

}  // namespace
}  // namespace ginidyn
