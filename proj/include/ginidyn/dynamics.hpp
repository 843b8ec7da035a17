#pragma once

#include "ginidyn/dist.hpp"
#include "ginidyn/verifier.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ginidyn {

enum class ModelKind { RichBiased, PersuasionPolarization, StickyDispersion };

std::string_view model_name(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model(std::string_view name) noexcept;

struct ModelSpec {
    ModelKind kind = ModelKind::RichBiased;
    std::size_t k = 1;  ///< PersuasionPolarization: states {0..2k}
    double mu = 0.0;    ///< StickyDispersion: mean entering the rates
};

/// Time derivative of a probability vector. Intermediate Runge-Kutta stages are
/// not valid distributions, so operators act on raw spans.
using Rhs = std::function<std::vector<double>(std::span<const double>)>;

/// Rich-biased exchange. The upward jump out of the last state is cut, so mass
/// is conserved exactly and the mean leaks at rate wbar * p_N.
std::vector<double> rhs_rich_biased(std::span<const double> p);

/// Persuasion-polarization on {0..2k}, with 2k = p.size() - 1.
std::vector<double> rhs_ipp(std::span<const double> p);

/// Sticky dispersion with mean parameter mu; same boundary cut as rich-biased,
/// mean leaks at rate |mu - 1 + p_0| * p_N.
std::vector<double> rhs_sticky(std::span<const double> p, double mu);

std::vector<double> rhs_rich_biased(const Dist& d);
/// Throws TruncationMismatch unless d.trunc() == 2k.
std::vector<double> rhs_ipp(const Dist& d, std::size_t k);
std::vector<double> rhs_sticky(const Dist& d, double mu);

/// Rate multiplying p_N in the mean defect of the truncated operator.
double boundary_leak_rate(const ModelSpec& spec, std::span<const double> p);

/// Validates model parameters for a state space of size trunc + 1.
void validate(const ModelSpec& spec, std::size_t trunc);

Rhs make_rhs(const ModelSpec& spec);

enum class Integrator { Rk4, Euler };

/// Classical four-stage Runge-Kutta step. Entries in [-tol.neg, 0) are clamped
/// to 0; anything lower raises PositivityViolation, and a mass defect beyond
/// tol.mass raises MassDrift.
Dist step_rk4(const Rhs& rhs, const Dist& d, double dt, const Tolerances& tol = {});

/// Explicit Euler step with the same validation, for order-of-accuracy checks.
Dist step_euler(const Rhs& rhs, const Dist& d, double dt, const Tolerances& tol = {});

struct SimConfig {
    std::optional<std::size_t> trunc;  ///< pad the initial datum to this size
    double dt = 0.01;
    double t_end = 10.0;
    std::size_t record_every = 1;
    double tol_mass = 1e-9;
    double tol_mean = 1e-9;
    double tol_neg = 1e-12;
    double tail_warn = 1e-8;
    Integrator integrator = Integrator::Rk4;
    /// Stop once successive recorded states differ by < 1e-12 in l1.
    /// Ignored for the rich-biased model, which has no equilibrium in V_mu.
    bool stop_on_convergence = false;
    std::vector<Check> bounds;  ///< bound reports attached to every row
};

inline constexpr double kConvergenceThreshold = 1e-12;

struct TrajectoryRow {
    double t = 0.0;
    double mass = 0.0;
    double mean = 0.0;
    double gini = 0.0;
    double w1_equil = 0.0;
    double l1_dirac0 = 0.0;
    double tail_mass = 0.0;
    std::vector<BoundReport> bounds;
};

struct TrajectoryRecord {
    std::vector<Check> bound_checks;  ///< column order of TrajectoryRow::bounds
    std::vector<TrajectoryRow> rows;
    std::optional<Dist> final_state;
    std::size_t steps = 0;
    bool stopped_early = false;
    bool tail_warning = false;
    double leak_bound = 0.0;  ///< integrated mean-defect allowance
    std::size_t bound_failures = 0;
};

/// Geometric datum with mean 1 used for the rich-biased model.
Dist rich_biased_default_datum(std::size_t trunc);

/// Integrates the model from d0 to cfg.t_end with a fixed step.
/// Errors raised during stepping are rethrown with the step index and time.
TrajectoryRecord simulate(const ModelSpec& spec, const Dist& d0, const SimConfig& cfg);

}  // namespace ginidyn
