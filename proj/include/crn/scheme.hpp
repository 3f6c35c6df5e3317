#pragma once

// Variational time stepping on reaction extents R. Each step minimizes
//
//     J(R) = d(R, R_n) + F(c0 + S R)
//     d(R, R_n) = sum_l (x_l + a_l) ln(x_l / a_l + 1) - x_l,   x = R - R_n,
//
// with a_l = k-_l (c_n)^beta_l dt, over the region where every concentration
// and every x_l + a_l stays positive. J is strictly convex there and its
// unique critical point solves the semi-implicit step
//
//     ln((R_l - R_n,l) / a_l + 1) = -(S^T mu(c(R)))_l.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "crn/network.hpp"

namespace crn {

struct StepContext {
    Vector c0;     // reference concentrations; c(R) = c0 + S R
    Vector R_n;    // previous extents
    Vector c_n;    // c(R_n), strictly positive
    Vector scale;  // a_l = k-_l (c_n)^beta_l dt, strictly positive
    double dt = 0.0;
};

// Builds the per-step data. a_l is range-checked in log space; throws
// NumericalFailure when it would overflow or underflow, DomainError when c_n
// is not strictly positive, InvalidInput when dt <= 0.
StepContext make_step_context(const ReactionNetwork& network, const Vector& c0, const Vector& R_n, double dt);

// True when c(R) > 0 and R_l - R_n,l + a_l > 0 for every l.
bool is_admissible(const StepContext& ctx, const ReactionNetwork& network, const Vector& R);

double d_R_squared(const StepContext& ctx, const Vector& R);
double objective(const StepContext& ctx, const ReactionNetwork& network, const Vector& c_inf, const Vector& R);

// Also the residual of the step equation at R.
Vector gradient(const StepContext& ctx, const ReactionNetwork& network, const Vector& c_inf, const Vector& R);

// diag(1 / (x_l + a_l)) + S^T diag(1 / c) S.
Matrix hessian(const StepContext& ctx, const ReactionNetwork& network, const Vector& R);

struct StepOptions {
    // Stop when |grad J|_inf <= tol. Nonpositive selects default_tolerance()
    // and also stops once the Newton correction drops below the rounding
    // level of R. A positive tol is enforced strictly.
    double tol = 0.0;
    int max_iters = 100;
    // Start Newton from R_n + dt r(c_n) when that point is admissible and no
    // worse than R_n.
    bool lma_predictor = false;
};

// 1e-12 * max(1, |affinity(c_n)|_inf).
double default_tolerance(const StepContext& ctx, const ReactionNetwork& network, const Vector& c_inf);

struct StepReport {
    Vector R_next;
    Vector c_next;
    double objective_value = 0.0;
    double gradient_norm = 0.0;
    int newton_iters = 0;
    int linesearch_backtracks = 0;
    double energy_before = 0.0;
    double energy_after = 0.0;
};

// Solver gave up; `best` holds the last accepted iterate.
class StepFailure : public NumericalFailure {
public:
    StepFailure(const std::string& what, StepReport best) : NumericalFailure(what), best_(std::move(best)) {}
    const StepReport& best() const noexcept { return best_; }

private:
    StepReport best_;
};

class MaxIterationsExceeded : public StepFailure {
public:
    using StepFailure::StepFailure;
};

class LineSearchStall : public StepFailure {
public:
    using StepFailure::StepFailure;
};

// Damped Newton from R_n with fraction-to-boundary clipping and Armijo
// backtracking on J.
StepReport solve_step(const StepContext& ctx, const ReactionNetwork& network, const Vector& c_inf,
                      const StepOptions& options = {});

struct SimulationRecord {
    double t = 0.0;
    Vector c;
    Vector R;
    double F = 0.0;
    Vector conservation;  // conservation_residuals(basis, c0, c)
};

struct SimulationResult {
    std::vector<SimulationRecord> records;  // records[0] is t = 0
    std::vector<StepReport> steps;          // steps[n] produced records[n + 1]
    EquilibriumState equilibrium;
    ConservationBasis basis;
    double dt = 0.0;
    double t_end = 0.0;
};

struct SimulationOptions {
    double tol = 0.0;  // per-step gradient tolerance, nonpositive = default
    std::optional<EquilibriumState> equilibrium;
    StepOptions step;
};

// Failure during step `step` (1-based); `partial` holds every record produced
// before it.
class SimulationError : public Error {
public:
    SimulationError(const std::string& what, std::size_t step, SimulationResult partial)
        : Error(what), step_(step), partial_(std::move(partial)) {}
    std::size_t step() const noexcept { return step_; }
    const SimulationResult& partial() const noexcept { return partial_; }

private:
    std::size_t step_;
    SimulationResult partial_;
};

// Number of steps and the time grid used by every integrator: steps of dt,
// the last one shortened to land on t_end.
std::vector<double> time_grid(double dt, double t_end);

SimulationResult simulate(const ReactionNetwork& network, const Vector& c0, double dt, double t_end,
                          const SimulationOptions& options = {});

}  // namespace crn
