#pragma once

// Conventional integrators on dc/dt = S r(c), kept for comparison. Neither
// safeguards positivity: negative concentrations are logged and the run
// continues with sign-carrying monomials.

#include <cstddef>
#include <string>
#include <vector>

#include "crn/network.hpp"

namespace crn {

struct PositivityViolation {
    std::size_t step = 0;  // index into the series; 0 is the initial state
    std::size_t species = 0;
    double value = 0.0;
};

struct BaselineResult {
    std::vector<double> t;
    std::vector<Vector> c;
    std::vector<double> energy;  // F(c^n); NaN once some c_i < 0
    std::vector<PositivityViolation> violations;
    EquilibriumState equilibrium;
};

// Failure at series index `step`; `partial` holds the states before it.
class BaselineFailure : public NumericalFailure {
public:
    BaselineFailure(const std::string& what, std::size_t step) : NumericalFailure(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }
    const BaselineResult& partial() const noexcept { return partial_; }
    void attach_partial(BaselineResult partial) { partial_ = std::move(partial); }

private:
    std::size_t step_;
    BaselineResult partial_;
};

// A concentration became NaN or infinite.
class NonFinite : public BaselineFailure {
public:
    using BaselineFailure::BaselineFailure;
};

// Newton failure in implicit Euler. `trace` holds |G(c)|_inf per iterate.
class NewtonDivergence : public BaselineFailure {
public:
    NewtonDivergence(const std::string& what, std::size_t step, std::vector<double> trace)
        : BaselineFailure(what, step), trace_(std::move(trace)) {}
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

// d r_l / d c_j, an M x N matrix.
Matrix rate_jacobian(const ReactionNetwork& network, const Vector& c);

// c^{n+1} = c^n + dt S r(c^n). Throws NonFinite on NaN/inf.
BaselineResult explicit_euler(const ReactionNetwork& network, const Vector& c0, double dt, double t_end,
                              const EquilibriumState* equilibrium = nullptr);

// c^{n+1} - dt S r(c^{n+1}) = c^n by Newton from c^n (tolerance 1e-12
// relative to max(1, |c^n|_inf), at most 50 iterations).
BaselineResult implicit_euler(const ReactionNetwork& network, const Vector& c0, double dt, double t_end,
                              const EquilibriumState* equilibrium = nullptr);

}  // namespace crn
