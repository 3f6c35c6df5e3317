#include "crn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crn/scheme.hpp"

namespace crn {

namespace {

constexpr double kNewtonTol = 1e-12;
constexpr int kNewtonMaxIters = 50;

// Monomial derivative d(c^e)/dc_j without division, so zero entries are fine.
double monomial_derivative(const Vector& c, const std::vector<int>& e, std::size_t j) {
    if (e[j] == 0) return 0.0;
    std::vector<int> reduced = e;
    --reduced[j];
    return e[j] * monomial(c, reduced);
}

void check_initial(const ReactionNetwork& network, const Vector& c0) {
    if (static_cast<std::size_t>(c0.size()) != network.num_species())
        throw InvalidInput("initial concentration vector has the wrong length");
    if (!c0.allFinite() || (c0.array() < 0.0).any())
        throw InvalidInput("initial concentrations must be finite and nonnegative");
}

void append_state(BaselineResult& out, double t, Vector c) {
    const std::size_t step = out.c.size();
    if (!c.allFinite()) {
        std::ostringstream os;
        os << "non-finite concentration at step " << step << " (t = " << t << ")";
        NonFinite err(os.str(), step);
        err.attach_partial(out);
        throw err;
    }
    for (Eigen::Index i = 0; i < c.size(); ++i)
        if (c(i) < 0.0) out.violations.push_back({step, static_cast<std::size_t>(i), c(i)});
    out.t.push_back(t);
    out.energy.push_back(free_energy(c, out.equilibrium.c_inf));
    out.c.push_back(std::move(c));
}

template <class Step>
BaselineResult integrate(const ReactionNetwork& network, const Vector& c0, double dt, double t_end,
                         const EquilibriumState* equilibrium, Step&& step) {
    check_initial(network, c0);
    const std::vector<double> grid = time_grid(dt, t_end);
    BaselineResult out;
    out.equilibrium = equilibrium ? *equilibrium : solve_equilibrium(network);
    append_state(out, 0.0, c0);
    const std::size_t steps = grid.size() - 1;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double h = k < steps ? dt : grid[k] - grid[k - 1];
        Vector next;
        try {
            next = step(out.c.back(), h, k);
        } catch (BaselineFailure& e) {
            e.attach_partial(out);
            throw;
        }
        append_state(out, grid[k], std::move(next));
    }
    return out;
}

}  // namespace

Matrix rate_jacobian(const ReactionNetwork& network, const Vector& c) {
    const std::size_t n = network.num_species();
    const std::size_t m = network.num_reactions();
    Matrix jac(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t l = 0; l < m; ++l) {
        const Reaction& rx = network.reactions()[l];
        for (std::size_t j = 0; j < n; ++j)
            jac(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) =
                rx.k_plus * monomial_derivative(c, rx.alpha, j) - rx.k_minus * monomial_derivative(c, rx.beta, j);
    }
    return jac;
}

BaselineResult explicit_euler(const ReactionNetwork& network, const Vector& c0, double dt, double t_end,
                              const EquilibriumState* equilibrium) {
    const Matrix& s = network.stoich_real();
    return integrate(network, c0, dt, t_end, equilibrium, [&](const Vector& c, double h, std::size_t) {
        return Vector(c + h * s * lma_rates(network, c).net());
    });
}

BaselineResult implicit_euler(const ReactionNetwork& network, const Vector& c0, double dt, double t_end,
                              const EquilibriumState* equilibrium) {
    const Matrix& s = network.stoich_real();
    const auto n = static_cast<Eigen::Index>(network.num_species());
    return integrate(network, c0, dt, t_end, equilibrium, [&](const Vector& c_prev, double h, std::size_t k) {
        const double tol = kNewtonTol * std::max(1.0, c_prev.lpNorm<Eigen::Infinity>());
        Vector c = c_prev;
        std::vector<double> trace;
        for (int iter = 0; iter <= kNewtonMaxIters; ++iter) {
            const Vector residual = c - c_prev - h * s * lma_rates(network, c).net();
            const double norm = residual.lpNorm<Eigen::Infinity>();
            trace.push_back(norm);
            if (!std::isfinite(norm)) break;
            if (norm <= tol) return c;
            if (iter == kNewtonMaxIters) break;
            const Matrix jac = Matrix::Identity(n, n) - h * s * rate_jacobian(network, c);
            const Eigen::PartialPivLU<Matrix> lu(jac);
            c -= lu.solve(residual);
        }
        std::ostringstream os;
        os << "implicit Euler Newton failed at step " << k << " after " << trace.size() << " residual evaluations"
           << " (last |G| = " << trace.back() << ")";
        throw NewtonDivergence(os.str(), k, std::move(trace));
    });
}

}  // namespace crn
