#include "crn/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace crn {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr double kBoundaryFraction = 0.99;  // keep >= 1% of each positive quantity
constexpr int kMaxBacktracks = 60;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// x_l + a_l, the argument that must stay positive in d(R, R_n).
Vector shifted_increments(const StepContext& ctx, const Vector& R) { return R - ctx.R_n + ctx.scale; }

void check_admissible(const StepContext& ctx, const ReactionNetwork& network, const Vector& R, const Vector& c) {
    const Vector w = shifted_increments(ctx, R);
    for (Eigen::Index l = 0; l < w.size(); ++l) {
        if (!(w(l) > 0.0)) {
            std::ostringstream os;
            os << "extent of reaction " << network.reactions()[static_cast<std::size_t>(l)].name
               << " leaves the admissible region (R - R_n + a = " << w(l) << ")";
            throw DomainError(os.str());
        }
    }
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (!(c(i) > 0.0)) {
            std::ostringstream os;
            os << "concentration of " << network.species()[static_cast<std::size_t>(i)]
               << " is not positive (" << c(i) << ")";
            throw DomainError(os.str());
        }
    }
}

// Largest t in (0, 1] keeping every concentration and every x_l + a_l above
// 1% of its current value along R + t d.
double fraction_to_boundary(const StepContext& ctx, const ReactionNetwork& network, const Vector& R,
                            const Vector& c, const Vector& d) {
    double t = 1.0;
    const Vector dc = network.stoich_real() * d;
    for (Eigen::Index i = 0; i < c.size(); ++i)
        if (dc(i) < 0.0) t = std::min(t, kBoundaryFraction * c(i) / -dc(i));
    const Vector w = shifted_increments(ctx, R);
    for (Eigen::Index l = 0; l < w.size(); ++l)
        if (d(l) < 0.0) t = std::min(t, kBoundaryFraction * w(l) / -d(l));
    return t;
}

}  // namespace

StepContext make_step_context(const ReactionNetwork& network, const Vector& c0, const Vector& R_n, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time step must be positive and finite");
    const auto n = static_cast<Eigen::Index>(network.num_species());
    const auto m = static_cast<Eigen::Index>(network.num_reactions());
    if (c0.size() != n || R_n.size() != m) throw InvalidInput("state vector has the wrong length");

    StepContext ctx;
    ctx.c0 = c0;
    ctx.R_n = R_n;
    ctx.dt = dt;
    ctx.c_n = concentrations(network, c0, R_n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(ctx.c_n(i) > 0.0)) {
            std::ostringstream os;
            os << "step needs strictly positive concentrations; " << network.species()[static_cast<std::size_t>(i)]
               << " = " << ctx.c_n(i);
            throw DomainError(os.str());
        }
    }

    // Range check in log space before forming the product directly.
    static const double log_max = std::log(std::numeric_limits<double>::max());
    static const double log_min = std::log(std::numeric_limits<double>::min());
    ctx.scale.resize(m);
    for (Eigen::Index l = 0; l < m; ++l) {
        const Reaction& rx = network.reactions()[static_cast<std::size_t>(l)];
        double log_a = std::log(rx.k_minus) + std::log(dt);
        for (Eigen::Index i = 0; i < n; ++i) log_a += rx.beta[static_cast<std::size_t>(i)] * std::log(ctx.c_n(i));
        if (log_a > log_max || log_a < log_min) {
            std::ostringstream os;
            os << "dissipation scale of reaction " << rx.name << " is out of range (ln a = " << log_a << ")";
            throw NumericalFailure(os.str());
        }
        ctx.scale(l) = rx.k_minus * monomial(ctx.c_n, rx.beta) * dt;
    }
    return ctx;
}

bool is_admissible(const StepContext& ctx, const ReactionNetwork& network, const Vector& R) {
    const Vector c = concentrations(network, ctx.c0, R);
    return (c.array() > 0.0).all() && (shifted_increments(ctx, R).array() > 0.0).all();
}

double d_R_squared(const StepContext& ctx, const Vector& R) {
    double d = 0.0;
    for (Eigen::Index l = 0; l < R.size(); ++l) {
        const double x = R(l) - ctx.R_n(l);
        const double a = ctx.scale(l);
        if (!(x + a > 0.0)) {
            std::ostringstream os;
            os << "trajectory distance undefined: R - R_n + a = " << x + a << " for reaction " << l + 1;
            throw DomainError(os.str());
        }
        d += (x + a) * std::log1p(x / a) - x;
    }
    return d;
}

double objective(const StepContext& ctx, const ReactionNetwork& network, const Vector& c_inf, const Vector& R) {
    const Vector c = concentrations(network, ctx.c0, R);
    check_admissible(ctx, network, R, c);
    return d_R_squared(ctx, R) + free_energy(c, c_inf);
}

Vector gradient(const StepContext& ctx, const ReactionNetwork& network, const Vector& c_inf, const Vector& R) {
    const Vector c = concentrations(network, ctx.c0, R);
    check_admissible(ctx, network, R, c);
    Vector g = network.stoich_real().transpose() * chemical_potential(c, c_inf);
    for (Eigen::Index l = 0; l < g.size(); ++l) g(l) += std::log1p((R(l) - ctx.R_n(l)) / ctx.scale(l));
    return g;
}

Matrix hessian(const StepContext& ctx, const ReactionNetwork& network, const Vector& R) {
    const Vector c = concentrations(network, ctx.c0, R);
    check_admissible(ctx, network, R, c);
    const Matrix& s = network.stoich_real();
    Matrix h = s.transpose() * c.cwiseInverse().asDiagonal() * s;
    h.diagonal() += shifted_increments(ctx, R).cwiseInverse();
    return h;
}

double default_tolerance(const StepContext& ctx, const ReactionNetwork& network, const Vector& c_inf) {
    return 1e-12 * std::max(1.0, affinity(network, ctx.c_n, c_inf).lpNorm<Eigen::Infinity>());
}

StepReport solve_step(const StepContext& ctx, const ReactionNetwork& network, const Vector& c_inf,
                      const StepOptions& options) {
    const double tol = options.tol > 0.0 ? options.tol : default_tolerance(ctx, network, c_inf);
    StepReport report;
    report.energy_before = free_energy(ctx.c_n, c_inf);

    Vector R = ctx.R_n;
    double J = objective(ctx, network, c_inf, R);

    if (options.lma_predictor) {
        const Vector guess = ctx.R_n + ctx.dt * lma_rates(network, ctx.c_n).net();
        if (guess.allFinite() && is_admissible(ctx, network, guess)) {
            const double Jg = objective(ctx, network, c_inf, guess);
            if (Jg <= J) {
                R = guess;
                J = Jg;
            }
        }
    }

    Vector c = concentrations(network, ctx.c0, R);
    Vector g = gradient(ctx, network, c_inf, R);

    auto snapshot = [&] {
        report.R_next = R;
        report.c_next = c;
        report.objective_value = J;
        report.gradient_norm = g.lpNorm<Eigen::Infinity>();
        report.energy_after = free_energy(c, c_inf);
        return report;
    };

    for (int iter = 0;; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() <= tol) return snapshot();
        if (iter >= options.max_iters) {
            std::ostringstream os;
            os << "Newton did not reach |grad J| <= " << tol << " in " << options.max_iters
               << " iterations (|grad J| = " << g.lpNorm<Eigen::Infinity>() << ")";
            throw MaxIterationsExceeded(os.str(), snapshot());
        }

        const Eigen::LLT<Matrix> llt(hessian(ctx, network, R));
        if (llt.info() != Eigen::Success) throw NumericalFailure("Hessian is not numerically positive definite");
        const Vector d = -llt.solve(g);
        const double slope = g.dot(d);  // -(Newton decrement)^2
        if (!std::isfinite(slope) || slope >= 0.0) throw NumericalFailure("Newton direction is not a descent direction");
        // With the default tolerance, a correction below the spacing of the
        // doubles around R also ends the iteration: the gradient cannot get
        // smaller than |H| ulp(R).
        if (options.tol <= 0.0 &&
            d.lpNorm<Eigen::Infinity>() <= 4.0 * kEps * std::max(1.0, R.lpNorm<Eigen::Infinity>()))
            return snapshot();

        double t = fraction_to_boundary(ctx, network, R, c, d);
        ++report.newton_iters;

        // Near the minimizer the predicted decrease drops below the rounding
        // level of J, so Armijo cannot discriminate; take the plain step.
        if (t == 1.0 && -slope <= 1e-12 * std::max(1.0, std::abs(J))) {
            const Vector trial = R + d;
            if (is_admissible(ctx, network, trial)) {
                R = trial;
                c = concentrations(network, ctx.c0, R);
                J = objective(ctx, network, c_inf, R);
                g = gradient(ctx, network, c_inf, R);
                continue;
            }
        }

        bool accepted = false;
        for (int k = 0; k <= kMaxBacktracks; ++k) {
            const Vector trial = R + t * d;
            if (is_admissible(ctx, network, trial)) {
                const double Jt = objective(ctx, network, c_inf, trial);
                if (Jt <= J + kArmijo * t * slope) {
                    R = trial;
                    J = Jt;
                    accepted = true;
                    break;
                }
            }
            t *= kBacktrack;
            ++report.linesearch_backtracks;
        }
        if (!accepted) {
            std::ostringstream os;
            os << "line search found no admissible decrease (|grad J| = " << g.lpNorm<Eigen::Infinity>() << ")";
            throw LineSearchStall(os.str(), snapshot());
        }
        c = concentrations(network, ctx.c0, R);
        g = gradient(ctx, network, c_inf, R);
    }
}

std::vector<double> time_grid(double dt, double t_end) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("time step must be positive and finite");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidInput("end time must be nonnegative and finite");
    if (t_end / dt > 1e8) throw InvalidInput("more than 1e8 time steps requested");
    std::vector<double> t{0.0};
    for (std::size_t k = 1;; ++k) {
        const double tk = static_cast<double>(k) * dt;
        if (tk >= t_end - 1e-9 * dt) {
            if (t_end > t.back()) t.push_back(t_end);
            break;
        }
        t.push_back(tk);
    }
    return t;
}

SimulationResult simulate(const ReactionNetwork& network, const Vector& c0, double dt, double t_end,
                          const SimulationOptions& options) {
    const auto n = static_cast<Eigen::Index>(network.num_species());
    const auto m = static_cast<Eigen::Index>(network.num_reactions());
    if (c0.size() != n) throw InvalidInput("initial concentration vector has the wrong length");
    if (!c0.allFinite() || (c0.array() <= 0.0).any())
        throw InvalidInput("trajectory scheme needs strictly positive initial concentrations");
    const std::vector<double> grid = time_grid(dt, t_end);

    SimulationResult result;
    result.dt = dt;
    result.t_end = t_end;
    result.equilibrium = options.equilibrium ? *options.equilibrium : solve_equilibrium(network);
    result.basis = conservation_basis(network);
    const Vector& c_inf = result.equilibrium.c_inf;

    StepOptions step_options = options.step;
    if (options.tol > 0.0) step_options.tol = options.tol;

    Vector R = Vector::Zero(m);
    auto record = [&](double t, const Vector& extents) {
        SimulationRecord rec;
        rec.t = t;
        rec.R = extents;
        rec.c = concentrations(network, c0, extents);
        rec.F = free_energy(rec.c, c_inf);
        rec.conservation = conservation_residuals(result.basis, c0, rec.c);
        result.records.push_back(std::move(rec));
    };
    record(0.0, R);

    const std::size_t steps = grid.size() - 1;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double h = k < steps ? dt : grid[k] - grid[k - 1];
        try {
            const StepContext ctx = make_step_context(network, c0, R, h);
            StepReport rep = solve_step(ctx, network, c_inf, step_options);
            R = rep.R_next;
            result.steps.push_back(std::move(rep));
        } catch (const Error& e) {
            std::ostringstream os;
            os << "step " << k << " (t = " << grid[k - 1] << " -> " << grid[k] << "): " << e.what();
            throw SimulationError(os.str(), k, std::move(result));
        }
        record(grid[k], R);
    }
    return result;
}

}  // namespace crn
