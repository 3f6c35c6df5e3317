#include "crn/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "crn/baselines.hpp"
#include "crn/parser.hpp"
#include "crn/scheme.hpp"

namespace crn {

const char* to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::Trajectory: return "trajectory";
        case Scheme::ExplicitEuler: return "explicit-euler";
        case Scheme::ImplicitEuler: return "implicit-euler";
    }
    return "?";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "trajectory") return Scheme::Trajectory;
    if (name == "explicit-euler") return Scheme::ExplicitEuler;
    if (name == "implicit-euler") return Scheme::ImplicitEuler;
    throw InvalidInput("unknown scheme '" + name + "' (expected trajectory, explicit-euler or implicit-euler)");
}

bool use_color(bool stream_is_terminal) { return stream_is_terminal && std::getenv("CRN_NO_COLOR") == nullptr; }

namespace {

std::string vector_text(const Vector& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_shortest(v(i));
    }
    return s + ")";
}

std::string sci(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 3);
    return std::string(buf, res.ptr);
}

std::string reaction_text(const ReactionNetwork& network, const Reaction& rx) {
    auto side = [&](const std::vector<int>& coeffs) {
        std::string s;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (coeffs[i] == 0) continue;
            if (!s.empty()) s += " + ";
            if (coeffs[i] != 1) s += std::to_string(coeffs[i]) + " ";
            s += network.species()[i];
        }
        return s;
    };
    return side(rx.alpha) + " <=> " + side(rx.beta);
}

struct Setup {
    LoadedNetwork loaded;
    EquilibriumState equilibrium;
    ConservationBasis basis;
};

// Throws InvalidInput for anything wrong with the inputs.
Setup prepare(const RunConfig& config) {
    if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw InvalidInput("--dt must be positive");
    if (!(config.t_end >= 0.0) || !std::isfinite(config.t_end)) throw InvalidInput("--t-end must be nonnegative");
    if (config.tol < 0.0) throw InvalidInput("--tol must be positive");
    Setup s{load_network_file(config.network_path), {}, {}};
    if (!s.loaded.c0) throw InvalidInput("network file has no init lines; an initial state is required");
    if (config.c_inf) {
        Vector v = Eigen::Map<const Vector>(config.c_inf->data(), static_cast<Eigen::Index>(config.c_inf->size()));
        s.equilibrium = make_equilibrium(s.loaded.network, std::move(v));
    } else {
        s.equilibrium = solve_equilibrium(s.loaded.network);
    }
    s.basis = conservation_basis(s.loaded.network);
    return s;
}

struct RunOutcome {
    TrajectoryTable table;
    std::vector<StepReport> steps;
    std::vector<PositivityViolation> violations;
    std::string error;  // nonempty when the run stopped early
};

RunOutcome run_scheme(const Setup& setup, Scheme scheme, double dt, double t_end, double tol, bool predictor) {
    const ReactionNetwork& network = setup.loaded.network;
    const Vector& c0 = *setup.loaded.c0;
    RunOutcome out;
    switch (scheme) {
        case Scheme::Trajectory: {
            SimulationOptions opts;
            opts.tol = tol;
            opts.equilibrium = setup.equilibrium;
            opts.step.lma_predictor = predictor;
            try {
                SimulationResult res = simulate(network, c0, dt, t_end, opts);
                out.table = make_table(network, res);
                out.steps = std::move(res.steps);
            } catch (const SimulationError& e) {
                out.table = make_table(network, e.partial());
                out.table.truncated = true;
                out.steps = e.partial().steps;
                out.error = e.what();
            }
            break;
        }
        case Scheme::ExplicitEuler:
        case Scheme::ImplicitEuler: {
            auto integrator = scheme == Scheme::ExplicitEuler ? explicit_euler : implicit_euler;
            try {
                BaselineResult res = integrator(network, c0, dt, t_end, &setup.equilibrium);
                out.table = make_table(network, c0, setup.basis, res);
                out.violations = std::move(res.violations);
            } catch (const BaselineFailure& e) {
                out.table = make_table(network, c0, setup.basis, e.partial());
                out.table.truncated = true;
                out.violations = e.partial().violations;
                out.error = e.what();
            }
            break;
        }
    }
    return out;
}

}  // namespace

int cmd_check(const std::string& network_path, std::ostream& out, std::ostream& err, bool color) {
    try {
        const LoadedNetwork loaded = load_network_file(network_path);
        const ReactionNetwork& net = loaded.network;
        const std::size_t n = net.num_species();
        const std::size_t m = net.num_reactions();

        out << "network: " << network_path << '\n';
        out << "species (N = " << n << "):";
        for (std::size_t i = 0; i < n; ++i) out << (i ? ", " : " ") << net.species()[i];
        out << '\n';
        out << "reactions (M = " << m << "):\n";
        for (const auto& rx : net.reactions())
            out << "  " << rx.name << ": " << reaction_text(net, rx) << "   kf = " << format_shortest(rx.k_plus)
                << ", kr = " << format_shortest(rx.k_minus) << '\n';

        std::size_t width = 4;
        for (const auto& s : net.species()) width = std::max(width, s.size() + 2);
        std::size_t col = 5;
        for (const auto& rx : net.reactions()) col = std::max(col, rx.name.size() + 2);
        out << "stoichiometric matrix S (species x reactions):\n";
        out << "  " << std::setw(static_cast<int>(width)) << "";
        for (const auto& rx : net.reactions()) out << std::setw(static_cast<int>(col)) << rx.name;
        out << '\n';
        for (std::size_t i = 0; i < n; ++i) {
            out << "  " << std::left << std::setw(static_cast<int>(width)) << net.species()[i] << std::right;
            for (std::size_t l = 0; l < m; ++l)
                out << std::setw(static_cast<int>(col))
                    << net.stoich()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
            out << '\n';
        }
        out << "rank(S) = " << exact_rank(net.stoich()) << '\n';

        const ConservationBasis basis = conservation_basis(net);
        out << "conservation basis (dimension " << basis.size() << "):\n";
        for (std::size_t k = 0; k < basis.size(); ++k)
            out << "  gamma_" << k + 1 << " = " << vector_text(basis.vectors[k]) << '\n';

        const EquilibriumState eq = solve_equilibrium(net);
        out << "equilibrium c_inf = " << vector_text(eq.c_inf) << '\n';
        out << "detailed-balance residual = " << format_real(detailed_balance_residual(net, eq.c_inf)) << '\n';
        if (loaded.c0) {
            out << "initial state c0 = " << vector_text(*loaded.c0) << '\n';
            for (std::size_t k = 0; k < basis.size(); ++k)
                out << "  gamma_" << k + 1 << " . c0 = " << format_shortest(basis.vectors[k].dot(*loaded.c0)) << '\n';
        }
        return exit_code::ok;
    } catch (const InvalidInput& e) {
        err << (color ? "\033[31merror:\033[0m " : "error: ") << e.what() << '\n';
        return exit_code::invalid_input;
    } catch (const Error& e) {
        err << (color ? "\033[31merror:\033[0m " : "error: ") << e.what() << '\n';
        return exit_code::solver_failure;
    }
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err, bool color) {
    const char* error_tag = color ? "\033[31merror:\033[0m " : "error: ";
    std::optional<Setup> prepared;
    try {
        prepared.emplace(prepare(config));
    } catch (const InvalidInput& e) {
        err << error_tag << e.what() << '\n';
        return exit_code::invalid_input;
    } catch (const Error& e) {
        err << error_tag << e.what() << '\n';
        return exit_code::solver_failure;
    }
    const Setup& setup = *prepared;

    RunOutcome run;
    try {
        run = run_scheme(setup, config.scheme, config.dt, config.t_end, config.tol, config.lma_predictor);
    } catch (const InvalidInput& e) {
        err << error_tag << e.what() << '\n';
        return exit_code::invalid_input;
    }

    AuditReport report = audit(run.table, setup.loaded.network, setup.equilibrium.c_inf, config.thresholds);
    if (config.scheme == Scheme::Trajectory) report.newton = newton_stats(run.steps);

    auto emit = [&](std::ostream& os) {
        if (config.format == OutputFormat::Csv) {
            write_csv(os, run.table);
        } else {
            JsonExtras extras;
            extras.scheme = to_string(config.scheme);
            extras.dt = config.dt;
            extras.t_end = config.t_end;
            extras.c_inf = setup.equilibrium.c_inf;
            if (config.scheme == Scheme::Trajectory) extras.steps = &run.steps;
            else extras.violations = &run.violations;
            extras.audit = &report;
            extras.error = run.error;
            write_json(os, run.table, extras);
        }
    };
    if (config.out_path.empty()) {
        emit(out);
    } else {
        std::ofstream file(config.out_path, std::ios::binary);
        if (!file) {
            err << error_tag << "cannot write '" << config.out_path << "'\n";
            return exit_code::invalid_input;
        }
        emit(file);
    }

    if (!run.error.empty()) {
        err << error_tag << run.error << '\n';
        return exit_code::solver_failure;
    }
    if (config.print_audit) err << format_audit(report, run.table, color);
    return report.passed() ? exit_code::ok : exit_code::audit_failure;
}

CompareResult run_compare(const CompareConfig& config) {
    if (config.schemes.size() < 2) throw InvalidInput("compare needs at least two schemes");
    if (config.levels < 1) throw InvalidInput("--levels must be at least 1");
    const Setup setup = prepare(config.run);

    std::vector<double> dts;
    for (int k = 0; k < config.levels; ++k) dts.push_back(config.run.dt / std::pow(2.0, k));
    CompareResult result;
    result.dt_ref = dts.back() / 100.0;

    auto reference = std::async(std::launch::async, [&] {
        return run_scheme(setup, Scheme::Trajectory, result.dt_ref, config.run.t_end, config.run.tol, false);
    });

    struct Job {
        Scheme scheme;
        double dt;
        std::future<std::pair<RunOutcome, double>> future;
    };
    std::vector<Job> jobs;
    for (Scheme s : config.schemes) {
        for (double dt : dts) {
            jobs.push_back({s, dt, std::async(std::launch::async, [&setup, &config, s, dt] {
                                const auto start = std::chrono::steady_clock::now();
                                RunOutcome o =
                                    run_scheme(setup, s, dt, config.run.t_end, config.run.tol, config.run.lma_predictor);
                                const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
                                return std::make_pair(std::move(o), elapsed.count());
                            })});
        }
    }

    const RunOutcome ref = reference.get();
    if (!ref.error.empty()) throw SimulationError("reference run failed: " + ref.error, 0, {});
    const Vector& c_ref = ref.table.rows.back().c;

    for (auto& job : jobs) {
        auto [outcome, seconds] = job.future.get();
        CompareRow row;
        row.scheme = job.scheme;
        row.dt = job.dt;
        row.completed = outcome.error.empty();
        row.error = outcome.error;
        row.wall_seconds = config.timing ? seconds : 0.0;
        const AuditReport a = audit(outcome.table, setup.loaded.network, setup.equilibrium.c_inf);
        row.min_concentration = a.min_concentration;
        row.max_energy_increase = a.max_energy_increase;
        row.final_error = row.completed ? (outcome.table.rows.back().c - c_ref).lpNorm<Eigen::Infinity>()
                                        : std::numeric_limits<double>::quiet_NaN();
        if (!result.rows.empty() && result.rows.back().scheme == row.scheme && row.completed &&
            result.rows.back().completed && row.dt < result.rows.back().dt && row.final_error > 0.0 &&
            result.rows.back().final_error > 0.0)
            row.observed_order = std::log2(result.rows.back().final_error / row.final_error);
        result.rows.push_back(std::move(row));
    }
    return result;
}

int cmd_compare(const CompareConfig& config, std::ostream& out, std::ostream& err, bool color) {
    const char* error_tag = color ? "\033[31merror:\033[0m " : "error: ";
    CompareResult result;
    try {
        result = run_compare(config);
    } catch (const InvalidInput& e) {
        err << error_tag << e.what() << '\n';
        return exit_code::invalid_input;
    } catch (const Error& e) {
        err << error_tag << e.what() << '\n';
        return exit_code::solver_failure;
    }

    out << "reference: trajectory, dt = " << format_shortest(result.dt_ref) << ", t_end = "
        << format_shortest(config.run.t_end) << '\n';
    out << std::left << std::setw(16) << "scheme" << std::setw(12) << "dt" << std::setw(13) << "final_error"
        << std::setw(13) << "min_conc" << std::setw(10) << "positive" << std::setw(13) << "max_dF" << std::setw(8)
        << "order";
    if (config.timing) out << "wall_s";
    out << '\n';
    for (const auto& row : result.rows) {
        const bool positive = row.min_concentration > 0.0;
        std::string flag = positive ? "yes" : "NO";
        if (color) flag = positive ? "\033[32myes\033[0m" : "\033[31mNO\033[0m";
        // Pad by visible width; escape codes would throw setw off.
        const std::string flag_cell = flag + std::string(10 - (positive ? 3 : 2), ' ');
        out << std::left << std::setw(16) << to_string(row.scheme) << std::setw(12) << format_shortest(row.dt)
            << std::setw(13) << sci(row.final_error) << std::setw(13) << sci(row.min_concentration) << flag_cell
            << std::setw(13) << sci(row.max_energy_increase) << std::setw(8)
            << (row.observed_order ? format_shortest(std::round(*row.observed_order * 1000.0) / 1000.0) : "-");
        if (config.timing) out << sci(row.wall_seconds);
        if (!row.completed) out << "  failed: " << row.error;
        out << '\n';
    }
    return exit_code::ok;
}

}  // namespace crn
