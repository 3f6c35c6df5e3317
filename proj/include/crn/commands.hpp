#pragma once

// The `crn` subcommands as library functions: each writes its report to the
// given streams and returns the process exit code.
//
// Exit codes: 0 success, 2 invalid input (parse, validation, rank),
// 3 solver failure, 4 audit failure.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crn/network.hpp"
#include "crn/trajectory_io.hpp"

namespace crn {

enum class Scheme { Trajectory, ExplicitEuler, ImplicitEuler };

const char* to_string(Scheme scheme);
// Accepts "trajectory", "explicit-euler", "implicit-euler".
Scheme parse_scheme(const std::string& name);

enum class OutputFormat { Csv, Json };

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int invalid_input = 2;
inline constexpr int solver_failure = 3;
inline constexpr int audit_failure = 4;
}  // namespace exit_code

struct RunConfig {
    std::string network_path;
    Scheme scheme = Scheme::Trajectory;
    double dt = 0.0;
    double t_end = 0.0;
    double tol = 0.0;        // nonpositive = per-step default
    std::string out_path;    // empty = the `out` stream
    OutputFormat format = OutputFormat::Csv;
    std::optional<std::vector<double>> c_inf;
    AuditThresholds thresholds;
    bool print_audit = true;
    bool lma_predictor = false;
};

// Color only when CRN_NO_COLOR is unset and `stream_is_terminal`.
bool use_color(bool stream_is_terminal);

int cmd_check(const std::string& network_path, std::ostream& out, std::ostream& err, bool color = false);

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err, bool color = false);

struct CompareConfig {
    RunConfig run;  // scheme ignored; out/format unused
    std::vector<Scheme> schemes;
    int levels = 1;  // dt, dt/2, ..., dt/2^(levels-1) per scheme
    bool timing = true;
};

struct CompareRow {
    Scheme scheme = Scheme::Trajectory;
    double dt = 0.0;
    bool completed = false;
    std::string error;
    double final_error = 0.0;  // |c(t_end) - c_ref(t_end)|_inf
    double min_concentration = 0.0;
    double max_energy_increase = 0.0;
    std::optional<double> observed_order;  // log2 of the error ratio to the previous level
    double wall_seconds = 0.0;
};

struct CompareResult {
    double dt_ref = 0.0;
    std::vector<CompareRow> rows;
};

// Reference: trajectory scheme at (finest dt) / 100.
CompareResult run_compare(const CompareConfig& config);

int cmd_compare(const CompareConfig& config, std::ostream& out, std::ostream& err, bool color = false);

}  // namespace crn
