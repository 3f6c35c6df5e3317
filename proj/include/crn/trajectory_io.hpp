#pragma once

// Tabular trajectories shared by every integrator, their CSV/JSON encodings
// and the invariant audit.
//
// CSV layout: header `t,c_<species>...,R_<reaction>...,F,cons_<k>...` (R
// columns only for the trajectory scheme), one row per time level starting
// at t = 0, 17 significant digits with '.' as decimal separator. A run that
// stopped early ends with the line `# truncated`.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crn/baselines.hpp"
#include "crn/network.hpp"
#include "crn/scheme.hpp"

namespace crn {

struct TrajectoryRow {
    double t = 0.0;
    Vector c;
    Vector R;  // empty unless the scheme tracks extents
    double F = 0.0;
    Vector cons;  // relative conservation residuals
};

struct TrajectoryTable {
    std::vector<std::string> species;
    std::vector<std::string> reactions;  // empty when rows carry no R
    std::size_t num_conservation = 0;
    std::vector<TrajectoryRow> rows;
    bool truncated = false;
};

TrajectoryTable make_table(const ReactionNetwork& network, const SimulationResult& result);
TrajectoryTable make_table(const ReactionNetwork& network, const Vector& c0, const ConservationBasis& basis,
                           const BaselineResult& result);

// 17 significant digits, locale independent.
std::string format_real(double value);

void write_csv(std::ostream& out, const TrajectoryTable& table);
// Inverse of write_csv. Throws InvalidInput on malformed content.
TrajectoryTable read_csv(std::istream& in);

struct AuditThresholds {
    double max_energy_increase = 1e-10;
    double max_conservation = 1e-10;  // relative, as stored in cons_<k>
};

struct NewtonStats {
    std::size_t steps = 0;
    long total_iters = 0;
    int max_iters = 0;
    long total_backtracks = 0;
    double max_gradient_norm = 0.0;
};

struct AuditReport {
    // max_n F(n+1) - F(n); NaN when some F is not finite.
    double max_energy_increase = 0.0;
    std::size_t energy_row = 0;  // row where the worst increase ends
    double min_concentration = 0.0;
    std::size_t min_row = 0;
    std::size_t min_species = 0;
    std::vector<double> max_conservation;  // per basis vector, |cons_k| maximum
    double final_affinity = 0.0;           // |S^T mu|_inf at the last row (NaN if c is not positive)
    double final_lma_residual = 0.0;       // max_l |k+ c^a - k- c^b| at the last row
    bool energy_ok = false;
    bool positivity_ok = false;
    bool conservation_ok = false;
    std::optional<NewtonStats> newton;

    bool passed() const { return energy_ok && positivity_ok && conservation_ok; }
};

// Everything except `newton` is a function of the table, the network and
// c_inf only, so auditing a table read back from CSV reproduces it exactly.
AuditReport audit(const TrajectoryTable& table, const ReactionNetwork& network, const Vector& c_inf,
                  const AuditThresholds& thresholds = {});

NewtonStats newton_stats(const std::vector<StepReport>& steps);

// Field-by-field equality that treats NaN as equal to NaN; `newton` ignored.
bool same_audit_values(const AuditReport& a, const AuditReport& b);

std::string format_audit(const AuditReport& report, const TrajectoryTable& table, bool color);

struct JsonExtras {
    std::string scheme;
    double dt = 0.0;
    double t_end = 0.0;
    Vector c_inf;
    const std::vector<StepReport>* steps = nullptr;
    const std::vector<PositivityViolation>* violations = nullptr;
    const AuditReport* audit = nullptr;
    std::string error;
};

void write_json(std::ostream& out, const TrajectoryTable& table, const JsonExtras& extras);

}  // namespace crn
