#include "crn/trajectory_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace crn {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_real(const std::string& text, std::size_t line) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw InvalidInput("CSV line " + std::to_string(line) + ": '" + text + "' is not a number");
    return v;
}

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

nlohmann::json real(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

nlohmann::json vec(const Vector& v) {
    auto arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(real(v(i)));
    return arr;
}

}  // namespace

TrajectoryTable make_table(const ReactionNetwork& network, const SimulationResult& result) {
    TrajectoryTable table;
    table.species = network.species();
    for (const auto& rx : network.reactions()) table.reactions.push_back(rx.name);
    table.num_conservation = result.basis.size();
    for (const auto& rec : result.records) table.rows.push_back({rec.t, rec.c, rec.R, rec.F, rec.conservation});
    return table;
}

TrajectoryTable make_table(const ReactionNetwork& network, const Vector& c0, const ConservationBasis& basis,
                           const BaselineResult& result) {
    TrajectoryTable table;
    table.species = network.species();
    table.num_conservation = basis.size();
    for (std::size_t k = 0; k < result.c.size(); ++k)
        table.rows.push_back(
            {result.t[k], result.c[k], Vector(), result.energy[k], conservation_residuals(basis, c0, result.c[k])});
    return table;
}

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const TrajectoryTable& table) {
    out << 't';
    for (const auto& s : table.species) out << ",c_" << s;
    for (const auto& r : table.reactions) out << ",R_" << r;
    out << ",F";
    for (std::size_t k = 0; k < table.num_conservation; ++k) out << ",cons_" << k + 1;
    out << '\n';
    for (const auto& row : table.rows) {
        out << format_real(row.t);
        for (Eigen::Index i = 0; i < row.c.size(); ++i) out << ',' << format_real(row.c(i));
        for (Eigen::Index l = 0; l < row.R.size(); ++l) out << ',' << format_real(row.R(l));
        out << ',' << format_real(row.F);
        for (Eigen::Index k = 0; k < row.cons.size(); ++k) out << ',' << format_real(row.cons(k));
        out << '\n';
    }
    if (table.truncated) out << "# truncated\n";
}

TrajectoryTable read_csv(std::istream& in) {
    TrajectoryTable table;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw InvalidInput("CSV is empty");
    ++line_no;
    const auto header = split_commas(line);
    if (header.empty() || header.front() != "t") throw InvalidInput("CSV header must start with 't'");
    std::size_t pos = 1;
    while (pos < header.size() && header[pos].rfind("c_", 0) == 0) table.species.push_back(header[pos++].substr(2));
    while (pos < header.size() && header[pos].rfind("R_", 0) == 0) table.reactions.push_back(header[pos++].substr(2));
    if (pos >= header.size() || header[pos] != "F") throw InvalidInput("CSV header lacks the F column");
    ++pos;
    while (pos < header.size() && header[pos].rfind("cons_", 0) == 0) {
        ++table.num_conservation;
        ++pos;
    }
    if (pos != header.size()) throw InvalidInput("unexpected CSV column '" + header[pos] + "'");

    const auto n = static_cast<Eigen::Index>(table.species.size());
    const auto m = static_cast<Eigen::Index>(table.reactions.size());
    const auto g = static_cast<Eigen::Index>(table.num_conservation);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line == "# truncated") table.truncated = true;
            continue;
        }
        const auto cells = split_commas(line);
        if (cells.size() != header.size())
            throw InvalidInput("CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                               " fields, expected " + std::to_string(header.size()));
        TrajectoryRow row;
        std::size_t k = 0;
        row.t = parse_real(cells[k++], line_no);
        row.c.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) row.c(i) = parse_real(cells[k++], line_no);
        row.R.resize(m);
        for (Eigen::Index l = 0; l < m; ++l) row.R(l) = parse_real(cells[k++], line_no);
        row.F = parse_real(cells[k++], line_no);
        row.cons.resize(g);
        for (Eigen::Index j = 0; j < g; ++j) row.cons(j) = parse_real(cells[k++], line_no);
        table.rows.push_back(std::move(row));
    }
    return table;
}

AuditReport audit(const TrajectoryTable& table, const ReactionNetwork& network, const Vector& c_inf,
                  const AuditThresholds& thresholds) {
    AuditReport rep;
    rep.max_conservation.assign(table.num_conservation, 0.0);
    if (table.rows.empty()) return rep;

    rep.max_energy_increase = -std::numeric_limits<double>::infinity();
    if (table.rows.size() == 1) rep.max_energy_increase = 0.0;
    rep.min_concentration = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const TrajectoryRow& row = table.rows[r];
        if (r > 0) {
            const double inc = row.F - table.rows[r - 1].F;
            if (std::isnan(inc)) {
                if (!std::isnan(rep.max_energy_increase)) rep.energy_row = r;
                rep.max_energy_increase = std::numeric_limits<double>::quiet_NaN();
            } else if (!std::isnan(rep.max_energy_increase) && inc > rep.max_energy_increase) {
                rep.max_energy_increase = inc;
                rep.energy_row = r;
            }
        }
        for (Eigen::Index i = 0; i < row.c.size(); ++i) {
            if (row.c(i) < rep.min_concentration) {
                rep.min_concentration = row.c(i);
                rep.min_row = r;
                rep.min_species = static_cast<std::size_t>(i);
            }
        }
        for (Eigen::Index k = 0; k < row.cons.size(); ++k) {
            const double v = std::abs(row.cons(k));
            auto& slot = rep.max_conservation[static_cast<std::size_t>(k)];
            if (std::isnan(v) || v > slot) slot = v;
        }
    }

    const Vector& last = table.rows.back().c;
    rep.final_lma_residual = lma_rates(network, last).net().lpNorm<Eigen::Infinity>();
    rep.final_affinity = (last.array() > 0.0).all() ? affinity(network, last, c_inf).lpNorm<Eigen::Infinity>()
                                                     : std::numeric_limits<double>::quiet_NaN();

    rep.energy_ok = rep.max_energy_increase <= thresholds.max_energy_increase;
    rep.positivity_ok = rep.min_concentration > 0.0;
    rep.conservation_ok = true;
    for (double v : rep.max_conservation) rep.conservation_ok = rep.conservation_ok && v <= thresholds.max_conservation;
    return rep;
}

NewtonStats newton_stats(const std::vector<StepReport>& steps) {
    NewtonStats s;
    s.steps = steps.size();
    for (const auto& st : steps) {
        s.total_iters += st.newton_iters;
        s.max_iters = std::max(s.max_iters, st.newton_iters);
        s.total_backtracks += st.linesearch_backtracks;
        s.max_gradient_norm = std::max(s.max_gradient_norm, st.gradient_norm);
    }
    return s;
}

bool same_audit_values(const AuditReport& a, const AuditReport& b) {
    if (a.max_conservation.size() != b.max_conservation.size()) return false;
    for (std::size_t k = 0; k < a.max_conservation.size(); ++k)
        if (!same(a.max_conservation[k], b.max_conservation[k])) return false;
    return same(a.max_energy_increase, b.max_energy_increase) && a.energy_row == b.energy_row &&
           same(a.min_concentration, b.min_concentration) && a.min_row == b.min_row &&
           a.min_species == b.min_species && same(a.final_affinity, b.final_affinity) &&
           same(a.final_lma_residual, b.final_lma_residual) && a.energy_ok == b.energy_ok &&
           a.positivity_ok == b.positivity_ok && a.conservation_ok == b.conservation_ok;
}

std::string format_audit(const AuditReport& report, const TrajectoryTable& table, bool color) {
    auto tag = [&](bool ok) {
        if (!color) return std::string(ok ? "PASS" : "FAIL");
        return std::string(ok ? "\033[32mPASS\033[0m" : "\033[31mFAIL\033[0m");
    };
    std::ostringstream os;
    os << "audit:\n";
    os << "  energy       " << tag(report.energy_ok) << "  max increase " << format_real(report.max_energy_increase);
    if (!report.energy_ok && report.energy_row < table.rows.size())
        os << " (row " << report.energy_row << ", t = " << format_real(table.rows[report.energy_row].t) << ")";
    os << '\n';
    os << "  positivity   " << tag(report.positivity_ok) << "  min concentration "
       << format_real(report.min_concentration);
    if (report.min_row < table.rows.size() && report.min_species < table.species.size())
        os << " (row " << report.min_row << ", t = " << format_real(table.rows[report.min_row].t) << ", species "
           << table.species[report.min_species] << ")";
    os << '\n';
    os << "  conservation " << tag(report.conservation_ok) << "  max relative residual";
    if (report.max_conservation.empty()) os << " (no conserved quantities)";
    for (std::size_t k = 0; k < report.max_conservation.size(); ++k)
        os << (k ? ", " : " ") << "cons_" << k + 1 << " = " << format_real(report.max_conservation[k]);
    os << '\n';
    os << "  final state  affinity " << format_real(report.final_affinity) << ", LMA residual "
       << format_real(report.final_lma_residual) << '\n';
    if (report.newton) {
        const NewtonStats& n = *report.newton;
        os << "  newton       " << n.steps << " steps, " << n.total_iters << " iterations (max " << n.max_iters
           << " per step), " << n.total_backtracks << " backtracks, max |grad J| "
           << format_real(n.max_gradient_norm) << '\n';
    }
    return os.str();
}

void write_json(std::ostream& out, const TrajectoryTable& table, const JsonExtras& extras) {
    nlohmann::ordered_json doc;
    doc["scheme"] = extras.scheme;
    doc["dt"] = real(extras.dt);
    doc["t_end"] = real(extras.t_end);
    doc["species"] = table.species;
    doc["reactions"] = table.reactions;
    doc["c_inf"] = vec(extras.c_inf);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json r;
        r["t"] = real(row.t);
        r["c"] = vec(row.c);
        if (!table.reactions.empty()) r["R"] = vec(row.R);
        r["F"] = real(row.F);
        r["cons"] = vec(row.cons);
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    if (extras.steps) {
        auto steps = nlohmann::ordered_json::array();
        for (const auto& s : *extras.steps) {
            nlohmann::ordered_json j;
            j["objective_value"] = real(s.objective_value);
            j["gradient_norm"] = real(s.gradient_norm);
            j["newton_iters"] = s.newton_iters;
            j["linesearch_backtracks"] = s.linesearch_backtracks;
            j["energy_before"] = real(s.energy_before);
            j["energy_after"] = real(s.energy_after);
            steps.push_back(std::move(j));
        }
        doc["steps"] = std::move(steps);
    }
    if (extras.violations) {
        auto v = nlohmann::ordered_json::array();
        for (const auto& pv : *extras.violations)
            v.push_back({{"step", pv.step}, {"species", table.species.at(pv.species)}, {"value", real(pv.value)}});
        doc["positivity_violations"] = std::move(v);
    }
    if (extras.audit) {
        const AuditReport& a = *extras.audit;
        nlohmann::ordered_json j;
        j["passed"] = a.passed();
        j["max_energy_increase"] = real(a.max_energy_increase);
        j["min_concentration"] = real(a.min_concentration);
        j["min_concentration_row"] = a.min_row;
        j["max_conservation"] = a.max_conservation;
        j["final_affinity"] = real(a.final_affinity);
        j["final_lma_residual"] = real(a.final_lma_residual);
        j["energy_ok"] = a.energy_ok;
        j["positivity_ok"] = a.positivity_ok;
        j["conservation_ok"] = a.conservation_ok;
        doc["audit"] = std::move(j);
    }
    doc["truncated"] = table.truncated;
    if (!extras.error.empty()) doc["error"] = extras.error;
    out << doc.dump(2) << '\n';
}

}  // namespace crn
