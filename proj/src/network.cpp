#include "crn/network.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace crn {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;
using RationalRow = std::vector<cpp_rational>;

// Reduces `row` against an echelon set in place; returns true when something
// nonzero survives (and adds it to the set).
bool reduce_and_insert(std::vector<RationalRow>& echelon, std::vector<std::size_t>& pivots, RationalRow row) {
    for (std::size_t k = 0; k < echelon.size(); ++k) {
        const std::size_t p = pivots[k];
        if (row[p] == 0) continue;
        const cpp_rational factor = row[p] / echelon[k][p];
        for (std::size_t j = 0; j < row.size(); ++j) row[j] -= factor * echelon[k][j];
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] != 0) {
            echelon.push_back(std::move(row));
            pivots.push_back(j);
            return true;
        }
    }
    return false;
}

// Reduced row echelon form, in place. Returns pivot columns.
std::vector<std::size_t> rref(std::vector<RationalRow>& rows, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t sel = r;
        while (sel < rows.size() && rows[sel][c] == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        const cpp_rational lead = rows[r][c];
        for (auto& v : rows[r]) v /= lead;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            const cpp_rational f = rows[i][c];
            for (std::size_t j = 0; j < cols; ++j) rows[i][j] -= f * rows[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    return out;
}

void require_length(const Vector& v, std::size_t n, const char* what) {
    if (static_cast<std::size_t>(v.size()) != n) {
        std::ostringstream os;
        os << what << " has length " << v.size() << ", expected " << n;
        throw InvalidInput(os.str());
    }
}

}  // namespace

ReactionNetwork::ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
    const std::size_t n = species_.size();
    const std::size_t m = reactions_.size();
    if (m == 0) throw InvalidInput("network has no reactions");

    std::set<std::string> seen;
    for (const auto& s : species_) {
        if (s.empty()) throw InvalidInput("empty species name");
        if (!seen.insert(s).second) throw InvalidInput("duplicate species '" + s + "'");
    }

    std::set<std::string> reaction_names;
    stoich_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t l = 0; l < m; ++l) {
        Reaction& rx = reactions_[l];
        if (rx.name.empty()) rx.name = "R" + std::to_string(l + 1);
        if (!reaction_names.insert(rx.name).second) throw InvalidInput("duplicate reaction id '" + rx.name + "'");
        const std::string tag = "reaction " + rx.name + ": ";
        if (rx.alpha.size() != n || rx.beta.size() != n)
            throw InvalidReaction(tag + "coefficient vectors must have one entry per species");
        bool lhs = false, rhs = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (rx.alpha[i] < 0 || rx.beta[i] < 0)
                throw InvalidReaction(tag + "stoichiometric coefficients must be nonnegative integers");
            lhs |= rx.alpha[i] > 0;
            rhs |= rx.beta[i] > 0;
            stoich_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = rx.beta[i] - rx.alpha[i];
        }
        if (!lhs || !rhs) throw InvalidReaction(tag + "both sides need at least one species");
        if (rx.alpha == rx.beta) throw InvalidReaction(tag + "reactant and product sides are identical");
        if (!(rx.k_plus > 0.0) || !(rx.k_minus > 0.0) || !std::isfinite(rx.k_plus) || !std::isfinite(rx.k_minus))
            throw InvalidReaction(tag + "rate constants must be positive and finite");
    }

    // Insert reaction columns one by one so a dependent one can be named.
    std::vector<RationalRow> echelon;
    std::vector<std::size_t> pivots;
    std::vector<std::string> dependent;
    for (std::size_t l = 0; l < m; ++l) {
        RationalRow row(n);
        for (std::size_t i = 0; i < n; ++i)
            row[i] = stoich_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
        if (!reduce_and_insert(echelon, pivots, std::move(row))) dependent.push_back(reactions_[l].name);
    }
    if (!dependent.empty()) {
        std::ostringstream os;
        os << "stoichiometric matrix has rank " << echelon.size() << " < " << m
           << " reactions; linearly dependent: " << join_names(dependent);
        throw RankDeficient(os.str(), std::move(dependent));
    }

    stoich_real_ = stoich_.cast<double>();
}

std::optional<std::size_t> ReactionNetwork::species_index(const std::string& name) const {
    for (std::size_t i = 0; i < species_.size(); ++i)
        if (species_[i] == name) return i;
    return std::nullopt;
}

ReactionNetwork build_network(std::vector<std::string> species, std::vector<Reaction> reactions) {
    return ReactionNetwork(std::move(species), std::move(reactions));
}

std::size_t exact_rank(const Eigen::MatrixXi& m) {
    std::vector<RationalRow> rows(static_cast<std::size_t>(m.rows()), RationalRow(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    return rref(rows, static_cast<std::size_t>(m.cols())).size();
}

ConservationBasis conservation_basis(const ReactionNetwork& network) {
    const std::size_t n = network.num_species();
    const std::size_t m = network.num_reactions();
    const auto& s = network.stoich();

    // Rows of S^T with the species order reversed, so pivots land on the
    // last species and the leading species stay free. For networks written
    // as "simple species -> complexes" this yields nonnegative moieties.
    std::vector<RationalRow> rows(m, RationalRow(n));
    for (std::size_t l = 0; l < m; ++l)
        for (std::size_t i = 0; i < n; ++i)
            rows[l][n - 1 - i] = s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
    const auto pivots = rref(rows, n);

    std::vector<bool> is_pivot(n, false);
    for (auto p : pivots) is_pivot[p] = true;

    ConservationBasis basis;
    for (std::size_t species = 0; species < n; ++species) {
        const std::size_t f = n - 1 - species;
        if (is_pivot[f]) continue;
        RationalRow reversed(n);
        reversed[f] = 1;
        for (std::size_t k = 0; k < pivots.size(); ++k) reversed[pivots[k]] = -rows[k][f];
        RationalRow gamma(n);
        for (std::size_t i = 0; i < n; ++i) gamma[i] = reversed[n - 1 - i];

        // Scale to a primitive integer vector with a positive leading entry.
        cpp_int lcm = 1;
        for (const auto& g : gamma) lcm = boost::multiprecision::lcm(lcm, denominator(g));
        std::vector<cpp_int> ints(n);
        cpp_int gcd = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ints[i] = numerator(cpp_rational(gamma[i] * lcm));
            gcd = boost::multiprecision::gcd(gcd, ints[i]);
        }
        cpp_int sign = 1;
        for (const auto& v : ints) {
            if (v != 0) {
                sign = v < 0 ? -1 : 1;
                break;
            }
        }
        Vector out(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            out(static_cast<Eigen::Index>(i)) = static_cast<double>(cpp_int(ints[i] / gcd * sign));
        basis.vectors.push_back(std::move(out));
    }
    return basis;
}

Vector conservation_residuals(const ConservationBasis& basis, const Vector& c0, const Vector& c) {
    Vector out(static_cast<Eigen::Index>(basis.size()));
    const double c0_norm = c0.norm();
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const Vector& g = basis.vectors[k];
        const double scale = g.norm() * c0_norm;
        const double diff = g.dot(c) - g.dot(c0);
        out(static_cast<Eigen::Index>(k)) = scale > 0.0 ? diff / scale : diff;
    }
    return out;
}

Vector concentrations(const ReactionNetwork& network, const Vector& c0, const Vector& extents) {
    return c0 + network.stoich_real() * extents;
}

double monomial(const Vector& c, const std::vector<int>& exponents) {
    double p = 1.0;
    for (std::size_t i = 0; i < exponents.size(); ++i)
        for (int k = 0; k < exponents[i]; ++k) p *= c(static_cast<Eigen::Index>(i));
    return p;
}

Rates lma_rates(const ReactionNetwork& network, const Vector& c) {
    const auto m = static_cast<Eigen::Index>(network.num_reactions());
    Rates r{Vector(m), Vector(m)};
    for (Eigen::Index l = 0; l < m; ++l) {
        const Reaction& rx = network.reactions()[static_cast<std::size_t>(l)];
        r.forward(l) = rx.k_plus * monomial(c, rx.alpha);
        r.backward(l) = rx.k_minus * monomial(c, rx.beta);
    }
    return r;
}

double detailed_balance_residual(const ReactionNetwork& network, const Vector& c) {
    const Rates r = lma_rates(network, c);
    double worst = 0.0;
    for (Eigen::Index l = 0; l < r.forward.size(); ++l) {
        const double scale = std::max(std::abs(r.forward(l)), std::abs(r.backward(l)));
        const double diff = std::abs(r.forward(l) - r.backward(l));
        if (diff == 0.0) continue;
        worst = std::max(worst, scale > 0.0 ? diff / scale : std::numeric_limits<double>::infinity());
    }
    return worst;
}

EquilibriumState solve_equilibrium(const ReactionNetwork& network) {
    const Matrix& s = network.stoich_real();
    const auto m = static_cast<Eigen::Index>(network.num_reactions());
    Vector b(m);
    for (Eigen::Index l = 0; l < m; ++l) {
        const Reaction& rx = network.reactions()[static_cast<std::size_t>(l)];
        b(l) = std::log(rx.k_plus) - std::log(rx.k_minus);
    }
    // Minimum-norm solution of S^T x = b for full-column-rank S.
    const Vector x = s.transpose().completeOrthogonalDecomposition().solve(b);
    EquilibriumState eq{x.array().exp().matrix()};

    if (!eq.c_inf.allFinite() || (eq.c_inf.array() <= 0.0).any())
        throw NumericalFailure("equilibrium concentrations are not finite and positive");
    const double resid = detailed_balance_residual(network, eq.c_inf);
    if (!(resid <= 1e-10)) {
        std::ostringstream os;
        os << "equilibrium solve left a detailed-balance residual of " << resid;
        throw NumericalFailure(os.str());
    }
    return eq;
}

EquilibriumState make_equilibrium(const ReactionNetwork& network, Vector c_inf) {
    require_length(c_inf, network.num_species(), "equilibrium vector");
    if (!c_inf.allFinite() || (c_inf.array() <= 0.0).any())
        throw InvalidInput("equilibrium concentrations must be finite and strictly positive");
    const double resid = detailed_balance_residual(network, c_inf);
    if (!(resid <= 1e-10)) {
        std::ostringstream os;
        os << "supplied equilibrium violates detailed balance (relative residual " << resid << ")";
        throw InvalidInput(os.str());
    }
    return EquilibriumState{std::move(c_inf)};
}

double free_energy(const Vector& c, const Vector& c_inf) {
    double f = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const double ci = c(i);
        if (ci == 0.0) continue;
        f += ci * (std::log(ci / c_inf(i)) - 1.0);
    }
    return f;
}

Vector chemical_potential(const Vector& c, const Vector& c_inf) {
    Vector mu(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (!(c(i) > 0.0)) {
            std::ostringstream os;
            os << "chemical potential needs c > 0, got c[" << i << "] = " << c(i);
            throw DomainError(os.str());
        }
        mu(i) = std::log(c(i) / c_inf(i));
    }
    return mu;
}

Vector affinity(const ReactionNetwork& network, const Vector& c, const Vector& c_inf) {
    return network.stoich_real().transpose() * chemical_potential(c, c_inf);
}

}  // namespace crn
