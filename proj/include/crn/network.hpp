#pragma once

// Reaction networks under the law of mass action with detailed balance:
// stoichiometry, conservation laws, rates, equilibria and the free energy.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crn/errors.hpp"

namespace crn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One reversible reaction  sum_i alpha_i X_i <=> sum_i beta_i X_i.
struct Reaction {
    std::vector<int> alpha;
    std::vector<int> beta;
    double k_plus = 0.0;
    double k_minus = 0.0;
    // Optional label; build_network assigns "R<l>" (1-based) when empty.
    std::string name;

    bool operator==(const Reaction&) const = default;
};

// Immutable after construction. The constructor enforces every structural
// invariant: unique species names, coefficient vectors of length N, both
// sides nonempty, alpha != beta, positive rate constants and rank(S) = M.
class ReactionNetwork {
public:
    ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions);

    std::size_t num_species() const noexcept { return species_.size(); }
    std::size_t num_reactions() const noexcept { return reactions_.size(); }

    const std::vector<std::string>& species() const noexcept { return species_; }
    const std::vector<Reaction>& reactions() const noexcept { return reactions_; }

    // N x M, S(i, l) = beta^l_i - alpha^l_i.
    const Eigen::MatrixXi& stoich() const noexcept { return stoich_; }
    const Matrix& stoich_real() const noexcept { return stoich_real_; }

    std::optional<std::size_t> species_index(const std::string& name) const;

    bool operator==(const ReactionNetwork& other) const {
        return species_ == other.species_ && reactions_ == other.reactions_;
    }

private:
    std::vector<std::string> species_;
    std::vector<Reaction> reactions_;
    Eigen::MatrixXi stoich_;
    Matrix stoich_real_;
};

ReactionNetwork build_network(std::vector<std::string> species, std::vector<Reaction> reactions);

// Exact rank of an integer matrix (rational elimination).
std::size_t exact_rank(const Eigen::MatrixXi& m);

// Positive concentration vector satisfying detailed balance for every reaction.
struct EquilibriumState {
    Vector c_inf;
};

// Basis of ker S^T. Computed exactly and scaled to
// primitive integer vectors before conversion to double.
struct ConservationBasis {
    std::vector<Vector> vectors;

    std::size_t size() const noexcept { return vectors.size(); }
};

ConservationBasis conservation_basis(const ReactionNetwork& network);

// (gamma . c - gamma . c0) / (|gamma| |c0|) for each basis vector.
Vector conservation_residuals(const ConservationBasis& basis, const Vector& c0, const Vector& c);

// c = c0 + S R. No positivity check.
Vector concentrations(const ReactionNetwork& network, const Vector& c0, const Vector& extents);

// prod_i c_i^e_i by repeated multiplication; 0^0 = 1. Negative entries keep
// their sign-carrying powers.
double monomial(const Vector& c, const std::vector<int>& exponents);

struct Rates {
    Vector forward;   // k+_l c^alpha_l
    Vector backward;  // k-_l c^beta_l

    Vector net() const { return forward - backward; }
};

Rates lma_rates(const ReactionNetwork& network, const Vector& c);

// Minimum-norm solve of S^T x = ln(k+/k-), c_inf = exp(x).
// Throws NumericalFailure when the result misses detailed balance by more
// than 1e-10 (relative).
EquilibriumState solve_equilibrium(const ReactionNetwork& network);

// Largest relative detailed-balance defect
// |k+ c^alpha - k- c^beta| / max(k+ c^alpha, k- c^beta) over reactions.
double detailed_balance_residual(const ReactionNetwork& network, const Vector& c);

// Validates a user-provided equilibrium (length, positivity, detailed balance
// to 1e-10 relative) and wraps it. Throws InvalidInput otherwise.
EquilibriumState make_equilibrium(const ReactionNetwork& network, Vector c_inf);

// F = sum_i c_i (ln(c_i / c_inf_i) - 1), with 0 ln 0 = 0. Negative entries
// yield NaN.
double free_energy(const Vector& c, const Vector& c_inf);

// mu_i = ln(c_i / c_inf_i). Throws DomainError if some c_i <= 0.
Vector chemical_potential(const Vector& c, const Vector& c_inf);

// a = S^T mu.
Vector affinity(const ReactionNetwork& network, const Vector& c, const Vector& c_inf);

}  // namespace crn
