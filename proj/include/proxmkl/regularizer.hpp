#pragma once

#include <optional>
#include <string>
#include <vector>

#include "proxmkl/grouped_vector.hpp"

namespace proxmkl {

enum class TermKind {
  l21,                ///< Σ_k ‖θ_k‖
  squared_l21,        ///< ½(Σ_k ‖θ_k‖)²
  l1,                 ///< Σ_i |θ_i|
  sq_l2,              ///< ½‖θ‖² (ridge)
  lq_power,           ///< ½Σ_k ‖θ_k‖^q
  indicator_l1_ball,  ///< 0 if Σ_k ‖θ_k‖ ≤ γ, +∞ otherwise
  indicator_l2_ball,  ///< 0 if ‖θ‖ ≤ γ, +∞ otherwise
};

/// One term λ_j R_j of a composite regularizer. `param` is q for lq_power and
/// the radius γ for the indicators. An empty scope means all groups; an
/// explicit scope restricts the term to those groups (overlapping-group and
/// hierarchical penalties are chains of scoped terms).
struct RegularizerTerm {
  TermKind kind = TermKind::l21;
  double weight = 1.0;
  double param = 0.0;
  std::optional<std::vector<std::size_t>> scope;

  static RegularizerTerm make(TermKind kind, double weight = 1.0, double param = 0.0);
  RegularizerTerm& restricted_to(std::vector<std::size_t> groups);

  bool is_indicator() const {
    return kind == TermKind::indicator_l1_ball || kind == TermKind::indicator_l2_ball;
  }
};

/// R = Σ_j R_j, proximal steps applied in list order.
struct RegularizerChain {
  std::vector<RegularizerTerm> terms;
};

/// σ‖θ‖_{2,1} + (1 − σ)‖θ‖₁ as [l1, l21]; the within-group soft threshold goes
/// first so that the composed steps equal the exact prox of the sum.
RegularizerChain sparse_group_lasso(double sigma);

/// Throws std::invalid_argument if a term is malformed or a scope names a
/// group that `theta` does not have.
void validate(const RegularizerChain& chain, const GroupedVector& theta);

/// weight · R_j(θ) (indicators ignore weight).
double evaluate_term(const RegularizerTerm& term, const GroupedVector& theta);
double evaluate(const RegularizerChain& chain, const GroupedVector& theta);

/// In-place prox_{c·R_j} with c = eta_lambda · weight.
void apply_prox_term(const RegularizerTerm& term, GroupedVector& theta, double eta_lambda);

/// θ ↦ prox_{ηλR_J} ∘ … ∘ prox_{ηλR_1}(θ).
GroupedVector apply_prox_chain(const RegularizerChain& chain, const GroupedVector& theta, double eta_lambda);

/// Ordered term pairs outside the catalogue of shrinkage-compatible pairs.
/// Any norm-power term may precede any other term; an indicator may precede
/// only another indicator.
std::vector<std::string> required_ordering_check(const RegularizerChain& chain);

std::string to_string(TermKind kind);
TermKind parse_term_kind(const std::string& name);

/// Parses "kind[:weight[:param]][@g+g+...]" terms separated by commas, e.g.
/// "l1:0.6,l21:0.4" or "l21:1@0+1,l21:1@1+2".
RegularizerChain parse_chain(const std::string& spec);
std::string format_chain(const RegularizerChain& chain);

}  // namespace proxmkl
