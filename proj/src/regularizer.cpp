#include "proxmkl/regularizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "proxmkl/prox.hpp"

namespace proxmkl {
namespace {

std::vector<std::size_t> scope_of(const RegularizerTerm& term, const GroupedVector& theta) {
  if (term.scope) return *term.scope;
  std::vector<std::size_t> all(theta.num_groups());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return all;
}

bool in_ball(double value, double radius) { return value <= radius * (1.0 + 1e-9) + 1e-12; }

// Prox of a function of the in-scope group norms, through the group-norm
// reduction. Out-of-scope groups are scaled by exactly 1.
void shrink_norms(GroupedVector& theta, const std::vector<std::size_t>& scope,
                  const std::function<Vector(const Vector&)>& psi_prox) {
  theta = prox_via_group_norms(theta, [&](const Vector& norms) {
    Vector sub(static_cast<Index>(scope.size()));
    for (std::size_t i = 0; i < scope.size(); ++i) sub[static_cast<Index>(i)] = norms[static_cast<Index>(scope[i])];
    const Vector shrunk = psi_prox(sub);
    Vector out = norms;
    for (std::size_t i = 0; i < scope.size(); ++i) out[static_cast<Index>(scope[i])] = shrunk[static_cast<Index>(i)];
    return out;
  });
}

}  // namespace

RegularizerTerm RegularizerTerm::make(TermKind kind, double weight, double param) {
  RegularizerTerm t;
  t.kind = kind;
  t.weight = weight;
  t.param = param;
  return t;
}

RegularizerTerm& RegularizerTerm::restricted_to(std::vector<std::size_t> groups) {
  scope = std::move(groups);
  return *this;
}

RegularizerChain sparse_group_lasso(double sigma) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw std::invalid_argument("sparse_group_lasso: sigma outside [0, 1]");
  RegularizerChain chain;
  chain.terms.push_back(RegularizerTerm::make(TermKind::l1, 1.0 - sigma));
  chain.terms.push_back(RegularizerTerm::make(TermKind::l21, sigma));
  return chain;
}

void validate(const RegularizerChain& chain, const GroupedVector& theta) {
  for (const auto& term : chain.terms) {
    if (!(term.weight >= 0.0) || !std::isfinite(term.weight)) {
      throw std::invalid_argument("regularizer: weight must be finite and >= 0");
    }
    if (term.kind == TermKind::lq_power && !(term.param >= 1.0)) {
      throw std::invalid_argument("regularizer: lq_power needs q >= 1");
    }
    if (term.is_indicator() && !(term.param > 0.0)) {
      throw std::invalid_argument("regularizer: ball radius must be positive");
    }
    if (term.scope) {
      for (std::size_t k : *term.scope) {
        if (k >= theta.num_groups()) {
          throw std::invalid_argument("regularizer: scope names group " + std::to_string(k) +
                                      " but the vector has " + std::to_string(theta.num_groups()));
        }
      }
    }
  }
}

double evaluate_term(const RegularizerTerm& term, const GroupedVector& theta) {
  const auto scope = scope_of(term, theta);
  double sum_norms = 0.0;
  double sum_sq = 0.0;
  double sum_abs = 0.0;
  double sum_pow = 0.0;
  for (std::size_t k : scope) {
    const double n = theta.group_norm(k);
    sum_norms += n;
    sum_sq += n * n;
    sum_abs += theta.group(k).lpNorm<1>();
    if (term.kind == TermKind::lq_power) sum_pow += std::pow(n, term.param);
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (term.kind) {
    case TermKind::l21: return term.weight * sum_norms;
    case TermKind::squared_l21: return term.weight * 0.5 * sum_norms * sum_norms;
    case TermKind::l1: return term.weight * sum_abs;
    case TermKind::sq_l2: return term.weight * 0.5 * sum_sq;
    case TermKind::lq_power: return term.weight * 0.5 * sum_pow;
    case TermKind::indicator_l1_ball: return in_ball(sum_norms, term.param) ? 0.0 : inf;
    case TermKind::indicator_l2_ball: return in_ball(std::sqrt(sum_sq), term.param) ? 0.0 : inf;
  }
  return 0.0;
}

double evaluate(const RegularizerChain& chain, const GroupedVector& theta) {
  validate(chain, theta);
  double total = 0.0;
  for (const auto& term : chain.terms) total += evaluate_term(term, theta);
  return total;
}

void apply_prox_term(const RegularizerTerm& term, GroupedVector& theta, double eta_lambda) {
  if (!(eta_lambda >= 0.0)) throw std::invalid_argument("apply_prox_term: eta_lambda must be >= 0");
  const auto scope = scope_of(term, theta);
  const double c = eta_lambda * term.weight;
  if (!term.is_indicator() && c == 0.0) return;

  switch (term.kind) {
    case TermKind::l21:
      shrink_norms(theta, scope, [c](const Vector& n) { return soft_threshold(n, c); });
      break;
    case TermKind::squared_l21:
      shrink_norms(theta, scope, [c](const Vector& n) { return prox_squared_l1(n, c).point; });
      break;
    case TermKind::lq_power: {
      // c·½x^q gives x − x0 + (c/2)·q·x^{q−1} = 0 per group.
      const double q = term.param;
      shrink_norms(theta, scope, [c, q](const Vector& n) {
        Vector out(n.size());
        for (Index i = 0; i < n.size(); ++i) out[i] = prox_scalar_power(n[i], 0.5 * c, q);
        return out;
      });
      break;
    }
    case TermKind::indicator_l1_ball: {
      const double radius = term.param;
      shrink_norms(theta, scope, [radius](const Vector& n) { return project_l1_ball(n, radius); });
      break;
    }
    case TermKind::l1:
      for (std::size_t k : scope) {
        auto g = theta.mutable_group(k);
        g = soft_threshold(g, c);
      }
      break;
    case TermKind::sq_l2:
      for (std::size_t k : scope) theta.scale_group(k, 1.0 / (1.0 + c));
      break;
    case TermKind::indicator_l2_ball: {
      double sq = 0.0;
      for (std::size_t k : scope) sq += theta.group_norm(k) * theta.group_norm(k);
      const double n = std::sqrt(sq);
      if (n > term.param) {
        for (std::size_t k : scope) theta.scale_group(k, term.param / n);
      }
      break;
    }
  }
}

GroupedVector apply_prox_chain(const RegularizerChain& chain, const GroupedVector& theta, double eta_lambda) {
  validate(chain, theta);
  GroupedVector out = theta;
  for (const auto& term : chain.terms) apply_prox_term(term, out, eta_lambda);
  return out;
}

std::vector<std::string> required_ordering_check(const RegularizerChain& chain) {
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < chain.terms.size(); ++i) {
    for (std::size_t j = i + 1; j < chain.terms.size(); ++j) {
      const auto& first = chain.terms[i];
      const auto& later = chain.terms[j];
      if (first.is_indicator() && !later.is_indicator()) {
        warnings.push_back("term " + std::to_string(i) + " (" + to_string(first.kind) + ") precedes term " +
                           std::to_string(j) + " (" + to_string(later.kind) +
                           "): pair not in the shrinkage-compatible catalogue");
      }
    }
  }
  return warnings;
}

std::string to_string(TermKind kind) {
  switch (kind) {
    case TermKind::l21: return "l21";
    case TermKind::squared_l21: return "squared_l21";
    case TermKind::l1: return "l1";
    case TermKind::sq_l2: return "sq_l2";
    case TermKind::lq_power: return "lq_power";
    case TermKind::indicator_l1_ball: return "indicator_l1_ball";
    case TermKind::indicator_l2_ball: return "indicator_l2_ball";
  }
  return "?";
}

TermKind parse_term_kind(const std::string& name) {
  for (TermKind k : {TermKind::l21, TermKind::squared_l21, TermKind::l1, TermKind::sq_l2, TermKind::lq_power,
                     TermKind::indicator_l1_ball, TermKind::indicator_l2_ball}) {
    if (to_string(k) == name) return k;
  }
  if (name == "ridge") return TermKind::sq_l2;
  throw std::invalid_argument("unknown regularizer kind '" + name + "'");
}

RegularizerChain parse_chain(const std::string& spec) {
  RegularizerChain chain;
  std::stringstream terms(spec);
  std::string token;
  while (std::getline(terms, token, ',')) {
    const auto first = token.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    token = token.substr(first, token.find_last_not_of(" \t") - first + 1);

    std::optional<std::vector<std::size_t>> scope;
    if (const auto at = token.find('@'); at != std::string::npos) {
      std::vector<std::size_t> groups;
      std::stringstream ss(token.substr(at + 1));
      std::string g;
      while (std::getline(ss, g, '+')) groups.push_back(static_cast<std::size_t>(std::stoul(g)));
      scope = std::move(groups);
      token = token.substr(0, at);
    }
    std::vector<std::string> parts;
    std::stringstream ss(token);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.empty() || parts.size() > 3) throw std::invalid_argument("bad regularizer term '" + token + "'");

    RegularizerTerm term = RegularizerTerm::make(parse_term_kind(parts[0]));
    if (parts.size() > 1) term.weight = std::stod(parts[1]);
    if (parts.size() > 2) term.param = std::stod(parts[2]);
    term.scope = std::move(scope);
    chain.terms.push_back(std::move(term));
  }
  return chain;
}

std::string format_chain(const RegularizerChain& chain) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < chain.terms.size(); ++i) {
    const auto& t = chain.terms[i];
    if (i) out << ',';
    out << to_string(t.kind) << ':' << t.weight;
    if (t.kind == TermKind::lq_power || t.is_indicator()) out << ':' << t.param;
    if (t.scope) {
      out << '@';
      for (std::size_t j = 0; j < t.scope->size(); ++j) out << (j ? "+" : "") << (*t.scope)[j];
    }
  }
  return out.str();
}

}  // namespace proxmkl
