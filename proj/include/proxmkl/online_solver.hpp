#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proxmkl/online_loss.hpp"
#include "proxmkl/regularizer.hpp"

namespace proxmkl {

/// η_t for t = 1, 2, …
struct LearningRateSchedule {
  enum class Kind { constant, inv_sqrt, inv_t };

  Kind kind = Kind::inv_sqrt;
  double value = 1.0;  ///< η for constant, η₀ for inv_sqrt, σ for inv_t

  static LearningRateSchedule constant(double eta) { return {Kind::constant, eta}; }
  static LearningRateSchedule inv_sqrt(double eta0) { return {Kind::inv_sqrt, eta0}; }
  static LearningRateSchedule inv_t(double sigma) { return {Kind::inv_t, sigma}; }

  double rate(std::size_t t) const;
  void check() const;
};

std::string to_string(LearningRateSchedule::Kind kind);
LearningRateSchedule::Kind parse_schedule_kind(const std::string& name);

struct RunConfig {
  std::size_t rounds = 1;
  double lambda = 1.0;
  LearningRateSchedule schedule;
  std::optional<double> gamma;  ///< ℓ2-ball radius of the projection step
  bool average_output = true;
  std::uint64_t seed = 0;
  bool keep_iterates = false;  ///< store θ_1 … θ_{T+1} in the trace
};

struct RoundRecord {
  std::size_t round = 0;
  std::size_t instance = 0;
  double eta = 0.0;
  double loss = 0.0;        ///< L(θ_t; x_t, y_t)
  double reg = 0.0;         ///< R(θ_t)
  double objective = 0.0;   ///< λR(θ_t) + L(θ_t; x_t, y_t)
  double theta_norm = 0.0;  ///< ‖θ_t‖
};

struct RunTrace {
  std::vector<RoundRecord> records;
  GroupedVector last;      ///< θ_{T+1}
  GroupedVector averaged;  ///< (1/T)Σ_t θ_t
  std::optional<double> gamma;  ///< radius actually used
  std::vector<GroupedVector> iterates;  ///< θ_1 … θ_{T+1} when kept

  double cumulative_objective(std::size_t rounds) const;
};

/// θ̃ = θ_t − η_t g, then the proximal chain with η_t·λ, then the optional
/// projection onto the ℓ2 ball of radius gamma.
GroupedVector step(const GroupedVector& theta, const Vector& subgradient, double eta, double lambda,
                   const RegularizerChain& chain, std::optional<double> gamma);

/// Instance visited at each round: epoch-cyclic, reshuffled every epoch from
/// a generator seeded with `seed`.
std::vector<std::size_t> visiting_order(std::size_t dataset_size, std::size_t rounds, std::uint64_t seed);

/// Online proximal descent from θ₁ = 0. When no radius is configured and the
/// schedule is 1/(σt), the radius comes from the loss's Lipschitz bounds.
/// Throws NumericalFailure naming the round if a loss or iterate stops being
/// finite.
RunTrace run(const OnlineLoss& loss, const RegularizerChain& chain, const RunConfig& config);

/// Σ_t objective_t − Σ_t comparator_t over the first comparator.size() rounds.
double regret(const RunTrace& trace, const std::vector<double>& comparator_objective_per_round);

/// λR(θ*) + L(θ*; x_t, y_t) for every round of the trace, for a fixed θ*.
std::vector<double> comparator_objectives(const OnlineLoss& loss, const RegularizerChain& chain, double lambda,
                                          const RunTrace& trace, const GroupedVector& comparator);

/// λR(θ) + (1/m)Σ_i L(θ; x_i, y_i).
double batch_objective(const OnlineLoss& loss, const RegularizerChain& chain, double lambda,
                       const GroupedVector& theta);

}  // namespace proxmkl
