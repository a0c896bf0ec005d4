#include "proxmkl/online_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "proxmkl/prox.hpp"

namespace proxmkl {

double LearningRateSchedule::rate(std::size_t t) const {
  if (t == 0) throw std::invalid_argument("learning rate: rounds start at 1");
  const double td = static_cast<double>(t);
  switch (kind) {
    case Kind::constant: return value;
    case Kind::inv_sqrt: return value / std::sqrt(td);
    case Kind::inv_t: return 1.0 / (value * td);
  }
  return value;
}

void LearningRateSchedule::check() const {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("learning rate schedule: parameter must be positive");
  }
}

std::string to_string(LearningRateSchedule::Kind kind) {
  switch (kind) {
    case LearningRateSchedule::Kind::constant: return "constant";
    case LearningRateSchedule::Kind::inv_sqrt: return "inv_sqrt";
    case LearningRateSchedule::Kind::inv_t: return "inv_t";
  }
  return "?";
}

LearningRateSchedule::Kind parse_schedule_kind(const std::string& name) {
  if (name == "constant") return LearningRateSchedule::Kind::constant;
  if (name == "inv_sqrt") return LearningRateSchedule::Kind::inv_sqrt;
  if (name == "inv_t") return LearningRateSchedule::Kind::inv_t;
  throw std::invalid_argument("unknown learning rate schedule '" + name + "'");
}

double RunTrace::cumulative_objective(std::size_t rounds) const {
  if (rounds > records.size()) throw std::invalid_argument("cumulative_objective: beyond trace length");
  double s = 0.0;
  for (std::size_t t = 0; t < rounds; ++t) s += records[t].objective;
  return s;
}

GroupedVector step(const GroupedVector& theta, const Vector& subgradient, double eta, double lambda,
                   const RegularizerChain& chain, std::optional<double> gamma) {
  if (!(eta > 0.0)) throw std::invalid_argument("step: eta must be positive");
  if (subgradient.size() != theta.size()) throw std::invalid_argument("step: subgradient dimension mismatch");
  GroupedVector next = theta;
  next.mutable_values() -= eta * subgradient;
  validate(chain, next);
  for (const auto& term : chain.terms) apply_prox_term(term, next, eta * lambda);
  if (gamma) {
    const double n = next.norm();
    if (n > *gamma) next.scale(*gamma / n);
  }
  return next;
}

std::vector<std::size_t> visiting_order(std::size_t dataset_size, std::size_t rounds, std::uint64_t seed) {
  if (dataset_size == 0) throw std::invalid_argument("visiting_order: empty dataset");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> perm(dataset_size);
  std::vector<std::size_t> order;
  order.reserve(rounds);
  while (order.size() < rounds) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < dataset_size && order.size() < rounds; ++i) order.push_back(perm[i]);
  }
  return order;
}

RunTrace run(const OnlineLoss& loss, const RegularizerChain& chain, const RunConfig& config) {
  if (loss.size() == 0) throw std::invalid_argument("run: empty dataset");
  if (config.rounds < 1) throw std::invalid_argument("run: need at least one round");
  if (!(config.lambda > 0.0)) throw std::invalid_argument("run: lambda must be positive");
  config.schedule.check();

  RunTrace trace;
  trace.gamma = config.gamma;
  if (!trace.gamma && config.schedule.kind == LearningRateSchedule::Kind::inv_t) {
    if (const auto b = loss.bounds(config.lambda)) trace.gamma = b->gamma;
  }
  if (trace.gamma && !(*trace.gamma > 0.0)) throw std::invalid_argument("run: gamma must be positive");

  GroupedVector theta = loss.zeros();
  validate(chain, theta);
  Vector sum = Vector::Zero(theta.size());
  const auto order = visiting_order(loss.size(), config.rounds, config.seed);
  trace.records.reserve(config.rounds);
  if (config.keep_iterates) trace.iterates.push_back(theta);

  for (std::size_t t = 1; t <= config.rounds; ++t) {
    const std::size_t i = order[t - 1];
    const double eta = config.schedule.rate(t);
    LossEvaluation e = loss.evaluate(i, theta);
    if (!std::isfinite(e.value) || !e.subgradient.allFinite()) {
      throw NumericalFailure("run: non-finite loss or subgradient at round " + std::to_string(t));
    }

    RoundRecord rec;
    rec.round = t;
    rec.instance = i;
    rec.eta = eta;
    rec.loss = e.value;
    rec.reg = evaluate(chain, theta);
    rec.objective = config.lambda * rec.reg + rec.loss;
    rec.theta_norm = theta.norm();
    trace.records.push_back(rec);
    if (config.average_output) sum += theta.values();

    theta = step(theta, e.subgradient, eta, config.lambda, chain, trace.gamma);
    if (!theta.values().allFinite()) {
      throw NumericalFailure("run: iterate diverged at round " + std::to_string(t));
    }
    if (config.keep_iterates) trace.iterates.push_back(theta);
  }

  trace.last = theta;
  trace.averaged = theta;
  if (config.average_output) trace.averaged.set_values(sum / static_cast<double>(config.rounds));
  return trace;
}

double regret(const RunTrace& trace, const std::vector<double>& comparator_objective_per_round) {
  if (comparator_objective_per_round.size() > trace.records.size() || comparator_objective_per_round.empty()) {
    throw std::invalid_argument("regret: comparator length does not match the trace");
  }
  double r = 0.0;
  for (std::size_t t = 0; t < comparator_objective_per_round.size(); ++t) {
    r += trace.records[t].objective - comparator_objective_per_round[t];
  }
  return r;
}

std::vector<double> comparator_objectives(const OnlineLoss& loss, const RegularizerChain& chain, double lambda,
                                          const RunTrace& trace, const GroupedVector& comparator) {
  const double reg = lambda * evaluate(chain, comparator);
  std::vector<double> per_instance(loss.size());
  for (std::size_t i = 0; i < loss.size(); ++i) per_instance[i] = reg + loss.value(i, comparator);
  std::vector<double> out;
  out.reserve(trace.records.size());
  for (const auto& rec : trace.records) out.push_back(per_instance[rec.instance]);
  return out;
}

double batch_objective(const OnlineLoss& loss, const RegularizerChain& chain, double lambda,
                       const GroupedVector& theta) {
  double total = 0.0;
  for (std::size_t i = 0; i < loss.size(); ++i) total += loss.value(i, theta);
  return lambda * evaluate(chain, theta) + total / static_cast<double>(loss.size());
}

}  // namespace proxmkl
