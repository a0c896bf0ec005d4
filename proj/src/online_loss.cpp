#include "proxmkl/online_loss.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace proxmkl {

ChainLoss::ChainLoss(FeatureLayout layout, std::span<const ChainInstance> instances, LossKind kind)
    : layout_(std::move(layout)), instances_(instances), kind_(kind) {
  for (const auto& inst : instances_) layout_.check(inst);
}

LossEvaluation ChainLoss::evaluate(std::size_t i, const GroupedVector& theta) const {
  LossReport r = evaluate_loss(kind_, layout_, theta, instances_[i]);
  return {r.loss_value, std::move(r.subgradient)};
}

double ChainLoss::value(std::size_t i, const GroupedVector& theta) const {
  return loss_value(kind_, layout_, theta, instances_[i]);
}

std::optional<LipschitzBounds> ChainLoss::bounds(double lambda) const {
  return lipschitz_radius(instances_, layout_, lambda, kind_);
}

QuadraticLoss QuadraticLoss::centers(std::vector<Vector> centers, std::vector<Index> offsets) {
  if (centers.empty()) throw std::invalid_argument("QuadraticLoss: no centers");
  for (const auto& c : centers) {
    if (c.size() != offsets.back()) throw std::invalid_argument("QuadraticLoss: center dimension mismatch");
  }
  QuadraticLoss q;
  q.centers_ = std::move(centers);
  q.offsets_ = std::move(offsets);
  return q;
}

LossEvaluation QuadraticLoss::evaluate(std::size_t i, const GroupedVector& theta) const {
  Vector r = theta.values() - centers_[i];
  const double v = 0.5 * r.squaredNorm();
  return {v, std::move(r)};
}

StronglyConvexLoss::StronglyConvexLoss(std::shared_ptr<const OnlineLoss> base, double sigma)
    : base_(std::move(base)), sigma_(sigma) {
  if (!base_) throw std::invalid_argument("StronglyConvexLoss: null base loss");
  if (!(sigma_ > 0.0)) throw std::invalid_argument("StronglyConvexLoss: sigma must be positive");
}

LossEvaluation StronglyConvexLoss::evaluate(std::size_t i, const GroupedVector& theta) const {
  LossEvaluation e = base_->evaluate(i, theta);
  e.value += 0.5 * sigma_ * theta.values().squaredNorm();
  e.subgradient += sigma_ * theta.values();
  return e;
}

double StronglyConvexLoss::value(std::size_t i, const GroupedVector& theta) const {
  return base_->value(i, theta) + 0.5 * sigma_ * theta.values().squaredNorm();
}

std::optional<LipschitzBounds> StronglyConvexLoss::bounds(double lambda) const {
  auto b = base_->bounds(lambda);
  if (!b) return std::nullopt;
  b->gamma = std::sqrt(2.0 * b->Lambda / (lambda + sigma_));
  b->G_tilde = b->G + std::sqrt(2.0 * sigma_ * sigma_ * b->Lambda / (lambda + sigma_));
  return b;
}

}  // namespace proxmkl
