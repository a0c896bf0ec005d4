#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "proxmkl/struct_loss.hpp"

namespace proxmkl {

struct LossEvaluation {
  double value = 0.0;
  Vector subgradient;
};

/// A finite stream of convex losses L(·; x_i, y_i) over a grouped parameter
/// vector, the input of the online solver.
class OnlineLoss {
 public:
  virtual ~OnlineLoss() = default;

  virtual std::size_t size() const = 0;
  virtual std::vector<Index> parameter_offsets() const = 0;
  virtual LossEvaluation evaluate(std::size_t i, const GroupedVector& theta) const = 0;
  virtual double value(std::size_t i, const GroupedVector& theta) const { return evaluate(i, theta).value; }

  /// Lipschitz constant and minimizer radius for λ, when known.
  virtual std::optional<LipschitzBounds> bounds(double /*lambda*/) const { return std::nullopt; }

  GroupedVector zeros() const { return GroupedVector::zeros(parameter_offsets()); }
};

/// Structured hinge or CRF loss over linear-chain instances. Holds a view of
/// the instances; the caller keeps them alive.
class ChainLoss final : public OnlineLoss {
 public:
  ChainLoss(FeatureLayout layout, std::span<const ChainInstance> instances, LossKind kind);

  std::size_t size() const override { return instances_.size(); }
  std::vector<Index> parameter_offsets() const override { return layout_.parameter_offsets(); }
  LossEvaluation evaluate(std::size_t i, const GroupedVector& theta) const override;
  double value(std::size_t i, const GroupedVector& theta) const override;
  std::optional<LipschitzBounds> bounds(double lambda) const override;

  const FeatureLayout& layout() const { return layout_; }
  LossKind kind() const { return kind_; }
  std::span<const ChainInstance> instances() const { return instances_; }

 private:
  FeatureLayout layout_;
  std::span<const ChainInstance> instances_;
  LossKind kind_;
};

/// ½‖θ − c_i‖², a stream with closed-form minimizers (the mean of the c_i).
class QuadraticLoss final : public OnlineLoss {
 public:
  static QuadraticLoss centers(std::vector<Vector> centers, std::vector<Index> offsets);

  std::size_t size() const override { return centers_.size(); }
  std::vector<Index> parameter_offsets() const override { return offsets_; }
  LossEvaluation evaluate(std::size_t i, const GroupedVector& theta) const override;

  const std::vector<Vector>& centers() const { return centers_; }

 private:
  std::vector<Vector> centers_;
  std::vector<Index> offsets_;
};

/// L̃ = L + (σ/2)‖θ‖², σ-strongly convex. Its bounds use the reduced radius
/// √(2Λ/(λ+σ)) and the enlarged constant G̃.
class StronglyConvexLoss final : public OnlineLoss {
 public:
  StronglyConvexLoss(std::shared_ptr<const OnlineLoss> base, double sigma);

  std::size_t size() const override { return base_->size(); }
  std::vector<Index> parameter_offsets() const override { return base_->parameter_offsets(); }
  LossEvaluation evaluate(std::size_t i, const GroupedVector& theta) const override;
  double value(std::size_t i, const GroupedVector& theta) const override;
  std::optional<LipschitzBounds> bounds(double lambda) const override;

  double sigma() const { return sigma_; }

 private:
  std::shared_ptr<const OnlineLoss> base_;
  double sigma_;
};

}  // namespace proxmkl
