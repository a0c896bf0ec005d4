#include "proxmkl/struct_loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace proxmkl {

std::string to_string(LossKind kind) { return kind == LossKind::hinge ? "hinge" : "crf"; }

LossKind parse_loss_kind(const std::string& name) {
  if (name == "hinge" || name == "svm") return LossKind::hinge;
  if (name == "crf" || name == "logistic") return LossKind::crf;
  throw std::invalid_argument("unknown loss '" + name + "'");
}

LossReport hinge_loss_subgradient(const FeatureLayout& layout, const GroupedVector& theta,
                                  const ChainInstance& instance) {
  layout.check(instance);
  const ChainScores scores = compute_scores(layout, theta, instance);
  const Decoding best = viterbi_decode(scores, instance.labels);

  LossReport r;
  r.argmax_labels = best.labels;
  r.loss_value = std::max(0.0, best.score - sequence_score(scores, instance.labels));
  r.subgradient = Vector::Zero(layout.parameter_dim());
  if (best.labels != instance.labels) {
    add_features(layout, instance, best.labels, 1.0, r.subgradient);
    add_features(layout, instance, instance.labels, -1.0, r.subgradient);
  }
  return r;
}

LossReport crf_loss_gradient(const FeatureLayout& layout, const GroupedVector& theta, const ChainInstance& instance) {
  layout.check(instance);
  const ChainScores scores = compute_scores(layout, theta, instance);
  Marginals m = forward_backward(scores);

  LossReport r;
  r.loss_value = std::max(0.0, m.log_partition - sequence_score(scores, instance.labels));
  r.subgradient = Vector::Zero(layout.parameter_dim());
  const auto offsets = layout.parameter_offsets();
  const Index n = instance.length();
  const int labels = layout.num_labels;
  for (Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < layout.num_input_groups(); ++k) {
      const Index dk = layout.input_group_dim(k);
      const auto x = instance.inputs.row(i).segment(layout.input_offsets[k], dk).transpose();
      for (int c = 0; c < labels; ++c) {
        r.subgradient.segment(offsets[k] + c * dk, dk) += m.unary(i, c) * x;
      }
    }
  }
  if (layout.transitions) {
    const Index base = offsets[layout.transition_group()];
    for (const auto& p : m.pairwise) {
      for (int a = 0; a < labels; ++a) {
        for (int b = 0; b < labels; ++b) r.subgradient[base + a * labels + b] += p(a, b);
      }
    }
  }
  add_features(layout, instance, instance.labels, -1.0, r.subgradient);
  r.argmax_labels = viterbi_decode(scores).labels;
  r.marginals = std::move(m);
  return r;
}

LossReport evaluate_loss(LossKind kind, const FeatureLayout& layout, const GroupedVector& theta,
                         const ChainInstance& instance) {
  return kind == LossKind::hinge ? hinge_loss_subgradient(layout, theta, instance)
                                 : crf_loss_gradient(layout, theta, instance);
}

double loss_value(LossKind kind, const FeatureLayout& layout, const GroupedVector& theta,
                  const ChainInstance& instance) {
  layout.check(instance);
  const ChainScores scores = compute_scores(layout, theta, instance);
  const double gold = sequence_score(scores, instance.labels);
  if (kind == LossKind::hinge) {
    return std::max(0.0, viterbi_decode(scores, instance.labels).score - gold);
  }
  return std::max(0.0, forward_backward(scores).log_partition - gold);
}

LipschitzBounds lipschitz_radius(std::span<const ChainInstance> instances, const FeatureLayout& layout,
                                 double lambda, LossKind kind, double sigma) {
  if (instances.empty()) throw std::invalid_argument("lipschitz_radius: empty dataset");
  if (!(lambda > 0.0)) throw std::invalid_argument("lipschitz_radius: lambda must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("lipschitz_radius: sigma must be >= 0");

  double max_phi = 0.0;
  double total_cost = 0.0;
  for (const auto& inst : instances) {
    layout.check(inst);
    const Index n = inst.length();
    const double emission = inst.inputs.rowwise().norm().sum();
    const double transition = layout.transitions ? static_cast<double>(n - 1) : 0.0;
    max_phi = std::max(max_phi, std::sqrt(emission * emission + transition * transition));
    if (kind == LossKind::hinge) {
      total_cost += layout.num_labels > 1 ? static_cast<double>(n) : 0.0;
    } else {
      total_cost += static_cast<double>(n) * std::log(static_cast<double>(layout.num_labels));
    }
  }

  LipschitzBounds b;
  b.G = 2.0 * max_phi;
  b.Lambda = total_cost / static_cast<double>(instances.size());
  b.gamma = std::sqrt(2.0 * b.Lambda / (lambda + sigma));
  b.G_tilde = b.G + std::sqrt(2.0 * sigma * sigma * b.Lambda / (lambda + sigma));
  return b;
}

}  // namespace proxmkl
