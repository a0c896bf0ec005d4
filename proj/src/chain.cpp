#include "proxmkl/chain.hpp"

#include <stdexcept>

namespace proxmkl {

FeatureLayout FeatureLayout::uniform(int num_labels, Index input_dim, Index groups, bool transitions) {
  if (groups < 1 || input_dim < groups) throw std::invalid_argument("FeatureLayout: bad group count");
  FeatureLayout layout;
  layout.num_labels = num_labels;
  layout.transitions = transitions;
  layout.input_offsets.assign(1, 0);
  for (Index k = 1; k <= groups; ++k) layout.input_offsets.push_back((input_dim * k) / groups);
  return layout;
}

FeatureLayout FeatureLayout::single_group(int num_labels, Index input_dim, bool transitions) {
  return uniform(num_labels, input_dim, 1, transitions);
}

std::vector<Index> FeatureLayout::parameter_offsets() const {
  std::vector<Index> offsets{0};
  for (std::size_t k = 0; k < num_input_groups(); ++k) {
    offsets.push_back(offsets.back() + num_labels * input_group_dim(k));
  }
  if (transitions) offsets.push_back(offsets.back() + num_labels * num_labels);
  return offsets;
}

void FeatureLayout::check(const ChainInstance& instance) const {
  if (instance.length() < 1) throw std::invalid_argument("chain instance: empty sequence");
  if (instance.inputs.cols() != input_dim()) {
    throw std::invalid_argument("chain instance: input dimension " + std::to_string(instance.inputs.cols()) +
                                " does not match layout dimension " + std::to_string(input_dim()));
  }
  if (static_cast<Index>(instance.labels.size()) != instance.length()) {
    throw std::invalid_argument("chain instance: label count differs from sequence length");
  }
  for (int y : instance.labels) {
    if (y < 0 || y >= num_labels) throw std::invalid_argument("chain instance: label out of range");
  }
}

void FeatureLayout::check(const GroupedVector& theta) const {
  if (theta.offsets() != parameter_offsets()) {
    throw std::invalid_argument("parameter vector group structure does not match the feature layout");
  }
}

ChainScores compute_scores(const FeatureLayout& layout, const GroupedVector& theta, const ChainInstance& instance) {
  layout.check(theta);
  if (instance.inputs.cols() != layout.input_dim()) {
    throw std::invalid_argument("compute_scores: input dimension mismatch");
  }
  const Index n = instance.length();
  const int labels = layout.num_labels;
  ChainScores s;
  s.emission = Matrix::Zero(n, labels);
  for (std::size_t k = 0; k < layout.num_input_groups(); ++k) {
    const Index dk = layout.input_group_dim(k);
    // θ_k stored label-major: an L×d_k row-major block.
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w(
        theta.values().data() + theta.group_begin(k), labels, dk);
    s.emission.noalias() += instance.inputs.middleCols(layout.input_offsets[k], dk) * w.transpose();
  }
  if (layout.transitions) {
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> t(
        theta.values().data() + theta.group_begin(layout.transition_group()), labels, labels);
    s.transition = t;
  } else {
    s.transition = Matrix::Zero(labels, labels);
  }
  return s;
}

void add_features(const FeatureLayout& layout, const ChainInstance& instance, const std::vector<int>& labels,
                  double scale, Vector& out) {
  const auto offsets = layout.parameter_offsets();
  const Index n = instance.length();
  for (Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < layout.num_input_groups(); ++k) {
      const Index dk = layout.input_group_dim(k);
      out.segment(offsets[k] + y * dk, dk) += scale * instance.inputs.row(i).segment(layout.input_offsets[k], dk).transpose();
    }
    if (layout.transitions && i > 0) {
      const int prev = labels[static_cast<std::size_t>(i - 1)];
      out[offsets[layout.transition_group()] + prev * layout.num_labels + y] += scale;
    }
  }
}

Vector feature_vector(const FeatureLayout& layout, const ChainInstance& instance, const std::vector<int>& labels) {
  Vector phi = Vector::Zero(layout.parameter_dim());
  add_features(layout, instance, labels, 1.0, phi);
  return phi;
}

double sequence_score(const ChainScores& scores, const std::vector<int>& labels) {
  double s = scores.emission(0, labels[0]);
  for (Index i = 1; i < scores.length(); ++i) {
    s += scores.transition(labels[static_cast<std::size_t>(i - 1)], labels[static_cast<std::size_t>(i)]);
    s += scores.emission(i, labels[static_cast<std::size_t>(i)]);
  }
  return s;
}

int hamming_distance(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

Matrix hamming_cost(const std::vector<int>& gold, int num_labels) {
  Matrix c = Matrix::Ones(static_cast<Index>(gold.size()), num_labels);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] >= num_labels) throw std::invalid_argument("hamming_cost: label out of range");
    c(static_cast<Index>(i), gold[i]) = 0.0;
  }
  return c;
}

}  // namespace proxmkl
