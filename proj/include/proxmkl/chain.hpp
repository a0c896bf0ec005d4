#pragma once

#include <string>
#include <vector>

#include "proxmkl/grouped_vector.hpp"

namespace proxmkl {

/// One observed sequence: row i of `inputs` is the input vector at position i,
/// labels are 0-based in [0, L).
struct ChainInstance {
  Matrix inputs;
  std::vector<int> labels;
  int fold = 0;
  std::string name;

  Index length() const { return inputs.rows(); }
};

/// Emission (N×L) and transition (L×L) part scores of one sequence.
struct ChainScores {
  Matrix emission;
  Matrix transition;

  Index length() const { return emission.rows(); }
  int num_labels() const { return static_cast<int>(emission.cols()); }
};

/// Joint feature map of a linear-chain model.
///
/// The input dimensions are split into contiguous groups; group k of θ holds
/// an L×d_k block (label-major) so that the emission score of label c at
/// position i is Σ_k ⟨θ_k[c], x_i[k]⟩. When `transitions` is set a last group
/// of L×L indicator weights scores consecutive label pairs.
struct FeatureLayout {
  int num_labels = 2;
  std::vector<Index> input_offsets{0};
  bool transitions = true;

  static FeatureLayout uniform(int num_labels, Index input_dim, Index groups, bool transitions);
  static FeatureLayout single_group(int num_labels, Index input_dim, bool transitions);

  Index input_dim() const { return input_offsets.back(); }
  std::size_t num_input_groups() const { return input_offsets.size() - 1; }
  std::size_t num_groups() const { return num_input_groups() + (transitions ? 1 : 0); }
  std::size_t transition_group() const { return num_input_groups(); }
  Index input_group_dim(std::size_t k) const { return input_offsets[k + 1] - input_offsets[k]; }

  std::vector<Index> parameter_offsets() const;
  Index parameter_dim() const { return parameter_offsets().back(); }
  GroupedVector zeros() const { return GroupedVector::zeros(parameter_offsets()); }

  /// Throws std::invalid_argument on dimension or label-range mismatch.
  void check(const ChainInstance& instance) const;
  void check(const GroupedVector& theta) const;
};

ChainScores compute_scores(const FeatureLayout& layout, const GroupedVector& theta, const ChainInstance& instance);

/// out += scale · φ(x, labels).
void add_features(const FeatureLayout& layout, const ChainInstance& instance, const std::vector<int>& labels,
                  double scale, Vector& out);
Vector feature_vector(const FeatureLayout& layout, const ChainInstance& instance, const std::vector<int>& labels);

/// Σ_i emission(i, y_i) + Σ_i transition(y_{i−1}, y_i).
double sequence_score(const ChainScores& scores, const std::vector<int>& labels);

int hamming_distance(const std::vector<int>& a, const std::vector<int>& b);

/// cost(i, c) = [c ≠ gold_i]; the decomposable cost used for loss-augmented
/// decoding.
Matrix hamming_cost(const std::vector<int>& gold, int num_labels);

}  // namespace proxmkl
