#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "proxmkl/chain.hpp"
#include "proxmkl/inference.hpp"
#include "proxmkl/kernel.hpp"
#include "proxmkl/online_solver.hpp"

namespace proxmkl {

/// One base kernel acting on the input columns [input_begin, input_begin + input_dim).
/// Groups may share or overlap columns.
struct KernelGroup {
  KernelSpec kernel;
  Index input_begin = 0;
  Index input_dim = 0;

  auto block(const Eigen::Ref<const Vector>& x) const { return x.segment(input_begin, input_dim); }
};

enum class MklMode { explicit_features, kernelized, automatic };

std::string to_string(MklMode mode);
MklMode parse_mkl_mode(const std::string& name);

/// A mistake of round `round`: the loss-augmented labels differed from the gold
/// labels of `instance` at `diff_positions`.
struct SupportEntry {
  std::size_t round = 0;
  std::size_t instance = 0;
  std::vector<int> predicted;
  std::vector<Index> diff_positions;
  std::vector<double> base;   ///< per input group; effective α = base · scale
  std::vector<double> naive;  ///< per input group α from the O(t) recursion, when tracked
};

/// Kernel expansion of the input groups of θ.
///
/// θ_k = Σ_s α_ks (φ_k(x_s, y_s) − φ_k(x_s, ŷ_s)). Each α_ks is stored as a
/// base coefficient times a per-group scale c_k, so the per-round shrink and
/// projection factors cost O(1) per group. For scoring the expansion is also
/// kept aggregated by input position: row r of `points` carries, per group,
/// an L-vector of summed signed base coefficients.
class SupportSet {
 public:
  SupportSet() = default;
  SupportSet(std::size_t groups, int num_labels, bool track_naive);

  std::size_t num_groups() const { return scale.size(); }
  int num_labels() const { return labels_; }
  bool tracks_naive() const { return track_naive_; }
  std::size_t num_points() const { return points.size(); }

  /// Appends the mistake (x, y, ŷ) with α_k = eta for every group. Positions
  /// use global ids `first_id + i` for the Gram cache.
  void add(std::size_t round, std::size_t instance, const ChainInstance& x, const std::vector<int>& predicted,
           double eta, std::uint64_t first_id);

  /// Multiplies α_k for every stored entry by `factor`. A zero factor clears
  /// the group and resets c_k to 1; c_k below 1e-150 is folded into the bases.
  void scale_group(std::size_t k, double factor);

  double effective_alpha(std::size_t entry, std::size_t k) const { return entries[entry].base[k] * scale[k]; }
  /// Aggregated effective coefficient of label c at point r, group k.
  double coefficient(std::size_t k, std::size_t r, int c) const {
    return coeff[k][r * static_cast<std::size_t>(labels_) + static_cast<std::size_t>(c)] * scale[k];
  }
  bool point_active(std::size_t k, std::size_t r) const;
  /// Rebuilds the id → row lookup after `points`/`point_ids` were filled directly.
  void rebuild_index();

  std::vector<SupportEntry> entries;
  std::vector<double> scale;    ///< c_k
  std::vector<double> sq_norm;  ///< ‖θ_k‖²
  std::vector<Vector> points;   ///< full input rows of referenced positions
  std::vector<std::uint64_t> point_ids;
  std::vector<std::vector<double>> coeff;  ///< per group, points × L row-major

 private:
  std::size_t point_row(std::uint64_t id, const Eigen::Ref<const Vector>& x);
  void drop_empty_entries();

  int labels_ = 0;
  bool track_naive_ = false;
  std::unordered_map<std::uint64_t, std::size_t> row_of_;
};

struct MklModel {
  MklMode mode = MklMode::kernelized;
  int num_labels = 0;
  std::vector<KernelGroup> groups;
  bool transitions = false;
  Vector beta;  ///< one entry per input group, then the transition group if present
  bool fixed_beta = false;  ///< β was given, not learned

  // explicit_features
  FeatureLayout layout;
  GroupedVector theta;

  // kernelized
  SupportSet support;
  Matrix transition;  ///< L×L

  std::size_t num_beta_groups() const { return groups.size() + (transitions ? 1 : 0); }
  /// ‖θ_k‖ for every β group.
  Vector group_norms() const;
};

struct MklConfig {
  MklMode mode = MklMode::automatic;
  std::size_t rounds = 1;
  double lambda = 1.0;
  LearningRateSchedule schedule = LearningRateSchedule::inv_sqrt(1.0);
  std::optional<double> gamma;  ///< defaults to √(2Λ/λ), Λ the mean sequence length
  bool project = true;
  bool transitions = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;  ///< per-group workers within a round
  std::size_t cache_bytes = std::size_t{64} << 20;
  bool naive_recursion = false;  ///< also track α by the O(t) recursion
  std::size_t norm_check_every = 100;  ///< 0 disables the drift check
  /// Fixed kernel weights instead of learned ones: the regularizer becomes
  /// (λ/2)Σ_k ‖θ_k‖²/β_k, an SVM on the kernel Σ_k β_k K_k. One entry per β group.
  std::optional<Vector> fixed_beta;
};

struct MklResult {
  MklModel model;
  RunTrace trace;
  double max_norm_drift = 0.0;  ///< worst |bookkept − recomputed| / (1 + recomputed) of ‖θ_k‖²
  std::size_t norm_checks = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
};

/// Online-MKL with structured hinge loss and (λ/2)(Σ_k‖θ_k‖)²: per round the
/// loss-augmented labels, a gradient step, shrinkage of the group norms by the
/// squared-ℓ1 prox, groupwise rescaling and projection onto the γ-ball; β from
/// the final group norms.
MklResult mkl_run(std::span<const ChainInstance> data, int num_labels, const std::vector<KernelGroup>& groups,
                  const MklConfig& config);

/// Σ_r coefficient(k, r, c)·K_k(point_r, u) for a group-k input block u.
/// `id` enables the Gram cache for training positions.
double kernelized_score(const SupportSet& support, std::size_t k, const KernelGroup& group, int label,
                        const Eigen::Ref<const Vector>& x, GramCache* cache = nullptr,
                        std::optional<std::uint64_t> id = std::nullopt);

/// ‖θ_k − η g_k‖² from ‖θ_k‖², the cross term ⟨θ_k, g_k⟩ = f_k(ŷ) − f_k(y)
/// and ‖g_k‖². Throws NumericalFailure below −1e-9·(1 + magnitude), clamps
/// smaller negatives to 0.
double update_group_norm(double sq_norm, double cross, double grad_sq_norm, double eta);

/// ‖φ_k(x, y) − φ_k(x, ŷ)‖² through kernel evaluations at the differing positions.
double feature_difference_sq_norm(const KernelGroup& group, const ChainInstance& x, const std::vector<int>& predicted,
                                  GramCache* cache = nullptr, std::uint64_t first_id = 0);

/// ‖θ_k‖² recomputed from the support set, O(points²).
double recompute_sq_norm(const SupportSet& support, std::size_t k, const KernelGroup& group,
                         GramCache* cache = nullptr);

/// β_k = ‖θ_k‖ / Σ_l ‖θ_l‖. All-zero norms give uniform β and set `all_zero`.
Vector finalize_beta(const Vector& group_norms, bool* all_zero = nullptr);

/// Emission and transition scores of the model on one sequence.
ChainScores mkl_scores(const MklModel& model, const ChainInstance& x);
Decoding predict(const MklModel& model, const ChainInstance& x);

/// Explicit feature inputs of the groups: group blocks concatenated, each row
/// normalized when its kernel asks for unit diagonal. Linear kernels only.
Matrix expand_inputs(const std::vector<KernelGroup>& groups, const Matrix& inputs);

/// θ written out as explicit weights; requires linear kernels.
GroupedVector materialize_explicit(const MklModel& model);

}  // namespace proxmkl
