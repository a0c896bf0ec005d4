#pragma once

#include <cstdint>
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "proxmkl/types.hpp"

namespace proxmkl {

enum class KernelKind { linear, polynomial, gaussian, b1_spline };

struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  int degree = 2;        ///< polynomial: (⟨x,x'⟩ + offset)^degree
  double offset = 1.0;
  double sigma2 = 1.0;   ///< gaussian: exp(−‖x−x'‖²/(2σ²))
  double h = 1.0;        ///< b1_spline: max{0, 1 − ‖x−x'‖/h}
  bool normalize_diagonal = false;

  void check() const;
  /// Zero beyond a finite distance, so Gram matrices are sparse.
  bool compact_support() const { return kind == KernelKind::b1_spline; }
};

std::string to_string(const KernelSpec& spec);
/// "linear", "polynomial:2:1", "gaussian:5", "b1_spline:3"; a "+norm" suffix
/// requests unit-diagonal normalization.
KernelSpec parse_kernel(const std::string& text);

double kernel_raw(const KernelSpec& spec, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2);

/// K(x,x'), or K(x,x')/√(K(x,x)K(x',x')) when normalized (0 if a diagonal is 0).
double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2);

/// B1-spline width h for which about `nonzero_fraction` of the off-diagonal
/// Gram entries over the rows of `points` are nonzero: that quantile of the
/// pairwise distances.
double b1_width_for_density(const Matrix& points, double nonzero_fraction);

/// Memoized kernel values keyed by an unordered pair of integer ids, with an
/// LRU bound on memory. For compactly supported kernels the zero entries are
/// kept apart as bare keys, so the value store holds only the nonzero part of
/// the Gram matrix. Safe for concurrent use.
class GramCache {
 public:
  explicit GramCache(std::size_t budget_bytes = std::size_t{64} << 20, bool sparse_zeros = false);

  /// Cached K(a, b); `compute` runs on a miss.
  template <class F>
  double get(std::uint64_t a, std::uint64_t b, F&& compute) {
    const std::uint64_t key = pair_key(a, b);
    {
      std::lock_guard lock(mutex_);
      if (auto v = lookup(key)) return *v;
    }
    const double value = compute();
    std::lock_guard lock(mutex_);
    insert(key, value);
    return value;
  }

  std::size_t hits() const;
  std::size_t misses() const;
  std::size_t stored_values() const;
  std::size_t stored_zeros() const;
  void clear();

 private:
  static std::uint64_t pair_key(std::uint64_t a, std::uint64_t b);
  std::optional<double> lookup(std::uint64_t key);
  void insert(std::uint64_t key, double value);

  using Entry = std::pair<std::uint64_t, double>;
  std::size_t max_values_;
  std::size_t max_zeros_;
  bool sparse_zeros_;
  std::list<Entry> lru_;
  std::unordered_map<std::uint64_t, std::list<Entry>::iterator> index_;
  std::unordered_set<std::uint64_t> zeros_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
  mutable std::mutex mutex_;
};

}  // namespace proxmkl
