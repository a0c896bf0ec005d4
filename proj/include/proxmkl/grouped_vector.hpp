#pragma once

#include <cstddef>
#include <vector>

#include "proxmkl/types.hpp"

namespace proxmkl {

using Index = Eigen::Index;

/// A parameter vector partitioned into p contiguous groups, with per-group
/// ℓ2 norms cached lazily. Writes through mutable_group()/mutable_values()
/// invalidate the affected cache entries; scale_group() keeps them current.
///
/// Single writer. Concurrent writers are fine only when they touch disjoint
/// groups.
class GroupedVector {
 public:
  GroupedVector() = default;

  /// `offsets` has p + 1 strictly increasing entries, offsets[0] = 0 and
  /// offsets[p] = values.size().
  GroupedVector(Vector values, std::vector<Index> offsets);

  static GroupedVector zeros(std::vector<Index> offsets);
  /// Consecutive groups of the given sizes.
  static GroupedVector zeros_with_sizes(const std::vector<Index>& sizes);

  Index size() const { return values_.size(); }
  std::size_t num_groups() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  Index group_begin(std::size_t k) const { return offsets_[k]; }
  Index group_size(std::size_t k) const { return offsets_[k + 1] - offsets_[k]; }
  const std::vector<Index>& offsets() const { return offsets_; }

  const Vector& values() const { return values_; }
  Vector& mutable_values();
  void set_values(const Vector& v);

  auto group(std::size_t k) const { return values_.segment(offsets_[k], group_size(k)); }
  auto mutable_group(std::size_t k) {
    valid_[k] = 0;
    return values_.segment(offsets_[k], group_size(k));
  }

  double group_norm(std::size_t k) const;
  Vector group_norms() const;
  double norm() const { return values_.norm(); }

  /// Multiplies group k by s and scales its cached norm by |s|.
  void scale_group(std::size_t k, double s);
  void scale(double s);

  bool same_structure(const GroupedVector& other) const { return offsets_ == other.offsets_; }

 private:
  Vector values_;
  std::vector<Index> offsets_;
  mutable std::vector<double> norm_cache_;
  mutable std::vector<char> valid_;
};

}  // namespace proxmkl
