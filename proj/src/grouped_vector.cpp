#include "proxmkl/grouped_vector.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace proxmkl {

GroupedVector::GroupedVector(Vector values, std::vector<Index> offsets)
    : values_(std::move(values)), offsets_(std::move(offsets)) {
  if (offsets_.size() < 2 || offsets_.front() != 0 || offsets_.back() != values_.size()) {
    throw std::invalid_argument("GroupedVector: offsets must start at 0 and end at size");
  }
  for (std::size_t k = 1; k < offsets_.size(); ++k) {
    if (offsets_[k] <= offsets_[k - 1]) {
      throw std::invalid_argument("GroupedVector: offsets must be strictly increasing");
    }
  }
  norm_cache_.assign(num_groups(), 0.0);
  valid_.assign(num_groups(), 0);
}

GroupedVector GroupedVector::zeros(std::vector<Index> offsets) {
  if (offsets.empty()) throw std::invalid_argument("GroupedVector: empty offsets");
  Vector v = Vector::Zero(offsets.back());
  return GroupedVector(std::move(v), std::move(offsets));
}

GroupedVector GroupedVector::zeros_with_sizes(const std::vector<Index>& sizes) {
  std::vector<Index> offsets{0};
  for (Index s : sizes) offsets.push_back(offsets.back() + s);
  return zeros(std::move(offsets));
}

Vector& GroupedVector::mutable_values() {
  std::fill(valid_.begin(), valid_.end(), 0);
  return values_;
}

void GroupedVector::set_values(const Vector& v) {
  if (v.size() != values_.size()) {
    throw std::invalid_argument("GroupedVector::set_values: size mismatch");
  }
  mutable_values() = v;
}

double GroupedVector::group_norm(std::size_t k) const {
  if (!valid_[k]) {
    norm_cache_[k] = group(k).norm();
    valid_[k] = 1;
  }
  return norm_cache_[k];
}

Vector GroupedVector::group_norms() const {
  Vector n(static_cast<Index>(num_groups()));
  for (std::size_t k = 0; k < num_groups(); ++k) n[static_cast<Index>(k)] = group_norm(k);
  return n;
}

void GroupedVector::scale_group(std::size_t k, double s) {
  values_.segment(offsets_[k], group_size(k)) *= s;
  if (valid_[k]) norm_cache_[k] *= std::abs(s);
}

void GroupedVector::scale(double s) {
  for (std::size_t k = 0; k < num_groups(); ++k) scale_group(k, s);
}

}  // namespace proxmkl
