#include "proxmkl/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace proxmkl {

void KernelSpec::check() const {
  switch (kind) {
    case KernelKind::linear: break;
    case KernelKind::polynomial:
      if (degree < 1) throw std::invalid_argument("polynomial kernel: degree must be >= 1");
      break;
    case KernelKind::gaussian:
      if (!(sigma2 > 0.0)) throw std::invalid_argument("gaussian kernel: sigma^2 must be positive");
      break;
    case KernelKind::b1_spline:
      if (!(h > 0.0)) throw std::invalid_argument("b1-spline kernel: h must be positive");
      break;
  }
}

std::string to_string(const KernelSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  switch (spec.kind) {
    case KernelKind::linear: out << "linear"; break;
    case KernelKind::polynomial: out << "polynomial:" << spec.degree << ':' << spec.offset; break;
    case KernelKind::gaussian: out << "gaussian:" << spec.sigma2; break;
    case KernelKind::b1_spline: out << "b1_spline:" << spec.h; break;
  }
  if (spec.normalize_diagonal) out << "+norm";
  return out.str();
}

KernelSpec parse_kernel(const std::string& text) {
  std::string body = text;
  KernelSpec spec;
  if (const auto plus = body.find("+norm"); plus != std::string::npos) {
    spec.normalize_diagonal = true;
    body = body.substr(0, plus);
  }
  std::vector<std::string> parts;
  std::stringstream ss(body);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.empty()) throw std::invalid_argument("empty kernel spec");

  const std::string& name = parts[0];
  auto number = [&](std::size_t i, double fallback) { return parts.size() > i ? std::stod(parts[i]) : fallback; };
  if (name == "linear") {
    spec.kind = KernelKind::linear;
  } else if (name == "polynomial" || name == "quadratic") {
    spec.kind = KernelKind::polynomial;
    spec.degree = name == "quadratic" ? 2 : static_cast<int>(number(1, 2.0));
    spec.offset = number(name == "quadratic" ? 1 : 2, 1.0);
  } else if (name == "gaussian") {
    spec.kind = KernelKind::gaussian;
    spec.sigma2 = number(1, 1.0);
  } else if (name == "b1_spline" || name == "b1") {
    spec.kind = KernelKind::b1_spline;
    spec.h = number(1, 1.0);
  } else {
    throw std::invalid_argument("unknown kernel '" + name + "'");
  }
  spec.check();
  return spec;
}

double kernel_raw(const KernelSpec& spec, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2) {
  if (x.size() != x2.size()) throw std::invalid_argument("kernel: dimension mismatch");
  switch (spec.kind) {
    case KernelKind::linear: return x.dot(x2);
    case KernelKind::polynomial: return std::pow(x.dot(x2) + spec.offset, spec.degree);
    case KernelKind::gaussian: return std::exp(-(x - x2).squaredNorm() / (2.0 * spec.sigma2));
    case KernelKind::b1_spline: return std::max(0.0, 1.0 - (x - x2).norm() / spec.h);
  }
  return 0.0;
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2) {
  const double k = kernel_raw(spec, x, x2);
  if (!spec.normalize_diagonal) return k;
  const double d = kernel_raw(spec, x, x) * kernel_raw(spec, x2, x2);
  return d > 0.0 ? k / std::sqrt(d) : 0.0;
}

double b1_width_for_density(const Matrix& points, double nonzero_fraction) {
  if (points.rows() < 2) throw std::invalid_argument("b1_width_for_density: need at least two points");
  if (!(nonzero_fraction > 0.0 && nonzero_fraction <= 1.0)) {
    throw std::invalid_argument("b1_width_for_density: fraction must be in (0, 1]");
  }
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(points.rows() * (points.rows() - 1) / 2));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < points.rows(); ++j) d.push_back((points.row(i) - points.row(j)).norm());
  }
  // Entries with distance strictly below h are nonzero.
  const auto q = std::min(d.size() - 1, static_cast<std::size_t>(nonzero_fraction * static_cast<double>(d.size())));
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(q), d.end());
  const double h = d[q];
  if (!(h > 0.0)) throw std::invalid_argument("b1_width_for_density: too many duplicate points");
  return h;
}

GramCache::GramCache(std::size_t budget_bytes, bool sparse_zeros) : sparse_zeros_(sparse_zeros) {
  // Approximate footprint of one list node plus its hash entry, and of one key.
  constexpr std::size_t kValueBytes = 64;
  constexpr std::size_t kZeroBytes = 24;
  max_values_ = std::max<std::size_t>(1, budget_bytes / kValueBytes);
  max_zeros_ = sparse_zeros ? std::max<std::size_t>(1, budget_bytes / (2 * kZeroBytes)) : 0;
  if (sparse_zeros) max_values_ = std::max<std::size_t>(1, max_values_ / 2);
}

std::uint64_t GramCache::pair_key(std::uint64_t a, std::uint64_t b) {
  if (a > b) std::swap(a, b);
  if (b >= (std::uint64_t{1} << 32)) throw std::invalid_argument("GramCache: id exceeds 32 bits");
  return (a << 32) | b;
}

std::optional<double> GramCache::lookup(std::uint64_t key) {
  if (sparse_zeros_ && zeros_.count(key)) {
    ++hits_;
    return 0.0;
  }
  auto it = index_.find(key);
  if (it == index_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  lru_.splice(lru_.begin(), lru_, it->second);
  return it->second->second;
}

void GramCache::insert(std::uint64_t key, double value) {
  if (sparse_zeros_ && value == 0.0) {
    if (zeros_.size() >= max_zeros_) zeros_.clear();
    zeros_.insert(key);
    return;
  }
  if (index_.count(key)) return;
  lru_.emplace_front(key, value);
  index_[key] = lru_.begin();
  while (lru_.size() > max_values_) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
}

std::size_t GramCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t GramCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

std::size_t GramCache::stored_values() const {
  std::lock_guard lock(mutex_);
  return lru_.size();
}

std::size_t GramCache::stored_zeros() const {
  std::lock_guard lock(mutex_);
  return zeros_.size();
}

void GramCache::clear() {
  std::lock_guard lock(mutex_);
  lru_.clear();
  index_.clear();
  zeros_.clear();
}

}  // namespace proxmkl
