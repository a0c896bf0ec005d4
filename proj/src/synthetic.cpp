#include "proxmkl/synthetic.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace proxmkl {

namespace {

constexpr int kMaxRedraws = 10000;

Vector normal_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

// Index of the largest entry (lowest on ties) and the gap to the runner-up.
std::pair<int, double> top_gap(const Vector& s) {
  int best = 0;
  for (Index c = 1; c < s.size(); ++c) {
    if (s[c] > s[best]) best = static_cast<int>(c);
  }
  double second = -std::numeric_limits<double>::infinity();
  for (Index c = 0; c < s.size(); ++c) {
    if (c != best) second = std::max(second, s[c]);
  }
  return {best, s.size() > 1 ? s[best] - second : std::numeric_limits<double>::infinity()};
}

void label_names(SequenceDataset& data, int num_labels) {
  data.num_labels = num_labels;
  data.label_names.clear();
  for (int c = 0; c < num_labels; ++c) {
    data.label_names.push_back(c < 26 ? std::string(1, static_cast<char>('a' + c)) : "L" + std::to_string(c));
  }
}

Index draw_length(Index lo, Index hi, std::mt19937_64& rng) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("synthetic: bad sequence length range");
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

}  // namespace

SyntheticGroups gen_synthetic_groups(const SyntheticGroupsSpec& spec) {
  if (spec.num_labels < 2) throw std::invalid_argument("synthetic groups: need at least two labels");
  if (spec.groups < 1 || spec.group_dim < 1) throw std::invalid_argument("synthetic groups: bad group shape");
  if (spec.relevant.empty()) throw std::invalid_argument("synthetic groups: need a relevant group");
  for (auto k : spec.relevant) {
    if (k >= static_cast<std::size_t>(spec.groups)) throw std::invalid_argument("synthetic groups: relevant group out of range");
  }
  if (spec.noise < 0.0 || spec.margin < 0.0 || spec.folds < 1) throw std::invalid_argument("synthetic groups: bad parameters");

  std::mt19937_64 rng(spec.seed);
  SyntheticGroups out;
  out.layout = FeatureLayout::uniform(spec.num_labels, spec.groups * spec.group_dim, spec.groups, false);
  out.planted = out.layout.zeros();
  for (auto k : spec.relevant) {
    auto g = out.planted.mutable_group(k);
    g = normal_vector(g.size(), rng);
  }
  // Unit norm keeps the margin on a fixed scale.
  out.planted.set_values(out.planted.values() / out.planted.norm());

  const Index dim = out.layout.input_dim();
  std::normal_distribution<double> noise(0.0, 1.0);
  label_names(out.data, spec.num_labels);
  for (std::size_t i = 0; i < spec.m; ++i) {
    ChainInstance x;
    const Index n = draw_length(spec.min_length, spec.max_length, rng);
    x.inputs.resize(n, dim);
    x.labels.resize(static_cast<std::size_t>(n));
    for (Index pos = 0; pos < n; ++pos) {
      for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxRedraws) throw std::runtime_error("synthetic groups: margin cannot be met");
        const Vector u = normal_vector(dim, rng);
        x.inputs.row(pos) = u.transpose();
        ChainInstance one{x.inputs.row(pos), {0}, 0, ""};
        const Vector s = compute_scores(out.layout, out.planted, one).emission.row(0).transpose();
        const auto [best, gap] = top_gap(s);
        if (gap < spec.margin) continue;
        Vector noisy = s;
        if (spec.noise > 0.0) {
          for (Index c = 0; c < noisy.size(); ++c) noisy[c] += spec.noise * noise(rng);
        }
        x.labels[static_cast<std::size_t>(pos)] = spec.noise > 0.0 ? top_gap(noisy).first : best;
        break;
      }
    }
    x.fold = static_cast<int>(i % static_cast<std::size_t>(spec.folds));
    x.name = "g" + std::to_string(i);
    out.data.instances.push_back(std::move(x));
  }
  return out;
}

SyntheticMkl gen_synthetic_mkl(const SyntheticMklSpec& spec) {
  const std::size_t p = spec.kernels.size();
  if (p == 0) throw std::invalid_argument("synthetic mkl: need at least one kernel");
  if (spec.informative >= p) throw std::invalid_argument("synthetic mkl: informative kernel out of range");
  if (spec.num_labels < 2 || spec.centers < 1 || spec.folds < 1 || spec.margin < 0.0) {
    throw std::invalid_argument("synthetic mkl: bad parameters");
  }
  if (!spec.block_dims.empty() && spec.block_dims.size() != p) {
    throw std::invalid_argument("synthetic mkl: one block dimension per kernel");
  }

  SyntheticMkl out;
  Index dim = 0;
  for (std::size_t k = 0; k < p; ++k) {
    spec.kernels[k].check();
    const Index d = spec.block_dims.empty() ? spec.block_dim : spec.block_dims[k];
    if (d < 1) throw std::invalid_argument("synthetic mkl: block dimension must be positive");
    out.groups.push_back({spec.kernels[k], dim, d});
    dim += d;
  }

  std::mt19937_64 rng(spec.seed);
  const KernelGroup& inf = out.groups[spec.informative];
  std::vector<Vector> centers;
  for (int j = 0; j < spec.centers; ++j) centers.push_back(normal_vector(inf.input_dim, rng));
  Matrix a(spec.num_labels, spec.centers);
  for (int c = 0; c < spec.num_labels; ++c) a.row(c) = normal_vector(spec.centers, rng).transpose();

  auto label_scores = [&](const Vector& u) {
    Vector k(spec.centers);
    for (int j = 0; j < spec.centers; ++j) k[j] = kernel_eval(inf.kernel, centers[static_cast<std::size_t>(j)], u);
    return Vector(a * k);
  };

  label_names(out.data, spec.num_labels);
  for (std::size_t i = 0; i < spec.m; ++i) {
    ChainInstance x;
    const Index n = draw_length(spec.min_length, spec.max_length, rng);
    x.inputs.resize(n, dim);
    x.labels.resize(static_cast<std::size_t>(n));
    for (Index pos = 0; pos < n; ++pos) {
      for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxRedraws) throw std::runtime_error("synthetic mkl: margin cannot be met");
        const Vector row = normal_vector(dim, rng);
        const auto [best, gap] = top_gap(label_scores(row.segment(inf.input_begin, inf.input_dim)));
        if (gap < spec.margin) continue;
        x.inputs.row(pos) = row.transpose();
        x.labels[static_cast<std::size_t>(pos)] = best;
        break;
      }
    }
    x.fold = static_cast<int>(i % static_cast<std::size_t>(spec.folds));
    x.name = "k" + std::to_string(i);
    out.data.instances.push_back(std::move(x));
  }
  return out;
}

}  // namespace proxmkl
