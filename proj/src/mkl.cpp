#include "proxmkl/mkl.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <thread>

#include "proxmkl/prox.hpp"

namespace proxmkl {

namespace {

constexpr double kScaleFloor = 1e-150;

// Runs fn(k) for k in [0, n), striped over up to `threads` workers.
template <class F>
void for_each_group(std::size_t n, unsigned threads, F&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = w; k < n; k += workers) fn(k);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double cached_kernel(const KernelGroup& g, const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
                     GramCache* cache, std::optional<std::uint64_t> id_a, std::optional<std::uint64_t> id_b) {
  if (cache && id_a && id_b) {
    return cache->get(*id_a, *id_b, [&] { return kernel_eval(g.kernel, g.block(a), g.block(b)); });
  }
  return kernel_eval(g.kernel, g.block(a), g.block(b));
}

// Emission scores of group k at every label for one input row.
Vector group_emission(const SupportSet& support, std::size_t k, const KernelGroup& group,
                      const Eigen::Ref<const Vector>& x, GramCache* cache, std::optional<std::uint64_t> id) {
  const int labels = support.num_labels();
  Vector out = Vector::Zero(labels);
  const auto& coeff = support.coeff[k];
  for (std::size_t r = 0; r < support.num_points(); ++r) {
    if (!support.point_active(k, r)) continue;
    const double kv = cached_kernel(group, support.points[r], x, cache, support.point_ids[r], id);
    if (kv == 0.0) continue;
    const double* row = coeff.data() + r * static_cast<std::size_t>(labels);
    for (int c = 0; c < labels; ++c) out[c] += kv * row[c];
  }
  return out * support.scale[k];
}

Matrix group_emission_matrix(const SupportSet& support, std::size_t k, const KernelGroup& group,
                             const ChainInstance& x, GramCache* cache, std::optional<std::uint64_t> first_id) {
  Matrix e(x.length(), support.num_labels());
  for (Index i = 0; i < x.length(); ++i) {
    std::optional<std::uint64_t> id;
    if (first_id) id = *first_id + static_cast<std::uint64_t>(i);
    e.row(i) = group_emission(support, k, group, x.inputs.row(i).transpose(), cache, id).transpose();
  }
  return e;
}

void add_transition_features(Matrix& t, const std::vector<int>& labels, double scale) {
  for (std::size_t i = 1; i < labels.size(); ++i) t(labels[i - 1], labels[i]) += scale;
}

void check_groups(const std::vector<KernelGroup>& groups, Index input_dim) {
  if (groups.empty()) throw std::invalid_argument("mkl: need at least one kernel group");
  for (const auto& g : groups) {
    g.kernel.check();
    if (g.input_dim < 1 || g.input_begin < 0 || g.input_begin + g.input_dim > input_dim) {
      throw std::invalid_argument("mkl: kernel group columns outside the input dimension");
    }
  }
}

void check_data(std::span<const ChainInstance> data, int num_labels, Index input_dim) {
  if (data.empty()) throw std::invalid_argument("mkl: empty dataset");
  if (num_labels < 1) throw std::invalid_argument("mkl: need at least one label");
  for (const auto& x : data) {
    if (x.length() < 1) throw std::invalid_argument("mkl: empty sequence");
    if (x.inputs.cols() != input_dim) throw std::invalid_argument("mkl: inconsistent input dimension");
    if (static_cast<Index>(x.labels.size()) != x.length()) {
      throw std::invalid_argument("mkl: label count differs from sequence length");
    }
    for (int y : x.labels) {
      if (y < 0 || y >= num_labels) throw std::invalid_argument("mkl: label out of range");
    }
  }
}

bool all_linear(const std::vector<KernelGroup>& groups) {
  return std::all_of(groups.begin(), groups.end(),
                     [](const KernelGroup& g) { return g.kernel.kind == KernelKind::linear; });
}

FeatureLayout explicit_layout(const std::vector<KernelGroup>& groups, int num_labels, bool transitions) {
  FeatureLayout layout;
  layout.num_labels = num_labels;
  layout.transitions = transitions;
  layout.input_offsets.assign(1, 0);
  for (const auto& g : groups) layout.input_offsets.push_back(layout.input_offsets.back() + g.input_dim);
  return layout;
}

// Shrink factors b_k/b̃_k times the projection factor, from b̃.
std::vector<double> shrink_factors(const Vector& norms, double eta, double lambda, std::optional<double> gamma) {
  const Vector b = prox_squared_l1(norms, eta * lambda).point;
  double proj = 1.0;
  if (gamma) {
    const double nb = b.norm();
    if (nb > *gamma) proj = *gamma / nb;
  }
  std::vector<double> f(static_cast<std::size_t>(norms.size()));
  for (Index k = 0; k < norms.size(); ++k) {
    const double ratio = norms[k] > 0.0 ? b[k] / norms[k] : 1.0;
    f[static_cast<std::size_t>(k)] = ratio * proj;
  }
  return f;
}

// Ridge shrink per group for fixed weights, then the same projection.
std::vector<double> fixed_shrink_factors(const Vector& norms, const Vector& beta, double eta, double lambda,
                                         std::optional<double> gamma) {
  std::vector<double> f(static_cast<std::size_t>(norms.size()));
  double nb2 = 0.0;
  for (Index k = 0; k < norms.size(); ++k) {
    f[static_cast<std::size_t>(k)] = beta[k] > 0.0 ? 1.0 / (1.0 + eta * lambda / beta[k]) : 0.0;
    nb2 += norms[k] * norms[k] * f[static_cast<std::size_t>(k)] * f[static_cast<std::size_t>(k)];
  }
  if (gamma && std::sqrt(nb2) > *gamma) {
    const double proj = *gamma / std::sqrt(nb2);
    for (double& v : f) v *= proj;
  }
  return f;
}

double squared_group_lasso(const Vector& norms) {
  const double s = norms.sum();
  return 0.5 * s * s;
}

double weighted_ridge(const Vector& norms, const Vector& beta) {
  double r = 0.0;
  for (Index k = 0; k < norms.size(); ++k) {
    if (norms[k] > 0.0) r += norms[k] * norms[k] / beta[k];
  }
  return 0.5 * r;
}

}  // namespace

std::string to_string(MklMode mode) {
  switch (mode) {
    case MklMode::explicit_features: return "explicit";
    case MklMode::kernelized: return "kernelized";
    case MklMode::automatic: return "auto";
  }
  return "?";
}

MklMode parse_mkl_mode(const std::string& name) {
  if (name == "explicit") return MklMode::explicit_features;
  if (name == "kernelized") return MklMode::kernelized;
  if (name == "auto") return MklMode::automatic;
  throw std::invalid_argument("unknown MKL mode '" + name + "'");
}

SupportSet::SupportSet(std::size_t groups, int num_labels, bool track_naive)
    : scale(groups, 1.0), sq_norm(groups, 0.0), coeff(groups), labels_(num_labels), track_naive_(track_naive) {}

bool SupportSet::point_active(std::size_t k, std::size_t r) const {
  const double* row = coeff[k].data() + r * static_cast<std::size_t>(labels_);
  for (int c = 0; c < labels_; ++c) {
    if (row[c] != 0.0) return true;
  }
  return false;
}

void SupportSet::rebuild_index() {
  row_of_.clear();
  for (std::size_t r = 0; r < point_ids.size(); ++r) row_of_.emplace(point_ids[r], r);
}

std::size_t SupportSet::point_row(std::uint64_t id, const Eigen::Ref<const Vector>& x) {
  if (auto it = row_of_.find(id); it != row_of_.end()) return it->second;
  const std::size_t r = points.size();
  points.emplace_back(x);
  point_ids.push_back(id);
  for (auto& c : coeff) c.resize(c.size() + static_cast<std::size_t>(labels_), 0.0);
  row_of_.emplace(id, r);
  return r;
}

void SupportSet::add(std::size_t round, std::size_t instance, const ChainInstance& x,
                     const std::vector<int>& predicted, double eta, std::uint64_t first_id) {
  SupportEntry e;
  e.round = round;
  e.instance = instance;
  e.predicted = predicted;
  for (Index i = 0; i < x.length(); ++i) {
    if (x.labels[static_cast<std::size_t>(i)] != predicted[static_cast<std::size_t>(i)]) e.diff_positions.push_back(i);
  }
  if (e.diff_positions.empty()) return;
  e.base.resize(num_groups());
  for (std::size_t k = 0; k < num_groups(); ++k) e.base[k] = eta / scale[k];
  if (track_naive_) e.naive.assign(num_groups(), eta);

  const auto L = static_cast<std::size_t>(labels_);
  for (Index q : e.diff_positions) {
    const std::size_t r = point_row(first_id + static_cast<std::uint64_t>(q), x.inputs.row(q).transpose());
    const auto y = static_cast<std::size_t>(x.labels[static_cast<std::size_t>(q)]);
    const auto yh = static_cast<std::size_t>(predicted[static_cast<std::size_t>(q)]);
    for (std::size_t k = 0; k < num_groups(); ++k) {
      coeff[k][r * L + y] += e.base[k];
      coeff[k][r * L + yh] -= e.base[k];
    }
  }
  entries.push_back(std::move(e));
}

void SupportSet::scale_group(std::size_t k, double factor) {
  if (track_naive_) {
    for (auto& e : entries) e.naive[k] *= factor;
  }
  if (factor == 0.0) {
    for (auto& e : entries) e.base[k] = 0.0;
    std::fill(coeff[k].begin(), coeff[k].end(), 0.0);
    scale[k] = 1.0;
    sq_norm[k] = 0.0;
    drop_empty_entries();
    return;
  }
  scale[k] *= factor;
  sq_norm[k] *= factor * factor;
  if (std::abs(scale[k]) < kScaleFloor) {
    const double c = scale[k];
    for (auto& e : entries) e.base[k] *= c;
    for (double& v : coeff[k]) v *= c;
    scale[k] = 1.0;
  }
}

void SupportSet::drop_empty_entries() {
  std::erase_if(entries, [](const SupportEntry& e) {
    const bool no_base = std::all_of(e.base.begin(), e.base.end(), [](double b) { return b == 0.0; });
    const bool no_naive = std::all_of(e.naive.begin(), e.naive.end(), [](double b) { return b == 0.0; });
    return no_base && no_naive;
  });
}

Vector MklModel::group_norms() const {
  if (mode == MklMode::explicit_features) return theta.group_norms();
  Vector n(static_cast<Index>(num_beta_groups()));
  for (std::size_t k = 0; k < groups.size(); ++k) n[static_cast<Index>(k)] = std::sqrt(std::max(0.0, support.sq_norm[k]));
  if (transitions) n[static_cast<Index>(groups.size())] = transition.norm();
  return n;
}

double kernelized_score(const SupportSet& support, std::size_t k, const KernelGroup& group, int label,
                        const Eigen::Ref<const Vector>& x, GramCache* cache, std::optional<std::uint64_t> id) {
  if (k >= support.num_groups()) throw std::invalid_argument("kernelized_score: group out of range");
  if (label < 0 || label >= support.num_labels()) throw std::invalid_argument("kernelized_score: label out of range");
  return group_emission(support, k, group, x, cache, id)[label];
}

double update_group_norm(double sq_norm, double cross, double grad_sq_norm, double eta) {
  const double out = sq_norm - 2.0 * eta * cross + eta * eta * grad_sq_norm;
  if (!std::isfinite(out)) throw NumericalFailure("group norm update produced a non-finite value");
  if (out < 0.0) {
    const double magnitude = std::abs(sq_norm) + eta * eta * std::abs(grad_sq_norm);
    if (out < -1e-9 * (1.0 + magnitude)) {
      throw NumericalFailure("group norm update went negative: " + std::to_string(out));
    }
    return 0.0;
  }
  return out;
}

double feature_difference_sq_norm(const KernelGroup& group, const ChainInstance& x, const std::vector<int>& predicted,
                                  GramCache* cache, std::uint64_t first_id) {
  std::vector<Index> diff;
  for (Index i = 0; i < x.length(); ++i) {
    if (x.labels[static_cast<std::size_t>(i)] != predicted[static_cast<std::size_t>(i)]) diff.push_back(i);
  }
  double total = 0.0;
  for (Index q : diff) {
    const int yq = x.labels[static_cast<std::size_t>(q)];
    const int hq = predicted[static_cast<std::size_t>(q)];
    for (Index r : diff) {
      const int yr = x.labels[static_cast<std::size_t>(r)];
      const int hr = predicted[static_cast<std::size_t>(r)];
      const double w = (yq == yr) - (yq == hr) - (hq == yr) + (hq == hr);
      if (w == 0.0) continue;
      total += w * cached_kernel(group, x.inputs.row(q).transpose(), x.inputs.row(r).transpose(), cache,
                                 first_id + static_cast<std::uint64_t>(q), first_id + static_cast<std::uint64_t>(r));
    }
  }
  return total;
}

double recompute_sq_norm(const SupportSet& support, std::size_t k, const KernelGroup& group, GramCache* cache) {
  const auto L = static_cast<std::size_t>(support.num_labels());
  std::vector<std::size_t> active;
  for (std::size_t r = 0; r < support.num_points(); ++r) {
    if (support.point_active(k, r)) active.push_back(r);
  }
  const auto& a = support.coeff[k];
  double total = 0.0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    for (std::size_t j = i; j < active.size(); ++j) {
      const std::size_t r = active[i];
      const std::size_t s = active[j];
      double dot = 0.0;
      for (std::size_t c = 0; c < L; ++c) dot += a[r * L + c] * a[s * L + c];
      if (dot == 0.0) continue;
      const double kv = cached_kernel(group, support.points[r], support.points[s], cache, support.point_ids[r],
                                      support.point_ids[s]);
      total += (i == j ? 1.0 : 2.0) * dot * kv;
    }
  }
  return total * support.scale[k] * support.scale[k];
}

Vector finalize_beta(const Vector& group_norms, bool* all_zero) {
  if (group_norms.size() == 0) throw std::invalid_argument("finalize_beta: no groups");
  if ((group_norms.array() < 0.0).any() || !group_norms.allFinite()) {
    throw std::invalid_argument("finalize_beta: norms must be finite and nonnegative");
  }
  const double total = group_norms.sum();
  if (all_zero) *all_zero = total == 0.0;
  if (total == 0.0) return Vector::Constant(group_norms.size(), 1.0 / static_cast<double>(group_norms.size()));
  return group_norms / total;
}

Matrix expand_inputs(const std::vector<KernelGroup>& groups, const Matrix& inputs) {
  Index width = 0;
  for (const auto& g : groups) {
    if (g.kernel.kind != KernelKind::linear) throw std::invalid_argument("expand_inputs: linear kernels only");
    if (g.input_begin + g.input_dim > inputs.cols()) throw std::invalid_argument("expand_inputs: columns out of range");
    width += g.input_dim;
  }
  Matrix out(inputs.rows(), width);
  Index col = 0;
  for (const auto& g : groups) {
    out.middleCols(col, g.input_dim) = inputs.middleCols(g.input_begin, g.input_dim);
    if (g.kernel.normalize_diagonal) {
      for (Index i = 0; i < out.rows(); ++i) {
        auto row = out.row(i).segment(col, g.input_dim);
        const double n = row.norm();
        if (n > 0.0) {
          row /= n;
        } else {
          row.setZero();
        }
      }
    }
    col += g.input_dim;
  }
  return out;
}

ChainScores mkl_scores(const MklModel& model, const ChainInstance& x) {
  if (model.mode == MklMode::explicit_features) {
    ChainInstance e{expand_inputs(model.groups, x.inputs), x.labels, x.fold, x.name};
    return compute_scores(model.layout, model.theta, e);
  }
  ChainScores s;
  s.emission = Matrix::Zero(x.length(), model.num_labels);
  for (std::size_t k = 0; k < model.groups.size(); ++k) {
    s.emission += group_emission_matrix(model.support, k, model.groups[k], x, nullptr, std::nullopt);
  }
  s.transition = model.transitions ? model.transition : Matrix::Zero(model.num_labels, model.num_labels);
  return s;
}

Decoding predict(const MklModel& model, const ChainInstance& x) { return viterbi_decode(mkl_scores(model, x)); }

GroupedVector materialize_explicit(const MklModel& model) {
  if (model.mode == MklMode::explicit_features) return model.theta;
  if (!all_linear(model.groups)) throw std::invalid_argument("materialize_explicit: linear kernels only");
  const FeatureLayout layout = explicit_layout(model.groups, model.num_labels, model.transitions);
  GroupedVector theta = layout.zeros();
  Vector& v = theta.mutable_values();
  const auto offsets = layout.parameter_offsets();
  const auto& sup = model.support;
  for (std::size_t k = 0; k < model.groups.size(); ++k) {
    const auto& g = model.groups[k];
    for (std::size_t r = 0; r < sup.num_points(); ++r) {
      Matrix row(1, sup.points[r].size());
      row.row(0) = sup.points[r].transpose();
      const Matrix u = expand_inputs({g}, row);
      for (int c = 0; c < model.num_labels; ++c) {
        const double a = sup.coefficient(k, r, c);
        if (a != 0.0) v.segment(offsets[k] + c * g.input_dim, g.input_dim) += a * u.row(0).transpose();
      }
    }
  }
  if (model.transitions) {
    const Index t0 = offsets[layout.transition_group()];
    for (int a = 0; a < model.num_labels; ++a) {
      for (int b = 0; b < model.num_labels; ++b) v[t0 + a * model.num_labels + b] = model.transition(a, b);
    }
  }
  return theta;
}

MklResult mkl_run(std::span<const ChainInstance> data, int num_labels, const std::vector<KernelGroup>& groups,
                  const MklConfig& config) {
  if (data.empty()) throw std::invalid_argument("mkl: empty dataset");
  const Index input_dim = data[0].inputs.cols();
  check_data(data, num_labels, input_dim);
  check_groups(groups, input_dim);
  if (config.rounds < 1) throw std::invalid_argument("mkl: need at least one round");
  if (!(config.lambda > 0.0)) throw std::invalid_argument("mkl: lambda must be positive");
  config.schedule.check();

  MklResult result;
  MklModel& model = result.model;
  model.num_labels = num_labels;
  model.groups = groups;
  model.transitions = config.transitions;
  model.mode = config.mode;
  if (model.mode == MklMode::automatic) {
    model.mode = all_linear(groups) ? MklMode::explicit_features : MklMode::kernelized;
  }
  if (model.mode == MklMode::explicit_features && !all_linear(groups)) {
    throw std::invalid_argument("mkl: explicit mode needs linear kernels");
  }

  double mean_length = 0.0;
  for (const auto& x : data) mean_length += static_cast<double>(x.length());
  mean_length /= static_cast<double>(data.size());
  std::optional<double> gamma;
  if (config.project) gamma = config.gamma ? *config.gamma : std::sqrt(2.0 * mean_length / config.lambda);
  if (gamma && !(*gamma > 0.0)) throw std::invalid_argument("mkl: gamma must be positive");
  result.trace.gamma = gamma;
  const std::optional<Vector>& fixed = config.fixed_beta;
  if (fixed) {
    if (fixed->size() != static_cast<Index>(model.num_beta_groups()) || (fixed->array() < 0.0).any() ||
        !(fixed->sum() > 0.0)) {
      throw std::invalid_argument("mkl: fixed_beta needs one nonnegative weight per group, not all zero");
    }
  }
  auto regularizer = [&](const Vector& norms) {
    return fixed ? weighted_ridge(norms, *fixed) : squared_group_lasso(norms);
  };
  auto factors = [&](const Vector& norms, double eta) {
    return fixed ? fixed_shrink_factors(norms, *fixed, eta, config.lambda, gamma)
                 : shrink_factors(norms, eta, config.lambda, gamma);
  };

  const std::size_t p = groups.size();
  const auto order = visiting_order(data.size(), config.rounds, config.seed);
  result.trace.records.reserve(config.rounds);

  // Global position ids for the Gram caches.
  std::vector<std::uint64_t> first_id(data.size());
  std::uint64_t next_id = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    first_id[i] = next_id;
    next_id += static_cast<std::uint64_t>(data[i].length());
  }

  if (model.mode == MklMode::explicit_features) {
    model.layout = explicit_layout(groups, num_labels, config.transitions);
    model.theta = model.layout.zeros();
    std::vector<ChainInstance> expanded;
    expanded.reserve(data.size());
    for (const auto& x : data) expanded.push_back({expand_inputs(groups, x.inputs), x.labels, x.fold, x.name});

    for (std::size_t t = 1; t <= config.rounds; ++t) {
      const std::size_t i = order[t - 1];
      const ChainInstance& x = expanded[i];
      const double eta = config.schedule.rate(t);
      const ChainScores scores = compute_scores(model.layout, model.theta, x);
      const Decoding yhat = viterbi_decode(scores, x.labels);
      const double loss = std::max(0.0, yhat.score - sequence_score(scores, x.labels));

      const Vector norms = model.theta.group_norms();
      RoundRecord rec{t, i, eta, loss, regularizer(norms), 0.0, model.theta.norm()};
      rec.objective = config.lambda * rec.reg + rec.loss;
      if (!std::isfinite(rec.objective)) throw NumericalFailure("mkl: non-finite objective at round " + std::to_string(t));
      result.trace.records.push_back(rec);

      if (yhat.labels != x.labels) {
        Vector& v = model.theta.mutable_values();
        add_features(model.layout, x, x.labels, eta, v);
        add_features(model.layout, x, yhat.labels, -eta, v);
      }
      const auto f = factors(model.theta.group_norms(), eta);
      for (std::size_t k = 0; k < f.size(); ++k) model.theta.scale_group(k, f[k]);
    }
    result.trace.last = model.theta;
    result.trace.averaged = model.theta;
  } else {
    model.support = SupportSet(p, num_labels, config.naive_recursion);
    model.transition = Matrix::Zero(num_labels, num_labels);
    std::vector<std::unique_ptr<GramCache>> caches;
    for (const auto& g : groups) {
      caches.push_back(std::make_unique<GramCache>(config.cache_bytes / p, g.kernel.compact_support()));
    }

    std::vector<Matrix> emission(p);
    std::vector<double> cross(p), diff_sq(p);
    for (std::size_t t = 1; t <= config.rounds; ++t) {
      const std::size_t i = order[t - 1];
      const ChainInstance& x = data[i];
      const double eta = config.schedule.rate(t);

      for_each_group(p, config.threads, [&](std::size_t k) {
        emission[k] = group_emission_matrix(model.support, k, groups[k], x, caches[k].get(), first_id[i]);
      });
      ChainScores scores;
      scores.emission = Matrix::Zero(x.length(), num_labels);
      for (std::size_t k = 0; k < p; ++k) scores.emission += emission[k];
      scores.transition = config.transitions ? model.transition : Matrix::Zero(num_labels, num_labels);
      const Decoding yhat = viterbi_decode(scores, x.labels);
      const double loss = std::max(0.0, yhat.score - sequence_score(scores, x.labels));

      const Vector norms = model.group_norms();
      RoundRecord rec{t, i, eta, loss, regularizer(norms), 0.0, norms.norm()};
      rec.objective = config.lambda * rec.reg + rec.loss;
      if (!std::isfinite(rec.objective)) throw NumericalFailure("mkl: non-finite objective at round " + std::to_string(t));
      result.trace.records.push_back(rec);

      if (yhat.labels != x.labels) {
        for_each_group(p, config.threads, [&](std::size_t k) {
          double c = 0.0;
          for (Index n = 0; n < x.length(); ++n) {
            c += emission[k](n, yhat.labels[static_cast<std::size_t>(n)]) -
                 emission[k](n, x.labels[static_cast<std::size_t>(n)]);
          }
          cross[k] = c;
          diff_sq[k] = feature_difference_sq_norm(groups[k], x, yhat.labels, caches[k].get(), first_id[i]);
        });
        for (std::size_t k = 0; k < p; ++k) {
          model.support.sq_norm[k] = update_group_norm(model.support.sq_norm[k], cross[k], diff_sq[k], eta);
        }
        model.support.add(t, i, x, yhat.labels, eta, first_id[i]);
        if (config.transitions) {
          add_transition_features(model.transition, x.labels, eta);
          add_transition_features(model.transition, yhat.labels, -eta);
        }
      }

      const auto f = factors(model.group_norms(), eta);
      for (std::size_t k = 0; k < p; ++k) model.support.scale_group(k, f[k]);
      if (config.transitions) model.transition *= f[p];

      if (config.norm_check_every > 0 && t % config.norm_check_every == 0) {
        std::vector<double> drift(p);
        for_each_group(p, config.threads, [&](std::size_t k) {
          const double exact = recompute_sq_norm(model.support, k, groups[k], caches[k].get());
          drift[k] = std::abs(model.support.sq_norm[k] - exact) / (1.0 + std::abs(exact));
        });
        for (double d : drift) result.max_norm_drift = std::max(result.max_norm_drift, d);
        ++result.norm_checks;
      }
    }
    for (const auto& c : caches) {
      result.cache_hits += c->hits();
      result.cache_misses += c->misses();
    }
  }

  if (fixed) {
    model.fixed_beta = true;
    model.beta = *fixed / fixed->sum();
    return result;
  }
  bool all_zero = false;
  model.beta = finalize_beta(model.group_norms(), &all_zero);
  if (all_zero) std::clog << "warning: all group norms are zero after the run; using uniform kernel weights\n";
  return result;
}

}  // namespace proxmkl
