#include "proxmkl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "proxmkl/prox.hpp"
#include "proxmkl/struct_loss.hpp"

namespace proxmkl::oracle {

namespace {

constexpr Index kMaxDimension = 12;
constexpr double kMaxEnumeration = 1e5;

double sign(double v) { return (v > 0.0) - (v < 0.0); }

struct Run {
  Vector center;
  double radius = 0.0;
  std::size_t iterations = 0;
};

Vector cut_vector(const ConvexFunction& phi, const Vector& x, const Vector& z, bool& feasible) {
  if (phi.cut) {
    if (auto a = phi.cut(z)) {
      feasible = false;
      return *a;
    }
  }
  feasible = true;
  return z - x + phi.subgradient(z);
}

Run bisection(const Vector& x, const ConvexFunction& phi, double lo, double hi, const BruteForceOptions& opt) {
  Run r;
  Vector z(1);
  const double tol = opt.tolerance * (1.0 + std::abs(x[0]));
  while (hi - lo > tol && r.iterations < opt.max_iterations) {
    ++r.iterations;
    z[0] = 0.5 * (lo + hi);
    bool feasible = true;
    const double g = cut_vector(phi, x, z, feasible)[0];
    if (g > 0.0) {
      hi = z[0];
    } else if (g < 0.0) {
      lo = z[0];
    } else {
      lo = hi = z[0];
    }
  }
  r.center = Vector::Constant(1, 0.5 * (lo + hi));
  r.radius = 0.5 * (hi - lo);
  return r;
}

// Central-cut ellipsoid {z : (z − c)ᵀP⁻¹(z − c) ≤ 1}, started from a ball. A
// numerically degenerate update restarts from the enclosing ball of radius
// √trace(P), which still contains the minimizer.
Run ellipsoid(const Vector& x, const ConvexFunction& phi, Vector center, double radius, const BruteForceOptions& opt) {
  const Index n = x.size();
  const double nd = static_cast<double>(n);
  const double tol = opt.tolerance * (1.0 + x.norm());
  Matrix P = Matrix::Identity(n, n) * radius * radius;
  Run r;
  while (r.iterations < opt.max_iterations) {
    const double size = std::sqrt(std::max(0.0, P.trace()));
    if (size < tol) break;
    ++r.iterations;
    bool feasible = true;
    const Vector g = cut_vector(phi, x, center, feasible);
    if (feasible && g.squaredNorm() == 0.0) {
      P.setZero();
      break;
    }
    const Vector Pg = P * g;
    const double gPg = g.dot(Pg);
    if (!(gPg > 0.0) || !std::isfinite(gPg)) {
      P = Matrix::Identity(n, n) * std::max(size * size, tol * tol);
      continue;
    }
    const Vector step = Pg / std::sqrt(gPg);
    center -= step / (nd + 1.0);
    P = (nd * nd / (nd * nd - 1.0)) * (P - (2.0 / (nd + 1.0)) * step * step.transpose());
    P = 0.5 * (P + P.transpose()).eval();
  }
  r.center = center;
  // The largest semi-axis is at most √trace(P).
  r.radius = std::sqrt(std::max(0.0, P.trace()));
  return r;
}

double prox_objective(const Vector& x, const ConvexFunction& phi, const Vector& z) {
  return 0.5 * (z - x).squaredNorm() + phi.value(z);
}

double l1(const Vector& v) { return v.cwiseAbs().sum(); }

}  // namespace

BruteForceResult brute_force_prox(const Vector& x, const ConvexFunction& phi, const BruteForceOptions& options) {
  const Index n = x.size();
  if (n < 1 || n > kMaxDimension) {
    throw std::invalid_argument("brute_force_prox: dimension must be in [1, 12], got " + std::to_string(n));
  }
  if (!phi.value || !phi.subgradient) throw std::invalid_argument("brute_force_prox: missing callbacks");
  if (options.restarts < 1) throw std::invalid_argument("brute_force_prox: need at least one start");

  BruteForceResult best;
  best.objective = std::numeric_limits<double>::infinity();
  const double base_radius = x.norm();
  if (base_radius == 0.0) {
    best.point = Vector::Zero(n);
    best.objective = prox_objective(x, phi, best.point);
    return best;
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < options.restarts; ++s) {
    Vector center = x;
    double radius = base_radius;
    if (s > 0) {
      // ‖z* − x‖ ≤ ‖x‖, so a ball around a perturbed center still contains z*.
      Vector offset(n);
      for (Index i = 0; i < n; ++i) offset[i] = gauss(rng);
      offset *= 0.5 * base_radius / std::max(offset.norm(), 1e-300);
      center += offset;
      radius += offset.norm();
    }
    radius *= 1.0 + 1e-9;
    const Run run = n == 1 ? bisection(x, phi, center[0] - radius, center[0] + radius, options)
                           : ellipsoid(x, phi, center, radius, options);
    const double f = prox_objective(x, phi, run.center);
    best.iterations += run.iterations;
    if (f < best.objective) {
      best.objective = f;
      best.point = run.center;
      best.radius = run.radius;
    }
  }
  return best;
}

ConvexFunction squared_l1(double lambda) {
  ConvexFunction f;
  f.value = [lambda](const Vector& z) {
    const double s = l1(z);
    return 0.5 * lambda * s * s;
  };
  f.subgradient = [lambda](const Vector& z) {
    const double s = l1(z);
    Vector g(z.size());
    for (Index i = 0; i < z.size(); ++i) g[i] = lambda * s * sign(z[i]);
    return g;
  };
  return f;
}

ConvexFunction squared_weighted_l1(const Vector& d, double lambda) {
  ConvexFunction f;
  f.value = [d, lambda](const Vector& z) {
    const double s = d.cwiseProduct(z).cwiseAbs().sum();
    return 0.5 * lambda * s * s;
  };
  f.subgradient = [d, lambda](const Vector& z) {
    const double s = d.cwiseProduct(z).cwiseAbs().sum();
    Vector g(z.size());
    for (Index i = 0; i < z.size(); ++i) g[i] = lambda * s * d[i] * sign(z[i]);
    return g;
  };
  return f;
}

ConvexFunction squared_group_l1(const std::vector<Index>& offsets, double lambda) {
  auto norms_sum = [offsets](const Vector& z) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < offsets.size(); ++k) s += z.segment(offsets[k], offsets[k + 1] - offsets[k]).norm();
    return s;
  };
  ConvexFunction f;
  f.value = [norms_sum, lambda](const Vector& z) {
    const double s = norms_sum(z);
    return 0.5 * lambda * s * s;
  };
  f.subgradient = [norms_sum, offsets, lambda](const Vector& z) {
    const double s = norms_sum(z);
    Vector g = Vector::Zero(z.size());
    for (std::size_t k = 0; k + 1 < offsets.size(); ++k) {
      const auto seg = z.segment(offsets[k], offsets[k + 1] - offsets[k]);
      const double nk = seg.norm();
      if (nk > 0.0) g.segment(offsets[k], seg.size()) = lambda * s * seg / nk;
    }
    return g;
  };
  return f;
}

ConvexFunction l1_ball(double radius) {
  ConvexFunction f;
  f.value = [](const Vector&) { return 0.0; };
  f.subgradient = [](const Vector& z) { return Vector::Zero(z.size()).eval(); };
  f.cut = [radius](const Vector& z) -> std::optional<Vector> {
    if (l1(z) <= radius) return std::nullopt;
    Vector a(z.size());
    for (Index i = 0; i < z.size(); ++i) a[i] = sign(z[i]);
    return a;
  };
  return f;
}

Decoding enumerate_decode(const ChainScores& scores, const std::optional<Matrix>& cost) {
  const Index n = scores.length();
  const int L = scores.num_labels();
  if (n < 1) throw std::invalid_argument("enumerate_decode: empty sequence");
  if (std::pow(static_cast<double>(L), static_cast<double>(n)) > kMaxEnumeration) {
    throw std::invalid_argument("enumerate_decode: L^N exceeds 1e5");
  }
  if (cost && (cost->rows() != n || cost->cols() != L)) throw std::invalid_argument("enumerate_decode: cost shape");

  auto local = [&](Index i, int c) { return scores.emission(i, c) + (cost ? (*cost)(i, c) : 0.0); };
  std::vector<int> y(static_cast<std::size_t>(n), 0);
  Decoding best;
  best.score = -std::numeric_limits<double>::infinity();
  while (true) {
    double s = local(0, y[0]);
    for (Index i = 1; i < n; ++i) {
      s = (s + scores.transition(y[static_cast<std::size_t>(i - 1)], y[static_cast<std::size_t>(i)])) +
          local(i, y[static_cast<std::size_t>(i)]);
    }
    if (s > best.score) {
      best.score = s;
      best.labels = y;
    }
    Index pos = n - 1;
    while (pos >= 0 && ++y[static_cast<std::size_t>(pos)] == L) y[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  return best;
}

EnumeratedPartition enumerate_partition(const ChainScores& scores) {
  const Index n = scores.length();
  const int L = scores.num_labels();
  if (n < 1) throw std::invalid_argument("enumerate_partition: empty sequence");
  if (std::pow(static_cast<double>(L), static_cast<double>(n)) > kMaxEnumeration) {
    throw std::invalid_argument("enumerate_partition: L^N exceeds 1e5");
  }
  std::vector<std::vector<int>> paths;
  std::vector<double> values;
  std::vector<int> y(static_cast<std::size_t>(n), 0);
  while (true) {
    double s = scores.emission(0, y[0]);
    for (Index i = 1; i < n; ++i) {
      s += scores.transition(y[static_cast<std::size_t>(i - 1)], y[static_cast<std::size_t>(i)]) +
           scores.emission(i, y[static_cast<std::size_t>(i)]);
    }
    paths.push_back(y);
    values.push_back(s);
    Index pos = n - 1;
    while (pos >= 0 && ++y[static_cast<std::size_t>(pos)] == L) y[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  const double top = *std::max_element(values.begin(), values.end());
  double z = 0.0;
  for (double v : values) z += std::exp(v - top);
  EnumeratedPartition out;
  out.log_partition = top + std::log(z);
  out.unary = Matrix::Zero(n, L);
  for (std::size_t j = 0; j < paths.size(); ++j) {
    const double p = std::exp(values[j] - out.log_partition);
    for (Index i = 0; i < n; ++i) out.unary(i, paths[j][static_cast<std::size_t>(i)]) += p;
  }
  return out;
}

Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& theta,
                            const std::vector<Index>& coordinates, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradient: step must be positive");
  std::vector<Index> coords = coordinates;
  if (coords.empty()) {
    for (Index i = 0; i < theta.size(); ++i) coords.push_back(i);
  }
  Vector g(static_cast<Index>(coords.size()));
  Vector probe = theta;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    const Index i = coords[j];
    if (i < 0 || i >= theta.size()) throw std::invalid_argument("finite_diff_gradient: coordinate out of range");
    probe[i] = theta[i] + h;
    const double up = f(probe);
    probe[i] = theta[i] - h;
    const double down = f(probe);
    probe[i] = theta[i];
    g[static_cast<Index>(j)] = (up - down) / (2.0 * h);
  }
  return g;
}

namespace {

std::vector<std::size_t> term_scope(const RegularizerTerm& t, const GroupedVector& theta) {
  if (t.scope) return *t.scope;
  std::vector<std::size_t> all(theta.num_groups());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return all;
}

void require_supported(const RegularizerChain& chain, const GroupedVector& theta) {
  for (const auto& t : chain.terms) {
    if (t.is_indicator()) throw std::invalid_argument("batch_comparator: indicator terms are not supported");
    if (t.scope) {
      for (auto k : *t.scope) {
        if (k >= theta.num_groups()) throw std::invalid_argument("batch_comparator: scope out of range");
      }
    }
  }
}

double seg_norm(const GroupedVector& theta, std::size_t k) {
  return theta.values().segment(theta.group_begin(k), theta.group_size(k)).norm();
}

double reg_value(const RegularizerChain& chain, const GroupedVector& theta) {
  double total = 0.0;
  for (const auto& t : chain.terms) {
    double sum_norms = 0.0, sum_sq = 0.0, sum_abs = 0.0, sum_pow = 0.0;
    for (auto k : term_scope(t, theta)) {
      const auto seg = theta.values().segment(theta.group_begin(k), theta.group_size(k));
      const double nk = seg.norm();
      sum_norms += nk;
      sum_sq += seg.squaredNorm();
      sum_abs += seg.cwiseAbs().sum();
      sum_pow += std::pow(nk, t.param);
    }
    switch (t.kind) {
      case TermKind::l21: total += t.weight * sum_norms; break;
      case TermKind::squared_l21: total += t.weight * 0.5 * sum_norms * sum_norms; break;
      case TermKind::l1: total += t.weight * sum_abs; break;
      case TermKind::sq_l2: total += t.weight * 0.5 * sum_sq; break;
      case TermKind::lq_power: total += t.weight * 0.5 * sum_pow; break;
      default: throw std::invalid_argument("batch_comparator: unsupported term");
    }
  }
  return total;
}

Vector reg_subgradient(const RegularizerChain& chain, const GroupedVector& theta) {
  Vector g = Vector::Zero(theta.size());
  for (const auto& t : chain.terms) {
    const auto scope = term_scope(t, theta);
    double sum_norms = 0.0;
    for (auto k : scope) sum_norms += seg_norm(theta, k);
    for (auto k : scope) {
      const Index b = theta.group_begin(k);
      const Index d = theta.group_size(k);
      const auto seg = theta.values().segment(b, d);
      const double nk = seg.norm();
      switch (t.kind) {
        case TermKind::l21:
          if (nk > 0.0) g.segment(b, d) += t.weight * seg / nk;
          break;
        case TermKind::squared_l21:
          if (nk > 0.0) g.segment(b, d) += t.weight * sum_norms * seg / nk;
          break;
        case TermKind::l1:
          for (Index i = 0; i < d; ++i) g[b + i] += t.weight * sign(seg[i]);
          break;
        case TermKind::sq_l2: g.segment(b, d) += t.weight * seg; break;
        case TermKind::lq_power:
          if (nk > 0.0) g.segment(b, d) += t.weight * 0.5 * t.param * std::pow(nk, t.param - 2.0) * seg;
          break;
        default: throw std::invalid_argument("batch_comparator: unsupported term");
      }
    }
  }
  return g;
}

struct Batch {
  double value = 0.0;
  Vector gradient;
};

Batch batch_eval(const OnlineLoss& loss, const RegularizerChain& chain, double lambda, const GroupedVector& theta,
                 bool with_gradient) {
  Batch b;
  const double m = static_cast<double>(loss.size());
  b.gradient = Vector::Zero(theta.size());
  double total = 0.0;
  for (std::size_t i = 0; i < loss.size(); ++i) {
    if (with_gradient) {
      const auto e = loss.evaluate(i, theta);
      total += e.value;
      b.gradient += e.subgradient;
    } else {
      total += loss.value(i, theta);
    }
  }
  b.value = lambda * reg_value(chain, theta) + total / m;
  if (with_gradient) b.gradient = b.gradient / m + lambda * reg_subgradient(chain, theta);
  return b;
}

}  // namespace

double batch_objective(const OnlineLoss& loss, const RegularizerChain& chain, double lambda,
                       const GroupedVector& theta) {
  GroupedVector t = theta;
  require_supported(chain, t);
  if (loss.size() == 0) return lambda * reg_value(chain, theta);
  return batch_eval(loss, chain, lambda, theta, false).value;
}

ComparatorResult batch_comparator(const OnlineLoss& loss, const RegularizerChain& chain, double lambda,
                                  const ComparatorOptions& options) {
  ComparatorResult out;
  GroupedVector theta = loss.zeros();
  require_supported(chain, theta);
  if (loss.size() == 0) {
    // R ≥ 0 with R(0) = 0 for every supported term.
    out.theta = theta;
    out.objective = 0.0;
    out.lower_bound = 0.0;
    return out;
  }
  if (loss.size() > 200 || theta.size() > 50) {
    throw std::invalid_argument("batch_comparator: limited to d <= 50 and m <= 200");
  }
  const double mu = options.strong_convexity;
  if (mu < 0.0) throw std::invalid_argument("batch_comparator: strong convexity must be >= 0");
  if (mu == 0.0 && !options.radius) throw std::invalid_argument("batch_comparator: need a radius without strong convexity");
  if (options.radius && !(*options.radius > 0.0)) throw std::invalid_argument("batch_comparator: radius must be positive");
  const std::size_t K = std::max<std::size_t>(options.iterations, 2);

  auto project = [&](Vector& v) {
    if (!options.radius) return;
    const double n = v.norm();
    if (n > *options.radius) v *= *options.radius / n;
  };

  const Index d = theta.size();
  Vector running = Vector::Zero(d), suffix = Vector::Zero(d);
  std::size_t suffix_count = 0;
  // Suffix sums of linearizations for the lower bound.
  double lin_const = 0.0, sq_sum = 0.0;
  Vector grad_sum = Vector::Zero(d);

  Batch b0 = batch_eval(loss, chain, lambda, theta, true);
  out.theta = theta;
  out.objective = b0.value;
  double step0 = options.step0;
  if (step0 <= 0.0 && mu == 0.0) {
    const double g = b0.gradient.norm();
    step0 = *options.radius / (g > 0.0 ? g : 1.0);
  }

  auto consider = [&](const Vector& v) {
    GroupedVector cand(v, theta.offsets());
    const double f = batch_eval(loss, chain, lambda, cand, false).value;
    if (f < out.objective) {
      out.objective = f;
      out.theta = std::move(cand);
    }
  };

  const std::size_t every = std::max<std::size_t>(1, K / std::max<std::size_t>(options.checkpoints, 1));
  Batch b = b0;
  for (std::size_t k = 1; k <= K; ++k) {
    if (b.value < out.objective) {
      out.objective = b.value;
      out.theta = theta;
    }
    running += theta.values();
    if (k > K / 2) {
      suffix += theta.values();
      ++suffix_count;
      lin_const += b.value - b.gradient.dot(theta.values());
      sq_sum += theta.values().squaredNorm();
      grad_sum += b.gradient;
    }
    if (k % every == 0) {
      consider(running / static_cast<double>(k));
      if (suffix_count > 0) consider(suffix / static_cast<double>(suffix_count));
    }
    if (k == K) break;
    const double kd = static_cast<double>(k);
    const double step = mu > 0.0 ? 1.0 / (mu * kd) : step0 / std::sqrt(kd);
    Vector next = theta.values() - step * b.gradient;
    project(next);
    theta.set_values(next);
    b = batch_eval(loss, chain, lambda, theta, true);
  }
  out.iterations = K;

  // F ≥ mean of the linearizations (plus μ/2‖θ − θ_k‖² when strongly convex).
  const double w = 1.0 / static_cast<double>(suffix_count);
  const Vector gbar = grad_sum * w;
  const Vector tbar = suffix * w;
  double lb = -std::numeric_limits<double>::infinity();
  if (options.radius) lb = lin_const * w - *options.radius * gbar.norm();
  if (mu > 0.0) {
    const double c = lin_const * w + 0.5 * mu * sq_sum * w;
    lb = std::max(lb, c - (gbar - mu * tbar).squaredNorm() / (2.0 * mu));
  }
  out.lower_bound = std::min(lb, out.objective);
  return out;
}

OracleReport make_report(std::string name, double oracle_value, double library_value, double deviation,
                         double tolerance) {
  return {std::move(name), oracle_value, library_value, deviation, tolerance, deviation <= tolerance};
}

std::vector<OracleReport> certify(std::uint64_t seed, std::size_t trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-5.0, 5.0), weight(0.0, 3.0), unit(-1.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 8);
  const double lambdas[] = {0.1, 1.0, 10.0};
  std::vector<OracleReport> reports;
  BruteForceOptions bf;
  bf.restarts = 2;

  auto random_vector = [&](Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = coord(rng);
    return v;
  };

  {
    double worst = 0.0, o = 0.0, l = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const Vector x = random_vector(dim(rng));
      const double lam = lambdas[t % 3];
      const auto phi = squared_l1(lam);
      const auto ref = brute_force_prox(x, phi, bf);
      const double lib = prox_objective(x, phi, prox_squared_l1(x, lam).point);
      if (lib - ref.objective >= worst) {
        worst = std::max(0.0, lib - ref.objective);
        o = ref.objective;
        l = lib;
      }
    }
    reports.push_back(make_report("prox_squared_l1_objective", o, l, worst, 1e-6));
  }
  {
    double worst = 0.0, o = 0.0, l = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const Index n = dim(rng);
      const Vector x = random_vector(n);
      Vector w(n);
      for (Index i = 0; i < n; ++i) w[i] = weight(rng);
      const double lam = lambdas[t % 3];
      const auto phi = squared_weighted_l1(w, lam);
      const auto ref = brute_force_prox(x, phi, bf);
      const double lib = prox_objective(x, phi, prox_squared_weighted_l1(x, w, lam).point);
      if (lib - ref.objective >= worst) {
        worst = std::max(0.0, lib - ref.objective);
        o = ref.objective;
        l = lib;
      }
    }
    reports.push_back(make_report("prox_squared_weighted_l1_objective", o, l, worst, 1e-6));
  }
  {
    double worst = 0.0;
    std::uniform_int_distribution<int> groups(2, 4), gdim(1, 3);
    for (std::size_t t = 0; t < trials; ++t) {
      std::vector<Index> sizes(static_cast<std::size_t>(groups(rng)));
      Index total = 0;
      for (auto& s : sizes) total += (s = gdim(rng));
      if (total > kMaxDimension) continue;
      GroupedVector g = GroupedVector::zeros_with_sizes(sizes);
      g.set_values(random_vector(total));
      const double lam = lambdas[t % 3];
      const auto ref = brute_force_prox(g.values(), squared_group_l1(g.offsets(), lam), bf);
      GroupedVector lib = g;
      apply_prox_term(RegularizerTerm::make(TermKind::squared_l21), lib, lam);
      worst = std::max(worst, (lib.values() - ref.point).cwiseAbs().maxCoeff());
    }
    reports.push_back(make_report("group_norm_reduction_point", 0.0, 0.0, worst, 1e-6));
  }
  {
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const Vector x = random_vector(dim(rng));
      const double r = 0.5 + 0.5 * std::abs(coord(rng));
      const auto ref = brute_force_prox(x, l1_ball(r), bf);
      worst = std::max(worst, (project_l1_ball(x, r) - ref.point).cwiseAbs().maxCoeff());
    }
    reports.push_back(make_report("project_l1_ball_point", 0.0, 0.0, worst, 1e-6));
  }

  std::uniform_int_distribution<int> len(1, 4), labs(1, 3);
  auto random_scores = [&](Index n, int L) {
    ChainScores s;
    s.emission = Matrix(n, L);
    s.transition = Matrix(L, L);
    for (Index i = 0; i < n; ++i) {
      for (int c = 0; c < L; ++c) s.emission(i, c) = coord(rng);
    }
    for (int a = 0; a < L; ++a) {
      for (int c = 0; c < L; ++c) s.transition(a, c) = coord(rng);
    }
    return s;
  };
  {
    double worst = 0.0, worst_z = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const Index n = len(rng);
      const int L = labs(rng);
      const ChainScores s = random_scores(n, L);
      std::vector<int> gold(static_cast<std::size_t>(n));
      for (auto& y : gold) y = std::uniform_int_distribution<int>(0, L - 1)(rng);
      const auto ref = enumerate_decode(s, hamming_cost(gold, L));
      const auto lib = viterbi_decode(s, gold);
      worst = std::max(worst, std::abs(ref.score - lib.score));
      worst_z = std::max(worst_z, std::abs(enumerate_partition(s).log_partition - forward_backward(s).log_partition));
    }
    reports.push_back(make_report("viterbi_score", 0.0, 0.0, worst, 0.0));
    reports.push_back(make_report("log_partition", 0.0, 0.0, worst_z, 1e-9));
  }
  {
    double worst = 0.0;
    const FeatureLayout layout = FeatureLayout::uniform(3, 4, 2, true);
    for (std::size_t t = 0; t < std::min<std::size_t>(trials, 50); ++t) {
      ChainInstance x;
      const Index n = len(rng);
      x.inputs = Matrix(n, 4);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < 4; ++j) x.inputs(i, j) = unit(rng);
      }
      for (Index i = 0; i < n; ++i) x.labels.push_back(std::uniform_int_distribution<int>(0, 2)(rng));
      GroupedVector theta = layout.zeros();
      Vector v(theta.size());
      for (Index i = 0; i < v.size(); ++i) v[i] = unit(rng);
      theta.set_values(v);
      const Vector analytic = crf_loss_gradient(layout, theta, x).subgradient;
      const Vector numeric = finite_diff_gradient(
          [&](const Vector& p) { return loss_value(LossKind::crf, layout, GroupedVector(p, theta.offsets()), x); }, v);
      worst = std::max(worst, (analytic - numeric).cwiseAbs().maxCoeff());
    }
    reports.push_back(make_report("crf_gradient", 0.0, 0.0, worst, 1e-6));
  }
  return reports;
}

void write_reports_csv(std::ostream& out, const std::vector<OracleReport>& reports) {
  out << "name,oracle_value,library_value,deviation,tolerance,pass\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : reports) {
    out << r.name << ',' << num(r.oracle_value) << ',' << num(r.library_value) << ',' << num(r.deviation) << ','
        << num(r.tolerance) << ',' << (r.pass ? 1 : 0) << '\n';
  }
}

}  // namespace proxmkl::oracle
