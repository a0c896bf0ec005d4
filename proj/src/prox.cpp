#include "proxmkl/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "proxmkl/grouped_vector.hpp"

namespace proxmkl {
namespace {

double signed_magnitude(double reference, double magnitude) {
  if (reference > 0.0) return magnitude;
  if (reference < 0.0) return -magnitude;
  return 0.0;
}

// Indices sorted by key, decreasing, stable on ties.
std::vector<Index> descending_order(const std::vector<double>& keys, const std::vector<Index>& ids) {
  std::vector<Index> order(ids);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return keys[static_cast<std::size_t>(a)] > keys[static_cast<std::size_t>(b)]; });
  return order;
}

void check_lambda(double lambda, const char* who) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument(std::string(who) + ": lambda must be positive and finite");
  }
}

}  // namespace

Vector soft_threshold(const Vector& y, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("soft_threshold: negative tau");
  Vector z(y.size());
  for (Index k = 0; k < y.size(); ++k) {
    z[k] = signed_magnitude(y[k], std::max(0.0, std::abs(y[k]) - tau));
  }
  return z;
}

Vector clip(const Vector& y, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("clip: negative tau");
  // y − soft(y, τ) rather than min/max: soft + clip then reconstructs y bit
  // for bit (both subtractions are exact by Sterbenz), at the cost of |clip|
  // exceeding τ by at most half an ulp of y.
  return y - soft_threshold(y, tau);
}

ProxResult prox_squared_l1(const Vector& x, double lambda) {
  check_lambda(lambda, "prox_squared_l1");
  if (x.size() == 0) throw std::invalid_argument("prox_squared_l1: empty input");
  require_finite(x, "prox_squared_l1");

  const Index p = x.size();
  std::vector<double> mags(static_cast<std::size_t>(p));
  std::vector<Index> ids(static_cast<std::size_t>(p));
  for (Index k = 0; k < p; ++k) {
    mags[static_cast<std::size_t>(k)] = std::abs(x[k]);
    ids[static_cast<std::size_t>(k)] = k;
  }
  const auto order = descending_order(mags, ids);

  double cumsum = 0.0;
  double tau = 0.0;
  int rho = 0;
  for (Index j = 1; j <= p; ++j) {
    const double y = mags[static_cast<std::size_t>(order[static_cast<std::size_t>(j - 1)])];
    cumsum += y;
    const double t = (lambda / (1.0 + static_cast<double>(j) * lambda)) * cumsum;
    if (y - t > 0.0) {
      rho = static_cast<int>(j);
      tau = t;
    }
  }

  ProxResult out;
  out.point.resize(p);
  for (Index k = 0; k < p; ++k) {
    const double mag = std::max(0.0, mags[static_cast<std::size_t>(k)] - tau);
    out.point[k] = signed_magnitude(x[k], mag);
  }
  out.threshold_tau = tau;
  out.split_rho = rho;
  const double l1 = out.point.lpNorm<1>();
  out.envelope_value = 0.5 * (out.point - x).squaredNorm() + 0.5 * lambda * l1 * l1;
  return out;
}

ProxResult prox_squared_weighted_l1(const Vector& x, const Vector& d, double lambda) {
  check_lambda(lambda, "prox_squared_weighted_l1");
  if (x.size() == 0) throw std::invalid_argument("prox_squared_weighted_l1: empty input");
  if (d.size() != x.size()) throw std::invalid_argument("prox_squared_weighted_l1: weight size mismatch");
  require_finite(x, "prox_squared_weighted_l1");
  require_finite(d, "prox_squared_weighted_l1 weights");
  if ((d.array() < 0.0).any()) throw std::invalid_argument("prox_squared_weighted_l1: negative weight");

  const Index p = x.size();
  std::vector<double> u0(static_cast<std::size_t>(p), 0.0);
  std::vector<Index> active;
  for (Index r = 0; r < p; ++r) {
    if (d[r] > 0.0) {
      u0[static_cast<std::size_t>(r)] = std::abs(x[r]) / d[r];
      active.push_back(r);
    }
  }
  const auto order = descending_order(u0, active);

  double sum_a = 0.0;
  double sum_au = 0.0;
  double tau = 0.0;
  int rho = 0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const Index r = order[j];
    const double a = d[r] * d[r];
    const double u = u0[static_cast<std::size_t>(r)];
    sum_a += a;
    sum_au += a * u;
    const double t = (lambda / (1.0 + lambda * sum_a)) * sum_au;
    if (u - t > 0.0) {
      rho = static_cast<int>(j + 1);
      tau = t;
    }
  }

  ProxResult out;
  out.point = x;
  for (Index r : active) {
    const double mag = d[r] * std::max(0.0, u0[static_cast<std::size_t>(r)] - tau);
    out.point[r] = signed_magnitude(x[r], mag);
  }
  out.threshold_tau = tau;
  out.split_rho = rho;
  const double wl1 = (d.array() * out.point.array().abs()).sum();
  out.envelope_value = 0.5 * (out.point - x).squaredNorm() + 0.5 * lambda * wl1 * wl1;
  return out;
}

Vector project_l1_ball(const Vector& x, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("project_l1_ball: radius must be positive");
  require_finite(x, "project_l1_ball");
  if (x.lpNorm<1>() <= radius) return x;

  const Index p = x.size();
  std::vector<double> mags(static_cast<std::size_t>(p));
  std::vector<Index> ids(static_cast<std::size_t>(p));
  for (Index k = 0; k < p; ++k) {
    mags[static_cast<std::size_t>(k)] = std::abs(x[k]);
    ids[static_cast<std::size_t>(k)] = k;
  }
  const auto order = descending_order(mags, ids);
  double cumsum = 0.0;
  double theta = 0.0;
  for (Index j = 1; j <= p; ++j) {
    const double mu = mags[static_cast<std::size_t>(order[static_cast<std::size_t>(j - 1)])];
    cumsum += mu;
    const double t = (cumsum - radius) / static_cast<double>(j);
    if (mu - t > 0.0) theta = t;
  }
  return soft_threshold(x, std::max(0.0, theta));
}

Vector project_l2_ball(const Vector& x, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("project_l2_ball: radius must be positive");
  const double n = x.norm();
  if (n <= radius) return x;
  return x * (radius / n);
}

double prox_scalar_power(double x0, double coeff, double q) {
  if (!(x0 >= 0.0) || !std::isfinite(x0)) throw std::invalid_argument("prox_scalar_power: x0 must be >= 0");
  if (!(coeff > 0.0)) throw std::invalid_argument("prox_scalar_power: coeff must be positive");
  if (!(q >= 1.0)) throw std::invalid_argument("prox_scalar_power: q must be >= 1");

  if (q == 1.0) return std::max(0.0, x0 - coeff);
  if (q == 2.0) return x0 / (1.0 + 2.0 * coeff);
  if (x0 == 0.0) return 0.0;

  const auto residual = [&](double x) { return x - x0 + coeff * q * std::pow(x, q - 1.0); };
  const auto slope = [&](double x) { return 1.0 + coeff * q * (q - 1.0) * std::pow(x, q - 2.0); };

  constexpr int kMaxIterations = 200;
  constexpr double kTolerance = 1e-12;
  double lo = 0.0;
  double hi = x0;
  double x = x0;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double h = residual(x);
    if (h == 0.0) return x;
    if (h > 0.0) hi = x; else lo = x;
    if (hi - lo <= kTolerance) return 0.5 * (lo + hi);

    const double g = slope(x);
    double next = (std::isfinite(g) && g > 0.0) ? x - h / g : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= kTolerance) return next;
    x = next;
  }
  std::ostringstream msg;
  msg << "prox_scalar_power: no convergence after " << kMaxIterations << " iterations (x0=" << x0
      << ", coeff=" << coeff << ", q=" << q << ", bracket=[" << lo << ", " << hi << "])";
  throw NumericalFailure(msg.str());
}

GroupedVector prox_via_group_norms(const GroupedVector& x, const NormProx& scalar_prox) {
  const Vector norms = x.group_norms();
  const Vector shrunk = scalar_prox(norms);
  if (shrunk.size() != norms.size()) {
    throw std::invalid_argument("prox_via_group_norms: scalar prox changed the number of groups");
  }
  GroupedVector out = x;
  for (std::size_t k = 0; k < x.num_groups(); ++k) {
    const double n = norms[static_cast<Index>(k)];
    out.scale_group(k, n > 0.0 ? shrunk[static_cast<Index>(k)] / n : 0.0);
  }
  return out;
}

Vector phi_prox(const Vector& x, PhiKind phi, double lambda) {
  switch (phi) {
    case PhiKind::squared_l2:
      check_lambda(lambda, "phi_prox");
      return x / (1.0 + lambda);
    case PhiKind::l1:
      return soft_threshold(x, lambda);
    case PhiKind::linf_ball:
      return clip(x, lambda);
    case PhiKind::squared_l1:
      return prox_squared_l1(x, lambda).point;
    case PhiKind::l2_ball:
      return project_l2_ball(x, lambda);
    case PhiKind::l1_ball:
      return project_l1_ball(x, lambda);
  }
  throw std::invalid_argument("phi_prox: unknown regularizer");
}

double phi_value(const Vector& x, PhiKind phi, double lambda) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double slack = 1e-12 * (1.0 + lambda);
  switch (phi) {
    case PhiKind::squared_l2:
      return 0.5 * lambda * x.squaredNorm();
    case PhiKind::l1:
      return lambda * x.lpNorm<1>();
    case PhiKind::linf_ball:
      return x.size() == 0 || x.lpNorm<Eigen::Infinity>() <= lambda + slack ? 0.0 : inf;
    case PhiKind::squared_l1: {
      const double n = x.lpNorm<1>();
      return 0.5 * lambda * n * n;
    }
    case PhiKind::l2_ball:
      return x.norm() <= lambda + slack ? 0.0 : inf;
    case PhiKind::l1_ball:
      return x.lpNorm<1>() <= lambda + slack ? 0.0 : inf;
  }
  throw std::invalid_argument("phi_value: unknown regularizer");
}

double moreau_envelope(const Vector& x, PhiKind phi, double lambda) {
  const Vector z = phi_prox(x, phi, lambda);
  const double residual = 0.5 * (z - x).squaredNorm();
  switch (phi) {
    case PhiKind::linf_ball:
    case PhiKind::l2_ball:
    case PhiKind::l1_ball:
      return residual;
    default:
      return residual + phi_value(z, phi, lambda);
  }
}

}  // namespace proxmkl
