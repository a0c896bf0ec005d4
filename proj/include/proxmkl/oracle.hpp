#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "proxmkl/inference.hpp"
#include "proxmkl/online_loss.hpp"
#include "proxmkl/regularizer.hpp"

// Brute-force references for the library's closed forms. None of these call
// the routine they are used to check.
namespace proxmkl::oracle {

/// A convex φ through value and subgradient callbacks, with an optional
/// feasible set given by a cut oracle: for an infeasible z it returns a
/// vector a with ⟨a, w − z⟩ < 0 for every feasible w, and nullopt otherwise.
struct ConvexFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> subgradient;
  std::function<std::optional<Vector>(const Vector&)> cut;
};

struct BruteForceOptions {
  std::size_t max_iterations = 200000;
  double tolerance = 1e-11;  ///< stop once the localization set has this radius (relative to 1 + ‖x‖)
  int restarts = 10;
  std::uint64_t seed = 0;
};

struct BruteForceResult {
  Vector point;
  double objective = 0.0;  ///< ½‖point − x‖² + φ(point)
  double radius = 0.0;     ///< the minimizer lies within this distance of point
  std::size_t iterations = 0;
};

/// argmin_z ½‖z − x‖² + φ(z) by the central-cut ellipsoid method, started
/// from balls around x and random perturbations of x that contain the
/// minimizer (this needs φ ≥ 0 and φ(0) = 0). The final ellipsoid certifies
/// how far its center can be from the minimizer; the best of the restarts
/// is returned. One-dimensional problems use bisection. Dimension ≤ 12.
BruteForceResult brute_force_prox(const Vector& x, const ConvexFunction& phi, const BruteForceOptions& options = {});

/// φ for the regularizers the library has closed-form proxes for, scaled by lambda.
ConvexFunction squared_l1(double lambda);
ConvexFunction squared_weighted_l1(const Vector& d, double lambda);
/// (λ/2)(Σ_k ‖z_k‖)² over contiguous groups.
ConvexFunction squared_group_l1(const std::vector<Index>& offsets, double lambda);
ConvexFunction l1_ball(double radius);

/// Exhaustive argmax over all label sequences, summing each path in the same
/// order as the dynamic program. Throws std::invalid_argument when L^N > 10⁵.
Decoding enumerate_decode(const ChainScores& scores, const std::optional<Matrix>& cost = std::nullopt);

struct EnumeratedPartition {
  double log_partition = 0.0;
  Matrix unary;  ///< N×L marginals
};
EnumeratedPartition enumerate_partition(const ChainScores& scores);

/// Central differences (f(θ + h e_i) − f(θ − h e_i)) / 2h at the given
/// coordinates (all when empty).
Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& theta,
                            const std::vector<Index>& coordinates = {}, double h = 1e-5);

struct ComparatorOptions {
  std::size_t iterations = 100000;
  double step0 = 0.0;                  ///< 0: radius / G
  double strong_convexity = 0.0;       ///< μ > 0 switches to steps 1/(μk)
  std::optional<double> radius;        ///< feasible ℓ2 ball; required unless μ > 0
  std::size_t checkpoints = 50;
};

struct ComparatorResult {
  GroupedVector theta;
  double objective = 0.0;    ///< exact λR(θ) + (1/m)Σ L(θ; x_i, y_i) at theta
  double lower_bound = -std::numeric_limits<double>::infinity();  ///< on the minimum over the ball
  std::size_t iterations = 0;
};

/// Best fixed hypothesis for a loss stream: full-batch projected subgradient
/// descent with decaying steps, using its own regularizer subgradients. The
/// result is the best of θ = 0 and the running and suffix averages at the
/// checkpoints. Non-indicator regularizer terms only. The lower bound comes
/// from averaged linearizations over the ball.
ComparatorResult batch_comparator(const OnlineLoss& loss, const RegularizerChain& chain, double lambda,
                                  const ComparatorOptions& options);

/// λR(θ) + (1/m)Σ_i L(θ; x_i, y_i), evaluated term by term here.
double batch_objective(const OnlineLoss& loss, const RegularizerChain& chain, double lambda,
                       const GroupedVector& theta);

struct OracleReport {
  std::string name;
  double oracle_value = 0.0;
  double library_value = 0.0;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

OracleReport make_report(std::string name, double oracle_value, double library_value, double deviation,
                         double tolerance);

/// A fixed battery of randomized certifications (prox, weighted prox, group
/// reduction, ℓ1-ball projection, decoding, log-partition, CRF gradient).
std::vector<OracleReport> certify(std::uint64_t seed, std::size_t trials);

void write_reports_csv(std::ostream& out, const std::vector<OracleReport>& reports);

}  // namespace proxmkl::oracle
