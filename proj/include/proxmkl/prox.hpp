#pragma once

#include <functional>

#include "proxmkl/types.hpp"

namespace proxmkl {

class GroupedVector;

/// Output of the sorted-threshold proximity operators.
struct ProxResult {
  Vector point;
  double envelope_value = 0.0;  ///< ½‖point − x‖² + φ(point)
  double threshold_tau = 0.0;
  int split_rho = 0;  ///< number of nonzero entries of `point`
};

/// [soft(y, τ)]_k = sgn(y_k)·max{0, |y_k| − τ}.
Vector soft_threshold(const Vector& y, double tau);

/// Componentwise clip to [−τ, τ]; the projection onto the ℓ∞ ball, i.e. the
/// prox of the conjugate of τ‖·‖₁.
Vector clip(const Vector& y, double tau);

/// argmin_z ½‖z − x‖² + (λ/2)‖z‖₁².
///
/// Sorts |x| in decreasing order (stable), takes the largest j with
/// y_j − λ/(1 + jλ)·Σ_{r≤j} y_r > 0 as the split point ρ and returns
/// soft(x, τ) with τ = λ/(1 + ρλ)·Σ_{r≤ρ} y_r. O(p log p).
ProxResult prox_squared_l1(const Vector& x, double lambda);

/// argmin_z ½‖z − x‖² + (λ/2)(Σ d_i|z_i|)² for d ≥ 0.
///
/// Coordinates with d_r = 0 do not enter the weighted norm and are returned
/// unchanged. With d = 1 the arithmetic is identical to prox_squared_l1, so
/// results match bit for bit.
ProxResult prox_squared_weighted_l1(const Vector& x, const Vector& d, double lambda);

/// Euclidean projection onto {z : ‖z‖₁ ≤ radius}.
Vector project_l1_ball(const Vector& x, double radius);

/// x·min{1, radius/‖x‖}.
Vector project_l2_ball(const Vector& x, double radius);

/// Unique root x ≥ 0 of x − x0 + coeff·q·x^{q−1} = 0, i.e. the prox of
/// (coeff)·x^q on R₊ evaluated at x0. Closed forms for q = 1 and q = 2,
/// otherwise safeguarded Newton on the bracket [0, x0] to 1e-12.
double prox_scalar_power(double x0, double coeff, double q);

/// Proximity operator of a function ψ(‖x₁‖,…,‖x_p‖) of the group norms:
/// group k of the result is [scalar_prox(norms)]_k · x_k/‖x_k‖ (zero groups stay
/// zero).
using NormProx = std::function<Vector(const Vector&)>;
GroupedVector prox_via_group_norms(const GroupedVector& x, const NormProx& scalar_prox);

/// Regularizers with a closed-form prox, for envelope evaluation.
enum class PhiKind {
  squared_l2,     ///< (λ/2)‖x‖²
  l1,             ///< λ‖x‖₁
  linf_ball,      ///< indicator of {‖x‖∞ ≤ λ}, the conjugate of λ‖·‖₁
  squared_l1,     ///< (λ/2)‖x‖₁²
  l2_ball,        ///< indicator of {‖x‖ ≤ λ}
  l1_ball,        ///< indicator of {‖x‖₁ ≤ λ}
};

/// M_φ(x) = ½‖x − prox_φ(x)‖² + φ(prox_φ(x)), with `lambda` the scale or
/// radius parameter of φ.
double moreau_envelope(const Vector& x, PhiKind phi, double lambda);

/// φ itself (+∞ outside the ball for indicators, with a 1e-12 slack).
double phi_value(const Vector& x, PhiKind phi, double lambda);

/// prox_φ(x) for the kinds above.
Vector phi_prox(const Vector& x, PhiKind phi, double lambda);

}  // namespace proxmkl
