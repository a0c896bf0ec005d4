#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxmkl/chain.hpp"
#include "proxmkl/inference.hpp"

namespace proxmkl {

enum class LossKind { hinge, crf };

std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& name);

struct LossReport {
  double loss_value = 0.0;
  Vector subgradient;               ///< laid out like θ
  std::vector<int> argmax_labels;   ///< loss-augmented decoding (hinge)
  std::optional<Marginals> marginals;  ///< CRF only
};

/// Structured hinge with Hamming cost: max_y' f(x,y') − f(x,y) + ℓ(y',y), with
/// subgradient φ(x,ŷ) − φ(x,y) at the loss-augmented argmax ŷ.
LossReport hinge_loss_subgradient(const FeatureLayout& layout, const GroupedVector& theta,
                                  const ChainInstance& instance);

/// log Σ_y' exp(f(x,y') − f(x,y)), with gradient E_θ φ(x,Y) − φ(x,y).
LossReport crf_loss_gradient(const FeatureLayout& layout, const GroupedVector& theta, const ChainInstance& instance);

LossReport evaluate_loss(LossKind kind, const FeatureLayout& layout, const GroupedVector& theta,
                         const ChainInstance& instance);

/// Loss value only (no subgradient assembly).
double loss_value(LossKind kind, const FeatureLayout& layout, const GroupedVector& theta,
                  const ChainInstance& instance);

struct LipschitzBounds {
  double G = 0.0;        ///< 2·max ‖φ(u)‖ over the dataset's inputs and all labelings
  double Lambda = 0.0;   ///< average max cost (hinge) or entropy bound N·log L (CRF)
  double gamma = 0.0;    ///< √(2Λ/(λ+σ)), a radius containing the minimizer
  double G_tilde = 0.0;  ///< G + √(2σ²Λ/(λ+σ)), for the loss plus (σ/2)‖θ‖²
};

/// ‖φ(x,y)‖ is bounded over labelings y by √((Σ_i‖x_i‖)² + (N−1)²): the
/// emission block by the triangle inequality, the transition block by its
/// N−1 unit indicators.
LipschitzBounds lipschitz_radius(std::span<const ChainInstance> instances, const FeatureLayout& layout,
                                 double lambda, LossKind kind, double sigma = 0.0);

}  // namespace proxmkl
