#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace proxmkl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an iterative routine fails to converge or a quantity that must
/// stay finite (or nonnegative) does not.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Throws std::invalid_argument naming `what` if any entry is NaN or infinite.
void require_finite(const Vector& v, const char* what);

}  // namespace proxmkl
