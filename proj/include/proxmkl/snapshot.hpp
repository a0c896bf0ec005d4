#pragma once

#include <iosfwd>
#include <string>

#include "proxmkl/mkl.hpp"
#include "proxmkl/struct_loss.hpp"

namespace proxmkl {

/// A linear-chain model trained by the online proximal solver.
struct LinearModel {
  FeatureLayout layout;
  GroupedVector theta;
  LossKind loss = LossKind::hinge;
  std::string chain;  ///< regularizer chain spec used for training
};

/// Versioned, line-oriented text snapshots. Doubles are written with 17
/// significant digits so a read-back reproduces every value exactly.
inline constexpr int kSnapshotVersion = 1;

void write_snapshot(std::ostream& out, const MklModel& model);
void write_snapshot(std::ostream& out, const LinearModel& model);

/// Throws std::runtime_error on a malformed file, an unknown version or a
/// snapshot of the other model kind.
MklModel read_mkl_snapshot(std::istream& in);
LinearModel read_linear_snapshot(std::istream& in);

/// "mkl" or "linear", read from the header without consuming the stream.
std::string snapshot_kind(std::istream& in);

void save_snapshot(const std::string& path, const MklModel& model);
void save_snapshot(const std::string& path, const LinearModel& model);

}  // namespace proxmkl
