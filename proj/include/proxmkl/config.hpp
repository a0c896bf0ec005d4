#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "proxmkl/mkl.hpp"
#include "proxmkl/online_solver.hpp"
#include "proxmkl/sequence_data.hpp"
#include "proxmkl/struct_loss.hpp"
#include "proxmkl/synthetic.hpp"

namespace proxmkl {

enum class Task { sequence_label, synthetic_groups, synthetic_mkl };
enum class Solver { online, mkl };

std::string to_string(Task task);
Task parse_task(const std::string& name);
std::string to_string(Solver solver);
Solver parse_solver(const std::string& name);

/// Everything one experiment needs. See README.md for the file schema.
struct ExperimentConfig {
  // [experiment]
  Task task = Task::synthetic_groups;
  std::uint64_t seed = 0;
  std::size_t epochs = 20;
  int train_fold = 0;  ///< train on this fold, test on all the others
  std::string output_dir = "out";

  // [data]
  std::string data_path;
  OcrColumns columns;
  std::size_t max_instances = 0;  ///< 0: all

  // [model]
  Solver solver = Solver::online;
  LossKind loss = LossKind::hinge;
  std::string chain = "l21";
  std::optional<double> lambda;
  std::optional<double> C;  ///< C = 1/(λm); exclusive with lambda
  LearningRateSchedule::Kind schedule = LearningRateSchedule::Kind::inv_sqrt;
  std::optional<double> eta0;  ///< schedule parameter; unset runs the sweep
  std::vector<double> eta0_candidates{0.01, 0.1, 1.0, 10.0};
  std::size_t sweep_epochs = 5;
  std::optional<double> gamma;
  bool project = true;  ///< MKL: projection onto the γ-ball
  bool average = false;
  bool transitions = true;
  double sigma = 0.0;   ///< add (σ/2)‖θ‖² to the loss
  Index feature_groups = 1;  ///< sequence_label: contiguous input groups

  // [mkl]
  std::vector<KernelSpec> kernels;
  MklMode mode = MklMode::automatic;
  unsigned threads = 1;
  std::size_t cache_mb = 64;
  std::size_t norm_check_every = 0;
  bool average_kernels = false;  ///< fixed uniform β instead of learned weights

  // [synthetic]
  SyntheticGroupsSpec groups;
  SyntheticMklSpec mkl_data;

  /// λ, from C when C was given.
  double resolve_lambda(std::size_t m) const;
  void check() const;
};

/// Sections [experiment], [data], [model], [mkl], [synthetic] of flat
/// key = value pairs. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
std::string format_config(const ExperimentConfig& config);

}  // namespace proxmkl
