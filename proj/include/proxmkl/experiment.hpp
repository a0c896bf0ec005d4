#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "proxmkl/config.hpp"
#include "proxmkl/snapshot.hpp"

namespace proxmkl {

/// The dataset of an experiment plus the group structure both solvers use.
struct ExperimentData {
  std::vector<ChainInstance> instances;
  int num_labels = 0;
  FeatureLayout layout;             ///< online solver
  std::vector<KernelGroup> groups;  ///< MKL solver
  std::optional<GroupedVector> planted;
};

ExperimentData build_data(const ExperimentConfig& config);

struct Accuracy {
  double per_char = 0.0;
  double per_sequence = 0.0;
};

using Predictor = std::function<std::vector<int>(const ChainInstance&)>;
/// NaN accuracies for an empty set.
Accuracy accuracy(const Predictor& predict, std::span<const ChainInstance> data);

struct SweepPoint {
  double eta0 = 0.0;
  double objective = 0.0;
};

struct MetricsReport {
  std::string task;
  std::string solver;
  double lambda = 0.0;
  double eta0 = 0.0;
  std::vector<SweepPoint> sweep;  ///< empty when eta0 was fixed
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t rounds = 0;
  Accuracy train;
  Accuracy test;  ///< NaN without a held-out set
  double objective = 0.0;  ///< training objective of the returned model
  double wall_seconds = 0.0;  ///< final run only
  Vector beta;
  Vector group_norms;
  double group_sparsity = 0.0;  ///< fraction of groups with norm exactly 0
  std::vector<RoundRecord> trace;
};

/// Equal in every field except wall-clock time.
bool same_results(const MetricsReport& a, const MetricsReport& b);

using TrainedModel = std::variant<LinearModel, MklModel>;

struct ExperimentResult {
  MetricsReport metrics;
  TrainedModel model;
};

/// Splits by fold (train on config.train_fold, test on the others), selects
/// η₀ by the sweep protocol when none is configured (each candidate trained
/// for sweep_epochs; the lowest training objective wins, ties to the earlier
/// candidate), trains for the configured epochs and evaluates. With
/// `write_outputs`, writes trace.csv, metrics.csv, beta.csv, model.snapshot
/// and config.ini to config.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_outputs = true);

Predictor make_predictor(const TrainedModel& model);
/// λR(θ) + mean training loss of a trained model.
double training_objective(const TrainedModel& model, std::span<const ChainInstance> data, double lambda);

void write_trace_csv(const std::string& path, const std::vector<RoundRecord>& records);
void write_metrics_csv(const std::string& path, const MetricsReport& report);
void write_beta_csv(const std::string& path, const MetricsReport& report);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::string& path);

}  // namespace proxmkl
