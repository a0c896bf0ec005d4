#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "proxmkl/config.hpp"
#include "proxmkl/experiment.hpp"
#include "proxmkl/inference.hpp"
#include "proxmkl/online_solver.hpp"
#include "proxmkl/sequence_data.hpp"
#include "proxmkl/snapshot.hpp"
#include "proxmkl/synthetic.hpp"

namespace proxmkl {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("proxmkl_test_" + name);
  fs::remove_all(p);
  return p;
}

// id letter next word position fold pixels...
constexpr const char* kTwoChars =
    "1\ta\t2\t1\t1\t0\t0\t1\t1\n"
    "2\tc\t-1\t1\t2\t0\t1\t0\t1\n";

TEST(Ocr, TwoLineFixture) {
  std::istringstream in(kTwoChars);
  const SequenceDataset d = read_ocr(in);
  ASSERT_EQ(d.instances.size(), 1u);
  EXPECT_EQ(d.instances[0].length(), 2);
  EXPECT_EQ(d.instances[0].labels, (std::vector<int>{0, 2}));
  EXPECT_EQ(d.instances[0].inputs.cols(), 3);
  EXPECT_EQ(d.instances[0].inputs(1, 0), 1.0);
  EXPECT_EQ(d.num_labels, 3);
  EXPECT_EQ(d.num_characters(), 2u);
}

TEST(Ocr, OutOfOrderRowsFollowNextId) {
  std::istringstream in(
      "5\tb\t-1\t2\t2\t1\t1\n"
      "4\ta\t5\t2\t1\t1\t0\n"
      "1\tz\t-1\t1\t1\t0\t1\n");
  const SequenceDataset d = read_ocr(in);
  ASSERT_EQ(d.instances.size(), 2u);
  const auto& word = d.instances[0].length() == 2 ? d.instances[0] : d.instances[1];
  EXPECT_EQ(word.labels, (std::vector<int>{0, 1}));
  EXPECT_EQ(word.fold, 1);
  EXPECT_EQ(d.num_labels, 26);
}

TEST(Ocr, MalformedLineNamesLine) {
  std::istringstream in("1\ta\t-1\t1\t1\t0\t0\n2\tb\n");
  try {
    read_ocr(in);
    FAIL() << "expected a parse error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Ocr, BrokenChains) {
  std::istringstream dangling("1\ta\t9\t1\t1\t0\t0\n");
  EXPECT_THROW(read_ocr(dangling), std::runtime_error);
  std::istringstream cycle("1\ta\t2\t1\t1\t0\t0\n2\tb\t1\t1\t2\t0\t0\n");
  EXPECT_THROW(read_ocr(cycle), std::runtime_error);
  std::istringstream shared("1\ta\t3\t1\t1\t0\t0\n2\tb\t3\t1\t1\t0\t0\n3\tc\t-1\t1\t2\t0\t0\n");
  EXPECT_THROW(read_ocr(shared), std::runtime_error);
  std::istringstream folds("1\ta\t2\t1\t1\t0\t0\n2\tb\t-1\t1\t2\t3\t0\n");
  EXPECT_THROW(read_ocr(folds), std::runtime_error);
}

TEST(Sequences, WriteReadRoundTrip) {
  SyntheticGroupsSpec spec;
  spec.m = 12;
  spec.folds = 3;
  spec.seed = 71;
  const SyntheticGroups g = gen_synthetic_groups(spec);
  std::stringstream buf;
  write_sequences(buf, g.data);
  const SequenceDataset back = read_ocr(buf);
  ASSERT_EQ(back.instances.size(), g.data.instances.size());
  for (std::size_t i = 0; i < back.instances.size(); ++i) {
    EXPECT_EQ(back.instances[i].inputs, g.data.instances[i].inputs);
    EXPECT_EQ(back.instances[i].labels, g.data.instances[i].labels);
    EXPECT_EQ(back.instances[i].fold, g.data.instances[i].fold);
  }
}

TEST(Folds, SplitIsDisjointCover) {
  SyntheticGroupsSpec spec;
  spec.m = 30;
  spec.folds = 4;
  spec.seed = 72;
  const auto data = gen_synthetic_groups(spec).data.instances;
  EXPECT_EQ(fold_ids(data), (std::vector<int>{0, 1, 2, 3}));
  for (int f : fold_ids(data)) {
    const FoldSplit s = split_fold(data, f);
    EXPECT_EQ(s.train.size() + s.test.size(), data.size());
    for (const auto& x : s.train) EXPECT_EQ(x.fold, f);
    for (const auto& x : s.test) EXPECT_NE(x.fold, f);
  }
}

SyntheticGroups tiny_groups() {
  SyntheticGroupsSpec spec;
  spec.num_labels = 3;
  spec.groups = 2;
  spec.group_dim = 2;
  spec.relevant = {0};
  spec.noise = 0.2;
  spec.m = 15;
  spec.seed = 73;
  return gen_synthetic_groups(spec);
}

std::vector<KernelGroup> linear_groups() {
  return {{KernelSpec{}, 0, 2}, {parse_kernel("linear+norm"), 2, 2}};
}

void expect_same_predictions(const MklModel& a, const MklModel& b, std::span<const ChainInstance> data) {
  for (const auto& x : data) {
    const ChainScores sa = mkl_scores(a, x), sb = mkl_scores(b, x);
    EXPECT_EQ(sa.emission, sb.emission);
    EXPECT_EQ(sa.transition, sb.transition);
  }
}

TEST(Snapshot, MklRoundTripsExactly) {
  const SyntheticGroups g = tiny_groups();
  for (MklMode mode : {MklMode::kernelized, MklMode::explicit_features}) {
    MklConfig c;
    c.mode = mode;
    c.rounds = 60;
    c.lambda = 0.05;
    c.transitions = true;
    const MklModel m = mkl_run(g.data.instances, 3, linear_groups(), c).model;
    std::stringstream buf;
    write_snapshot(buf, m);
    EXPECT_EQ(snapshot_kind(buf), "mkl");
    const MklModel back = read_mkl_snapshot(buf);
    EXPECT_EQ(back.mode, m.mode);
    EXPECT_EQ(back.beta, m.beta);
    EXPECT_EQ(back.fixed_beta, m.fixed_beta);
    // Cached norms were rescaled in place during training; a reload recomputes them.
    EXPECT_LE((back.group_norms() - m.group_norms()).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + m.group_norms().norm()));
    expect_same_predictions(m, back, g.data.instances);
  }
}

TEST(Snapshot, FixedBetaFlagSurvives) {
  const SyntheticGroups g = tiny_groups();
  MklConfig c;
  c.mode = MklMode::kernelized;
  c.rounds = 30;
  c.fixed_beta = Vector::Ones(2);
  const MklModel m = mkl_run(g.data.instances, 3, linear_groups(), c).model;
  std::stringstream buf;
  write_snapshot(buf, m);
  EXPECT_TRUE(read_mkl_snapshot(buf).fixed_beta);
}

TEST(Snapshot, LinearRoundTripsExactly) {
  const SyntheticGroups g = tiny_groups();
  LinearModel m;
  m.layout = g.layout;
  m.theta = g.planted;
  m.theta.mutable_values()[1] = 1.0 / 3.0;
  m.loss = LossKind::crf;
  m.chain = "l1:0.6,l21:0.4";
  std::stringstream buf;
  write_snapshot(buf, m);
  EXPECT_EQ(snapshot_kind(buf), "linear");
  const LinearModel back = read_linear_snapshot(buf);
  EXPECT_EQ(back.theta.values(), m.theta.values());
  EXPECT_EQ(back.theta.offsets(), m.theta.offsets());
  EXPECT_EQ(back.layout.input_offsets, m.layout.input_offsets);
  EXPECT_EQ(back.layout.transitions, m.layout.transitions);
  EXPECT_EQ(back.loss, m.loss);
  EXPECT_EQ(back.chain, m.chain);
}

TEST(Snapshot, Errors) {
  const SyntheticGroups g = tiny_groups();
  LinearModel m{g.layout, g.planted, LossKind::hinge, "l21"};
  std::stringstream buf;
  write_snapshot(buf, m);
  EXPECT_THROW(read_mkl_snapshot(buf), std::runtime_error);

  std::string text = buf.str();
  text.replace(text.find(std::to_string(kSnapshotVersion)), 1, "9");
  std::istringstream bad_version(text);
  EXPECT_THROW(read_linear_snapshot(bad_version), std::runtime_error);

  std::istringstream garbage("not a snapshot\n");
  EXPECT_THROW(read_linear_snapshot(garbage), std::runtime_error);
}

TEST(Config, ParseAndResolveLambda) {
  std::istringstream in(
      "[experiment]\ntask = synthetic_groups\nseed = 5\nepochs = 3\n"
      "[model]\nsolver = online\nchain = l1:0.5,l21:0.5\nC = 2\nschedule = inv_t\neta0 = 0.5\n"
      "[synthetic]\nlabels = 4\ngroups = 3\ngroup_dim = 2\nrelevant = 0,2\nm = 25\n");
  const ExperimentConfig c = parse_config(in);
  EXPECT_EQ(c.task, Task::synthetic_groups);
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.epochs, 3u);
  EXPECT_EQ(c.schedule, LearningRateSchedule::Kind::inv_t);
  ASSERT_TRUE(c.eta0.has_value());
  EXPECT_EQ(*c.eta0, 0.5);
  EXPECT_EQ(c.groups.relevant, (std::vector<std::size_t>{0, 2}));
  EXPECT_DOUBLE_EQ(c.resolve_lambda(25), 1.0 / 50.0);
}

TEST(Config, Errors) {
  std::istringstream unknown("[model]\nlamda = 0.1\n");
  EXPECT_THROW(parse_config(unknown), std::invalid_argument);
  std::istringstream both("[model]\nlambda = 0.1\nC = 1\n");
  EXPECT_THROW(parse_config(both), std::invalid_argument);
  std::istringstream bad_task("[experiment]\ntask = regression\n");
  EXPECT_THROW(parse_config(bad_task), std::invalid_argument);
  std::istringstream no_path("[experiment]\ntask = sequence_label\n");
  EXPECT_THROW(parse_config(no_path), std::invalid_argument);
}

TEST(Config, FormatRoundTrip) {
  ExperimentConfig c;
  c.task = Task::synthetic_mkl;
  c.solver = Solver::mkl;
  c.seed = 9;
  c.lambda = 0.03;
  c.kernels = {parse_kernel("linear"), parse_kernel("gaussian:2+norm"), parse_kernel("b1_spline:1.5")};
  c.mkl_data.kernels = c.kernels;
  c.mkl_data.informative = 1;
  c.average_kernels = true;
  c.eta0_candidates = {0.5, 5.0};
  std::istringstream in(format_config(c));
  const ExperimentConfig back = parse_config(in);
  EXPECT_EQ(format_config(back), format_config(c));
  EXPECT_TRUE(back.average_kernels);
  EXPECT_EQ(back.kernels.size(), 3u);
  EXPECT_EQ(back.eta0_candidates, c.eta0_candidates);
}

ExperimentConfig small_experiment(Solver solver) {
  ExperimentConfig c;
  c.task = Task::synthetic_groups;
  c.solver = solver;
  c.seed = 3;
  c.epochs = 4;
  c.sweep_epochs = 1;
  c.lambda = 0.05;
  c.groups.num_labels = 3;
  c.groups.groups = 3;
  c.groups.group_dim = 2;
  c.groups.relevant = {0};
  c.groups.m = 20;
  c.groups.folds = 2;
  if (solver == Solver::mkl) c.kernels = {parse_kernel("linear")};
  return c;
}

TEST(Experiment, DeterministicAcrossRuns) {
  for (Solver s : {Solver::online, Solver::mkl}) {
    const ExperimentConfig c = small_experiment(s);
    const ExperimentResult a = run_experiment(c, false), b = run_experiment(c, false);
    EXPECT_TRUE(same_results(a.metrics, b.metrics)) << to_string(s);
    EXPECT_EQ(a.metrics.sweep.size(), c.eta0_candidates.size());
    EXPECT_GT(a.metrics.test_size, 0u);
    EXPECT_NEAR(a.metrics.beta.sum(), 1.0, 1e-12);
  }
}

TEST(Experiment, SweepPicksLowestObjective) {
  const ExperimentResult r = run_experiment(small_experiment(Solver::online), false);
  double best = std::numeric_limits<double>::infinity(), eta = 0.0;
  for (const auto& p : r.metrics.sweep) {
    if (p.objective < best) {
      best = p.objective;
      eta = p.eta0;
    }
  }
  EXPECT_EQ(r.metrics.eta0, eta);
}

TEST(Experiment, WritesReadableOutputs) {
  ExperimentConfig c = small_experiment(Solver::mkl);
  c.eta0 = 1.0;
  const fs::path dir = scratch("outputs");
  c.output_dir = dir.string();
  const ExperimentResult r = run_experiment(c, true);
  for (const char* f : {"trace.csv", "metrics.csv", "beta.csv", "model.snapshot", "config.ini"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const CsvTable trace = read_csv((dir / "trace.csv").string());
  EXPECT_EQ(trace.rows.size(), r.metrics.rounds);
  const CsvTable beta = read_csv((dir / "beta.csv").string());
  EXPECT_EQ(beta.rows.size(), static_cast<std::size_t>(r.metrics.beta.size()));

  // The written config reproduces the run.
  ExperimentConfig again = load_config((dir / "config.ini").string());
  again.output_dir = scratch("outputs_again").string();
  EXPECT_TRUE(same_results(run_experiment(again, false).metrics, r.metrics));

  // The snapshot reproduces the predictions.
  std::ifstream in(dir / "model.snapshot");
  const MklModel m = read_mkl_snapshot(in);
  const ExperimentData d = build_data(c);
  const FoldSplit split = split_fold(d.instances, c.train_fold);
  const Accuracy acc = accuracy(make_predictor(TrainedModel(m)), split.test);
  EXPECT_EQ(acc.per_char, r.metrics.test.per_char);
  fs::remove_all(dir);
}

TEST(Experiment, NoiselessGroupsAreLearnedExactly) {
  ExperimentConfig c = small_experiment(Solver::online);
  c.groups.noise = 0.0;
  c.groups.margin = 0.5;
  c.groups.folds = 1;
  c.groups.m = 40;
  c.chain = "sq_l2";
  c.lambda = 1e-5;
  c.epochs = 200;
  c.eta0 = 1.0;
  const ExperimentResult r = run_experiment(c, false);
  EXPECT_EQ(r.metrics.train.per_char, 1.0);
  EXPECT_TRUE(std::isnan(r.metrics.test.per_char));
}

TEST(Synthetic, GroupsPlantedSupportAndDeterminism) {
  SyntheticGroupsSpec spec;
  spec.groups = 4;
  spec.relevant = {1};
  spec.seed = 74;
  const SyntheticGroups a = gen_synthetic_groups(spec), b = gen_synthetic_groups(spec);
  for (std::size_t k = 0; k < 4; ++k) {
    if (k == 1) {
      EXPECT_GT(a.planted.group_norm(k), 0.0);
    } else {
      EXPECT_EQ(a.planted.group_norm(k), 0.0);
    }
  }
  ASSERT_EQ(a.data.instances.size(), b.data.instances.size());
  for (std::size_t i = 0; i < a.data.instances.size(); ++i) {
    EXPECT_EQ(a.data.instances[i].inputs, b.data.instances[i].inputs);
    EXPECT_EQ(a.data.instances[i].labels, b.data.instances[i].labels);
  }
}

}  // namespace
}  // namespace proxmkl
