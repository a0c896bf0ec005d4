#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "proxmkl/experiment.hpp"
#include "proxmkl/oracle.hpp"

namespace {

using namespace proxmkl;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> epochs;
  std::optional<double> lambda;
  std::optional<double> C;
  std::optional<std::string> schedule;
  std::optional<double> gamma;
  std::optional<double> eta0;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "experiment config (INI)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("-o,--out", o.out, "output directory (run) or file (gen)");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  auto* lam = cmd->add_option("--lambda", o.lambda, "regularization weight");
  auto* c = cmd->add_option("--C", o.C, "C = 1/(lambda m)");
  lam->excludes(c);
  cmd->add_option("--schedule", o.schedule, "constant | inv_sqrt | inv_t");
  cmd->add_option("--gamma", o.gamma, "projection radius");
  cmd->add_option("--eta0", o.eta0, "schedule parameter (skips the sweep)");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c = load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.output_dir = *o.out;
  if (o.epochs) c.epochs = *o.epochs;
  if (o.lambda) {
    c.lambda = *o.lambda;
    c.C.reset();
  }
  if (o.C) {
    c.C = *o.C;
    c.lambda.reset();
  }
  if (o.schedule) c.schedule = parse_schedule_kind(*o.schedule);
  if (o.gamma) c.gamma = *o.gamma;
  if (o.eta0) c.eta0 = *o.eta0;
  c.check();
  return c;
}

void print_metrics(const MetricsReport& r) {
  std::cout << "task " << r.task << ", solver " << r.solver << ", lambda " << r.lambda << ", eta0 " << r.eta0 << '\n'
            << "train " << r.train_size << " sequences, test " << r.test_size << ", " << r.rounds << " rounds in "
            << r.wall_seconds << " s\n"
            << "objective " << r.objective << '\n'
            << "train accuracy: char " << r.train.per_char << ", sequence " << r.train.per_sequence << '\n';
  if (r.test_size > 0) {
    std::cout << "test accuracy: char " << r.test.per_char << ", sequence " << r.test.per_sequence << '\n';
  }
  std::cout << "beta";
  for (Index k = 0; k < r.beta.size(); ++k) std::cout << ' ' << r.beta[k];
  std::cout << "\ngroup sparsity " << r.group_sparsity << '\n';
}

int cmd_run(const Overrides& o) {
  const ExperimentConfig c = resolve(o);
  const ExperimentResult res = run_experiment(c, true);
  print_metrics(res.metrics);
  std::cout << "wrote " << c.output_dir << "/{trace.csv,metrics.csv,beta.csv,model.snapshot,config.ini}\n";
  return 0;
}

int cmd_gen(const Overrides& o) {
  const ExperimentConfig c = resolve(o);
  if (c.task == Task::sequence_label) throw std::invalid_argument("gen: the config must name a synthetic task");
  const std::string path = o.out.value_or("synthetic.tsv");
  const ExperimentData d = build_data(c);
  SequenceDataset s;
  s.instances = d.instances;
  s.num_labels = d.num_labels;
  for (int k = 0; k < d.num_labels; ++k) {
    s.label_names.push_back(k < 26 ? std::string(1, static_cast<char>('a' + k)) : "L" + std::to_string(k));
  }
  save_sequences(path, s);
  std::cout << "wrote " << s.instances.size() << " sequences (" << s.num_characters() << " characters) to " << path
            << '\n';
  return 0;
}

int cmd_eval(const Overrides& o, const std::string& model_path) {
  const ExperimentConfig c = resolve(o);
  std::ifstream in(model_path);
  if (!in) throw std::runtime_error("cannot open " + model_path);
  const std::string kind = snapshot_kind(in);
  TrainedModel model = kind == "mkl" ? TrainedModel(read_mkl_snapshot(in)) : TrainedModel(read_linear_snapshot(in));
  const ExperimentData d = build_data(c);
  const FoldSplit split = split_fold(d.instances, c.train_fold);
  const Predictor predict = make_predictor(model);
  const Accuracy train = accuracy(predict, split.train);
  const Accuracy test = accuracy(predict, split.test);
  std::cout << "split,sequences,accuracy_char,accuracy_sequence\n"
            << "train," << split.train.size() << ',' << train.per_char << ',' << train.per_sequence << '\n'
            << "test," << split.test.size() << ',' << test.per_char << ',' << test.per_sequence << '\n';
  return 0;
}

int cmd_verify(std::uint64_t seed, std::size_t trials, const std::string& out) {
  const auto reports = oracle::certify(seed, trials);
  if (out.empty()) {
    oracle::write_reports_csv(std::cout, reports);
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    oracle::write_reports_csv(f, reports);
  }
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online proximal learning and online multiple kernel learning for sequence labelling"};
  app.require_subcommand(1);

  Overrides run_o, gen_o, eval_o;
  auto* run = app.add_subcommand("run", "train and evaluate one experiment");
  add_common(run, run_o);
  auto* gen = app.add_subcommand("gen", "write a synthetic dataset in the sequence format");
  add_common(gen, gen_o);
  auto* eval = app.add_subcommand("eval", "evaluate a saved model on the configured data");
  add_common(eval, eval_o);
  std::string model_path;
  eval->add_option("-m,--model", model_path, "model snapshot")->required()->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "run the oracle certifications and print CSV");
  std::uint64_t verify_seed = 0;
  std::size_t trials = 100;
  std::string verify_out;
  verify->add_option("--seed", verify_seed, "random seed");
  verify->add_option("--trials", trials, "random fixtures per check");
  verify->add_option("-o,--out", verify_out, "CSV file (default: stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_o);
    if (*gen) return cmd_gen(gen_o);
    if (*eval) return cmd_eval(eval_o, model_path);
    if (*verify) return cmd_verify(verify_seed, trials, verify_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
