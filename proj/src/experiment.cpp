#include "proxmkl/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "proxmkl/online_loss.hpp"

namespace proxmkl {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

FeatureLayout layout_from_groups(const std::vector<KernelGroup>& groups, int num_labels, bool transitions) {
  FeatureLayout layout;
  layout.num_labels = num_labels;
  layout.transitions = transitions;
  layout.input_offsets.assign(1, 0);
  Index next = 0;
  for (const auto& g : groups) {
    if (g.input_begin != next) throw std::invalid_argument("experiment: kernel blocks must tile the input");
    next += g.input_dim;
    layout.input_offsets.push_back(next);
  }
  return layout;
}

struct Trained {
  TrainedModel model;
  RunTrace trace;
  double objective = 0.0;
};

Vector uniform_beta(const std::vector<KernelGroup>& groups, bool transitions) {
  const auto n = static_cast<Index>(groups.size() + (transitions ? 1 : 0));
  return Vector::Constant(n, 1.0 / static_cast<double>(n));
}

// λ times the training regularizer plus the mean hinge loss. Fixed weights
// mean the ridge form Σ‖θ_k‖²/β_k.
double mkl_objective(const MklModel& model, std::span<const ChainInstance> data, double lambda) {
  double total = 0.0;
  for (const auto& x : data) {
    const ChainScores s = mkl_scores(model, x);
    const Decoding d = viterbi_decode(s, x.labels);
    total += std::max(0.0, d.score - sequence_score(s, x.labels));
  }
  const Vector norms = model.group_norms();
  double reg = 0.0;
  if (model.fixed_beta) {
    for (Index k = 0; k < norms.size(); ++k) {
      if (norms[k] > 0.0) reg += 0.5 * norms[k] * norms[k] / model.beta[k];
    }
  } else {
    reg = 0.5 * norms.sum() * norms.sum();
  }
  return lambda * reg + total / static_cast<double>(data.size());
}

Trained train(const ExperimentConfig& config, const ExperimentData& data, std::span<const ChainInstance> train_set,
              double lambda, double eta0, std::size_t epochs) {
  const std::size_t rounds = epochs * train_set.size();
  const LearningRateSchedule schedule{config.schedule, eta0};
  Trained out;
  if (config.solver == Solver::online) {
    auto base = std::make_shared<ChainLoss>(data.layout, train_set, config.loss);
    std::shared_ptr<const OnlineLoss> loss = base;
    if (config.sigma > 0.0) loss = std::make_shared<StronglyConvexLoss>(base, config.sigma);
    const RegularizerChain chain = parse_chain(config.chain);
    RunConfig rc;
    rc.rounds = rounds;
    rc.lambda = lambda;
    rc.schedule = schedule;
    rc.gamma = config.gamma;
    rc.average_output = config.average;
    rc.seed = config.seed;
    out.trace = run(*loss, chain, rc);
    LinearModel m{data.layout, config.average ? out.trace.averaged : out.trace.last, config.loss, config.chain};
    out.objective = batch_objective(*loss, chain, lambda, m.theta);
    out.model = std::move(m);
  } else {
    MklConfig mc;
    mc.mode = config.mode;
    mc.rounds = rounds;
    mc.lambda = lambda;
    mc.schedule = schedule;
    mc.gamma = config.gamma;
    mc.project = config.project;
    mc.transitions = config.transitions;
    mc.seed = config.seed;
    mc.threads = std::max(1u, config.threads);
    mc.cache_bytes = config.cache_mb << 20;
    mc.norm_check_every = config.norm_check_every;
    if (config.average_kernels) mc.fixed_beta = uniform_beta(data.groups, config.transitions);
    MklResult r = mkl_run(train_set, data.num_labels, data.groups, mc);
    out.trace = std::move(r.trace);
    out.objective = mkl_objective(r.model, train_set, lambda);
    out.model = std::move(r.model);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

ExperimentData build_data(const ExperimentConfig& config) {
  ExperimentData d;
  switch (config.task) {
    case Task::sequence_label: {
      SequenceDataset s = load_ocr_dataset(config.data_path, config.columns);
      d.num_labels = s.num_labels;
      d.instances = std::move(s.instances);
      if (config.max_instances > 0 && d.instances.size() > config.max_instances) d.instances.resize(config.max_instances);
      const Index dim = d.instances.empty() ? 0 : d.instances.front().inputs.cols();
      if (dim == 0) throw std::runtime_error("experiment: empty dataset");
      d.layout = FeatureLayout::uniform(d.num_labels, dim, config.feature_groups, config.transitions);
      for (const auto& k : config.kernels) d.groups.push_back({k, 0, dim});
      break;
    }
    case Task::synthetic_groups: {
      SyntheticGroupsSpec spec = config.groups;
      spec.seed = config.seed;
      SyntheticGroups g = gen_synthetic_groups(spec);
      d.num_labels = g.data.num_labels;
      d.instances = std::move(g.data.instances);
      d.layout = g.layout;
      d.layout.transitions = config.transitions;
      d.planted = std::move(g.planted);
      for (std::size_t k = 0; k < g.layout.num_input_groups(); ++k) {
        KernelSpec kernel;
        if (config.kernels.size() == 1) kernel = config.kernels[0];
        if (config.kernels.size() == g.layout.num_input_groups()) kernel = config.kernels[k];
        d.groups.push_back({kernel, g.layout.input_offsets[k], g.layout.input_group_dim(k)});
      }
      break;
    }
    case Task::synthetic_mkl: {
      SyntheticMklSpec spec = config.mkl_data;
      spec.kernels = config.kernels;
      spec.seed = config.seed;
      SyntheticMkl g = gen_synthetic_mkl(spec);
      d.num_labels = g.data.num_labels;
      d.instances = std::move(g.data.instances);
      d.groups = g.groups;
      d.layout = layout_from_groups(d.groups, d.num_labels, config.transitions);
      break;
    }
  }
  if (config.max_instances > 0 && d.instances.size() > config.max_instances) d.instances.resize(config.max_instances);
  return d;
}

Accuracy accuracy(const Predictor& predict, std::span<const ChainInstance> data) {
  if (data.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  std::size_t chars = 0, correct_chars = 0, correct_seqs = 0;
  for (const auto& x : data) {
    const auto y = predict(x);
    const int wrong = hamming_distance(y, x.labels);
    chars += x.labels.size();
    correct_chars += x.labels.size() - static_cast<std::size_t>(wrong);
    correct_seqs += wrong == 0;
  }
  return {static_cast<double>(correct_chars) / static_cast<double>(chars),
          static_cast<double>(correct_seqs) / static_cast<double>(data.size())};
}

Predictor make_predictor(const TrainedModel& model) {
  if (const auto* m = std::get_if<LinearModel>(&model)) {
    return [m](const ChainInstance& x) { return viterbi_decode(compute_scores(m->layout, m->theta, x)).labels; };
  }
  const auto* k = &std::get<MklModel>(model);
  return [k](const ChainInstance& x) { return predict(*k, x).labels; };
}

double training_objective(const TrainedModel& model, std::span<const ChainInstance> data, double lambda) {
  if (data.empty()) throw std::invalid_argument("training_objective: empty data");
  if (const auto* m = std::get_if<LinearModel>(&model)) {
    const ChainLoss loss(m->layout, data, m->loss);
    return batch_objective(loss, parse_chain(m->chain), lambda, m->theta);
  }
  const auto& k = std::get<MklModel>(model);
  return mkl_objective(k, data, lambda);
}

bool same_results(const MetricsReport& a, const MetricsReport& b) {
  auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  if (a.task != b.task || a.solver != b.solver || a.lambda != b.lambda || a.eta0 != b.eta0) return false;
  if (a.sweep.size() != b.sweep.size() || a.trace.size() != b.trace.size()) return false;
  for (std::size_t i = 0; i < a.sweep.size(); ++i) {
    if (a.sweep[i].eta0 != b.sweep[i].eta0 || a.sweep[i].objective != b.sweep[i].objective) return false;
  }
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    const auto &r = a.trace[i], &s = b.trace[i];
    if (r.round != s.round || r.instance != s.instance || r.eta != s.eta || r.loss != s.loss || r.reg != s.reg ||
        r.objective != s.objective || r.theta_norm != s.theta_norm) {
      return false;
    }
  }
  return a.train_size == b.train_size && a.test_size == b.test_size && a.rounds == b.rounds &&
         same(a.train.per_char, b.train.per_char) && same(a.train.per_sequence, b.train.per_sequence) &&
         same(a.test.per_char, b.test.per_char) && same(a.test.per_sequence, b.test.per_sequence) &&
         a.objective == b.objective && a.beta == b.beta && a.group_norms == b.group_norms &&
         a.group_sparsity == b.group_sparsity;
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool write_outputs) {
  config.check();
  const ExperimentData data = build_data(config);
  FoldSplit split = split_fold(data.instances, config.train_fold);
  if (split.train.empty()) {
    throw std::runtime_error("experiment: fold " + std::to_string(config.train_fold) + " has no instances");
  }
  const double lambda = config.resolve_lambda(split.train.size());

  MetricsReport report;
  report.task = to_string(config.task);
  report.solver = to_string(config.solver);
  report.lambda = lambda;
  report.train_size = split.train.size();
  report.test_size = split.test.size();

  double eta0 = config.eta0.value_or(0.0);
  if (!config.eta0) {
    const auto& cands = config.eta0_candidates;
    std::vector<double> objectives(cands.size());
    auto job = [&](std::size_t j) {
      return train(config, data, split.train, lambda, cands[j], config.sweep_epochs).objective;
    };
    if (config.threads > 1) {
      std::vector<std::future<double>> jobs;
      for (std::size_t j = 0; j < cands.size(); ++j) jobs.push_back(std::async(std::launch::async, job, j));
      for (std::size_t j = 0; j < cands.size(); ++j) objectives[j] = jobs[j].get();
    } else {
      for (std::size_t j = 0; j < cands.size(); ++j) objectives[j] = job(j);
    }
    std::size_t best = 0;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      report.sweep.push_back({cands[j], objectives[j]});
      if (objectives[j] < objectives[best]) best = j;
    }
    eta0 = cands[best];
  }
  report.eta0 = eta0;

  const auto start = std::chrono::steady_clock::now();
  Trained t = train(config, data, split.train, lambda, eta0, config.epochs);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.rounds = t.trace.records.size();
  report.objective = t.objective;
  report.trace = t.trace.records;

  const Predictor predict = make_predictor(t.model);
  report.train = accuracy(predict, split.train);
  report.test = accuracy(predict, split.test);
  if (const auto* m = std::get_if<LinearModel>(&t.model)) {
    report.group_norms = m->theta.group_norms();
    report.beta = finalize_beta(report.group_norms);
  } else {
    const auto& k = std::get<MklModel>(t.model);
    report.group_norms = k.group_norms();
    report.beta = k.beta;
  }
  const auto zeros = (report.group_norms.array() == 0.0).count();
  report.group_sparsity = static_cast<double>(zeros) / static_cast<double>(report.group_norms.size());

  if (write_outputs) {
    std::filesystem::create_directories(config.output_dir);
    const std::filesystem::path dir(config.output_dir);
    write_trace_csv((dir / "trace.csv").string(), report.trace);
    write_metrics_csv((dir / "metrics.csv").string(), report);
    write_beta_csv((dir / "beta.csv").string(), report);
    std::visit([&](const auto& m) { save_snapshot((dir / "model.snapshot").string(), m); }, t.model);
    write_text((dir / "config.ini").string(), format_config(config));
  }
  return {std::move(report), std::move(t.model)};
}

void write_trace_csv(const std::string& path, const std::vector<RoundRecord>& records) {
  std::ostringstream out;
  out << "round,instance,eta,loss,reg,objective,theta_norm\n";
  for (const auto& r : records) {
    out << r.round << ',' << r.instance << ',' << fmt(r.eta) << ',' << fmt(r.loss) << ',' << fmt(r.reg) << ','
        << fmt(r.objective) << ',' << fmt(r.theta_norm) << '\n';
  }
  write_text(path, out.str());
}

void write_metrics_csv(const std::string& path, const MetricsReport& r) {
  std::ostringstream out;
  out << "metric,value\n";
  out << "task," << r.task << '\n' << "solver," << r.solver << '\n';
  out << "lambda," << fmt(r.lambda) << '\n' << "eta0," << fmt(r.eta0) << '\n';
  for (const auto& s : r.sweep) {
    char key[32];
    std::snprintf(key, sizeof key, "%g", s.eta0);
    out << "sweep_objective_eta0_" << key << ',' << fmt(s.objective) << '\n';
  }
  out << "train_size," << r.train_size << '\n' << "test_size," << r.test_size << '\n' << "rounds," << r.rounds << '\n';
  out << "train_accuracy_char," << fmt(r.train.per_char) << '\n'
      << "train_accuracy_sequence," << fmt(r.train.per_sequence) << '\n'
      << "test_accuracy_char," << fmt(r.test.per_char) << '\n'
      << "test_accuracy_sequence," << fmt(r.test.per_sequence) << '\n';
  out << "objective," << fmt(r.objective) << '\n' << "wall_seconds," << fmt(r.wall_seconds) << '\n';
  out << "group_sparsity," << fmt(r.group_sparsity) << '\n';
  write_text(path, out.str());
}

void write_beta_csv(const std::string& path, const MetricsReport& r) {
  std::ostringstream out;
  out << "group,beta,norm\n";
  for (Index k = 0; k < r.beta.size(); ++k) out << k << ',' << fmt(r.beta[k]) << ',' << fmt(r.group_norms[k]) << '\n';
  write_text(path, out.str());
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty CSV");
  t.header = split_csv_line(line);
  std::size_t no = 1;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty()) continue;
    auto row = split_csv_line(line);
    if (row.size() != t.header.size()) {
      throw std::runtime_error(path + ": line " + std::to_string(no) + " has " + std::to_string(row.size()) +
                               " fields, expected " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace proxmkl
