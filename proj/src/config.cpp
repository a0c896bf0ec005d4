#include "proxmkl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace proxmkl {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
  return n;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const long long n = to_int(key, v);
  if (n < 0) throw std::invalid_argument("config: '" + key + "' must be >= 0");
  return static_cast<std::size_t>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class Seq, class F>
std::string join(const Seq& items, F&& f) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ", ";
    out += f(item);
  }
  return out;
}

}  // namespace

std::string to_string(Task task) {
  switch (task) {
    case Task::sequence_label: return "sequence_label";
    case Task::synthetic_groups: return "synthetic_groups";
    case Task::synthetic_mkl: return "synthetic_mkl";
  }
  return "?";
}

Task parse_task(const std::string& name) {
  for (Task t : {Task::sequence_label, Task::synthetic_groups, Task::synthetic_mkl}) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown task '" + name + "'");
}

std::string to_string(Solver solver) { return solver == Solver::online ? "online" : "mkl"; }

Solver parse_solver(const std::string& name) {
  if (name == "online") return Solver::online;
  if (name == "mkl") return Solver::mkl;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

double ExperimentConfig::resolve_lambda(std::size_t m) const {
  if (lambda && C) throw std::invalid_argument("config: set either lambda or C, not both");
  if (C) {
    if (m == 0) throw std::invalid_argument("config: C needs a nonempty training set");
    return 1.0 / (*C * static_cast<double>(m));
  }
  return lambda ? *lambda : 1.0;
}

void ExperimentConfig::check() const {
  if (lambda && C) throw std::invalid_argument("config: set either lambda or C, not both");
  if (lambda && !(*lambda > 0.0)) throw std::invalid_argument("config: lambda must be positive");
  if (C && !(*C > 0.0)) throw std::invalid_argument("config: C must be positive");
  if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
  if (eta0 && !(*eta0 > 0.0)) throw std::invalid_argument("config: eta0 must be positive");
  if (!eta0 && eta0_candidates.empty()) throw std::invalid_argument("config: need eta0 or candidates");
  for (double c : eta0_candidates) {
    if (!(c > 0.0)) throw std::invalid_argument("config: eta0 candidates must be positive");
  }
  if (sweep_epochs < 1) throw std::invalid_argument("config: sweep_epochs must be >= 1");
  if (gamma && !(*gamma > 0.0)) throw std::invalid_argument("config: gamma must be positive");
  if (sigma < 0.0) throw std::invalid_argument("config: sigma must be >= 0");
  if (task == Task::sequence_label && data_path.empty()) throw std::invalid_argument("config: sequence_label needs data.path");
  if (solver == Solver::mkl && loss != LossKind::hinge) throw std::invalid_argument("config: the MKL solver uses the hinge loss");
  if (solver == Solver::mkl && task == Task::sequence_label && kernels.empty()) {
    throw std::invalid_argument("config: the MKL solver needs mkl.kernels");
  }
  if (task == Task::synthetic_mkl && kernels.empty()) throw std::invalid_argument("config: synthetic_mkl needs mkl.kernels");
  if (feature_groups < 1) throw std::invalid_argument("config: feature_groups must be >= 1");
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  ExperimentConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"experiment.task", [&](auto&, auto& v) { c.task = parse_task(v); }},
      {"experiment.seed", [&](auto& k, auto& v) { c.seed = static_cast<std::uint64_t>(to_count(k, v)); }},
      {"experiment.epochs", [&](auto& k, auto& v) { c.epochs = to_count(k, v); }},
      {"experiment.train_fold", [&](auto& k, auto& v) { c.train_fold = static_cast<int>(to_int(k, v)); }},
      {"experiment.output", [&](auto&, auto& v) { c.output_dir = v; }},
      {"data.path", [&](auto&, auto& v) { c.data_path = v; }},
      {"data.max_instances", [&](auto& k, auto& v) { c.max_instances = to_count(k, v); }},
      {"data.id_column", [&](auto& k, auto& v) { c.columns.id = static_cast<int>(to_int(k, v)); }},
      {"data.letter_column", [&](auto& k, auto& v) { c.columns.letter = static_cast<int>(to_int(k, v)); }},
      {"data.next_id_column", [&](auto& k, auto& v) { c.columns.next_id = static_cast<int>(to_int(k, v)); }},
      {"data.word_id_column", [&](auto& k, auto& v) { c.columns.word_id = static_cast<int>(to_int(k, v)); }},
      {"data.position_column", [&](auto& k, auto& v) { c.columns.position = static_cast<int>(to_int(k, v)); }},
      {"data.fold_column", [&](auto& k, auto& v) { c.columns.fold = static_cast<int>(to_int(k, v)); }},
      {"data.first_pixel_column", [&](auto& k, auto& v) { c.columns.first_pixel = static_cast<int>(to_int(k, v)); }},
      {"data.num_pixels", [&](auto& k, auto& v) { c.columns.num_pixels = static_cast<int>(to_int(k, v)); }},
      {"model.solver", [&](auto&, auto& v) { c.solver = parse_solver(v); }},
      {"model.loss", [&](auto&, auto& v) { c.loss = parse_loss_kind(v); }},
      {"model.chain", [&](auto&, auto& v) { c.chain = v; }},
      {"model.lambda", [&](auto& k, auto& v) { c.lambda = to_double(k, v); }},
      {"model.C", [&](auto& k, auto& v) { c.C = to_double(k, v); }},
      {"model.schedule", [&](auto&, auto& v) { c.schedule = parse_schedule_kind(v); }},
      {"model.eta0", [&](auto& k, auto& v) { c.eta0 = to_double(k, v); }},
      {"model.eta0_candidates",
       [&](auto& k, auto& v) {
         c.eta0_candidates.clear();
         for (const auto& item : split(v, ',')) c.eta0_candidates.push_back(to_double(k, item));
       }},
      {"model.sweep_epochs", [&](auto& k, auto& v) { c.sweep_epochs = to_count(k, v); }},
      {"model.gamma", [&](auto& k, auto& v) { c.gamma = to_double(k, v); }},
      {"model.project", [&](auto& k, auto& v) { c.project = to_bool(k, v); }},
      {"model.average", [&](auto& k, auto& v) { c.average = to_bool(k, v); }},
      {"model.transitions", [&](auto& k, auto& v) { c.transitions = to_bool(k, v); }},
      {"model.sigma", [&](auto& k, auto& v) { c.sigma = to_double(k, v); }},
      {"model.feature_groups", [&](auto& k, auto& v) { c.feature_groups = static_cast<Index>(to_int(k, v)); }},
      {"mkl.kernels",
       [&](auto&, auto& v) {
         c.kernels.clear();
         for (const auto& item : split(v, ',')) c.kernels.push_back(parse_kernel(item));
       }},
      {"mkl.mode", [&](auto&, auto& v) { c.mode = parse_mkl_mode(v); }},
      {"mkl.threads", [&](auto& k, auto& v) { c.threads = static_cast<unsigned>(to_count(k, v)); }},
      {"mkl.cache_mb", [&](auto& k, auto& v) { c.cache_mb = to_count(k, v); }},
      {"mkl.norm_check_every", [&](auto& k, auto& v) { c.norm_check_every = to_count(k, v); }},
      {"mkl.average_kernels", [&](auto& k, auto& v) { c.average_kernels = to_bool(k, v); }},
      {"mkl.informative", [&](auto& k, auto& v) { c.mkl_data.informative = to_count(k, v); }},
      {"mkl.block_dim", [&](auto& k, auto& v) { c.mkl_data.block_dim = static_cast<Index>(to_int(k, v)); }},
      {"mkl.block_dims",
       [&](auto& k, auto& v) {
         c.mkl_data.block_dims.clear();
         for (const auto& item : split(v, ',')) c.mkl_data.block_dims.push_back(static_cast<Index>(to_int(k, item)));
       }},
      {"mkl.centers", [&](auto& k, auto& v) { c.mkl_data.centers = static_cast<int>(to_int(k, v)); }},
      {"mkl.margin", [&](auto& k, auto& v) { c.mkl_data.margin = to_double(k, v); }},
      {"synthetic.labels",
       [&](auto& k, auto& v) { c.groups.num_labels = c.mkl_data.num_labels = static_cast<int>(to_int(k, v)); }},
      {"synthetic.m", [&](auto& k, auto& v) { c.groups.m = c.mkl_data.m = to_count(k, v); }},
      {"synthetic.min_length",
       [&](auto& k, auto& v) { c.groups.min_length = c.mkl_data.min_length = static_cast<Index>(to_int(k, v)); }},
      {"synthetic.max_length",
       [&](auto& k, auto& v) { c.groups.max_length = c.mkl_data.max_length = static_cast<Index>(to_int(k, v)); }},
      {"synthetic.folds", [&](auto& k, auto& v) { c.groups.folds = c.mkl_data.folds = static_cast<int>(to_int(k, v)); }},
      {"synthetic.groups", [&](auto& k, auto& v) { c.groups.groups = static_cast<Index>(to_int(k, v)); }},
      {"synthetic.group_dim", [&](auto& k, auto& v) { c.groups.group_dim = static_cast<Index>(to_int(k, v)); }},
      {"synthetic.relevant",
       [&](auto& k, auto& v) {
         c.groups.relevant.clear();
         for (const auto& item : split(v, ',')) c.groups.relevant.push_back(to_count(k, item));
       }},
      {"synthetic.noise", [&](auto& k, auto& v) { c.groups.noise = to_double(k, v); }},
      {"synthetic.margin", [&](auto& k, auto& v) { c.groups.margin = to_double(k, v); }},
  };

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw std::invalid_argument("config: key '" + section + "' must be inside a section");
    }
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      auto it = setters.find(full);
      if (it == setters.end()) throw std::invalid_argument("config: unknown key '" + full + "'");
      it->second(full, trim(node.data()));
    }
  }
  c.groups.seed = c.mkl_data.seed = c.seed;
  c.mkl_data.kernels = c.kernels;
  c.check();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  return parse_config(in);
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[experiment]\n"
      << "task = " << to_string(c.task) << '\n'
      << "seed = " << c.seed << '\n'
      << "epochs = " << c.epochs << '\n'
      << "train_fold = " << c.train_fold << '\n'
      << "output = " << c.output_dir << "\n\n";
  out << "[data]\n";
  if (!c.data_path.empty()) out << "path = " << c.data_path << '\n';
  out << "max_instances = " << c.max_instances << '\n'
      << "id_column = " << c.columns.id << '\n'
      << "letter_column = " << c.columns.letter << '\n'
      << "next_id_column = " << c.columns.next_id << '\n'
      << "word_id_column = " << c.columns.word_id << '\n'
      << "position_column = " << c.columns.position << '\n'
      << "fold_column = " << c.columns.fold << '\n'
      << "first_pixel_column = " << c.columns.first_pixel << '\n'
      << "num_pixels = " << c.columns.num_pixels << "\n\n";
  out << "[model]\n"
      << "solver = " << to_string(c.solver) << '\n'
      << "loss = " << to_string(c.loss) << '\n'
      << "chain = " << c.chain << '\n';
  if (c.lambda) out << "lambda = " << fmt(*c.lambda) << '\n';
  if (c.C) out << "C = " << fmt(*c.C) << '\n';
  out << "schedule = " << to_string(c.schedule) << '\n';
  if (c.eta0) out << "eta0 = " << fmt(*c.eta0) << '\n';
  out << "eta0_candidates = " << join(c.eta0_candidates, fmt) << '\n'
      << "sweep_epochs = " << c.sweep_epochs << '\n';
  if (c.gamma) out << "gamma = " << fmt(*c.gamma) << '\n';
  out << "project = " << (c.project ? "true" : "false") << '\n'
      << "average = " << (c.average ? "true" : "false") << '\n'
      << "transitions = " << (c.transitions ? "true" : "false") << '\n'
      << "sigma = " << fmt(c.sigma) << '\n'
      << "feature_groups = " << c.feature_groups << "\n\n";
  out << "[mkl]\n";
  if (!c.kernels.empty()) {
    out << "kernels = " << join(c.kernels, [](const KernelSpec& k) { return to_string(k); }) << '\n';
  }
  out << "mode = " << to_string(c.mode) << '\n'
      << "threads = " << c.threads << '\n'
      << "cache_mb = " << c.cache_mb << '\n'
      << "norm_check_every = " << c.norm_check_every << '\n'
      << "average_kernels = " << (c.average_kernels ? "true" : "false") << '\n'
      << "informative = " << c.mkl_data.informative << '\n'
      << "block_dim = " << c.mkl_data.block_dim << '\n';
  if (!c.mkl_data.block_dims.empty()) {
    out << "block_dims = " << join(c.mkl_data.block_dims, [](Index d) { return std::to_string(d); }) << '\n';
  }
  out << "centers = " << c.mkl_data.centers << '\n'
      << "margin = " << fmt(c.mkl_data.margin) << "\n\n";
  out << "[synthetic]\n"
      << "labels = " << c.groups.num_labels << '\n'
      << "m = " << c.groups.m << '\n'
      << "min_length = " << c.groups.min_length << '\n'
      << "max_length = " << c.groups.max_length << '\n'
      << "folds = " << c.groups.folds << '\n'
      << "groups = " << c.groups.groups << '\n'
      << "group_dim = " << c.groups.group_dim << '\n'
      << "relevant = " << join(c.groups.relevant, [](std::size_t k) { return std::to_string(k); }) << '\n'
      << "noise = " << fmt(c.groups.noise) << '\n'
      << "margin = " << fmt(c.groups.margin) << '\n';
  return out.str();
}

}  // namespace proxmkl
