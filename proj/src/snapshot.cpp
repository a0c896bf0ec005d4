#include "proxmkl/snapshot.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace proxmkl {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class Seq>
void put_list(std::ostream& out, const char* key, const Seq& values) {
  out << key << ' ' << values.size();
  for (const auto& v : values) {
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      out << ' ' << fmt(v);
    } else {
      out << ' ' << v;
    }
  }
  out << '\n';
}

void put_vector(std::ostream& out, const char* key, const Vector& v) {
  out << key << ' ' << v.size();
  for (Index i = 0; i < v.size(); ++i) out << ' ' << fmt(v[i]);
  out << '\n';
}

// Reads `key` followed by the rest of the line.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::istringstream line(const std::string& key) {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_no_;
      if (text.empty() || text[0] == '#') continue;
      std::istringstream ss(text);
      std::string got;
      ss >> got;
      if (got != key) fail("expected '" + key + "', found '" + got + "'");
      return ss;
    }
    fail("unexpected end of snapshot, expected '" + key + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("snapshot line " + std::to_string(line_no_) + ": " + what);
  }

  template <class T>
  T scalar(std::istringstream& ss) {
    std::string tok;
    if (!(ss >> tok)) fail("missing value");
    return convert<T>(tok);
  }

  template <class T>
  T scalar(const std::string& key) {
    auto ss = line(key);
    return scalar<T>(ss);
  }

  template <class T>
  std::vector<T> list(const std::string& key) {
    auto ss = line(key);
    const auto n = scalar<std::size_t>(ss);
    std::vector<T> out(n);
    for (auto& v : out) v = scalar<T>(ss);
    return out;
  }

  Vector vector(const std::string& key) {
    const auto v = list<double>(key);
    return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
  }

 private:
  template <class T>
  T convert(const std::string& tok) const {
    char* end = nullptr;
    if constexpr (std::is_floating_point_v<T>) {
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end) fail("bad number '" + tok + "'");
      return v;
    } else if constexpr (std::is_signed_v<T>) {
      const long long v = std::strtoll(tok.c_str(), &end, 10);
      if (end == tok.c_str() || *end) fail("bad integer '" + tok + "'");
      return static_cast<T>(v);
    } else {
      const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
      if (end == tok.c_str() || *end || tok[0] == '-') fail("bad count '" + tok + "'");
      return static_cast<T>(v);
    }
  }

  std::istream& in_;
  std::size_t line_no_ = 0;
};

void put_header(std::ostream& out, const char* kind) {
  out << "proxmkl-snapshot " << kSnapshotVersion << '\n' << "kind " << kind << '\n';
}

void read_header(Reader& r, const std::string& expected) {
  auto ss = r.line("proxmkl-snapshot");
  const int version = r.scalar<int>(ss);
  if (version != kSnapshotVersion) r.fail("unsupported snapshot version " + std::to_string(version));
  auto k = r.line("kind");
  std::string kind;
  k >> kind;
  if (kind != expected) r.fail("snapshot holds a '" + kind + "' model, expected '" + expected + "'");
}

void put_grouped(std::ostream& out, const GroupedVector& theta) {
  put_list(out, "offsets", theta.offsets());
  put_vector(out, "values", theta.values());
}

GroupedVector read_grouped(Reader& r) {
  auto offsets = r.list<Index>("offsets");
  Vector values = r.vector("values");
  try {
    return GroupedVector(std::move(values), std::move(offsets));
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
}

void put_layout(std::ostream& out, const FeatureLayout& layout) {
  out << "labels " << layout.num_labels << '\n' << "transitions " << (layout.transitions ? 1 : 0) << '\n';
  put_list(out, "input_offsets", layout.input_offsets);
}

FeatureLayout read_layout(Reader& r) {
  FeatureLayout layout;
  layout.num_labels = r.scalar<int>("labels");
  layout.transitions = r.scalar<int>("transitions") != 0;
  layout.input_offsets = r.list<Index>("input_offsets");
  if (layout.input_offsets.empty()) r.fail("empty input offsets");
  return layout;
}

}  // namespace

void write_snapshot(std::ostream& out, const MklModel& model) {
  put_header(out, "mkl");
  out << "mode " << to_string(model.mode) << '\n';
  out << "labels " << model.num_labels << '\n';
  out << "transitions " << (model.transitions ? 1 : 0) << '\n';
  out << "groups " << model.groups.size() << '\n';
  for (const auto& g : model.groups) {
    out << "group " << to_string(g.kernel) << ' ' << g.input_begin << ' ' << g.input_dim << '\n';
  }
  put_vector(out, "beta", model.beta);
  out << "fixed_beta " << (model.fixed_beta ? 1 : 0) << '\n';

  if (model.mode == MklMode::explicit_features) {
    put_layout(out, model.layout);
    put_grouped(out, model.theta);
    return;
  }

  const SupportSet& s = model.support;
  out << "track_naive " << (s.tracks_naive() ? 1 : 0) << '\n';
  put_list(out, "scale", s.scale);
  put_list(out, "sq_norm", s.sq_norm);
  {
    std::vector<double> t(model.transition.data(), model.transition.data() + model.transition.size());
    put_list(out, "transition", t);
  }
  out << "points " << s.points.size() << '\n';
  for (std::size_t r = 0; r < s.points.size(); ++r) {
    out << "point " << s.point_ids[r];
    put_vector(out, "", s.points[r]);
  }
  for (std::size_t k = 0; k < s.num_groups(); ++k) put_list(out, "coeff", s.coeff[k]);
  out << "entries " << s.entries.size() << '\n';
  for (const auto& e : s.entries) {
    out << "entry " << e.round << ' ' << e.instance << '\n';
    put_list(out, "predicted", e.predicted);
    put_list(out, "diff", e.diff_positions);
    put_list(out, "base", e.base);
    put_list(out, "naive", e.naive);
  }
}

void write_snapshot(std::ostream& out, const LinearModel& model) {
  put_header(out, "linear");
  out << "loss " << to_string(model.loss) << '\n';
  out << "chain " << (model.chain.empty() ? "-" : model.chain) << '\n';
  put_layout(out, model.layout);
  put_grouped(out, model.theta);
}

MklModel read_mkl_snapshot(std::istream& in) {
  Reader r(in);
  read_header(r, "mkl");
  MklModel m;
  {
    auto ss = r.line("mode");
    std::string mode;
    ss >> mode;
    try {
      m.mode = parse_mkl_mode(mode);
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  }
  m.num_labels = r.scalar<int>("labels");
  m.transitions = r.scalar<int>("transitions") != 0;
  const auto p = r.scalar<std::size_t>("groups");
  for (std::size_t k = 0; k < p; ++k) {
    auto ss = r.line("group");
    std::string spec;
    ss >> spec;
    KernelGroup g;
    try {
      g.kernel = parse_kernel(spec);
    } catch (const std::exception& e) {
      r.fail(e.what());
    }
    g.input_begin = r.scalar<Index>(ss);
    g.input_dim = r.scalar<Index>(ss);
    m.groups.push_back(g);
  }
  m.beta = r.vector("beta");
  m.fixed_beta = r.scalar<int>("fixed_beta") != 0;

  if (m.mode == MklMode::explicit_features) {
    m.layout = read_layout(r);
    m.theta = read_grouped(r);
    return m;
  }

  const bool naive = r.scalar<int>("track_naive") != 0;
  SupportSet s(p, m.num_labels, naive);
  s.scale = r.list<double>("scale");
  s.sq_norm = r.list<double>("sq_norm");
  if (s.scale.size() != p || s.sq_norm.size() != p) r.fail("per-group list has the wrong length");
  {
    const auto t = r.list<double>("transition");
    const auto L = static_cast<std::size_t>(m.num_labels);
    if (t.size() != L * L) r.fail("transition matrix has the wrong size");
    m.transition = Eigen::Map<const Matrix>(t.data(), m.num_labels, m.num_labels);
  }
  const auto points = r.scalar<std::size_t>("points");
  for (std::size_t i = 0; i < points; ++i) {
    auto ss = r.line("point");
    s.point_ids.push_back(r.scalar<std::uint64_t>(ss));
    const auto n = r.scalar<std::size_t>(ss);
    Vector v(static_cast<Index>(n));
    for (Index j = 0; j < v.size(); ++j) v[j] = r.scalar<double>(ss);
    s.points.push_back(std::move(v));
  }
  for (std::size_t k = 0; k < p; ++k) {
    s.coeff[k] = r.list<double>("coeff");
    if (s.coeff[k].size() != points * static_cast<std::size_t>(m.num_labels)) r.fail("coefficient block size");
  }
  const auto entries = r.scalar<std::size_t>("entries");
  for (std::size_t i = 0; i < entries; ++i) {
    auto ss = r.line("entry");
    SupportEntry e;
    e.round = r.scalar<std::size_t>(ss);
    e.instance = r.scalar<std::size_t>(ss);
    e.predicted = r.list<int>("predicted");
    e.diff_positions = r.list<Index>("diff");
    e.base = r.list<double>("base");
    e.naive = r.list<double>("naive");
    s.entries.push_back(std::move(e));
  }
  s.rebuild_index();
  m.support = std::move(s);
  return m;
}

LinearModel read_linear_snapshot(std::istream& in) {
  Reader r(in);
  read_header(r, "linear");
  LinearModel m;
  {
    auto ss = r.line("loss");
    std::string loss;
    ss >> loss;
    try {
      m.loss = parse_loss_kind(loss);
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  }
  {
    auto ss = r.line("chain");
    ss >> m.chain;
    if (m.chain == "-") m.chain.clear();
  }
  m.layout = read_layout(r);
  m.theta = read_grouped(r);
  if (m.theta.offsets() != m.layout.parameter_offsets()) r.fail("weights do not match the feature layout");
  return m;
}

std::string snapshot_kind(std::istream& in) {
  const auto start = in.tellg();
  std::string magic, kind_key, kind;
  int version = 0;
  in >> magic >> version >> kind_key >> kind;
  in.clear();
  in.seekg(start);
  if (magic != "proxmkl-snapshot" || kind_key != "kind") throw std::runtime_error("not a model snapshot");
  return kind;
}

void save_snapshot(const std::string& path, const MklModel& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_snapshot(out, model);
}

void save_snapshot(const std::string& path, const LinearModel& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_snapshot(out, model);
}

}  // namespace proxmkl
