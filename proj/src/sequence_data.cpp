#include "proxmkl/sequence_data.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace proxmkl {

namespace {

struct CharRow {
  long long id = 0;
  std::string letter;
  long long next = -1;
  long long word = 0;
  long long position = 0;
  int fold = 0;
  std::vector<double> pixels;
  std::size_t line = 0;
};

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

long long to_int(const std::string& s, std::size_t line, const char* field) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end) fail(line, std::string("bad ") + field + " '" + s + "'");
  return v;
}

double to_real(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end) fail(line, "bad pixel value '" + s + "'");
  return v;
}

std::string fmt(double v) {
  if (v == 0.0 || v == 1.0) return v == 0.0 ? "0" : "1";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::size_t SequenceDataset::num_characters() const {
  std::size_t n = 0;
  for (const auto& x : instances) n += static_cast<std::size_t>(x.length());
  return n;
}

SequenceDataset read_ocr(std::istream& in, const OcrColumns& columns) {
  const int max_meta = std::max({columns.id, columns.letter, columns.next_id, columns.word_id, columns.position,
                                 columns.fold});
  std::vector<CharRow> rows;
  std::string text;
  std::size_t line_no = 0;
  int width = -1;
  while (std::getline(in, text)) {
    ++line_no;
    while (!text.empty() && (text.back() == '\r' || text.back() == '\t' || text.back() == ' ')) text.pop_back();
    if (text.empty()) continue;
    const auto f = split_tabs(text);
    if (static_cast<int>(f.size()) <= std::max(max_meta, columns.first_pixel)) {
      fail(line_no, "expected at least " + std::to_string(std::max(max_meta, columns.first_pixel) + 1) +
                        " tab-separated fields, found " + std::to_string(f.size()));
    }
    // A leading header row is tolerated.
    if (rows.empty() && line_no == 1 && !f[columns.id].empty() &&
        !std::isdigit(static_cast<unsigned char>(f[columns.id][0]))) {
      continue;
    }
    CharRow r;
    r.line = line_no;
    r.id = to_int(f[columns.id], line_no, "id");
    r.letter = f[columns.letter];
    r.next = to_int(f[columns.next_id], line_no, "next id");
    r.word = to_int(f[columns.word_id], line_no, "word id");
    r.position = to_int(f[columns.position], line_no, "position");
    r.fold = static_cast<int>(to_int(f[columns.fold], line_no, "fold"));
    const int available = static_cast<int>(f.size()) - columns.first_pixel;
    const int n = columns.num_pixels < 0 ? available : columns.num_pixels;
    if (n < 1 || n > available) fail(line_no, "not enough pixel columns");
    if (width < 0) width = n;
    if (n != width) fail(line_no, "pixel count " + std::to_string(n) + " differs from " + std::to_string(width));
    r.pixels.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) r.pixels[static_cast<std::size_t>(j)] = to_real(f[columns.first_pixel + j], line_no);
    if (r.letter.empty()) fail(line_no, "empty letter");
    rows.push_back(std::move(r));
  }

  SequenceDataset data;
  for (char c = 'a'; c <= 'z'; ++c) data.label_names.emplace_back(1, c);
  std::unordered_map<std::string, int> label_of;
  for (int i = 0; i < 26; ++i) label_of[data.label_names[static_cast<std::size_t>(i)]] = i;

  std::unordered_map<long long, std::size_t> by_id;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!by_id.emplace(rows[i].id, i).second) fail(rows[i].line, "duplicate character id " + std::to_string(rows[i].id));
    if (!label_of.count(rows[i].letter)) {
      label_of[rows[i].letter] = static_cast<int>(data.label_names.size());
      data.label_names.push_back(rows[i].letter);
    }
  }
  std::vector<int> predecessors(rows.size(), 0);
  for (const auto& r : rows) {
    if (r.next == -1) continue;
    auto it = by_id.find(r.next);
    if (it == by_id.end()) fail(r.line, "next id " + std::to_string(r.next) + " does not exist");
    if (++predecessors[it->second] > 1) fail(r.line, "character " + std::to_string(r.next) + " has two predecessors");
  }

  std::vector<char> used(rows.size(), 0);
  for (std::size_t start = 0; start < rows.size(); ++start) {
    if (predecessors[start] != 0) continue;
    std::vector<std::size_t> chain;
    for (std::size_t cur = start;;) {
      if (used[cur]) fail(rows[cur].line, "cycle in next-id chain");
      used[cur] = 1;
      chain.push_back(cur);
      if (rows[cur].next == -1) break;
      cur = by_id.at(rows[cur].next);
      if (rows[cur].word != rows[start].word) fail(rows[cur].line, "word id changes inside a chain");
      if (rows[cur].fold != rows[start].fold) fail(rows[cur].line, "fold changes inside a word");
    }
    ChainInstance x;
    x.inputs.resize(static_cast<Index>(chain.size()), width);
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const auto& r = rows[chain[i]];
      x.inputs.row(static_cast<Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(r.pixels.data(), width);
      x.labels.push_back(label_of.at(r.letter));
    }
    x.fold = rows[start].fold;
    x.name = std::to_string(rows[start].word);
    data.instances.push_back(std::move(x));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!used[i]) fail(rows[i].line, "character not reachable from any word start (cycle)");
  }
  int max_label = -1;
  for (const auto& x : data.instances) {
    for (int y : x.labels) max_label = std::max(max_label, y);
  }
  data.num_labels = std::max(1, max_label + 1);
  data.label_names.resize(static_cast<std::size_t>(data.num_labels));
  return data;
}

SequenceDataset load_ocr_dataset(const std::string& path, const OcrColumns& columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return read_ocr(in, columns);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_sequences(std::ostream& out, const SequenceDataset& data) {
  long long id = 1;
  long long word = 1;
  for (const auto& x : data.instances) {
    for (Index i = 0; i < x.length(); ++i, ++id) {
      const int y = x.labels[static_cast<std::size_t>(i)];
      const std::string letter = y < static_cast<int>(data.label_names.size())
                                     ? data.label_names[static_cast<std::size_t>(y)]
                                     : "L" + std::to_string(y);
      out << id << '\t' << letter << '\t' << (i + 1 < x.length() ? id + 1 : -1) << '\t' << word << '\t' << (i + 1)
          << '\t' << x.fold;
      for (Index j = 0; j < x.inputs.cols(); ++j) out << '\t' << fmt(x.inputs(i, j));
      out << '\n';
    }
    ++word;
  }
}

void save_sequences(const std::string& path, const SequenceDataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_sequences(out, data);
}

FoldSplit split_fold(std::span<const ChainInstance> data, int fold) {
  FoldSplit split;
  for (const auto& x : data) (x.fold == fold ? split.train : split.test).push_back(x);
  return split;
}

std::vector<int> fold_ids(std::span<const ChainInstance> data) {
  std::set<int> folds;
  for (const auto& x : data) folds.insert(x.fold);
  return {folds.begin(), folds.end()};
}

}  // namespace proxmkl
