#include "proxmkl/inference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace proxmkl {
namespace {

double log_sum_exp(const Vector& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

Decoding viterbi_decode_with_cost(const ChainScores& scores, const Matrix& cost) {
  const Index n = scores.length();
  const int labels = scores.num_labels();
  if (n < 1) throw std::invalid_argument("viterbi_decode: empty sequence");
  if (cost.rows() != n || cost.cols() != labels) throw std::invalid_argument("viterbi_decode: cost shape mismatch");

  const Matrix local = scores.emission + cost;
  Matrix delta(n, labels);
  Eigen::MatrixXi back = Eigen::MatrixXi::Zero(n, labels);
  delta.row(0) = local.row(0);
  for (Index i = 1; i < n; ++i) {
    for (int b = 0; b < labels; ++b) {
      double best = delta(i - 1, 0) + scores.transition(0, b);
      int arg = 0;
      for (int a = 1; a < labels; ++a) {
        const double cand = delta(i - 1, a) + scores.transition(a, b);
        if (cand > best) {
          best = cand;
          arg = a;
        }
      }
      delta(i, b) = best + local(i, b);
      back(i, b) = arg;
    }
  }

  Decoding out;
  out.labels.assign(static_cast<std::size_t>(n), 0);
  int last = 0;
  for (int b = 1; b < labels; ++b) {
    if (delta(n - 1, b) > delta(n - 1, last)) last = b;
  }
  out.score = delta(n - 1, last);
  out.labels[static_cast<std::size_t>(n - 1)] = last;
  for (Index i = n - 1; i > 0; --i) {
    last = back(i, last);
    out.labels[static_cast<std::size_t>(i - 1)] = last;
  }
  return out;
}

Decoding viterbi_decode(const ChainScores& scores) {
  return viterbi_decode_with_cost(scores, Matrix::Zero(scores.length(), scores.num_labels()));
}

Decoding viterbi_decode(const ChainScores& scores, const std::vector<int>& gold) {
  if (static_cast<Index>(gold.size()) != scores.length()) {
    throw std::invalid_argument("viterbi_decode: gold length mismatch");
  }
  return viterbi_decode_with_cost(scores, hamming_cost(gold, scores.num_labels()));
}

Marginals forward_backward(const ChainScores& scores) {
  const Index n = scores.length();
  const int labels = scores.num_labels();
  if (n < 1) throw std::invalid_argument("forward_backward: empty sequence");

  Matrix alpha(n, labels);
  Matrix beta = Matrix::Zero(n, labels);
  Vector tmp(labels);
  alpha.row(0) = scores.emission.row(0);
  for (Index i = 1; i < n; ++i) {
    for (int b = 0; b < labels; ++b) {
      for (int a = 0; a < labels; ++a) tmp[a] = alpha(i - 1, a) + scores.transition(a, b);
      alpha(i, b) = log_sum_exp(tmp) + scores.emission(i, b);
    }
  }
  for (Index i = n - 2; i >= 0; --i) {
    for (int a = 0; a < labels; ++a) {
      for (int b = 0; b < labels; ++b) {
        tmp[b] = scores.transition(a, b) + scores.emission(i + 1, b) + beta(i + 1, b);
      }
      beta(i, a) = log_sum_exp(tmp);
    }
  }

  Marginals m;
  m.log_partition = log_sum_exp(alpha.row(n - 1).transpose());
  m.unary = (alpha + beta).array() - m.log_partition;
  m.unary = m.unary.array().exp();
  m.pairwise.reserve(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
  for (Index i = 0; i + 1 < n; ++i) {
    Matrix p(labels, labels);
    for (int a = 0; a < labels; ++a) {
      for (int b = 0; b < labels; ++b) {
        p(a, b) = std::exp(alpha(i, a) + scores.transition(a, b) + scores.emission(i + 1, b) + beta(i + 1, b) -
                           m.log_partition);
      }
    }
    m.pairwise.push_back(std::move(p));
  }
  return m;
}

}  // namespace proxmkl
