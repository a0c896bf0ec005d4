#pragma once

#include <vector>

#include "proxmkl/chain.hpp"

namespace proxmkl {

struct Decoding {
  std::vector<int> labels;
  double score = 0.0;  ///< model score plus cost, when a cost was given
};

/// Exact argmax over label sequences of emission + transition score. Ties go to
/// the lowest label index, both at the last position and at every backtrack.
Decoding viterbi_decode(const ChainScores& scores);
/// Loss-augmented decoding with Hamming cost against `gold`.
Decoding viterbi_decode(const ChainScores& scores, const std::vector<int>& gold);
/// Loss-augmented decoding with an arbitrary decomposable cost (N×L).
Decoding viterbi_decode_with_cost(const ChainScores& scores, const Matrix& cost);

struct Marginals {
  double log_partition = 0.0;
  Matrix unary;                 ///< N×L
  std::vector<Matrix> pairwise; ///< N−1 matrices, L×L, entry (a, b) for (y_i, y_{i+1})
};

/// Log-space forward–backward with max-shifted log-sum-exp.
Marginals forward_backward(const ChainScores& scores);

}  // namespace proxmkl
