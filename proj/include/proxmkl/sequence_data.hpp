#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "proxmkl/chain.hpp"

namespace proxmkl {

/// Column positions of the tab-separated per-character format. The defaults
/// follow the published OCR letter file: id, letter, next id, word id,
/// position, fold, then the pixels.
struct OcrColumns {
  int id = 0;
  int letter = 1;
  int next_id = 2;
  int word_id = 3;
  int position = 4;
  int fold = 5;
  int first_pixel = 6;
  int num_pixels = -1;  ///< −1: every column from first_pixel on
};

struct SequenceDataset {
  std::vector<ChainInstance> instances;
  int num_labels = 26;
  std::vector<std::string> label_names;  ///< label index → letter

  Index input_dim() const { return instances.empty() ? 0 : instances.front().inputs.cols(); }
  std::size_t num_characters() const;
};

/// Characters are chained into words by next id (−1 ends a word). Labels
/// are letters 'a'..'z' mapped to 0..25; other label strings are indexed in
/// order of first appearance after those. The label count is one past the
/// largest label seen.
///
/// Throws std::runtime_error naming the line on a malformed row, and on a
/// broken chain (dangling or repeated next id, a cycle, characters not
/// reachable from a word start, or inconsistent word ids or folds).
SequenceDataset read_ocr(std::istream& in, const OcrColumns& columns = {});
SequenceDataset load_ocr_dataset(const std::string& path, const OcrColumns& columns = {});

/// Writes instances in the same format, with fresh character ids. Pixel
/// values are written with full precision, so synthetic real-valued inputs
/// survive a round trip.
void write_sequences(std::ostream& out, const SequenceDataset& data);
void save_sequences(const std::string& path, const SequenceDataset& data);

struct FoldSplit {
  std::vector<ChainInstance> train;
  std::vector<ChainInstance> test;
};

/// Trains on fold f and tests on all the others.
FoldSplit split_fold(std::span<const ChainInstance> data, int fold);

std::vector<int> fold_ids(std::span<const ChainInstance> data);

}  // namespace proxmkl
