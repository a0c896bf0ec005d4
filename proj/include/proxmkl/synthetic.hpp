#pragma once

#include <cstdint>
#include <vector>

#include "proxmkl/mkl.hpp"
#include "proxmkl/sequence_data.hpp"

namespace proxmkl {

struct SyntheticGroupsSpec {
  int num_labels = 3;
  Index groups = 10;
  Index group_dim = 3;
  std::vector<std::size_t> relevant{0, 1};  ///< 0-based group indices
  double noise = 0.0;   ///< std of Gaussian noise added to the planted scores
  double margin = 0.5;  ///< minimum gap between the two best noiseless scores
  std::size_t m = 100;
  Index min_length = 2;
  Index max_length = 5;
  int folds = 1;
  std::uint64_t seed = 0;
};

struct SyntheticGroups {
  SequenceDataset data;
  FeatureLayout layout;   ///< no transitions; one input group per planted group
  GroupedVector planted;  ///< zero outside the relevant groups
};

/// Inputs are standard normal in every group. Position labels are the argmax
/// of the planted emission scores plus noise; positions whose noiseless gap
/// is below the margin are redrawn, so noise = 0 gives data the planted model
/// separates with that margin.
SyntheticGroups gen_synthetic_groups(const SyntheticGroupsSpec& spec);

struct SyntheticMklSpec {
  std::vector<KernelSpec> kernels;
  std::size_t informative = 0;
  Index block_dim = 2;            ///< input columns per kernel
  std::vector<Index> block_dims;  ///< per-kernel override of block_dim
  int num_labels = 3;
  int centers = 8;       ///< expansion points of the labelling function
  double margin = 0.05;  ///< minimum gap between the two best label scores
  std::size_t m = 100;
  Index min_length = 2;
  Index max_length = 4;
  int folds = 1;
  std::uint64_t seed = 0;
};

struct SyntheticMkl {
  SequenceDataset data;
  std::vector<KernelGroup> groups;  ///< kernel k on its own input block
};

/// Each kernel sees its own block of standard normal inputs. Labels are the
/// argmax over c of Σ_j a_cj K(z_j, u), with u the informative kernel's block,
/// random centers z_j and Gaussian a; the other blocks are pure noise.
SyntheticMkl gen_synthetic_mkl(const SyntheticMklSpec& spec);

}  // namespace proxmkl
