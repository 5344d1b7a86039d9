#pragma once

// Channel-sequence hypotheses. Hypothesis i at time k stands for the drop
// sequence (gamma_0, ..., gamma_k) read off the binary expansion of i, bit j
// being gamma_j. Appending gamma_k = 0 keeps the index, appending gamma_k = 1
// adds 2^k.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "etse/linalg.hpp"

namespace etse {

using HypothesisIndex = std::uint64_t;

/// Largest k accepted by the index helpers (indices are 64-bit).
inline constexpr int kMaxIndexTime = 62;

/// Index of the sequence with gamma_k removed: i if i < 2^k, else i - 2^k.
/// Requires 0 <= i <= 2^{k+1} - 1.
HypothesisIndex parent_index(HypothesisIndex i, int k);

/// gamma_k under hypothesis i, i.e. bit k of i.
int gamma_bit(HypothesisIndex i, int k);

struct ChildIndices {
  HypothesisIndex drop;     // gamma_{k_next} = 0
  HypothesisIndex receive;  // gamma_{k_next} = 1
};

/// Requires 0 <= i <= 2^{k_next} - 1.
ChildIndices children(HypothesisIndex i, int k_next);

enum class Stage { kPredicted, kPosterior };

struct Hypothesis {
  HypothesisIndex index = 0;
  Vector mean;
  Matrix covariance;
  double weight = 0.0;
};

/// A finite Gaussian mixture over channel-sequence hypotheses.
///
/// `index_bits` is the number of low bits of each index that carry channel
/// bits; the newest bit (gamma at `time`) is bit index_bits - 1. In exact mode
/// index_bits == time + 1. Approximate estimators shrink it after merging.
struct MixtureEstimate {
  int time = 0;
  Stage stage = Stage::kPredicted;
  int index_bits = 1;
  std::vector<Hypothesis> hypotheses;

  std::size_t size() const { return hypotheses.size(); }
  double total_weight() const;
};

/// Weights in [0,1] summing to one within `tol`, indices strictly increasing
/// and below 2^index_bits, consistent dimensions.
bool is_normalized(const MixtureEstimate& mix, double tol = 1e-12);

}  // namespace etse
