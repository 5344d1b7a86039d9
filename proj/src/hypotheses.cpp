#include "etse/hypotheses.hpp"

#include <cmath>
#include <string>

#include "etse/errors.hpp"

namespace etse {

namespace {

void require_index(HypothesisIndex i, int k, int bits) {
  if (k < 0 || k > kMaxIndexTime) {
    throw Error(ErrorCode::kOutOfRange,
                "time index " + std::to_string(k) + " outside [0, " +
                    std::to_string(kMaxIndexTime) + "]");
  }
  if (i >> bits != 0) {
    throw Error(ErrorCode::kOutOfRange,
                "hypothesis index " + std::to_string(i) + " exceeds 2^" +
                    std::to_string(bits) + " - 1");
  }
}

}  // namespace

HypothesisIndex parent_index(HypothesisIndex i, int k) {
  require_index(i, k, k + 1);
  const HypothesisIndex top = HypothesisIndex{1} << k;
  return i < top ? i : i - top;
}

int gamma_bit(HypothesisIndex i, int k) {
  require_index(i, k, k + 1);
  return static_cast<int>((i >> k) & 1U);
}

ChildIndices children(HypothesisIndex i, int k_next) {
  require_index(i, k_next, k_next);
  return {i, i + (HypothesisIndex{1} << k_next)};
}

double MixtureEstimate::total_weight() const {
  double total = 0.0;
  for (const auto& h : hypotheses) total += h.weight;
  return total;
}

bool is_normalized(const MixtureEstimate& mix, double tol) {
  if (mix.hypotheses.empty()) return false;
  const Eigen::Index n = mix.hypotheses.front().mean.size();
  for (std::size_t j = 0; j < mix.hypotheses.size(); ++j) {
    const Hypothesis& h = mix.hypotheses[j];
    if (!(h.weight >= 0.0 && h.weight <= 1.0 + tol)) return false;
    if (h.mean.size() != n || h.covariance.rows() != n ||
        h.covariance.cols() != n) {
      return false;
    }
    if (mix.index_bits < 64 && (h.index >> mix.index_bits) != 0) return false;
    if (j > 0 && mix.hypotheses[j - 1].index >= h.index) return false;
  }
  return std::abs(mix.total_weight() - 1.0) <= tol;
}

}  // namespace etse
