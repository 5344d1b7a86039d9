#pragma once

#include <optional>

#include "etse/linalg.hpp"
#include "etse/random.hpp"

namespace etse {

/// What the estimator sees at one step: whether a packet arrived (s * gamma)
/// and, only if it did, the measurement it carried.
struct PacketObservation {
  int arrived = 0;
  std::optional<Vector> payload;

  static PacketObservation none() { return {}; }
  static PacketObservation received(Vector y) { return {1, std::move(y)}; }

  /// payload present iff arrived == 1, arrived in {0, 1}.
  bool consistent() const {
    return (arrived == 0 && !payload) || (arrived == 1 && payload.has_value());
  }
};

/// Memoryless erasure channel; each packet is lost with probability p.
class ChannelParams {
 public:
  explicit ChannelParams(double drop_probability);

  double drop_probability() const { return p_; }

 private:
  double p_;
};

struct Transmission {
  PacketObservation observation;
  int gamma = 1;
};

/// gamma is drawn on every call, including s = 0, so the channel stream stays
/// aligned across runs that differ only in trigger decisions.
Transmission transmit(int s, const Vector& y, const ChannelParams& params,
                      RandomSource& rng);

}  // namespace etse
