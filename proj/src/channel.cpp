#include "etse/channel.hpp"

#include "etse/errors.hpp"

namespace etse {

ChannelParams::ChannelParams(double drop_probability) : p_(drop_probability) {
  if (!(p_ >= 0.0 && p_ <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "drop probability outside [0,1]");
  }
}

Transmission transmit(int s, const Vector& y, const ChannelParams& params,
                      RandomSource& rng) {
  if (s != 0 && s != 1) {
    throw Error(ErrorCode::kInvalidArgument, "transmit decision must be 0 or 1");
  }
  Transmission t;
  // uniform() < 1, so p = 1 always drops and p = 0 never does.
  t.gamma = rng.uniform() >= params.drop_probability() ? 1 : 0;
  if (s == 1 && t.gamma == 1) {
    t.observation = PacketObservation::received(y);
  }
  return t;
}

}  // namespace etse
