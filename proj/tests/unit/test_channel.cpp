#include <doctest.h>

#include <cmath>

#include "etse/channel.hpp"
#include "etse/errors.hpp"

using namespace etse;

TEST_CASE("held packets never arrive") {
  RandomSource rng(1);
  for (double p : {0.0, 0.3, 1.0}) {
    const ChannelParams channel(p);
    for (int i = 0; i < 100; ++i) {
      const Transmission tx = transmit(0, Vector::Ones(1), channel, rng);
      CHECK(tx.observation.arrived == 0);
      CHECK_FALSE(tx.observation.payload.has_value());
    }
  }
}

TEST_CASE("lossless channel delivers every sent packet") {
  RandomSource rng(2);
  const ChannelParams channel(0.0);
  for (int i = 0; i < 100; ++i) {
    const Vector y = Vector::Constant(1, i);
    const Transmission tx = transmit(1, y, channel, rng);
    CHECK(tx.gamma == 1);
    REQUIRE(tx.observation.arrived == 1);
    CHECK(*tx.observation.payload == y);
  }
}

TEST_CASE("dead channel delivers nothing") {
  RandomSource rng(3);
  const ChannelParams channel(1.0);
  for (int i = 0; i < 100; ++i) {
    const Transmission tx = transmit(1, Vector::Ones(1), channel, rng);
    CHECK(tx.gamma == 0);
    CHECK(tx.observation.arrived == 0);
  }
}

TEST_CASE("drop frequency matches p and arrival implies send and success") {
  RandomSource rng(4);
  const ChannelParams channel(0.3);
  constexpr int kDraws = 100000;
  int drops = 0;
  for (int i = 0; i < kDraws; ++i) {
    const int s = i % 2;
    const Transmission tx = transmit(s, Vector::Ones(1), channel, rng);
    drops += tx.gamma == 0 ? 1 : 0;
    CHECK(tx.observation.arrived <= s);
    CHECK(tx.observation.arrived <= tx.gamma);
    CHECK(tx.observation.arrived == s * tx.gamma);
    CHECK(tx.observation.consistent());
  }
  const double se = std::sqrt(0.3 * 0.7 / kDraws);
  CHECK(std::abs(static_cast<double>(drops) / kDraws - 0.3) < 4 * se);
}

TEST_CASE("drop probability must lie in the unit interval") {
  CHECK_THROWS_AS(ChannelParams(-0.1), Error);
  CHECK_THROWS_AS(ChannelParams(1.1), Error);
  CHECK_THROWS_AS(ChannelParams(std::nan("")), Error);
}
