#include <doctest.h>

#include <cmath>
#include <vector>

#include "etse/errors.hpp"
#include "etse/kernels.hpp"
#include "oracles.hpp"

using namespace etse;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }
Vector v1(double v) { return Vector::Constant(1, v); }

LinearGaussianModel scalar_model(double a, double c, double q, double r) {
  return {m1(a), m1(c), m1(q), m1(r), m1(1.0)};
}

const TriggerParams kOpenUnit(SchedulerKind::kOpenLoop, m1(1.0));
const TriggerParams kClosedUnit(SchedulerKind::kClosedLoop, m1(1.0));

}  // namespace

TEST_CASE("prediction of the reference plant from identity covariance") {
  const LinearGaussianModel model = reference_model();
  const Gaussian g = predict({Vector::Zero(2), Matrix::Identity(2, 2)}, model);
  CHECK(g.mean.isZero(0.0));
  CHECK(g.covariance(0, 0) == doctest::Approx(1.64).epsilon(1e-15));
  CHECK(g.covariance(1, 1) == doctest::Approx(1.9025).epsilon(1e-15));
  CHECK(g.covariance(0, 1) == 0.0);
}

TEST_CASE("arrived packet gives the ordinary Kalman update") {
  const LinearGaussianModel model = scalar_model(1, 1, 0, 1);
  const double m = 0.4;
  const double y = 2.0;
  const ReceiveBranch b = update_receive_branch(
      {v1(m), m1(1.0)}, PacketObservation::received(v1(y)), model, kOpenUnit,
      Vector());
  CHECK(b.posterior.covariance(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b.posterior.mean(0) == doctest::Approx(0.5 * m + 0.5 * y).epsilon(1e-15));
  // log N(y; m, 2)
  const double expected = -0.5 * (y - m) * (y - m) / 2.0 - 0.5 * std::log(2 * M_PI * 2.0);
  CHECK(b.log_evidence == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("held packet on a delivering channel uses R plus the inverse weight") {
  const LinearGaussianModel model = scalar_model(1, 1, 0, 1);
  const double m = 0.9;
  const ReceiveBranch b = update_receive_branch(
      {v1(m), m1(1.0)}, PacketObservation::none(), model, kOpenUnit, Vector());
  CHECK(b.posterior.covariance(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(b.posterior.mean(0) == doctest::Approx(2.0 / 3.0 * m).epsilon(1e-15));
  // Gain sanity: a hold is less informative than an arrival.
  const ReceiveBranch arrived = update_receive_branch(
      {v1(m), m1(1.0)}, PacketObservation::received(v1(0.0)), model, kOpenUnit,
      Vector());
  CHECK(b.posterior.covariance(0, 0) > arrived.posterior.covariance(0, 0));
}

TEST_CASE("closed-loop hold pulls the estimate toward the fed-back output") {
  const LinearGaussianModel model = scalar_model(1, 1, 0, 1);
  const double m = 0.9;
  const double ref = 0.3;
  const ReceiveBranch b = update_receive_branch(
      {v1(m), m1(1.0)}, PacketObservation::none(), model, kClosedUnit, v1(ref));
  CHECK(b.posterior.mean(0) == doctest::Approx(m + (ref - m) / 3.0).epsilon(1e-15));
  CHECK(b.posterior.covariance(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("channel-failure branch likelihood") {
  const LinearGaussianModel model = reference_model();
  const Vector m = Vector::Zero(2);
  const Matrix P = Matrix::Identity(2, 2);
  CHECK(hypothesis_likelihood(1, m, P, model, kOpenUnit, m, 0) == 0.0);
  CHECK(hypothesis_likelihood(0, m, P, model, kOpenUnit, m, 0) == 1.0);
}

TEST_CASE("delivering branch likelihood for d = 0, M = 1, W = 1") {
  // C P C' + R = 0.5 + 0.5 = 1.
  const LinearGaussianModel model = scalar_model(1, 1, 0, 0.5);
  const Vector m = v1(0.0);
  const Matrix P = m1(0.5);
  const double hold = hypothesis_likelihood(0, m, P, model, kOpenUnit, m, 1);
  const double send = hypothesis_likelihood(1, m, P, model, kOpenUnit, m, 1);
  const double numeric =
      testing::quadrature_hold_probability(m1(1.0), v1(0.0), v1(0.0), m1(1.0));
  CHECK(hold == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(hold == doctest::Approx(numeric).epsilon(1e-10));
  CHECK(send == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(std::abs(hold + send - 1.0) <= 1e-12);
}

TEST_CASE("open and closed loop coincide at a zero predicted mean") {
  RandomSource rng(31);
  const LinearGaussianModel model = testing::random_model(rng, 2, 2);
  const Matrix W = testing::random_spd(rng, 2, 0.7, 0.2);
  const TriggerParams open(SchedulerKind::kOpenLoop, W);
  const TriggerParams closed(SchedulerKind::kClosedLoop, W);
  const Vector m = rng.standard_normal(2);
  const Vector zero = Vector::Zero(2);
  const Matrix P = testing::random_spd(rng, 2, 0.5, 0.1);
  for (int s : {0, 1}) {
    CHECK(hypothesis_likelihood(s, m, P, model, open, zero, 1) ==
          hypothesis_likelihood(s, m, P, model, closed, zero, 1));
  }
}

TEST_CASE("oracle and reference-scheme steps") {
  const LinearGaussianModel model = scalar_model(1, 1, 0, 1);
  const Gaussian prior{v1(0.7), m1(1.0)};
  const Gaussian lost = oracle_step(prior, PacketObservation::none(), 0, model,
                                    kOpenUnit, Vector());
  CHECK(lost.mean == prior.mean);
  CHECK(lost.covariance == prior.covariance);
  const Gaussian arrived = oracle_step(prior, PacketObservation::received(v1(1.0)),
                                       1, model, kOpenUnit, Vector());
  CHECK(arrived.covariance(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  const Gaussian held = oracle_step(prior, PacketObservation::none(), 1, model,
                                    kOpenUnit, Vector());
  CHECK(held.covariance(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(oracle_step(prior, PacketObservation::received(v1(1.0)), 0,
                              model, kOpenUnit, Vector()),
                  Error);

  const Gaussian olset_hold =
      olset_step(prior, PacketObservation::none(), model, kOpenUnit, Vector());
  CHECK(olset_hold.covariance(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const Gaussian olset_arrived = olset_step(
      prior, PacketObservation::received(v1(1.0)), model, kOpenUnit, Vector());
  CHECK(olset_arrived.mean == arrived.mean);
  CHECK(olset_arrived.covariance == arrived.covariance);
}

TEST_CASE("moment matching") {
  const std::vector<WeightedGaussian> single{{0.4, {v1(3.0), m1(2.0)}}};
  const WeightedGaussian same = merge_moment_match(single);
  CHECK(same.gaussian.mean(0) == 3.0);
  CHECK(same.gaussian.covariance(0, 0) == 2.0);

  const std::vector<WeightedGaussian> pair{{0.5, {v1(1.0), m1(1.0)}},
                                           {0.5, {v1(-1.0), m1(1.0)}}};
  const WeightedGaussian merged = merge_moment_match(pair);
  CHECK(merged.gaussian.mean(0) == doctest::Approx(0.0));
  CHECK(merged.gaussian.covariance(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(merged.weight == 1.0);

  const std::vector<WeightedGaussian> spread{{0.3, {v1(0.0), m1(1.0)}},
                                             {0.7, {v1(0.0), m1(2.0)}}};
  CHECK(merge_moment_match(spread).gaussian.covariance(0, 0) ==
        doctest::Approx(1.7).epsilon(1e-15));

  const std::vector<WeightedGaussian> skewed{{0.25, {v1(0.0), m1(4.0)}},
                                             {0.75, {v1(0.0), m1(0.0)}}};
  CHECK(merge_moment_match(skewed).gaussian.covariance(0, 0) ==
        doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(merge_moment_match({}), Error);
  const std::vector<WeightedGaussian> zero{{0.0, {v1(0.0), m1(1.0)}},
                                           {0.0, {v1(1.0), m1(1.0)}}};
  CHECK_THROWS_AS(merge_moment_match(zero), Error);
}

TEST_CASE("merge cost vanishes for identical components") {
  const WeightedGaussian a{0.3, {v1(1.0), m1(2.0)}};
  const WeightedGaussian b{0.5, {v1(1.0), m1(2.0)}};
  CHECK(merge_cost(a, b) == doctest::Approx(0.0).epsilon(1e-15));
  const WeightedGaussian c{0.5, {v1(3.0), m1(2.0)}};
  CHECK(merge_cost(a, c) > 0.0);
  CHECK(merge_cost(a, c) == doctest::Approx(merge_cost(c, a)).epsilon(1e-15));
}
