#include <doctest.h>

#include <cmath>
#include <vector>

#include "episodes.hpp"
#include "etse/errors.hpp"
#include "etse/mixture.hpp"

using namespace etse;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }
Vector v1(double v) { return Vector::Constant(1, v); }

const TriggerParams kOpenUnit(SchedulerKind::kOpenLoop, m1(1.0));

MixtureEstimate scalar_mixture(std::vector<double> weights,
                               std::vector<double> means,
                               std::vector<double> variances) {
  MixtureEstimate mix;
  mix.stage = Stage::kPosterior;
  mix.index_bits = 2;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    mix.hypotheses.push_back({j, v1(means[j]), m1(variances[j]), weights[j]});
  }
  return mix;
}

bool covariances_valid(const MixtureEstimate& mix) {
  for (const auto& h : mix.hypotheses) {
    if (!is_symmetric(h.covariance) || min_eigenvalue(h.covariance) < -1e-9) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("initial mixture splits on the first channel bit") {
  const MixtureEstimate mix = init_mixture(reference_model(), 0.3);
  REQUIRE(mix.size() == 2);
  CHECK(mix.hypotheses[0].index == 0);
  CHECK(mix.hypotheses[0].weight == 0.3);
  CHECK(mix.hypotheses[1].index == 1);
  CHECK(mix.hypotheses[1].weight == 0.7);
  for (const auto& h : mix.hypotheses) {
    CHECK(h.mean.isZero(0.0));
    CHECK(h.covariance == reference_model().Sigma0);
  }
  CHECK(init_mixture(reference_model(), 0.0).hypotheses[0].weight == 0.0);
  CHECK(init_mixture(reference_model(), 0.0).hypotheses[1].weight == 1.0);
  CHECK(init_mixture(reference_model(), 1.0).hypotheses[0].weight == 1.0);
  CHECK(init_mixture(reference_model(), 1.0).hypotheses[1].weight == 0.0);
  CHECK_THROWS_AS(init_mixture(reference_model(), 1.5), Error);
}

TEST_CASE("time update splits each hypothesis by the drop rate") {
  const LinearGaussianModel model{m1(1.0), m1(1.0), m1(0.0), m1(1.0), m1(1.0)};
  MixtureEstimate post;
  post.stage = Stage::kPosterior;
  post.index_bits = 1;
  post.hypotheses = {{1, v1(0.0), m1(1.0), 1.0}};
  const MixtureEstimate next = time_update(post, model, 0.3);
  REQUIRE(next.size() == 2);
  CHECK(next.index_bits == 2);
  CHECK(next.hypotheses[0].index == 1);
  CHECK(next.hypotheses[1].index == 3);
  CHECK(next.hypotheses[0].weight == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(next.hypotheses[1].weight == doctest::Approx(0.7).epsilon(1e-15));
  for (const auto& h : next.hypotheses) {
    CHECK(h.mean(0) == 0.0);
    CHECK(h.covariance(0, 0) == 1.0);
  }
}

TEST_CASE("time update requires a normalized posterior") {
  MixtureEstimate post = scalar_mixture({0.5, 0.2}, {0, 0}, {1, 1});
  CHECK_THROWS_AS(time_update(post, reference_model(), 0.3), Error);
  post.stage = Stage::kPredicted;
  post.hypotheses[1].weight = 0.5;
  CHECK_THROWS_AS(time_update(post, reference_model(), 0.3), Error);
}

TEST_CASE("hold with a zero-weight drop branch keeps weights exact") {
  const LinearGaussianModel model = reference_model();
  const MixtureEstimate pred = init_mixture(model, 0.0);
  const MixtureEstimate post =
      measurement_update(pred, PacketObservation::none(), model, kOpenUnit, {});
  CHECK(post.hypotheses[0].weight == 0.0);
  CHECK(post.hypotheses[1].weight == 1.0);
}

TEST_CASE("arrival removes every channel-failure hypothesis") {
  const LinearGaussianModel model = reference_model();
  const MixtureEstimate pred = init_mixture(model, 0.4);
  const MixtureEstimate post = measurement_update(
      pred, PacketObservation::received(v1(1.2)), model, kOpenUnit, {});
  CHECK(post.hypotheses[0].weight == 0.0);
  CHECK(post.hypotheses[1].weight == 1.0);
}

TEST_CASE("a hold shifts weight toward the channel-failure hypothesis") {
  const LinearGaussianModel model = reference_model();
  const MixtureEstimate pred = init_mixture(model, 0.4);
  const MixtureEstimate post =
      measurement_update(pred, PacketObservation::none(), model, kOpenUnit, {});
  // Hold likelihood on the delivering branch is E[phi] for y ~ N(0, 3).
  const double hold = 1.0 / std::sqrt(4.0);
  const double expected = 0.4 / (0.4 + 0.6 * hold);
  CHECK(post.hypotheses[0].weight == doctest::Approx(expected).epsilon(1e-14));
  CHECK(is_normalized(post));
}

TEST_CASE("moments of a mixture") {
  const MixtureEstimate pair = scalar_mixture({0.5, 0.5}, {1, -1}, {1, 1});
  const EstimateSummary s = mixture_moments(pair);
  CHECK(s.x_hat(0) == doctest::Approx(0.0));
  CHECK(s.P(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  const EstimateSummary t =
      mixture_moments(scalar_mixture({0.3, 0.7}, {0, 0}, {1, 2}));
  CHECK(t.x_hat(0) == 0.0);
  CHECK(t.P(0, 0) == doctest::Approx(1.7).epsilon(1e-15));
  MixtureEstimate one = scalar_mixture({1.0}, {0.25}, {3.0});
  const EstimateSummary u = mixture_moments(one);
  CHECK(u.x_hat(0) == 0.25);
  CHECK(u.P(0, 0) == 3.0);
}

TEST_CASE("merging by the newest channel bits") {
  MixtureEstimate mix;
  mix.stage = Stage::kPosterior;
  mix.index_bits = 2;
  // Indices 2 and 3 share the newest bit (1); index 0 has newest bit 0.
  mix.hypotheses = {{0, v1(5.0), m1(1.0), 0.0},
                    {2, v1(1.0), m1(1.0), 0.5},
                    {3, v1(-1.0), m1(1.0), 0.5}};
  const MixtureEstimate merged = merge_recent_bits(mix, 1);
  REQUIRE(merged.size() == 2);
  CHECK(merged.index_bits == 1);
  CHECK(merged.hypotheses[0].index == 0);
  CHECK(merged.hypotheses[0].weight == 0.0);
  CHECK(merged.hypotheses[0].mean(0) == 5.0);
  CHECK(merged.hypotheses[1].index == 1);
  CHECK(merged.hypotheses[1].weight == 1.0);
  CHECK(merged.hypotheses[1].mean(0) == doctest::Approx(0.0));
  CHECK(merged.hypotheses[1].covariance(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(merge_recent_bits(mix, 2).size() == 3);
  CHECK_THROWS_AS(merge_recent_bits(mix, 0), Error);
}

TEST_CASE("greedy reduction merges the closest pair") {
  const MixtureEstimate mix =
      scalar_mixture({0.5, 0.25, 0.25}, {0, 1, 1.05}, {1, 1, 1});
  const MixtureEstimate reduced = reduce_mixture(mix, 2);
  REQUIRE(reduced.size() == 2);
  CHECK(reduced.hypotheses[0].mean(0) == 0.0);
  CHECK(reduced.hypotheses[0].weight == 0.5);
  CHECK(reduced.hypotheses[1].mean(0) == doctest::Approx(1.025).epsilon(1e-15));
  CHECK(reduced.hypotheses[1].weight == 0.5);
  CHECK(reduced.index_bits == 1);

  const MixtureEstimate same = reduce_mixture(mix, 3);
  CHECK(same.size() == 3);
  CHECK(same.hypotheses[2].mean == mix.hypotheses[2].mean);

  const MixtureEstimate one = reduce_mixture(mix, 1);
  REQUIRE(one.size() == 1);
  const EstimateSummary s = mixture_moments(mix);
  CHECK(one.hypotheses[0].mean == s.x_hat);
  CHECK(one.hypotheses[0].covariance == s.P);
  CHECK_THROWS_AS(reduce_mixture(mix, 0), Error);
}

TEST_CASE("exact mixture invariants along random episodes") {
  RandomSource rng(101);
  for (int episode = 0; episode < 20; ++episode) {
    const Eigen::Index m = 1 + episode % 2;
    const LinearGaussianModel model = testing::random_model(rng, 2, m);
    const TriggerParams trigger(
        episode % 3 == 0 ? SchedulerKind::kClosedLoop : SchedulerKind::kOpenLoop,
        testing::random_spd(rng, m, 0.5, 0.3));
    const double p = rng.uniform();
    const auto run = testing::run_exact_episode(model, trigger, p, 7, rng);
    for (std::size_t k = 0; k < run.steps.size(); ++k) {
      const MixtureEstimate& post = run.steps[k].state;
      CHECK(post.size() == (std::size_t{1} << (k + 1)));
      CHECK(post.index_bits == static_cast<int>(k) + 1);
      CHECK(is_normalized(post, 1e-12));
      CHECK(covariances_valid(post));
      CHECK(min_eigenvalue(run.steps[k].posterior.P) >= -1e-9);
    }
  }
}

TEST_CASE("drop-rate endpoints concentrate the weight on one sequence") {
  RandomSource rng(7);
  const LinearGaussianModel model = reference_model();
  for (double p : {0.0, 1.0}) {
    const auto run = testing::run_exact_episode(model, kOpenUnit, p, 6, rng);
    const MixtureEstimate& post = run.steps.back().state;
    const HypothesisIndex all_ones = (HypothesisIndex{1} << post.index_bits) - 1;
    const HypothesisIndex survivor = p == 0.0 ? all_ones : 0;
    for (const auto& h : post.hypotheses) {
      CHECK(h.weight == (h.index == survivor ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("horizon cap stops exact growth") {
  MixtureOptions options;
  options.horizon_cap = 3;
  const LinearGaussianModel model = reference_model();
  std::optional<MixtureEstimate> state;
  for (int k = 0; k <= 3; ++k) {
    state = exact_step(state, PacketObservation::none(), model, kOpenUnit, 0.5,
                       std::nullopt, options)
                .state;
  }
  try {
    exact_step(state, PacketObservation::none(), model, kOpenUnit, 0.5,
               std::nullopt, options);
    FAIL("expected horizon cap error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kHorizonCap);
  }
}

TEST_CASE("an impossible observation is reported instead of dividing by zero") {
  const LinearGaussianModel model = reference_model();
  const MixtureEstimate pred = init_mixture(model, 1.0);
  try {
    measurement_update(pred, PacketObservation::received(v1(0.0)), model,
                       kOpenUnit, {});
    FAIL("expected underflow error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kWeightUnderflow);
  }
}

TEST_CASE("GPB with enough memory reproduces the exact filter") {
  RandomSource rng(9);
  const LinearGaussianModel model = reference_model();
  const auto run = testing::run_exact_episode(model, kOpenUnit, 0.4, 6, rng);
  std::optional<MixtureEstimate> gpb;
  for (std::size_t k = 0; k < run.steps.size(); ++k) {
    const StepResult r = gpb_step(gpb, run.record.observations[k], model,
                                  kOpenUnit, 0.4, 7, std::nullopt, {});
    gpb = r.state;
    CHECK((r.posterior.x_hat - run.steps[k].posterior.x_hat).norm() <= 1e-10);
    CHECK((r.posterior.P - run.steps[k].posterior.P).norm() <= 1e-10);
  }
}

TEST_CASE("exact posterior agrees with a particle filter") {
  const LinearGaussianModel model = reference_model();
  const double p = 0.5;
  constexpr int kHorizon = 3;
  RandomSource episode_rng(1);
  const auto run =
      testing::run_exact_episode(model, kOpenUnit, p, kHorizon, episode_rng);
  int arrivals = 0;
  for (const auto& obs : run.record.observations) arrivals += obs.arrived;
  REQUIRE(arrivals > 0);

  constexpr int kParticles = 1000000;
  RandomSource rng(77);
  const GaussianSampler init(model.Sigma0);
  const GaussianSampler process(model.Q);
  const double r_std = std::sqrt(model.R(0, 0));
  std::vector<Vector> particles(kParticles);
  std::vector<double> weights(kParticles, 1.0);
  for (int i = 0; i < kParticles; ++i) {
    Vector x = init.draw(rng);
    double w = 1.0;
    for (int k = 0; k <= kHorizon && w > 0.0; ++k) {
      const bool gamma = rng.uniform() >= p;
      const double noise = r_std * rng.standard_normal();
      const PacketObservation& obs = run.record.observations[k];
      const double cx = (model.C * x)(0);
      if (obs.arrived == 1) {
        const double d = (*obs.payload)(0) - cx;
        w *= gamma ? std::exp(-0.5 * d * d / model.R(0, 0)) : 0.0;
      } else if (gamma) {
        const double y = cx + noise;
        w *= std::exp(-0.5 * y * y);
      }
      if (k < kHorizon) x = model.A * x + process.draw(rng);
    }
    particles[i] = x;
    weights[i] = w;
  }
  double total = 0.0;
  Vector mean = Vector::Zero(2);
  for (int i = 0; i < kParticles; ++i) {
    total += weights[i];
    mean += weights[i] * particles[i];
  }
  REQUIRE(total > 0.0);
  mean /= total;
  Matrix cov = Matrix::Zero(2, 2);
  for (int i = 0; i < kParticles; ++i) {
    const Vector d = particles[i] - mean;
    cov += weights[i] * d * d.transpose();
  }
  cov /= total;
  // Delta-method standard errors of the self-normalised estimates.
  Vector se_mean = Vector::Zero(2);
  Matrix se_cov = Matrix::Zero(2, 2);
  for (int i = 0; i < kParticles; ++i) {
    const Vector d = particles[i] - mean;
    const double w2 = weights[i] * weights[i];
    se_mean += w2 * d.cwiseAbs2();
    const Matrix dev = d * d.transpose() - cov;
    se_cov += w2 * dev.cwiseAbs2();
  }
  se_mean = se_mean.cwiseSqrt() / total;
  se_cov = se_cov.cwiseSqrt() / total;

  const EstimateSummary& exact = run.steps.back().posterior;
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(exact.x_hat(i) - mean(i)) <= 3 * se_mean(i));
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(exact.P(i, j) - cov(i, j)) <= 3 * se_cov(i, j));
    }
  }
}
