#include "etse/model.hpp"

#include <string>

#include "etse/errors.hpp"

namespace etse {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(name) + " has shape " + shape(m) + ", expected " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void check_model(const LinearGaussianModel& model, bool need_pd_noise) {
  const Eigen::Index n = model.A.rows();
  const Eigen::Index m = model.C.rows();
  if (n == 0) throw Error(ErrorCode::kDimensionMismatch, "A is empty");
  if (m == 0) throw Error(ErrorCode::kDimensionMismatch, "C is empty");
  require_shape(model.A, n, n, "A");
  require_shape(model.C, m, n, "C");
  require_shape(model.Q, n, n, "Q");
  require_shape(model.R, m, m, "R");
  require_shape(model.Sigma0, n, n, "Sigma0");
  if (!model.A.allFinite() || !model.C.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "A and C must be finite");
  }
  require_psd(model.Q, "Q");
  require_psd(model.Sigma0, "Sigma0");
  if (need_pd_noise) {
    require_pd(model.R, "R");
  } else {
    require_psd(model.R, "R");
  }
}

}  // namespace

void validate_model(const LinearGaussianModel& model) { check_model(model, true); }

void validate_simulation_model(const LinearGaussianModel& model) {
  check_model(model, false);
}

LinearGaussianModel reference_model() {
  LinearGaussianModel model;
  model.A = Eigen::Vector2d(0.8, 0.95).asDiagonal();
  model.C = Eigen::RowVector2d(1.0, 1.0);
  model.Q = Matrix::Identity(2, 2);
  model.R = Matrix::Identity(1, 1);
  model.Sigma0 = Matrix::Identity(2, 2);
  return model;
}

bool is_valid_gaussian(const Gaussian& g) {
  if (g.covariance.rows() != g.mean.size() || !is_square(g.covariance)) {
    return false;
  }
  return is_symmetric(g.covariance) &&
         min_eigenvalue(g.covariance) >= -kEigenvalueTolerance;
}

GaussianSampler::GaussianSampler(const Matrix& covariance)
    : sqrt_(symmetric_sqrt(covariance)) {}

Vector GaussianSampler::draw(RandomSource& rng) const {
  return sqrt_ * rng.standard_normal(sqrt_.rows());
}

Trajectory simulate_trajectory_from(const LinearGaussianModel& model,
                                    const Vector& x0, int horizon,
                                    RandomSource& rng) {
  validate_simulation_model(model);
  if (horizon < 0) {
    throw Error(ErrorCode::kOutOfRange, "horizon must be nonnegative");
  }
  if (x0.size() != model.state_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "initial state has wrong size");
  }
  const GaussianSampler process(model.Q);
  const GaussianSampler measurement(model.R);

  Trajectory traj;
  traj.states.reserve(horizon + 1);
  traj.measurements.reserve(horizon + 1);
  Vector x = x0;
  for (int k = 0; k <= horizon; ++k) {
    traj.measurements.push_back(model.C * x + measurement.draw(rng));
    traj.states.push_back(x);
    x = model.A * x + process.draw(rng);
  }
  return traj;
}

Trajectory simulate_trajectory(const LinearGaussianModel& model, int horizon,
                               RandomSource& rng) {
  validate_simulation_model(model);
  const Vector x0 = GaussianSampler(model.Sigma0).draw(rng);
  return simulate_trajectory_from(model, x0, horizon, rng);
}

}  // namespace etse
