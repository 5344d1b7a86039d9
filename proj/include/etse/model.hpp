#pragma once

#include <cstddef>
#include <vector>

#include "etse/linalg.hpp"
#include "etse/random.hpp"

namespace etse {

/// Linear time-invariant plant
///
///   x_{k+1} = A x_k + w_k,   w_k ~ N(0, Q)
///   y_k     = C x_k + v_k,   v_k ~ N(0, R)
///
/// with x_0 ~ N(0, Sigma0). Q and Sigma0 may be singular; R must be positive
/// definite.
struct LinearGaussianModel {
  Matrix A;
  Matrix C;
  Matrix Q;
  Matrix R;
  Matrix Sigma0;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index output_dim() const { return C.rows(); }
};

/// Throws Error(kDimensionMismatch) on inconsistent shapes and
/// Error(kNotPositiveSemidefinite / kNotPositiveDefinite) naming the offending
/// matrix otherwise.
void validate_model(const LinearGaussianModel& model);

/// As validate_model, but R need only be positive semidefinite: noise-free
/// measurements can be simulated, just not filtered.
void validate_simulation_model(const LinearGaussianModel& model);

/// The two-state plant used throughout the experiments:
/// A = diag(0.8, 0.95), C = [1 1], Q = Sigma0 = I, R = 1.
LinearGaussianModel reference_model();

struct Gaussian {
  Vector mean;
  Matrix covariance;
};

/// Symmetric within 1e-10 and no eigenvalue below -1e-10.
bool is_valid_gaussian(const Gaussian& g);

/// Draws from N(mean, cov) as mean + S z with S the clamped symmetric square
/// root of cov, so singular covariances are fine.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Matrix& covariance);

  Vector draw(RandomSource& rng) const;
  Vector draw(RandomSource& rng, const Vector& mean) const {
    return mean + draw(rng);
  }

 private:
  Matrix sqrt_;
};

/// States x_0..x_K and measurements y_0..y_K.
struct Trajectory {
  std::vector<Vector> states;
  std::vector<Vector> measurements;

  std::size_t size() const { return states.size(); }
};

/// Simulates horizon+1 steps. Draw order per step is v_k then w_k, after an
/// initial x_0 draw, all from `rng`.
Trajectory simulate_trajectory(const LinearGaussianModel& model, int horizon,
                               RandomSource& rng);

/// Same as simulate_trajectory but starting from a fixed x_0.
Trajectory simulate_trajectory_from(const LinearGaussianModel& model,
                                    const Vector& x0, int horizon,
                                    RandomSource& rng);

}  // namespace etse
