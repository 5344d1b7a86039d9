#pragma once

// Small dense helpers shared by the model, trigger and estimator code. All
// systems handled here are tiny (state and output dimension around ten at
// most) so everything is dynamic-size Eigen.

#include <Eigen/Dense>

#include <string>

namespace etse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kEigenvalueTolerance = 1e-10;

/// (M + M') / 2
Matrix symmetrize(const Matrix& m);

bool is_square(const Matrix& m);
bool is_symmetric(const Matrix& m, double tol = kSymmetryTolerance);
double min_eigenvalue(const Matrix& symmetric);

/// Symmetric square root S with S*S' = M, via eigendecomposition with negative
/// eigenvalues clamped to zero. Accepts singular PSD input.
Matrix symmetric_sqrt(const Matrix& m);

/// Throws kDimensionMismatch / kNotPositiveSemidefinite naming `what`.
void require_psd(const Matrix& m, const std::string& what);
/// Throws kDimensionMismatch / kNotPositiveDefinite naming `what`.
void require_pd(const Matrix& m, const std::string& what);

/// Cholesky of a symmetric positive definite matrix; throws kInternal when the
/// factorization fails.
Eigen::LLT<Matrix> factor_spd(const Matrix& m, const char* what);

}  // namespace etse
