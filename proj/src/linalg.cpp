#include "etse/linalg.hpp"

#include <algorithm>

#include "etse/errors.hpp"

namespace etse {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_square(const Matrix& m) { return m.rows() == m.cols(); }

bool is_symmetric(const Matrix& m, double tol) {
  if (!is_square(m)) return false;
  if (m.size() == 0) return true;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const Matrix& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix symmetric_sqrt(const Matrix& m) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
  const Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

void require_psd(const Matrix& m, const std::string& what) {
  if (!is_square(m)) {
    throw Error(ErrorCode::kDimensionMismatch, what + " is not square");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::kNotPositiveSemidefinite,
                what + " has non-finite entries");
  }
  if (!is_symmetric(m)) {
    throw Error(ErrorCode::kNotPositiveSemidefinite, what + " is not symmetric");
  }
  if (min_eigenvalue(m) < -kEigenvalueTolerance) {
    throw Error(ErrorCode::kNotPositiveSemidefinite,
                what + " is not positive semidefinite");
  }
}

void require_pd(const Matrix& m, const std::string& what) {
  if (!is_square(m)) {
    throw Error(ErrorCode::kDimensionMismatch, what + " is not square");
  }
  if (!m.allFinite() || !is_symmetric(m) || m.size() == 0 ||
      min_eigenvalue(m) <= 0.0) {
    throw Error(ErrorCode::kNotPositiveDefinite,
                what + " is not positive definite");
  }
}

Eigen::LLT<Matrix> factor_spd(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kInternal,
                std::string("cholesky factorization failed for ") + what);
  }
  return llt;
}

}  // namespace etse
