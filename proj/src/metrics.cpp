#include "tsdr/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tsdr/error.hpp"

namespace tsdr {

SubspaceBasis::SubspaceBasis(Matrix columns) : columns_(std::move(columns)) {
  if (columns_.cols() == 0 || columns_.cols() > columns_.rows()) {
    throw Error(ErrorCode::InvalidArgument, "subspace basis needs 1 <= d <= p columns");
  }
  Matrix scaled = columns_;
  for (Eigen::Index k = 0; k < scaled.cols(); ++k) {
    const double norm = scaled.col(k).norm();
    if (!(norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "zero column in subspace basis");
    scaled.col(k) /= norm;
  }
  Eigen::JacobiSVD<Matrix> svd(scaled);
  if (!(svd.singularValues().minCoeff() > 1e-10)) {
    throw Error(ErrorCode::InvalidArgument, "subspace basis is rank deficient");
  }
}

Matrix SubspaceBasis::orthonormal() const {
  Eigen::ColPivHouseholderQR<Matrix> qr(columns_);
  return qr.householderQ() * Matrix::Identity(columns_.rows(), columns_.cols());
}

Vector squared_canonical_cosines(const SubspaceBasis& estimate, const SubspaceBasis& truth) {
  if (estimate.ambient_dim() != truth.ambient_dim() || estimate.dim() != truth.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "subspaces differ in ambient dimension or rank");
  }
  const Matrix e = estimate.orthonormal();
  const Matrix t = truth.orthonormal();
  const Matrix cross = e.transpose() * t;
  const Matrix m = cross * cross.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
  Vector phi2 = eig.eigenvalues().reverse();
  return phi2.cwiseMax(0.0).cwiseMin(1.0);
}

double vcc(const SubspaceBasis& estimate, const SubspaceBasis& truth) {
  return std::sqrt(squared_canonical_cosines(estimate, truth).prod());
}

double tcc(const SubspaceBasis& estimate, const SubspaceBasis& truth) {
  return std::sqrt(squared_canonical_cosines(estimate, truth).mean());
}

}  // namespace tsdr
