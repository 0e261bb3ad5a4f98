#pragma once

#include "tsdr/linalg.hpp"

namespace tsdr {

/// p x d matrix of full column rank spanning a subspace.
class SubspaceBasis {
 public:
  explicit SubspaceBasis(Matrix columns);

  const Matrix& columns() const noexcept { return columns_; }
  Eigen::Index ambient_dim() const noexcept { return columns_.rows(); }
  Eigen::Index dim() const noexcept { return columns_.cols(); }
  /// Orthonormal basis of the same span.
  Matrix orthonormal() const;

 private:
  Matrix columns_;
};

/// Squared canonical cosines phi_l^2 between the two spans, clipped to [0, 1]
/// and sorted in decreasing order.
Vector squared_canonical_cosines(const SubspaceBasis& estimate, const SubspaceBasis& truth);

/// Vector correlation coefficient (prod phi_l^2)^{1/2}.
double vcc(const SubspaceBasis& estimate, const SubspaceBasis& truth);
/// Trace correlation coefficient (mean phi_l^2)^{1/2}.
double tcc(const SubspaceBasis& estimate, const SubspaceBasis& truth);

inline double vcc(const Matrix& estimate, const Matrix& truth) {
  return vcc(SubspaceBasis(estimate), SubspaceBasis(truth));
}
inline double tcc(const Matrix& estimate, const Matrix& truth) {
  return tcc(SubspaceBasis(estimate), SubspaceBasis(truth));
}

}  // namespace tsdr
