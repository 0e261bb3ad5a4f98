#pragma once

#include <vector>

#include "tsdr/linalg.hpp"

namespace tsdr {

/// Order-respecting partition of the response into slices.
struct SliceAssignment {
  std::vector<int> slice_of;  // 0-based slice index per observation
  std::vector<int> counts;    // n_h per slice, all >= 1

  int num_slices() const noexcept { return static_cast<int>(counts.size()); }
};

/// Equal-count slicing on the order statistics of y. Slice h ends at order
/// position ceil(n h / H); observations tied across a boundary stay in the
/// lower slice and slices left empty by ties are merged away.
SliceAssignment slice_response(const Vector& y, int num_slices);

/// Sliced inverse regression on the predictor matrix (raw or transformed).
class SirFit {
 public:
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }
  /// Columns are eta_j = Sigma^{-1/2} v_j in decreasing eigenvalue order.
  const Matrix& directions() const noexcept { return directions_; }
  Matrix leading_directions(int d) const { return directions_.leftCols(d); }
  const Matrix& sigma_half_inv() const noexcept { return sigma_half_inv_; }
  const Matrix& slice_means() const noexcept { return slice_means_; }  // H x p
  const std::vector<int>& slice_counts() const noexcept { return counts_; }
  const Vector& center() const noexcept { return center_; }
  int n() const noexcept { return n_; }
  int p() const noexcept { return static_cast<int>(eigenvalues_.size()); }
  int num_slices() const noexcept { return static_cast<int>(counts_.size()); }

  /// (1/n) sum_h n_h zbar_h zbar_h^T rebuilt from the stored slice means.
  Matrix candidate_matrix() const;

  /// Projections (x_i - xbar)^T eta_k for the first d directions.
  Matrix project(const Matrix& x, int d) const;

  friend SirFit sir_fit(const Matrix& x, const Vector& y, int num_slices);

 private:
  Vector eigenvalues_;
  Matrix directions_;
  Matrix eigenvectors_;
  Matrix sigma_half_inv_;
  Matrix slice_means_;
  std::vector<int> counts_;
  Vector center_;
  int n_ = 0;
};

SirFit sir_fit(const Matrix& x, const Vector& y, int num_slices = 10);

/// Sequential chi-square test on L_d = n sum_{j>d} lambda_j with
/// (p - d)(H - d - 1) degrees of freedom. Returns the first non-rejected d,
/// or p when every hypothesis is rejected.
int sequential_test(const SirFit& fit, double alpha = 0.05);
int sequential_test(const Vector& eigenvalues, int n, int num_slices, double alpha = 0.05);

/// Value of the BIC-type criterion at dimension d (1 <= d <= p).
double bic_criterion(const SirFit& fit, int d, double kappa);
double bic_criterion(const Vector& eigenvalues, int n, int d, double kappa);

/// argmax over 1 <= d <= p of the BIC-type criterion; ties go to the smaller d.
int bic_dimension(const SirFit& fit, double kappa);
int bic_dimension(const Vector& eigenvalues, int n, double kappa);

/// Default penalty factor log(n).
double default_kappa(int n);

}  // namespace tsdr
