#pragma once

#include <Eigen/Dense>

namespace tsdr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Column means of an n x p matrix.
Vector column_means(const Matrix& x);

/// Sample covariance with denominator n.
Matrix covariance(const Matrix& x);

/// Symmetric inverse square root through an eigendecomposition. Eigenvalues
/// below `floor` times the largest are treated as singular; throws
/// SingularCovariance when the condition number exceeds `max_condition`.
Matrix inverse_sqrt_spd(const Matrix& s, double max_condition = 1e12, double floor = 1e-12);

/// Symmetric square root of a positive semidefinite matrix.
Matrix sqrt_psd(const Matrix& s);

/// Orthonormal basis of the column span (thin QR, columns with positive
/// diagonal in R).
Matrix orthonormalize(const Matrix& b);

/// Thin QR with R returned; q * r == b and r has a positive diagonal.
void thin_qr(const Matrix& b, Matrix& q, Matrix& r);

/// Solve a symmetric positive semidefinite system, adding a ridge of
/// `ridge * max(1, mean diagonal)` when the plain Cholesky factorization
/// fails or is ill-conditioned. Returns false when even the ridged system
/// cannot be factorized.
bool solve_spd(const Matrix& a, const Vector& rhs, Vector& out, double ridge = 1e-8);

}  // namespace tsdr
