#include "tsdr/linalg.hpp"

#include <cmath>

#include "tsdr/error.hpp"

namespace tsdr {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::DegenerateResponse: return "DegenerateResponse";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::AllZeroSpectrum: return "AllZeroSpectrum";
    case ErrorCode::SingularLocalFit: return "SingularLocalFit";
    case ErrorCode::SingularNormalEquations: return "SingularNormalEquations";
    case ErrorCode::PenaltySingular: return "PenaltySingular";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingArtifacts: return "MissingArtifacts";
  }
  return "Unknown";
}

Vector column_means(const Matrix& x) { return x.colwise().mean().transpose(); }

Matrix covariance(const Matrix& x) {
  const Matrix centered = x.rowwise() - x.colwise().mean();
  return (centered.transpose() * centered) / static_cast<double>(x.rows());
}

Matrix inverse_sqrt_spd(const Matrix& s, double max_condition, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularCovariance, "eigendecomposition failed");
  }
  const Vector& values = eig.eigenvalues();
  const double largest = values.maxCoeff();
  if (!(largest > 0.0)) {
    throw Error(ErrorCode::SingularCovariance, "covariance has no positive eigenvalue");
  }
  const double smallest = values.minCoeff();
  if (smallest <= floor * largest || largest / smallest > max_condition) {
    throw Error(ErrorCode::SingularCovariance,
                "condition number exceeds " + std::to_string(max_condition));
  }
  const Vector inv_root = values.array().rsqrt();
  return eig.eigenvectors() * inv_root.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix sqrt_psd(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

void thin_qr(const Matrix& b, Matrix& q, Matrix& r) {
  const Eigen::Index p = b.rows();
  const Eigen::Index d = b.cols();
  Eigen::HouseholderQR<Matrix> qr(b);
  q = qr.householderQ() * Matrix::Identity(p, d);
  r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < d; ++k) {
    if (r(k, k) < 0.0) {
      q.col(k) *= -1.0;
      r.row(k) *= -1.0;
    }
  }
}

Matrix orthonormalize(const Matrix& b) {
  Matrix q, r;
  thin_qr(b, q, r);
  return q;
}

bool solve_spd(const Matrix& a, const Vector& rhs, Vector& out, double ridge) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) {
    const Vector diag = llt.matrixL().toDenseMatrix().diagonal();
    const double lo = diag.minCoeff();
    const double hi = diag.maxCoeff();
    if (lo > 0.0 && hi / lo < 1e7) {
      out = llt.solve(rhs);
      if (out.allFinite()) return true;
    }
  }
  const double scale = std::max(1.0, a.diagonal().cwiseAbs().mean());
  for (double mu = ridge; mu <= 1e-2; mu *= 100.0) {
    Matrix ridged = a;
    ridged.diagonal().array() += mu * scale;
    Eigen::LLT<Matrix> fallback(ridged);
    if (fallback.info() == Eigen::Success) {
      out = fallback.solve(rhs);
      if (out.allFinite()) return true;
    }
  }
  return false;
}

}  // namespace tsdr
