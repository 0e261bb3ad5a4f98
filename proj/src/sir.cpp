#include "tsdr/sir.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsdr/error.hpp"
#include "tsdr/stats.hpp"

namespace tsdr {

SliceAssignment slice_response(const Vector& y, int num_slices) {
  const auto n = static_cast<int>(y.size());
  if (num_slices < 2) throw Error(ErrorCode::InvalidArgument, "need at least two slices");
  if (n < num_slices) {
    throw Error(ErrorCode::TooFewObservations,
                "n = " + std::to_string(n) + " is below the slice count " + std::to_string(num_slices));
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return y(a) < y(b); });

  // end[h] is the exclusive order position closing slice h.
  std::vector<int> ends;
  int previous = 0;
  for (int h = 1; h <= num_slices; ++h) {
    int end = static_cast<int>((static_cast<long long>(n) * h + num_slices - 1) / num_slices);
    while (end < n && end > 0 && y(order[static_cast<std::size_t>(end)]) == y(order[static_cast<std::size_t>(end - 1)])) {
      ++end;
    }
    end = std::max(end, previous);
    if (end > previous) ends.push_back(end);
    previous = end;
  }
  if (ends.size() < 2) {
    throw Error(ErrorCode::DegenerateResponse, "response ties leave fewer than two slices");
  }
  SliceAssignment out;
  out.slice_of.assign(static_cast<std::size_t>(n), 0);
  out.counts.assign(ends.size(), 0);
  int start = 0;
  for (std::size_t h = 0; h < ends.size(); ++h) {
    for (int pos = start; pos < ends[h]; ++pos) out.slice_of[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = static_cast<int>(h);
    out.counts[h] = ends[h] - start;
    start = ends[h];
  }
  return out;
}

SirFit sir_fit(const Matrix& x, const Vector& y, int num_slices) {
  if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "X and y row counts differ");
  const auto n = static_cast<int>(x.rows());
  const Eigen::Index p = x.cols();
  const SliceAssignment slices = slice_response(y, num_slices);

  SirFit fit;
  fit.n_ = n;
  fit.center_ = column_means(x);
  fit.sigma_half_inv_ = inverse_sqrt_spd(covariance(x));
  const Matrix z = (x.rowwise() - fit.center_.transpose()) * fit.sigma_half_inv_;

  const int h_count = slices.num_slices();
  fit.counts_ = slices.counts;
  fit.slice_means_ = Matrix::Zero(h_count, p);
  for (int i = 0; i < n; ++i) fit.slice_means_.row(slices.slice_of[static_cast<std::size_t>(i)]) += z.row(i);
  for (int h = 0; h < h_count; ++h) fit.slice_means_.row(h) /= fit.counts_[static_cast<std::size_t>(h)];

  Eigen::SelfAdjointEigenSolver<Matrix> eig(fit.candidate_matrix());
  // Eigen returns ascending order.
  fit.eigenvalues_ = eig.eigenvalues().reverse();
  fit.eigenvectors_ = eig.eigenvectors().rowwise().reverse();
  fit.directions_ = fit.sigma_half_inv_ * fit.eigenvectors_;
  return fit;
}

Matrix SirFit::candidate_matrix() const {
  const Eigen::Index p = slice_means_.cols();
  Matrix m = Matrix::Zero(p, p);
  for (Eigen::Index h = 0; h < slice_means_.rows(); ++h) {
    const double share = static_cast<double>(counts_[static_cast<std::size_t>(h)]) / n_;
    m.noalias() += share * slice_means_.row(h).transpose() * slice_means_.row(h);
  }
  return 0.5 * (m + m.transpose());
}

Matrix SirFit::project(const Matrix& x, int d) const {
  return (x.rowwise() - center_.transpose()) * directions_.leftCols(d);
}

int sequential_test(const Vector& eigenvalues, int n, int num_slices, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  const auto p = static_cast<int>(eigenvalues.size());
  for (int d = 0; d < p; ++d) {
    const int df = (p - d) * (num_slices - d - 1);
    if (df <= 0) return d;
    const double statistic = n * eigenvalues.tail(p - d).sum();
    if (statistic <= stats::chi_square_quantile(df, 1.0 - alpha)) return d;
  }
  return p;
}

int sequential_test(const SirFit& fit, double alpha) {
  return sequential_test(fit.eigenvalues(), fit.n(), fit.num_slices(), alpha);
}

double bic_criterion(const Vector& eigenvalues, int n, int d, double kappa) {
  if (d < 1 || d > eigenvalues.size()) throw Error(ErrorCode::OutOfRange, "dimension outside [1, p]");
  const Vector sq = eigenvalues.array().square();
  const double total = sq.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::AllZeroSpectrum, "all SIR eigenvalues are zero");
  return sq.head(d).sum() / total - kappa / n * d * (d + 1) / 2.0;
}

double bic_criterion(const SirFit& fit, int d, double kappa) {
  return bic_criterion(fit.eigenvalues(), fit.n(), d, kappa);
}

int bic_dimension(const Vector& eigenvalues, int n, double kappa) {
  int best = 1;
  double best_value = bic_criterion(eigenvalues, n, 1, kappa);
  for (int d = 2; d <= eigenvalues.size(); ++d) {
    const double v = bic_criterion(eigenvalues, n, d, kappa);
    if (v > best_value) {
      best_value = v;
      best = d;
    }
  }
  return best;
}

int bic_dimension(const SirFit& fit, double kappa) { return bic_dimension(fit.eigenvalues(), fit.n(), kappa); }

double default_kappa(int n) { return std::log(static_cast<double>(n)); }

}  // namespace tsdr
