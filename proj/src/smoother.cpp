#include "tsdr/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsdr/error.hpp"

namespace tsdr {

SmoothingSpline fit_smoothing_spline(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "x and y differ in length");
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 4) throw Error(ErrorCode::TooFewObservations, "smoothing needs at least four points");

  const int size = std::clamp(static_cast<int>(n / 4), 4, 23);
  auto basis = std::make_shared<const SplineBasis>(SplineBasis::from_sample_quantiles(x, size, 3));
  const Eigen::Index m = basis->size();
  Matrix design(n, m);
  for (Eigen::Index i = 0; i < n; ++i) design.row(i) = basis->evaluate(x[static_cast<std::size_t>(i)]).transpose();
  const Vector response = Eigen::Map<const Vector>(y.data(), n);
  const Matrix gram = design.transpose() * design;
  const Vector moment = design.transpose() * response;
  const Matrix penalty = penalty_matrix(*basis);
  const double base = gram.trace() / std::max(penalty.trace(), 1e-300);

  double best_gcv = std::numeric_limits<double>::infinity();
  double best_lambda = 0.0;
  double best_edf = 0.0;
  Vector best;
  for (int k = -40; k <= 20; ++k) {
    const double lambda = base * std::pow(10.0, 0.25 * k);
    const Eigen::LDLT<Matrix> solver(gram + lambda * penalty);
    if (solver.info() != Eigen::Success) continue;
    const Vector coeffs = solver.solve(moment);
    const double edf = solver.solve(gram).trace();
    const double rss = (response - design * coeffs).squaredNorm();
    const double denom = static_cast<double>(n) - edf;
    if (!(denom > 0.5) || !coeffs.allFinite()) continue;
    const double gcv = static_cast<double>(n) * rss / (denom * denom);
    if (gcv < best_gcv) {
      best_gcv = gcv;
      best_lambda = lambda;
      best_edf = edf;
      best = coeffs;
    }
  }
  if (best.size() == 0) throw Error(ErrorCode::SingularNormalEquations, "smoothing spline could not be fitted");
  return SmoothingSpline(std::move(basis), std::move(best), best_lambda, best_gcv, best_edf);
}

}  // namespace tsdr
