#pragma once

#include <memory>
#include <span>

#include "tsdr/spline.hpp"

namespace tsdr {

/// Penalized cubic regression spline with the roughness penalty chosen by
/// generalized cross-validation.
class SmoothingSpline {
 public:
  SmoothingSpline(std::shared_ptr<const SplineBasis> basis, Vector coeffs, double lambda, double gcv, double edf)
      : basis_(std::move(basis)), coeffs_(std::move(coeffs)), lambda_(lambda), gcv_(gcv), edf_(edf) {}

  double operator()(double t) const { return basis_->evaluate(t).dot(coeffs_); }
  double lambda() const noexcept { return lambda_; }
  double gcv() const noexcept { return gcv_; }
  /// Trace of the smoother matrix.
  double effective_df() const noexcept { return edf_; }
  const SplineBasis& basis() const noexcept { return *basis_; }

 private:
  std::shared_ptr<const SplineBasis> basis_;
  Vector coeffs_;
  double lambda_;
  double gcv_;
  double edf_;
};

/// Knots at sample quantiles of x; lambda minimizes n RSS / (n - edf)^2
/// over a logarithmic grid.
SmoothingSpline fit_smoothing_spline(std::span<const double> x, std::span<const double> y);

}  // namespace tsdr
