#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "tsdr/linalg.hpp"

namespace tsdr {

/// Clamped B-spline space on [lower, upper] exposed as {1, theta_1..theta_M}:
/// the first B-spline is dropped and replaced by the constant function, which
/// spans the same space because the B-splines sum to one.
class SplineBasis {
 public:
  /// `breakpoints` holds lower, interior knots and upper in ascending order.
  SplineBasis(std::vector<double> breakpoints, int degree);

  /// Interior knots at equally spaced sample quantiles over [min, max]. A
  /// request for fewer than `degree` non-constant functions lowers the degree.
  static SplineBasis from_sample_quantiles(std::span<const double> sample, int num_functions = 6,
                                           int degree = 3);

  int degree() const noexcept { return degree_; }
  /// Number of non-constant functions M; evaluate() returns M + 1 entries.
  int num_functions() const noexcept { return static_cast<int>(num_bsplines_) - 1; }
  int size() const noexcept { return num_functions() + 1; }
  double lower() const noexcept { return breakpoints_.front(); }
  double upper() const noexcept { return breakpoints_.back(); }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }

  /// D^order of (1, theta_1, ..., theta_M) at t, with t clamped to the domain.
  Vector evaluate(double t, int order = 0) const;

  /// Index of the breakpoint interval containing t (clamped).
  std::size_t interval_of(double t) const;

 private:
  std::size_t find_span(double t) const;

  std::vector<double> breakpoints_;
  std::vector<double> knots_;
  int degree_;
  std::size_t num_bsplines_;
};

/// Ten-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre10 {
  std::array<double, 10> nodes;
  std::array<double, 10> weights;
};
const GaussLegendre10& gauss_legendre10();

/// Integral over the basis domain of D^2 Theta (D^2 Theta)^T, computed
/// exactly by Gauss-Legendre quadrature on each knot interval.
Matrix penalty_matrix(const SplineBasis& basis);

/// f(t) = C + integral from `lower` to t of exp{c^T Theta(u)} du. Outside the
/// basis domain the map continues linearly with the boundary derivative.
class MonotoneTransform {
 public:
  MonotoneTransform(std::shared_ptr<const SplineBasis> basis, Vector coeffs, double constant = 0.0);

  static MonotoneTransform identity(std::shared_ptr<const SplineBasis> basis);

  double operator()(double t) const;
  double derivative(double t) const;
  /// s(t) = c^T Theta(t), the log of the derivative inside the domain.
  double log_derivative(double t) const;
  /// d f(t) / d c.
  Vector coefficient_gradient(double t) const;

  const SplineBasis& basis() const noexcept { return *basis_; }
  std::shared_ptr<const SplineBasis> basis_ptr() const noexcept { return basis_; }
  const Vector& coeffs() const noexcept { return coeffs_; }
  double constant() const noexcept { return constant_; }
  double origin() const noexcept { return basis_->lower(); }

 private:
  std::shared_ptr<const SplineBasis> basis_;
  Vector coeffs_;
  double constant_;
  // Integral of exp{s} (and of Theta exp{s}) from lower to each breakpoint.
  std::vector<double> cumulative_;
  Matrix cumulative_gradient_;
};

/// Quadrature nodes for a fixed sample of points, so the transform values
/// and their coefficient gradients can be refreshed cheaply as c changes.
class SampleQuadrature {
 public:
  SampleQuadrature(const SplineBasis& basis, std::span<const double> points);

  std::size_t size() const noexcept { return point_interval_.size(); }

  /// values(i) = integral from lower to x_i of exp{c^T Theta}; when
  /// `gradient` is given its row i holds the integral of Theta exp{c^T Theta}.
  void evaluate(const Vector& coeffs, Vector& values, Matrix* gradient = nullptr) const;

 private:
  static constexpr int kNodes = 10;
  std::size_t num_intervals_;
  Matrix full_theta_;
  Vector full_weight_;
  std::vector<std::size_t> full_interval_;
  std::vector<std::size_t> point_interval_;  // count of whole intervals below x_i
  Matrix partial_theta_;
  Vector partial_weight_;
};

}  // namespace tsdr
