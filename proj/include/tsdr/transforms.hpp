#pragma once

#include <span>
#include <vector>

#include "tsdr/linalg.hpp"

namespace tsdr {

/// Sorted copy of one predictor's sample, evaluated through the rescaled
/// empirical distribution function count(values <= t) / (n + 1).
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::span<const double> sample);

  std::size_t size() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted_values() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

double rescaled_ecdf(const EmpiricalCdf& cdf, double t);

/// Entry (i, j) becomes the standard normal quantile of the rescaled ECDF of
/// column j at x(i, j). Tied values share a score.
Matrix normal_scores(const Matrix& data);

/// Yeo-Johnson power transformation with exponent `lambda`.
class YeoJohnson {
 public:
  explicit YeoJohnson(double lambda) : lambda_(lambda) {}

  double lambda() const noexcept { return lambda_; }
  double operator()(double x) const;

 private:
  double lambda_;
};

double yeo_johnson_apply(double x, double lambda);

/// Normal profile log-likelihood of the transformed sample (up to constants).
double yeo_johnson_loglik(std::span<const double> sample, double lambda);

inline constexpr double kYeoJohnsonLambdaMin = -2.0;
inline constexpr double kYeoJohnsonLambdaMax = 2.0;

/// Profile maximum likelihood over [-2, 2]: coarse grid then golden-section
/// refinement. Falls back to lambda = 1 when the fitted exponent does not
/// bring the sample skewness closer to zero.
YeoJohnson yeo_johnson_fit(std::span<const double> sample);

/// Applies a fitted Yeo-Johnson map to every column and standardizes the
/// result to mean 0 and variance 1.
Matrix yeo_johnson_columns(const Matrix& data, std::vector<double>* lambdas = nullptr);

struct Standardized {
  Vector values;
  double shift = 0.0;
  double scale = 1.0;
};

/// (v - mean) / sd with the variance denominator n.
Standardized standardize_transform(std::span<const double> values);

/// Column-wise version of standardize_transform.
Matrix standardize_columns(const Matrix& x, Vector* means = nullptr, Vector* sds = nullptr);

}  // namespace tsdr
