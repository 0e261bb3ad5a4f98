#include "tsdr/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tsdr/error.hpp"
#include "tsdr/stats.hpp"

namespace tsdr {

EmpiricalCdf::EmpiricalCdf(std::span<const double> sample) : sorted_(sample.begin(), sample.end()) {
  if (sorted_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empirical CDF needs at least one value");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double rescaled_ecdf(const EmpiricalCdf& cdf, double t) {
  const auto& v = cdf.sorted_values();
  const auto count = std::upper_bound(v.begin(), v.end(), t) - v.begin();
  return static_cast<double>(count) / static_cast<double>(v.size() + 1);
}

Matrix normal_scores(const Matrix& data) {
  const Eigen::Index n = data.rows();
  Matrix out(n, data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const Vector column = data.col(j);
    if (n >= 2 && column.maxCoeff() == column.minCoeff()) {
      throw Error(ErrorCode::ConstantColumn, "column " + std::to_string(j) + " is constant");
    }
    const EmpiricalCdf cdf({column.data(), static_cast<std::size_t>(n)});
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, j) = stats::normal_quantile(rescaled_ecdf(cdf, column(i)));
    }
  }
  return out;
}

double yeo_johnson_apply(double x, double lambda) {
  constexpr double eps = 1e-12;
  if (x >= 0.0) {
    const double l = std::log1p(x);
    if (std::abs(lambda) < eps) return l;
    return std::expm1(lambda * l) / lambda;
  }
  const double l = std::log1p(-x);
  const double q = 2.0 - lambda;
  if (std::abs(q) < eps) return -l;
  return -std::expm1(q * l) / q;
}

double YeoJohnson::operator()(double x) const { return yeo_johnson_apply(x, lambda_); }

double yeo_johnson_loglik(std::span<const double> sample, double lambda) {
  const auto n = static_cast<double>(sample.size());
  std::vector<double> t(sample.size());
  double jacobian = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    t[i] = yeo_johnson_apply(sample[i], lambda);
    jacobian += std::copysign(std::log1p(std::abs(sample[i])), sample[i]);
  }
  const double var = stats::variance(t);
  if (!(var > 0.0) || !std::isfinite(var)) return -std::numeric_limits<double>::infinity();
  return -0.5 * n * std::log(var) + (lambda - 1.0) * jacobian;
}

YeoJohnson yeo_johnson_fit(std::span<const double> sample) {
  if (sample.size() < 3) {
    throw Error(ErrorCode::TooFewObservations, "Yeo-Johnson fit needs n >= 3");
  }
  if (!(stats::variance(sample) > 0.0)) {
    throw Error(ErrorCode::DegenerateSample, "sample has zero variance");
  }
  auto objective = [&](double lambda) { return yeo_johnson_loglik(sample, lambda); };

  // Coarse grid brackets the global maximum before golden-section refinement.
  constexpr int grid = 40;
  const double step = (kYeoJohnsonLambdaMax - kYeoJohnsonLambdaMin) / grid;
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid; ++k) {
    const double v = objective(kYeoJohnsonLambdaMin + k * step);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  double lo = kYeoJohnsonLambdaMin + std::max(0, best - 1) * step;
  double hi = kYeoJohnsonLambdaMin + std::min(grid, best + 1) * step;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-7) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = objective(x1);
    }
  }
  const double lambda = 0.5 * (lo + hi);

  std::vector<double> transformed(sample.size());
  std::transform(sample.begin(), sample.end(), transformed.begin(),
                 [lambda](double x) { return yeo_johnson_apply(x, lambda); });
  if (std::abs(stats::skewness(transformed)) < std::abs(stats::skewness(sample))) {
    return YeoJohnson(lambda);
  }
  return YeoJohnson(1.0);
}

Matrix yeo_johnson_columns(const Matrix& data, std::vector<double>* lambdas) {
  Matrix out(data.rows(), data.cols());
  if (lambdas) lambdas->clear();
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const Vector column = data.col(j);
    const YeoJohnson yj = yeo_johnson_fit({column.data(), static_cast<std::size_t>(column.size())});
    if (lambdas) lambdas->push_back(yj.lambda());
    for (Eigen::Index i = 0; i < data.rows(); ++i) out(i, j) = yj(column(i));
  }
  return standardize_columns(out);
}

Standardized standardize_transform(std::span<const double> values) {
  const double m = stats::mean(values);
  const double var = stats::variance(values);
  if (!(var > 0.0)) {
    throw Error(ErrorCode::ConstantColumn, "cannot standardize a constant vector");
  }
  Standardized out;
  out.shift = m;
  out.scale = std::sqrt(var);
  out.values.resize(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.values(static_cast<Eigen::Index>(i)) = (values[i] - m) / out.scale;
  }
  return out;
}

Matrix standardize_columns(const Matrix& x, Vector* means, Vector* sds) {
  Matrix out(x.rows(), x.cols());
  if (means) means->resize(x.cols());
  if (sds) sds->resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Vector column = x.col(j);
    try {
      const Standardized s = standardize_transform({column.data(), static_cast<std::size_t>(column.size())});
      out.col(j) = s.values;
      if (means) (*means)(j) = s.shift;
      if (sds) (*sds)(j) = s.scale;
    } catch (const Error&) {
      throw Error(ErrorCode::ConstantColumn, "column " + std::to_string(j) + " is constant");
    }
  }
  return out;
}

}  // namespace tsdr
