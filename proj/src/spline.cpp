#include "tsdr/spline.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "tsdr/error.hpp"

namespace tsdr {

namespace {

// Basis functions and derivatives on one knot span (Piegl & Tiller, A2.3).
// ders[k][r] is the k-th derivative of basis index span - degree + r.
std::vector<std::vector<double>> basis_derivatives(std::size_t span, double u, int degree, int order,
                                                   const std::vector<double>& knots) {
  const int p = degree;
  std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
  std::vector<double> left(p + 1, 0.0), right(p + 1, 0.0);
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - knots[span + 1 - j];
    right[j] = knots[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  const int n = std::min(order, p);
  std::vector<std::vector<double>> ders(order + 1, std::vector<double>(p + 1, 0.0));
  for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];
  std::vector<std::vector<double>> a(2, std::vector<double>(p + 1, 0.0));
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= n; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j <= p; ++j) ders[k][j] *= factor;
    factor *= (p - k);
  }
  return ders;
}

}  // namespace

SplineBasis::SplineBasis(std::vector<double> breakpoints, int degree)
    : breakpoints_(std::move(breakpoints)), degree_(degree) {
  if (degree_ < 0) throw Error(ErrorCode::InvalidArgument, "negative spline degree");
  if (breakpoints_.size() < 2) throw Error(ErrorCode::InvalidArgument, "spline needs two breakpoints");
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] > breakpoints_[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "spline breakpoints must be strictly increasing");
    }
  }
  knots_.assign(degree_ + 1, breakpoints_.front());
  knots_.insert(knots_.end(), breakpoints_.begin() + 1, breakpoints_.end() - 1);
  knots_.insert(knots_.end(), degree_ + 1, breakpoints_.back());
  num_bsplines_ = knots_.size() - degree_ - 1;
}

SplineBasis SplineBasis::from_sample_quantiles(std::span<const double> sample, int num_functions, int degree) {
  if (sample.empty()) throw Error(ErrorCode::InvalidArgument, "empty sample");
  if (num_functions < 0) throw Error(ErrorCode::InvalidArgument, "negative basis size");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  if (!(sorted.back() > sorted.front())) {
    throw Error(ErrorCode::ConstantColumn, "cannot build a spline basis on a constant sample");
  }
  const int deg = std::min(degree, num_functions);
  const int interior = num_functions - deg;
  std::vector<double> breaks{sorted.front()};
  for (int k = 1; k <= interior; ++k) {
    const double pos = static_cast<double>(k) / (interior + 1) * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double q = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    if (q > breaks.back() && q < sorted.back()) breaks.push_back(q);
  }
  breaks.push_back(sorted.back());
  return SplineBasis(std::move(breaks), deg);
}

std::size_t SplineBasis::find_span(double t) const {
  const std::size_t n = num_bsplines_ - 1;
  if (t >= knots_[n + 1]) return n;
  if (t <= knots_[degree_]) return static_cast<std::size_t>(degree_);
  const auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, t);
  return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

std::size_t SplineBasis::interval_of(double t) const {
  if (t <= lower()) return 0;
  if (t >= upper()) return breakpoints_.size() - 2;
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

Vector SplineBasis::evaluate(double t, int order) const {
  const double u = std::clamp(t, lower(), upper());
  Vector out = Vector::Zero(size());
  if (order == 0) out(0) = 1.0;
  if (order > degree_) return out;
  const std::size_t span = find_span(u);
  const auto ders = basis_derivatives(span, u, degree_, order, knots_);
  for (int r = 0; r <= degree_; ++r) {
    const auto index = span - static_cast<std::size_t>(degree_) + static_cast<std::size_t>(r);
    if (index == 0) continue;  // first B-spline is replaced by the constant
    out(static_cast<Eigen::Index>(index)) += ders[order][r];
  }
  return out;
}

const GaussLegendre10& gauss_legendre10() {
  static const GaussLegendre10 rule = [] {
    using Rule = boost::math::quadrature::gauss<double, 10>;
    GaussLegendre10 g{};
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    for (std::size_t k = 0; k < 5; ++k) {
      g.nodes[4 - k] = -x[k];
      g.weights[4 - k] = w[k];
      g.nodes[5 + k] = x[k];
      g.weights[5 + k] = w[k];
    }
    return g;
  }();
  return rule;
}

Matrix penalty_matrix(const SplineBasis& basis) {
  const int m = basis.size();
  Matrix p = Matrix::Zero(m, m);
  if (basis.degree() < 2) return p;
  const auto& rule = gauss_legendre10();
  const auto& br = basis.breakpoints();
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double half = 0.5 * (br[k + 1] - br[k]);
    const double mid = 0.5 * (br[k + 1] + br[k]);
    for (int q = 0; q < 10; ++q) {
      const Vector d2 = basis.evaluate(mid + half * rule.nodes[q], 2);
      p.noalias() += (half * rule.weights[q]) * d2 * d2.transpose();
    }
  }
  return 0.5 * (p + p.transpose());
}

MonotoneTransform::MonotoneTransform(std::shared_ptr<const SplineBasis> basis, Vector coeffs, double constant)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)), constant_(constant) {
  if (!basis_) throw Error(ErrorCode::InvalidArgument, "monotone transform needs a basis");
  if (coeffs_.size() != basis_->size()) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient vector does not match basis size");
  }
  const auto& br = basis_->breakpoints();
  const auto& rule = gauss_legendre10();
  cumulative_.assign(br.size(), 0.0);
  cumulative_gradient_ = Matrix::Zero(static_cast<Eigen::Index>(br.size()), basis_->size());
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double half = 0.5 * (br[k + 1] - br[k]);
    const double mid = 0.5 * (br[k + 1] + br[k]);
    double acc = 0.0;
    Vector grad = Vector::Zero(basis_->size());
    for (int q = 0; q < 10; ++q) {
      const Vector theta = basis_->evaluate(mid + half * rule.nodes[q]);
      const double w = half * rule.weights[q] * std::exp(coeffs_.dot(theta));
      acc += w;
      grad += w * theta;
    }
    cumulative_[k + 1] = cumulative_[k] + acc;
    cumulative_gradient_.row(static_cast<Eigen::Index>(k + 1)) =
        cumulative_gradient_.row(static_cast<Eigen::Index>(k)) + grad.transpose();
  }
}

MonotoneTransform MonotoneTransform::identity(std::shared_ptr<const SplineBasis> basis) {
  const int m = basis->size();
  return MonotoneTransform(std::move(basis), Vector::Zero(m), 0.0);
}

double MonotoneTransform::log_derivative(double t) const { return coeffs_.dot(basis_->evaluate(t)); }

double MonotoneTransform::derivative(double t) const { return std::exp(log_derivative(t)); }

double MonotoneTransform::operator()(double t) const {
  const double lo = basis_->lower();
  const double hi = basis_->upper();
  if (t <= lo) return constant_ + (t - lo) * derivative(lo);
  if (t >= hi) return constant_ + cumulative_.back() + (t - hi) * derivative(hi);
  const std::size_t k = basis_->interval_of(t);
  const double a = basis_->breakpoints()[k];
  const double half = 0.5 * (t - a);
  const double mid = 0.5 * (t + a);
  const auto& rule = gauss_legendre10();
  double acc = 0.0;
  for (int q = 0; q < 10; ++q) acc += rule.weights[q] * derivative(mid + half * rule.nodes[q]);
  return constant_ + cumulative_[k] + half * acc;
}

Vector MonotoneTransform::coefficient_gradient(double t) const {
  const double lo = basis_->lower();
  const double hi = basis_->upper();
  if (t <= lo) {
    const Vector theta = basis_->evaluate(lo);
    return (t - lo) * std::exp(coeffs_.dot(theta)) * theta;
  }
  const auto last = static_cast<Eigen::Index>(cumulative_.size() - 1);
  if (t >= hi) {
    const Vector theta = basis_->evaluate(hi);
    return cumulative_gradient_.row(last).transpose() + (t - hi) * std::exp(coeffs_.dot(theta)) * theta;
  }
  const std::size_t k = basis_->interval_of(t);
  const double a = basis_->breakpoints()[k];
  const double half = 0.5 * (t - a);
  const double mid = 0.5 * (t + a);
  const auto& rule = gauss_legendre10();
  Vector acc = cumulative_gradient_.row(static_cast<Eigen::Index>(k)).transpose();
  for (int q = 0; q < 10; ++q) {
    const Vector theta = basis_->evaluate(mid + half * rule.nodes[q]);
    acc += half * rule.weights[q] * std::exp(coeffs_.dot(theta)) * theta;
  }
  return acc;
}

SampleQuadrature::SampleQuadrature(const SplineBasis& basis, std::span<const double> points) {
  const auto& br = basis.breakpoints();
  const auto& rule = gauss_legendre10();
  const int m = basis.size();
  num_intervals_ = br.size() - 1;
  const auto n_full = static_cast<Eigen::Index>(num_intervals_ * kNodes);
  full_theta_.resize(n_full, m);
  full_weight_.resize(n_full);
  full_interval_.resize(static_cast<std::size_t>(n_full));
  for (std::size_t k = 0; k < num_intervals_; ++k) {
    const double half = 0.5 * (br[k + 1] - br[k]);
    const double mid = 0.5 * (br[k + 1] + br[k]);
    for (int q = 0; q < kNodes; ++q) {
      const auto row = static_cast<Eigen::Index>(k * kNodes + q);
      full_theta_.row(row) = basis.evaluate(mid + half * rule.nodes[q]).transpose();
      full_weight_(row) = half * rule.weights[q];
      full_interval_[static_cast<std::size_t>(row)] = k;
    }
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  point_interval_.resize(points.size());
  partial_theta_ = Matrix::Zero(n * kNodes, m);
  partial_weight_ = Vector::Zero(n * kNodes);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = points[static_cast<std::size_t>(i)];
    const Eigen::Index base = i * kNodes;
    if (t <= basis.lower()) {
      // Linear continuation below the domain: one node at the boundary.
      point_interval_[static_cast<std::size_t>(i)] = 0;
      partial_theta_.row(base) = basis.evaluate(basis.lower()).transpose();
      partial_weight_(base) = t - basis.lower();
      continue;
    }
    if (t >= basis.upper()) {
      point_interval_[static_cast<std::size_t>(i)] = num_intervals_;
      partial_theta_.row(base) = basis.evaluate(basis.upper()).transpose();
      partial_weight_(base) = t - basis.upper();
      continue;
    }
    const std::size_t k = basis.interval_of(t);
    point_interval_[static_cast<std::size_t>(i)] = k;
    const double a = br[k];
    const double half = 0.5 * (t - a);
    const double mid = 0.5 * (t + a);
    for (int q = 0; q < kNodes; ++q) {
      partial_theta_.row(base + q) = basis.evaluate(mid + half * rule.nodes[q]).transpose();
      partial_weight_(base + q) = half * rule.weights[q];
    }
  }
}

void SampleQuadrature::evaluate(const Vector& coeffs, Vector& values, Matrix* gradient) const {
  const Eigen::Index m = full_theta_.cols();
  const Vector full_w = full_weight_.array() * (full_theta_ * coeffs).array().exp();
  std::vector<double> cumulative(num_intervals_ + 1, 0.0);
  Matrix cumulative_grad = Matrix::Zero(static_cast<Eigen::Index>(num_intervals_ + 1), m);
  for (Eigen::Index r = 0; r < full_theta_.rows(); ++r) {
    const std::size_t k = full_interval_[static_cast<std::size_t>(r)];
    cumulative[k + 1] += full_w(r);
    if (gradient) cumulative_grad.row(static_cast<Eigen::Index>(k + 1)) += full_w(r) * full_theta_.row(r);
  }
  for (std::size_t k = 1; k <= num_intervals_; ++k) {
    cumulative[k] += cumulative[k - 1];
    if (gradient) {
      cumulative_grad.row(static_cast<Eigen::Index>(k)) += cumulative_grad.row(static_cast<Eigen::Index>(k - 1));
    }
  }
  const Vector part_w = partial_weight_.array() * (partial_theta_ * coeffs).array().exp();
  const auto n = static_cast<Eigen::Index>(point_interval_.size());
  values.resize(n);
  if (gradient) gradient->resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(point_interval_[static_cast<std::size_t>(i)]);
    const auto seg = part_w.segment(i * kNodes, kNodes);
    values(i) = cumulative[static_cast<std::size_t>(k)] + seg.sum();
    if (gradient) {
      gradient->row(i) = cumulative_grad.row(k) + seg.transpose() * partial_theta_.middleRows(i * kNodes, kNodes);
    }
  }
}

}  // namespace tsdr
