#include <cmath>

#include "tsdr/error.hpp"
#include "tsdr/mave.hpp"
#include "tsdr/metrics.hpp"
#include "tsdr/transforms.hpp"

namespace tsdr {

Matrix MaveFit::raw_directions() const {
  if (scale.size() != B.rows()) return B;
  Matrix raw = scale.cwiseInverse().asDiagonal() * B;
  return orthonormalize(raw);
}

Matrix MaveFit::project(const Matrix& x) const {
  Matrix f(x.rows(), x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      f(i, k) = transforms.empty() ? (x(i, k) - center(k)) / scale(k)
                                   : transforms[static_cast<std::size_t>(k)](x(i, k));
    }
  }
  return f * B;
}

double mave_bandwidth(const Matrix& f, const Matrix& directions, const MaveOptions& options) {
  if (options.bandwidth) return *options.bandwidth;
  return bandwidth_rule(f, directions, options.bandwidth_scale);
}

double bandwidth_rule(const Matrix& f, const Matrix& directions, double scale) {
  const auto n = static_cast<double>(f.rows());
  const auto d = static_cast<double>(directions.cols());
  const Matrix u = f * directions;
  double spread = 0.0;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    const double m = u.col(k).mean();
    spread += std::sqrt((u.col(k).array() - m).square().mean());
  }
  spread /= d;
  return scale * std::pow(n, -1.0 / (d + 4.0)) * spread;
}

Matrix kernel_weights(const Matrix& f, const Matrix& directions, double h, double floor) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
  const Matrix u = f * directions;
  const Eigen::Index n = f.rows();
  Matrix w(n, n);
  const double inv = 1.0 / (2.0 * h * h);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) w(i, j) = std::exp(-(u.row(i) - u.row(j)).squaredNorm() * inv);
    w.col(j) /= w.col(j).sum();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w(i, j) < floor) w(i, j) = 0.0;
    }
    w.col(j) /= w.col(j).sum();
  }
  return w;
}

LocalFit local_linear(const Matrix& f, const Vector& y, const Matrix& directions, const Matrix& weights) {
  const Eigen::Index n = f.rows();
  const Eigen::Index d = directions.cols();
  const Matrix u = f * directions;
  LocalFit out{Vector(n), Matrix(n, d)};
  Matrix design(d + 1, d + 1);
  Vector rhs(d + 1);
  Vector z(d + 1);
  Vector solution;
  for (Eigen::Index j = 0; j < n; ++j) {
    design.setZero();
    rhs.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = weights(i, j);
      if (w == 0.0) continue;
      z(0) = 1.0;
      z.tail(d) = (u.row(i) - u.row(j)).transpose();
      design.noalias() += w * z * z.transpose();
      rhs.noalias() += (w * y(i)) * z;
    }
    if (!solve_spd(design, rhs, solution)) {
      throw Error(ErrorCode::SingularLocalFit, "local fit at observation " + std::to_string(j));
    }
    out.a(j) = solution(0);
    out.b.row(j) = solution.tail(d).transpose();
  }
  return out;
}

LocalFit update_local(const Matrix& f, const Vector& y, const Matrix& directions, double h,
                      Matrix* weights_out, double floor) {
  Matrix w = kernel_weights(f, directions, h, floor);
  LocalFit fit = local_linear(f, y, directions, w);
  if (weights_out) *weights_out = std::move(w);
  return fit;
}

Matrix solve_directions(const Matrix& f, const Vector& y, const Vector& a, const Matrix& b,
                        const Matrix& weights, int d) {
  const Eigen::Index n = f.rows();
  const Eigen::Index p = f.cols();
  const Eigen::Index pd = p * d;
  Matrix normal = Matrix::Zero(pd, pd);
  Vector rhs = Vector::Zero(pd);
  Matrix scatter(p, p);
  Vector moment(p);
  Vector diff(p);
  for (Eigen::Index j = 0; j < n; ++j) {
    scatter.setZero();
    moment.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = weights(i, j);
      if (w == 0.0) continue;
      diff = (f.row(i) - f.row(j)).transpose();
      scatter.noalias() += w * diff * diff.transpose();
      moment.noalias() += (w * (y(i) - a(j))) * diff;
    }
    const Vector bj = b.row(j).transpose();
    const Matrix outer = bj * bj.transpose();
    for (Eigen::Index k = 0; k < p; ++k) {
      rhs.segment(k * d, d) += moment(k) * bj;
      for (Eigen::Index m = 0; m < p; ++m) normal.block(k * d, m * d, d, d) += scatter(k, m) * outer;
    }
  }
  Vector vec_bt;
  if (!solve_spd(0.5 * (normal + normal.transpose()), rhs, vec_bt)) {
    throw Error(ErrorCode::SingularNormalEquations, "direction normal equations are singular");
  }
  Matrix directions(p, d);
  for (Eigen::Index k = 0; k < p; ++k) directions.row(k) = vec_bt.segment(k * d, d).transpose();
  return directions;
}

Matrix update_B(const Matrix& f, const Vector& y, const Vector& a, const Matrix& b, const Matrix& weights) {
  return orthonormalize(solve_directions(f, y, a, b, weights, static_cast<int>(b.cols())));
}

double weighted_rss(const Matrix& f, const Vector& y, const Vector& a, const Matrix& b,
                    const Matrix& directions, const Matrix& weights) {
  const Eigen::Index n = f.rows();
  const Matrix gamma = b * directions.transpose();  // row j: (B b_j)^T
  const Matrix q = f * gamma.transpose();           // q(i, j) = f_i . gamma_j
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double base = a(j) - q(j, j);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = weights(i, j);
      if (w == 0.0) continue;
      const double r = y(i) - base - q(i, j);
      total += w * r * r;
    }
  }
  return total;
}

namespace {

// Outer product of gradients from a full-dimensional local linear pilot fit.
Matrix pilot_directions(const Matrix& f, const Vector& y, int d, const MaveOptions& options) {
  const Eigen::Index p = f.cols();
  const Matrix identity = Matrix::Identity(p, p);
  const double h = options.bandwidth ? *options.bandwidth
                                     : bandwidth_rule(f, identity, options.pilot_bandwidth_scale);
  Matrix w = kernel_weights(f, identity, h, options.weight_floor);
  const LocalFit pilot = local_linear(f, y, identity, w);
  const Matrix outer = pilot.b.transpose() * pilot.b;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(outer);
  return eig.eigenvectors().rowwise().reverse().leftCols(d);
}

}  // namespace

MaveFit mave_fit(const Matrix& x, const Vector& y, int d, const MaveOptions& options) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (y.size() != n) throw Error(ErrorCode::DimensionMismatch, "X and y row counts differ");
  if (d < 1 || d > p) throw Error(ErrorCode::InvalidArgument, "dimension must lie in [1, p]");
  if (n <= d) throw Error(ErrorCode::TooFewObservations, "MAVE needs n > d");

  MaveFit fit;
  fit.f_values = standardize_columns(x, &fit.center, &fit.scale);
  const Matrix& f = fit.f_values;
  const double inv_n = 1.0 / static_cast<double>(n);

  Matrix directions = d == p ? Matrix::Identity(p, p) : pilot_directions(f, y, d, options);
  Matrix weights;
  LocalFit local;
  double h = 0.0;
  auto refresh_local = [&](int iteration) {
    h = mave_bandwidth(f, directions, options);
    weights = kernel_weights(f, directions, h, options.weight_floor);
    if (iteration > 0) {
      fit.objective_trace.push_back({iteration, ObjectiveStage::AfterWeights,
                                     inv_n * weighted_rss(f, y, local.a, local.b, directions, weights)});
    }
    local = local_linear(f, y, directions, weights);
    fit.objective_trace.push_back({iteration, ObjectiveStage::AfterLocal,
                                   inv_n * weighted_rss(f, y, local.a, local.b, directions, weights)});
  };

  refresh_local(0);
  if (d == p) {
    fit.converged = true;
    fit.stop_reason = StopReason::FullDimension;
  } else {
    for (int it = 1; it <= options.max_iterations; ++it) {
      const Matrix raw = solve_directions(f, y, local.a, local.b, weights, d);
      Matrix q, r;
      thin_qr(raw, q, r);
      local.b = local.b * r.transpose();
      fit.objective_trace.push_back({it, ObjectiveStage::AfterDirections,
                                     inv_n * weighted_rss(f, y, local.a, local.b, q, weights)});
      const double change = 1.0 - vcc(q, directions);
      directions = q;
      fit.iterations = it;
      refresh_local(it);
      if (change < options.tolerance) {
        fit.converged = true;
        fit.stop_reason = StopReason::SubspaceConverged;
        break;
      }
    }
  }
  fit.B = directions;
  fit.a = std::move(local.a);
  fit.b = std::move(local.b);
  fit.weights = std::move(weights);
  fit.bandwidth = h;
  fit.rss = weighted_rss(f, y, fit.a, fit.b, fit.B, fit.weights);
  return fit;
}

double rss_criterion(double rss, int n, double h, int k) {
  return std::log(rss / n) + std::log(static_cast<double>(n)) / (n * std::pow(h, k)) * k;
}

}  // namespace tsdr
