#include <cmath>
#include <iostream>
#include <limits>

#include "tsdr/error.hpp"
#include "tsdr/mave.hpp"
#include "tsdr/metrics.hpp"

namespace tsdr {

TransformBlock::TransformBlock(const SampleQuadrature& quadrature, const Matrix& penalty, const Matrix& f,
                               const Vector& y, const Vector& a, const Matrix& b, const Matrix& directions,
                               const Matrix& weights, int l, double fixed_penalty)
    : quadrature_(quadrature), penalty_(penalty), weights_(weights), fixed_penalty_(fixed_penalty) {
  const Eigen::Index n = f.rows();
  const Matrix gamma = b * directions.transpose();  // row j: (B b_j)^T
  beta_ = gamma.col(l);
  Matrix others = f;
  others.col(l).setZero();
  const Matrix q = others * gamma.transpose();
  partial_.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double base = a(j) - q(j, j);
    for (Eigen::Index i = 0; i < n; ++i) partial_(i, j) = y(i) - base - q(i, j);
  }
}

double TransformBlock::objective(const Vector& c, double lambda) const {
  Vector phi;
  quadrature_.evaluate(c, phi);
  if (!phi.allFinite()) return std::numeric_limits<double>::infinity();
  const Eigen::Index n = partial_.rows();
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = weights_(i, j);
      if (w == 0.0) continue;
      const double r = partial_(i, j) - beta_(j) * (phi(i) - phi(j));
      total += w * r * r;
    }
  }
  return total / static_cast<double>(n) + lambda * c.dot(penalty_ * c) + fixed_penalty_;
}

GaussJordanState assemble_gauss_jordan(const TransformBlock& block, const Vector& c, double lambda,
                                       bool explicit_design) {
  const Matrix& w = block.weights();
  const Matrix& partial = block.partial_residual();
  const Vector& beta = block.slope_loading();
  const Eigen::Index n = partial.rows();
  const Eigen::Index m = block.size();

  Vector phi;
  Matrix g;
  block.quadrature().evaluate(c, phi, &g);

  // Aggregated sums replace the explicit n^2-row design:
  //   X*^T X* = sum_ij beta_j^2 w_ij (g_i - g_j)(g_i - g_j)^T
  //   X*^T r* = sum_ij beta_j w_ij r_ij (g_i - g_j)
  const Vector beta2 = beta.array().square();
  const Vector u = w * beta2;                 // u_i = sum_j beta_j^2 w_ij
  const Vector omega = w.colwise().sum().transpose();
  const Matrix local_mean = w.transpose() * g;  // row j: sum_i w_ij g_i
  Matrix xtx = g.transpose() * u.asDiagonal() * g;
  const Matrix cross = g.transpose() * beta2.asDiagonal() * local_mean;
  xtx -= cross + cross.transpose();
  xtx += g.transpose() * (beta2.array() * omega.array()).matrix().asDiagonal() * g;

  Matrix weighted_r(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      weighted_r(i, j) = w(i, j) * (partial(i, j) - beta(j) * (phi(i) - phi(j)));
    }
  }
  const Vector v = weighted_r * beta;
  const Vector rho = weighted_r.colwise().sum().transpose();
  const Vector xtr = g.transpose() * v - g.transpose() * (beta.array() * rho.array()).matrix();

  const double inv_n = 1.0 / static_cast<double>(n);
  GaussJordanState state;
  state.c = c;
  state.H = inv_n * xtx + lambda * block.penalty();
  state.H = 0.5 * (state.H + state.H.transpose());
  state.s = -inv_n * xtr + lambda * block.penalty() * c;

  if (explicit_design) {
    state.xstar.resize(n * n, m);
    state.rstar.resize(n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double root = std::sqrt(w(i, j));
        state.xstar.row(i + n * j) = beta(j) * root * (g.row(i) - g.row(j));
        state.rstar(i + n * j) = root * (partial(i, j) - beta(j) * (phi(i) - phi(j)));
      }
    }
  }
  return state;
}

GaussJordanResult gauss_jordan_block(const TransformBlock& block, Vector c, double lambda, int max_iterations,
                                     double tolerance) {
  GaussJordanResult result;
  double current = block.objective(c, lambda);
  result.objective.push_back(current);
  for (int it = 0; it < max_iterations; ++it) {
    const GaussJordanState state = assemble_gauss_jordan(block, c, lambda);
    Vector delta;
    if (!solve_spd(state.H, -state.s, delta)) {
      throw Error(ErrorCode::PenaltySingular, "transform curvature matrix is singular");
    }
    double step = 1.0;
    bool accepted = false;
    Vector candidate;
    for (int halving = 0; halving < 30; ++halving) {
      candidate = c + step * delta;
      const double value = block.objective(candidate, lambda);
      if (value <= current) {
        current = value;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double size = (step * delta).lpNorm<Eigen::Infinity>();
    c = std::move(candidate);
    result.iterations = it + 1;
    result.objective.push_back(current);
    if (size < tolerance) break;
  }
  result.c = std::move(c);
  return result;
}

MaveFit tmave_fit(const Matrix& x, const Vector& y, int d, const TmaveOptions& options) {
  std::vector<std::shared_ptr<const SplineBasis>> bases;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const Vector column = x.col(k);
    bases.push_back(std::make_shared<const SplineBasis>(SplineBasis::from_sample_quantiles(
        {column.data(), static_cast<std::size_t>(column.size())}, options.basis_size, options.degree)));
  }
  return tmave_fit(x, y, d, options, bases);
}

MaveFit tmave_fit(const Matrix& x, const Vector& y, int d, const TmaveOptions& options,
                  const std::vector<std::shared_ptr<const SplineBasis>>& bases) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (static_cast<Eigen::Index>(bases.size()) != p) {
    throw Error(ErrorCode::DimensionMismatch, "one spline basis per predictor is required");
  }
  if (!(options.lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be non-negative");
  const double lambda = options.lambda;
  const double inv_n = 1.0 / static_cast<double>(n);

  // Step 0: classical MAVE on the raw standardized predictors.
  MaveFit fit = mave_fit(x, y, d, options.mave);

  std::vector<SampleQuadrature> quadratures;
  std::vector<Matrix> penalties;
  std::vector<Vector> coeffs;
  std::vector<double> constants(static_cast<std::size_t>(p), 0.0);
  Matrix f(n, p);
  Vector phi;
  for (Eigen::Index k = 0; k < p; ++k) {
    const Vector column = x.col(k);
    quadratures.emplace_back(*bases[static_cast<std::size_t>(k)],
                             std::span<const double>(column.data(), static_cast<std::size_t>(n)));
    penalties.push_back(penalty_matrix(*bases[static_cast<std::size_t>(k)]));
    coeffs.push_back(Vector::Zero(bases[static_cast<std::size_t>(k)]->size()));
    quadratures.back().evaluate(coeffs.back(), phi);
    f.col(k) = phi;
  }

  Matrix directions = fit.B;
  Vector a = fit.a;
  Matrix b = fit.b;
  Matrix weights = fit.weights;
  double h = fit.bandwidth;
  fit.objective_trace.clear();

  auto penalty_total = [&] {
    double total = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) {
      const auto& c = coeffs[static_cast<std::size_t>(k)];
      total += lambda * c.dot(penalties[static_cast<std::size_t>(k)] * c);
    }
    return total;
  };
  auto objective = [&] { return inv_n * weighted_rss(f, y, a, b, directions, weights) + penalty_total(); };
  // Standardize every transformed predictor; scale is absorbed by c_k0 and
  // by row k of `raw` so the fitted surface is unchanged.
  auto standardize = [&](Matrix* raw) {
    for (Eigen::Index k = 0; k < p; ++k) {
      const double m = f.col(k).mean();
      const double s = std::sqrt((f.col(k).array() - m).square().mean());
      if (!(s > 0.0)) throw Error(ErrorCode::ConstantColumn, "transformed predictor collapsed");
      auto idx = static_cast<std::size_t>(k);
      coeffs[idx](0) -= std::log(s);
      constants[idx] = (constants[idx] - m) / s;
      f.col(k) = (f.col(k).array() - m) / s;
      if (raw) raw->row(k) *= s;
    }
  };
  standardize(nullptr);
  fit.objective_trace.push_back({0, ObjectiveStage::AfterLocal, objective()});

  fit.converged = false;
  fit.stop_reason = StopReason::IterationLimit;
  fit.iterations = 0;
  for (int it = 1; it <= options.mave.max_iterations; ++it) {
    // Step 1: Gauss-Seidel sweeps over the predictor blocks.
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      double largest = 0.0;
      for (Eigen::Index l = 0; l < p; ++l) {
        const auto idx = static_cast<std::size_t>(l);
        const double own = lambda * coeffs[idx].dot(penalties[idx] * coeffs[idx]);
        const TransformBlock block(quadratures[idx], penalties[idx], f, y, a, b, directions, weights,
                                   static_cast<int>(l), penalty_total() - own);
        GaussJordanResult step = gauss_jordan_block(block, coeffs[idx], lambda, options.max_gauss_jordan,
                                                    options.gauss_jordan_tolerance);
        largest = std::max(largest, (step.c - coeffs[idx]).lpNorm<Eigen::Infinity>());
        coeffs[idx] = std::move(step.c);
        quadratures[idx].evaluate(coeffs[idx], phi);
        f.col(l) = phi.array() + constants[idx];
      }
      if (largest < options.sweep_tolerance) break;
    }
    fit.objective_trace.push_back({it, ObjectiveStage::AfterTransform, objective()});

    // Step 2: directions, then standardization and orthonormalization.
    Matrix raw = solve_directions(f, y, a, b, weights, d);
    standardize(&raw);
    Matrix q, r;
    thin_qr(raw, q, r);
    b = b * r.transpose();
    const double change = 1.0 - vcc(q, directions);
    directions = std::move(q);
    const double before_refresh = objective();
    fit.objective_trace.push_back({it, ObjectiveStage::AfterDirections, before_refresh});
    fit.iterations = it;

    // Step 3: refine weights and local fits. A refresh that raises the
    // criterion is discarded and the loop ends.
    const double new_h = mave_bandwidth(f, directions, options.mave);
    Matrix new_weights = kernel_weights(f, directions, new_h, options.mave.weight_floor);
    LocalFit local = local_linear(f, y, directions, new_weights);
    const double refreshed =
        inv_n * weighted_rss(f, y, local.a, local.b, directions, new_weights) + penalty_total();
    if (refreshed > before_refresh + 1e-8 * std::max(1.0, std::abs(before_refresh))) {
      fit.converged = true;
      fit.stop_reason = StopReason::CriterionIncrease;
      break;
    }
    h = new_h;
    weights = std::move(new_weights);
    fit.objective_trace.push_back({it, ObjectiveStage::AfterWeights, objective()});
    a = std::move(local.a);
    b = std::move(local.b);
    fit.objective_trace.push_back({it, ObjectiveStage::AfterLocal, refreshed});

    if (change < options.mave.tolerance) {
      fit.stop_reason = StopReason::SubspaceConverged;
      fit.converged = true;
      break;
    }
  }

  fit.transforms.clear();
  for (Eigen::Index k = 0; k < p; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    fit.transforms.emplace_back(bases[idx], coeffs[idx], constants[idx]);
  }
  fit.B = directions;
  fit.a = std::move(a);
  fit.b = std::move(b);
  fit.weights = std::move(weights);
  fit.f_values = std::move(f);
  fit.bandwidth = h;
  fit.rss = weighted_rss(fit.f_values, y, fit.a, fit.b, fit.B, fit.weights);
  return fit;
}

RssDimensionResult rss_dimension(const Matrix& x, const Vector& y, MaveVariant variant,
                                 const TmaveOptions& options, int k_max) {
  const auto n = static_cast<int>(x.rows());
  if (k_max < 1 || k_max > x.cols()) throw Error(ErrorCode::InvalidArgument, "k_max must lie in [1, p]");
  RssDimensionResult result;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) {
    try {
      MaveFit fit = variant == MaveVariant::Classical ? mave_fit(x, y, k, options.mave)
                                                      : tmave_fit(x, y, k, options);
      const double value = rss_criterion(fit.rss, n, fit.bandwidth, k);
      result.criterion.push_back(value);
      result.rss.push_back(fit.rss);
      result.fits.emplace_back(std::move(fit));
      if (value < best) {
        best = value;
        result.k_hat = k;
      }
    } catch (const Error& e) {
      std::cerr << "warning: dimension " << k << " skipped: " << e.what() << '\n';
      result.criterion.push_back(std::numeric_limits<double>::quiet_NaN());
      result.rss.push_back(std::numeric_limits<double>::quiet_NaN());
      result.fits.emplace_back(std::nullopt);
    }
  }
  if (result.k_hat == 0) throw Error(ErrorCode::SingularLocalFit, "no dimension could be fitted");
  return result;
}

}  // namespace tsdr
