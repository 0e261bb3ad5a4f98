#pragma once

#include <optional>
#include <vector>

#include "tsdr/linalg.hpp"
#include "tsdr/spline.hpp"

namespace tsdr {

struct MaveOptions {
  /// h = bandwidth_scale * n^{-1/(d+4)} * (mean sd of the projected predictors).
  double bandwidth_scale = 1.0;
  /// Same rule with d = p for the full-dimensional pilot kernel.
  double pilot_bandwidth_scale = 1.0;
  /// Overrides the bandwidth rule when set.
  std::optional<double> bandwidth;
  int max_iterations = 50;
  /// Stop once 1 - VCC between successive direction estimates drops below this.
  double tolerance = 1e-5;
  /// Kernel weights below this value are dropped from every sum.
  double weight_floor = 1e-12;
};

struct TmaveOptions {
  MaveOptions mave;
  double lambda = 1e-3;
  int basis_size = 6;
  int degree = 3;
  int max_sweeps = 10;
  double sweep_tolerance = 1e-6;
  int max_gauss_jordan = 20;
  double gauss_jordan_tolerance = 1e-6;
};

enum class ObjectiveStage { AfterLocal, AfterTransform, AfterDirections, AfterWeights };

/// Penalized criterion recorded after each stage of an outer iteration.
struct ObjectiveRecord {
  int iteration;
  ObjectiveStage stage;
  double value;
};

enum class StopReason {
  SubspaceConverged,   // 1 - VCC between successive estimates below tolerance
  CriterionIncrease,   // a weight refresh would raise the criterion; previous weights kept
  IterationLimit,
  FullDimension,       // d = p, nothing to estimate
};

struct MaveFit {
  Matrix B;        // p x d, orthonormal columns, in standardized-predictor coordinates
  Vector a;        // local intercepts
  Matrix b;        // n x d local slopes
  Matrix weights;  // weights(i, j) = w_ij; every column sums to one
  std::vector<MonotoneTransform> transforms;  // empty for classical MAVE
  Matrix f_values;  // standardized (transformed) predictors used in the fit
  Vector center;    // raw predictor means (classical MAVE standardization)
  Vector scale;     // raw predictor standard deviations
  double rss = 0.0;
  double bandwidth = 0.0;
  int iterations = 0;
  bool converged = false;
  StopReason stop_reason = StopReason::IterationLimit;
  std::vector<ObjectiveRecord> objective_trace;

  /// Directions expressed on the raw predictor scale (classical MAVE).
  Matrix raw_directions() const;
  /// Standardized (transformed) predictors of new rows projected onto B.
  Matrix project(const Matrix& x) const;
};

struct LocalFit {
  Vector a;
  Matrix b;
};

/// Bandwidth for the current projection under the configured rule.
double mave_bandwidth(const Matrix& f, const Matrix& directions, const MaveOptions& options);
/// scale * n^{-1/(d+4)} * (mean sd of the columns of f B).
double bandwidth_rule(const Matrix& f, const Matrix& directions, double scale);

/// w_ij = K_h(B^T f^{ij}) / sum_i K_h(B^T f^{ij}) with a Gaussian product kernel.
Matrix kernel_weights(const Matrix& f, const Matrix& directions, double h, double floor = 1e-12);

/// Weighted local linear fits of y on (1, B^T f^{ij}) around every point j.
LocalFit local_linear(const Matrix& f, const Vector& y, const Matrix& directions, const Matrix& weights);

/// Kernel weights followed by the local linear fits.
LocalFit update_local(const Matrix& f, const Vector& y, const Matrix& directions, double h,
                      Matrix* weights_out = nullptr, double floor = 1e-12);

/// Unnormalized solution of the vectorized weighted least-squares normal
/// equations for vec(B^T).
Matrix solve_directions(const Matrix& f, const Vector& y, const Vector& a, const Matrix& b,
                        const Matrix& weights, int d);

/// solve_directions followed by orthonormalization.
Matrix update_B(const Matrix& f, const Vector& y, const Vector& a, const Matrix& b, const Matrix& weights);

/// sum_j sum_i w_ij (y_i - a_j - b_j^T B^T f^{ij})^2
double weighted_rss(const Matrix& f, const Vector& y, const Vector& a, const Matrix& b,
                    const Matrix& directions, const Matrix& weights);

/// Classical MAVE on the column-standardized predictors.
MaveFit mave_fit(const Matrix& x, const Vector& y, int d, const MaveOptions& options = {});

/// The transformed MAVE loop: Gauss-Seidel transform updates, direction
/// update, weight refinement with local fits, until the subspace settles.
MaveFit tmave_fit(const Matrix& x, const Vector& y, int d, const TmaveOptions& options = {});
MaveFit tmave_fit(const Matrix& x, const Vector& y, int d, const TmaveOptions& options,
                  const std::vector<std::shared_ptr<const SplineBasis>>& bases);

/// Residual structure for updating one predictor's transform coefficients
/// while everything else is held fixed.
class TransformBlock {
 public:
  /// `f` holds the current transformed predictors; column `l` is replaced by
  /// the values the block computes from its coefficients.
  TransformBlock(const SampleQuadrature& quadrature, const Matrix& penalty, const Matrix& f,
                 const Vector& y, const Vector& a, const Matrix& b, const Matrix& directions,
                 const Matrix& weights, int l, double fixed_penalty);

  int size() const noexcept { return static_cast<int>(penalty_.rows()); }
  /// Criterion as a function of c_l (other blocks' penalty included).
  double objective(const Vector& c, double lambda) const;
  const SampleQuadrature& quadrature() const noexcept { return quadrature_; }
  const Matrix& penalty() const noexcept { return penalty_; }
  const Matrix& weights() const noexcept { return weights_; }
  const Matrix& partial_residual() const noexcept { return partial_; }
  const Vector& slope_loading() const noexcept { return beta_; }
  double fixed_penalty() const noexcept { return fixed_penalty_; }

 private:
  const SampleQuadrature& quadrature_;
  const Matrix& penalty_;
  const Matrix& weights_;
  Matrix partial_;  // y_i - a_j - sum_{k != l} b_j^T B_k f^{ij}_k
  Vector beta_;     // b_j^T B_l
  double fixed_penalty_;
};

struct GaussJordanState {
  Vector c;
  Matrix H;  // (1/n) X*^T X* + lambda P
  Vector s;  // -(1/n) X*^T r* + lambda P c
  Matrix xstar;  // n^2 x (M+1); only filled on request
  Vector rstar;
};

GaussJordanState assemble_gauss_jordan(const TransformBlock& block, const Vector& c, double lambda,
                                       bool explicit_design = false);

struct GaussJordanResult {
  Vector c;
  int iterations = 0;
  std::vector<double> objective;  // criterion after each accepted step, starting value first
};

/// Damped Gauss-Newton steps H delta = -s with step halving, until
/// ||delta||_inf < tolerance or `max_iterations`.
GaussJordanResult gauss_jordan_block(const TransformBlock& block, Vector c, double lambda,
                                     int max_iterations = 20, double tolerance = 1e-6);

enum class MaveVariant { Classical, Transformed };

struct RssDimensionResult {
  int k_hat = 0;
  std::vector<double> criterion;  // NaN for dimensions whose fit failed
  std::vector<double> rss;
  std::vector<std::optional<MaveFit>> fits;
};

/// log(RSS_k / n) + log(n) / (n h^k) * k
double rss_criterion(double rss, int n, double h, int k);

/// Fits every dimension 1..k_max and returns the criterion minimizer.
RssDimensionResult rss_dimension(const Matrix& x, const Vector& y, MaveVariant variant,
                                 const TmaveOptions& options, int k_max);

}  // namespace tsdr
