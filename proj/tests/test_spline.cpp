#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <memory>

#include "support.hpp"
#include "tsdr/spline.hpp"

using namespace tsdr;

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

std::shared_ptr<const SplineBasis> two_interval_basis() {
  return std::make_shared<const SplineBasis>(std::vector<double>{0.0, 0.5, 1.0}, 3);
}

// Adaptive quadrature of a function over the breakpoint intervals of a basis.
template <typename F>
double integrate_pieces(const SplineBasis& basis, double to, F f) {
  const auto& br = basis.breakpoints();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double lo = br[k];
    const double hi = std::min(br[k + 1], to);
    if (hi <= lo) break;
    total += Kronrod::integrate(f, lo, hi, 15, 1e-14);
  }
  return total;
}

}  // namespace

TEST_CASE("basis layout") {
  const auto basis = two_interval_basis();
  CHECK(basis->degree() == 3);
  CHECK(basis->num_functions() == 4);
  CHECK(basis->size() == 5);
  const Vector v = basis->evaluate(0.3);
  CHECK(v(0) == 1.0);
  // Partition of unity: the dropped first B-spline is 1 - sum of the others.
  CHECK(v.tail(4).sum() <= 1.0 + 1e-14);
  CHECK(basis->evaluate(0.0).tail(4).sum() == doctest::Approx(0.0));
  CHECK(basis->evaluate(1.0).tail(4).sum() == doctest::Approx(1.0));
}

TEST_CASE("quantile basis with fewer functions than the degree lowers the degree") {
  const std::vector<double> sample{0.0, 1.0, 2.0, 3.0};
  const SplineBasis zero = SplineBasis::from_sample_quantiles(sample, 0, 3);
  CHECK(zero.degree() == 0);
  CHECK(zero.size() == 1);
  const SplineBasis six = SplineBasis::from_sample_quantiles(sample, 6, 3);
  CHECK(six.size() == 7);
  CHECK(six.breakpoints().size() == 5);
}

TEST_CASE("monotone transform closed forms") {
  const auto basis = two_interval_basis();
  const MonotoneTransform id = MonotoneTransform::identity(basis);
  Vector twice = Vector::Zero(5);
  twice(0) = std::log(2.0);
  const MonotoneTransform doubled(basis, twice);
  for (double t : {0.0, 0.1, 0.45, 0.5, 0.77, 1.0}) {
    CHECK(id(t) == doctest::Approx(t).epsilon(1e-14));
    CHECK(doubled(t) == doctest::Approx(2.0 * t).epsilon(1e-14));
  }
}

TEST_CASE("monotone transform matches independent quadrature values") {
  const auto basis = two_interval_basis();
  Vector c(5);
  c << 0.1, -0.3, 0.5, 0.2, -0.4;
  const MonotoneTransform f(basis, c);
  CHECK(std::abs(f(0.8) - 0.976488449895681) < 1e-8);
  CHECK(std::abs(f(1.3) - 1.3990847014419159) < 1e-8);
  CHECK(std::abs(f(-0.2) - -0.22103418361512955) < 1e-8);

  const MonotoneTransform shifted(basis, c, 2.5);
  CHECK(shifted(0.8) == doctest::Approx(2.5 + f(0.8)).epsilon(1e-14));
}

TEST_CASE("monotone transform agrees with adaptive quadrature on a quantile basis") {
  std::mt19937_64 rng(17);
  const Vector sample = test::normal_vector(rng, 200);
  auto basis = std::make_shared<const SplineBasis>(
      SplineBasis::from_sample_quantiles({sample.data(), static_cast<std::size_t>(sample.size())}));
  std::normal_distribution<double> normal(0.0, 0.7);
  for (int trial = 0; trial < 5; ++trial) {
    Vector c(basis->size());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = normal(rng);
    const MonotoneTransform f(basis, c);
    auto integrand = [&](double u) { return std::exp(basis->evaluate(u).dot(c)); };
    for (double t : {basis->lower() + 0.1, -0.3, 0.0, 0.9, basis->upper() - 0.05}) {
      CHECK(std::abs(f(t) - integrate_pieces(*basis, t, integrand)) < 1e-8);
    }
  }
}

TEST_CASE("monotone transform is strictly increasing on a fine grid") {
  std::mt19937_64 rng(23);
  const Vector sample = test::normal_vector(rng, 100);
  auto basis = std::make_shared<const SplineBasis>(
      SplineBasis::from_sample_quantiles({sample.data(), static_cast<std::size_t>(sample.size())}));
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vector c(basis->size());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = normal(rng);
    const MonotoneTransform f(basis, c);
    const double lo = basis->lower() - 0.5;
    const double hi = basis->upper() + 0.5;
    double previous = f(lo);
    double min_slope = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 1000; ++i) {
      const double t = lo + (hi - lo) * i / 1000.0;
      const double v = f(t);
      min_slope = std::min(min_slope, (v - previous) / ((hi - lo) / 1000.0));
      previous = v;
      CHECK(f.derivative(t) > 0.0);
    }
    CHECK(min_slope > 0.0);
  }
}

TEST_CASE("coefficient gradient matches finite differences") {
  const auto basis = two_interval_basis();
  Vector c(5);
  c << 0.2, 0.4, -0.6, 0.1, 0.3;
  const MonotoneTransform f(basis, c);
  for (double t : {0.3, 0.7, 1.2}) {
    const Vector g = f.coefficient_gradient(t);
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      Vector up = c;
      Vector down = c;
      up(k) += 1e-6;
      down(k) -= 1e-6;
      const double fd = (MonotoneTransform(basis, up)(t) - MonotoneTransform(basis, down)(t)) / 2e-6;
      CHECK(g(k) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("sample quadrature reproduces the transform and its gradient") {
  std::mt19937_64 rng(29);
  const Vector sample = test::normal_vector(rng, 60);
  auto basis = std::make_shared<const SplineBasis>(
      SplineBasis::from_sample_quantiles({sample.data(), static_cast<std::size_t>(sample.size())}));
  Vector points = sample;
  points(0) = basis->upper() + 0.4;
  points(1) = basis->lower() - 0.3;
  const SampleQuadrature quadrature(*basis, {points.data(), static_cast<std::size_t>(points.size())});
  Vector c = Vector::LinSpaced(basis->size(), -0.5, 0.5);
  const MonotoneTransform f(basis, c);
  Vector values;
  Matrix gradient;
  quadrature.evaluate(c, values, &gradient);
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    CHECK(values(i) == doctest::Approx(f(points(i))).epsilon(1e-12));
    CHECK((gradient.row(i).transpose() - f.coefficient_gradient(points(i))).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("penalty matrix matches independent values") {
  const auto basis = two_interval_basis();
  const Matrix p = penalty_matrix(*basis);
  Matrix expected(5, 5);
  expected << 0, 0, 0, 0, 0,
              0, 192, -48, -24, 12,
              0, -48, 48, -48, 24,
              0, -24, -48, 192, -132,
              0, 12, 24, -132, 96;
  CHECK((p - expected).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("penalty matrix is PSD with a zero constant row") {
  std::mt19937_64 rng(31);
  const Vector sample = test::normal_vector(rng, 150).array().exp();
  const SplineBasis basis = SplineBasis::from_sample_quantiles({sample.data(), static_cast<std::size_t>(sample.size())});
  const Matrix p = penalty_matrix(basis);
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(p.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.col(0).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("penalty quadratic form equals the integrated squared curvature") {
  std::mt19937_64 rng(37);
  const Vector sample = test::normal_vector(rng, 150);
  const SplineBasis basis = SplineBasis::from_sample_quantiles({sample.data(), static_cast<std::size_t>(sample.size())});
  const Matrix p = penalty_matrix(basis);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Vector c(basis.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = normal(rng);
    const double oracle = integrate_pieces(basis, basis.upper(), [&](double u) {
      const double curvature = basis.evaluate(u, 2).dot(c);
      return curvature * curvature;
    });
    CHECK(c.dot(p * c) == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("penalty matrix vanishes for degree below two") {
  const SplineBasis linear({0.0, 0.3, 1.0}, 1);
  CHECK(penalty_matrix(linear).cwiseAbs().maxCoeff() == 0.0);
  const SplineBasis constant({0.0, 1.0}, 0);
  CHECK(penalty_matrix(constant).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials of degree 19 exactly") {
  const auto& rule = gauss_legendre10();
  double weight_sum = 0.0;
  double moment18 = 0.0;
  for (int k = 0; k < 10; ++k) {
    weight_sum += rule.weights[static_cast<std::size_t>(k)];
    moment18 += rule.weights[static_cast<std::size_t>(k)] * std::pow(rule.nodes[static_cast<std::size_t>(k)], 18);
  }
  CHECK(weight_sum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(moment18 == doctest::Approx(2.0 / 19.0).epsilon(1e-13));
}
