#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tsdr/error.hpp"
#include "tsdr/stats.hpp"
#include "tsdr/transforms.hpp"

using namespace tsdr;

TEST_CASE("normal scores of a single observation are zero") {
  Matrix x(1, 1);
  x << 5.0;
  CHECK(normal_scores(x)(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("normal scores of 1, 2, 3 are the quartile quantiles") {
  Matrix x(3, 1);
  x << 1, 2, 3;
  const Matrix z = normal_scores(x);
  constexpr double q = 0.67448975019608174;
  CHECK(z(0, 0) == doctest::Approx(-q).epsilon(1e-12));
  CHECK(z(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(z(2, 0) == doctest::Approx(q).epsilon(1e-12));
}

TEST_CASE("normal scores are invariant to increasing maps and share scores on ties") {
  std::mt19937_64 rng(3);
  Matrix x = test::normal_matrix(rng, 50, 3);
  x(7, 1) = x(8, 1);
  const Matrix mapped = x.array().exp().matrix() * 3.0;
  const Matrix a = normal_scores(x);
  const Matrix b = normal_scores(mapped);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a(7, 1) == a(8, 1));
}

TEST_CASE("normal scores reject constant columns") {
  Matrix x = Matrix::Ones(5, 2);
  x(0, 0) = 2.0;
  CHECK_THROWS_AS(normal_scores(x), Error);
  try {
    normal_scores(x);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConstantColumn);
  }
}

TEST_CASE("normal scores pass a KS check against N(0,1)") {
  std::mt19937_64 rng(11);
  std::exponential_distribution<double> expo(1.0);
  Matrix x(600, 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    x(i, 0) = expo(rng);
    x(i, 1) = std::pow(expo(rng), 3.0);
  }
  const Matrix z = normal_scores(x);
  for (Eigen::Index j = 0; j < 2; ++j) {
    std::vector<double> col(z.col(j).data(), z.col(j).data() + z.rows());
    CHECK(test::ks_statistic(col, stats::normal_cdf) < test::ks_critical_01(col.size()));
  }
}

TEST_CASE("rescaled ECDF counts ties with <=") {
  const std::vector<double> sample{1.0, 2.0, 2.0, 3.0};
  const EmpiricalCdf cdf(sample);
  CHECK(rescaled_ecdf(cdf, 2.0) == doctest::Approx(3.0 / 5.0));
  CHECK(rescaled_ecdf(cdf, 0.0) == 0.0);
  CHECK(rescaled_ecdf(cdf, 10.0) == doctest::Approx(4.0 / 5.0));
}

TEST_CASE("Yeo-Johnson reference values") {
  CHECK(yeo_johnson_apply(2.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(yeo_johnson_apply(std::exp(1.0) - 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(yeo_johnson_apply(-1.0, 2.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
  CHECK(yeo_johnson_apply(0.0, 0.7) == 0.0);
  // lambda = 0.5, x = 3: ((1 + x)^0.5 - 1) / 0.5 = 2
  CHECK(yeo_johnson_apply(3.0, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
  // lambda = 0.5, x = -3: -((1 - x)^1.5 - 1) / 1.5 = -7 / 1.5
  CHECK(yeo_johnson_apply(-3.0, 0.5) == doctest::Approx(-7.0 / 1.5).epsilon(1e-14));
}

TEST_CASE("Yeo-Johnson is continuous in lambda at 0 and 2") {
  for (double x : {-3.0, -0.5, 0.25, 4.0}) {
    for (double at : {0.0, 2.0}) {
      const double centre = yeo_johnson_apply(x, at);
      // |d psi / d lambda| stays below 20 for these x, so a jump would exceed 2e-8.
      CHECK(std::abs(yeo_johnson_apply(x, at + 1e-9) - centre) < 2e-8);
      CHECK(std::abs(yeo_johnson_apply(x, at - 1e-9) - centre) < 2e-8);
    }
  }
}

TEST_CASE("Yeo-Johnson is strictly increasing in x") {
  for (double lambda : {-2.0, -0.7, 0.0, 0.5, 1.0, 2.0, 2.0 + 1e-13}) {
    double previous = yeo_johnson_apply(-20.0, lambda);
    for (double x = -19.9; x < 20.0; x += 0.1) {
      const double v = yeo_johnson_apply(x, lambda);
      CHECK(v > previous);
      previous = v;
    }
  }
}

TEST_CASE("Yeo-Johnson fit on normal data stays near the identity") {
  std::mt19937_64 rng(5);
  const Vector v = test::normal_vector(rng, 5000);
  const YeoJohnson fit = yeo_johnson_fit({v.data(), static_cast<std::size_t>(v.size())});
  CHECK(std::abs(fit.lambda() - 1.0) <= 0.15);
}

TEST_CASE("Yeo-Johnson fit on log-normal data is concave") {
  std::mt19937_64 rng(6);
  const Vector v = test::normal_vector(rng, 5000).array().exp();
  const YeoJohnson fit = yeo_johnson_fit({v.data(), static_cast<std::size_t>(v.size())});
  CHECK(fit.lambda() < 1.0);
  std::vector<double> transformed;
  for (double x : v) transformed.push_back(fit(x));
  CHECK(std::abs(stats::skewness(transformed)) < std::abs(stats::skewness({v.data(), static_cast<std::size_t>(v.size())})));
}

TEST_CASE("Yeo-Johnson fit errors") {
  const std::vector<double> constant{2.0, 2.0, 2.0};
  try {
    yeo_johnson_fit(constant);
    FAIL("expected DegenerateSample");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSample);
  }
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(yeo_johnson_fit(two), Error);
}

TEST_CASE("Yeo-Johnson profile likelihood is maximized by the fit") {
  std::mt19937_64 rng(8);
  const Vector v = test::normal_vector(rng, 400).array().exp();
  const std::span<const double> s(v.data(), static_cast<std::size_t>(v.size()));
  const double best = yeo_johnson_fit(s).lambda();
  const double at = yeo_johnson_loglik(s, best);
  for (double lambda = -2.0; lambda <= 2.0; lambda += 0.05) CHECK(yeo_johnson_loglik(s, lambda) <= at + 1e-9);
}

TEST_CASE("Yeo-Johnson columns are standardized") {
  std::mt19937_64 rng(9);
  const Matrix x = test::normal_matrix(rng, 300, 3).array().exp();
  std::vector<double> lambdas;
  const Matrix z = yeo_johnson_columns(x, &lambdas);
  CHECK(lambdas.size() == 3);
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(std::abs(z.col(j).mean()) < 1e-12);
    CHECK((z.col(j).array() - z.col(j).mean()).square().mean() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("standardize_transform examples") {
  const std::vector<double> a{-1.0, 1.0};
  const Standardized sa = standardize_transform(a);
  CHECK(sa.values(0) == doctest::Approx(-1.0));
  CHECK(sa.values(1) == doctest::Approx(1.0));
  CHECK(sa.shift == doctest::Approx(0.0));
  CHECK(sa.scale == doctest::Approx(1.0));

  const std::vector<double> b{0.0, 2.0};
  const Standardized sb = standardize_transform(b);
  CHECK(sb.values(0) == doctest::Approx(-1.0));
  CHECK(sb.values(1) == doctest::Approx(1.0));

  const std::vector<double> c{1.0, 2.0, 3.0};
  const Standardized sc = standardize_transform(c);
  CHECK(std::abs(sc.values.mean()) < 1e-12);
  CHECK(sc.values.squaredNorm() / 3.0 == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> flat{4.0, 4.0};
  CHECK_THROWS_AS(standardize_transform(flat), Error);
}

TEST_CASE("stats helpers") {
  CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK_THROWS_AS(stats::normal_quantile(1.0), Error);
  CHECK(stats::chi_square_quantile(27, 0.95) == doctest::Approx(40.113272069413625).epsilon(1e-10));
  const std::vector<double> v{1.0, 2.0, 3.0, 10.0};
  CHECK(stats::mean(v) == doctest::Approx(4.0));
  CHECK(stats::variance(v) == doctest::Approx(12.5));
  CHECK(stats::skewness(v) > 0.0);
}
