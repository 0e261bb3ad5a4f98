#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tsdr/error.hpp"
#include "tsdr/metrics.hpp"
#include "tsdr/simulate.hpp"
#include "tsdr/stats.hpp"

using namespace tsdr;

TEST_CASE("marginal quantile reference values") {
  CHECK(marginal_quantile(Marginal::Cauchy, 0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(marginal_quantile(Marginal::Exponential, 1.0 - std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(marginal_quantile(Marginal::MarronWand6, 0.5)) < 1e-10);
  CHECK(marginal_quantile(Marginal::MarronWand2, 0.3) == doctest::Approx(0.4378269812341312).epsilon(1e-9));
  CHECK(marginal_quantile(Marginal::MarronWand3, 0.3) == doctest::Approx(-2.6458800443366353).epsilon(1e-9));
  CHECK(marginal_quantile(Marginal::MarronWand4, 0.3) == doctest::Approx(-0.17569300345224204).epsilon(1e-9));
  CHECK(marginal_quantile(Marginal::MarronWand5, 0.3) == doctest::Approx(-0.05817866323097839).epsilon(1e-9));
  CHECK(marginal_quantile(Marginal::MarronWand6, 0.3) == doctest::Approx(-0.8361724880920579).epsilon(1e-9));
  CHECK(marginal_quantile(Marginal::Beta3Half, 0.3) == doctest::Approx(0.8234618619965851).epsilon(1e-10));
  CHECK(marginal_quantile(Marginal::StudentT2, 0.9) == doctest::Approx(1.8856180831641507).epsilon(1e-12));
  CHECK(marginal_quantile(Marginal::SkewLaplace, 0.9) == doctest::Approx(-0.6615256157398726).epsilon(1e-12));
  CHECK(marginal_cdf(Marginal::SkewLaplace, -1.0) == doctest::Approx(0.8648059742936269).epsilon(1e-12));
  CHECK(marginal_cdf(Marginal::SkewLaplace, 0.3) == doctest::Approx(0.9924311195750629).epsilon(1e-12));
  CHECK(marginal_cdf(Marginal::MarronWand2, 0.2) == doctest::Approx(0.21467342745708629).epsilon(1e-12));
  CHECK(marginal_cdf(Marginal::MarronWand5, 0.2) == doctest::Approx(0.937450852190549).epsilon(1e-12));
  CHECK_THROWS_AS(marginal_quantile(Marginal::Cauchy, 0.0), Error);
  CHECK_THROWS_AS(marginal_quantile(Marginal::Beta3Half, 1.5), Error);
}

TEST_CASE("CDF and survival are complementary") {
  for (Marginal m : {Marginal::SkewLaplace, Marginal::Beta3Half, Marginal::Exponential, Marginal::StudentT3,
                     Marginal::MarronWand3, Marginal::MarronWand5, Marginal::Cauchy}) {
    for (double x : {-3.0, -0.2, 0.1, 0.9, 4.0}) {
      CHECK(marginal_cdf(m, x) + marginal_survival(m, x) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(marginal_upper_quantile(m, 0.2) == doctest::Approx(marginal_quantile(m, 0.8)).epsilon(1e-8));
  }
}

TEST_CASE("PIT maps round trip") {
  for (Marginal m : {Marginal::SkewLaplace, Marginal::Beta3Half, Marginal::Exponential, Marginal::StudentT2,
                     Marginal::StudentT4, Marginal::MarronWand2, Marginal::MarronWand3, Marginal::MarronWand4,
                     Marginal::MarronWand5, Marginal::MarronWand6, Marginal::Cauchy}) {
    // Beta(3, 0.5) draws with f > 3.5 lie within 1e-9 of 1, where the double
    // spacing of X itself limits how well f can be recovered.
    const double reach = m == Marginal::Beta3Half ? 3.5 : 5.0;
    for (double f = -reach; f <= reach; f += 0.25) {
      INFO(to_string(m), " f=", f);
      CHECK(std::abs(pit_inverse(m, pit_forward(m, f)) - f) < 1e-8);
    }
  }
}

TEST_CASE("generated PIT predictors invert to the latent scores") {
  for (Scenario s : {Scenario::Case2, Scenario::Case3, Scenario::Case4, Scenario::Case5, Scenario::Case6,
                     Scenario::Example1}) {
    const GeneratedData data = generate({s, 500, 0.0, 5, 21});
    const Eigen::Index checked = s == Scenario::Example1 ? 4 : data.X.cols();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < checked; ++j) {
      for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
        worst = std::max(worst, std::abs(data.transforms[static_cast<std::size_t>(j)](data.X(i, j)) - data.f(i, j)));
      }
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("true transforms are strictly increasing") {
  for (const auto& name : scenario_names()) {
    const GeneratedData data = generate({parse_scenario(name), 50, 0.0, 5, 3});
    for (std::size_t j = 0; j < data.transforms.size(); ++j) {
      const auto& col = data.X.col(static_cast<Eigen::Index>(j));
      const double lo = col.minCoeff();
      const double hi = col.maxCoeff();
      double previous = data.transforms[j](lo);
      for (int i = 1; i <= 200; ++i) {
        const double v = data.transforms[j](lo + (hi - lo) * i / 200.0);
        CHECK(v > previous);
        previous = v;
      }
    }
  }
}

TEST_CASE("generated marginals pass KS checks") {
  const GeneratedData data = generate({Scenario::Case4, 5000, 0.0, 5, 33});
  const Marginal expected[] = {Marginal::StudentT2, Marginal::StudentT2, Marginal::StudentT2, Marginal::StudentT3,
                               Marginal::StudentT3, Marginal::StudentT3, Marginal::StudentT4, Marginal::StudentT4,
                               Marginal::StudentT4, Marginal::StudentT4};
  for (Eigen::Index j = 0; j < 10; ++j) {
    std::vector<double> col(data.X.col(j).data(), data.X.col(j).data() + data.X.rows());
    const Marginal m = expected[j];
    CHECK(test::ks_statistic(col, [m](double x) { return marginal_cdf(m, x); }) < test::ks_critical_01(col.size()));
  }
  for (Scenario s : {Scenario::Case2, Scenario::Case3, Scenario::Case5, Scenario::Case6, Scenario::Example1}) {
    const GeneratedData other = generate({s, 5000, 0.0, 5, 35});
    const Marginal m = s == Scenario::Case2   ? Marginal::SkewLaplace
                       : s == Scenario::Case3 ? Marginal::Beta3Half
                       : s == Scenario::Case5 ? Marginal::MarronWand5
                       : s == Scenario::Case6 ? Marginal::Cauchy
                                              : Marginal::MarronWand2;
    std::vector<double> col(other.X.col(0).data(), other.X.col(0).data() + other.X.rows());
    CHECK(test::ks_statistic(col, [m](double x) { return marginal_cdf(m, x); }) < test::ks_critical_01(col.size()));
  }
}

TEST_CASE("uniform cube scores have unit variance") {
  const GeneratedData data = generate({Scenario::Case8, 5000, 0.0, 5, 37});
  for (Eigen::Index j = 0; j < data.f.cols(); ++j) {
    std::vector<double> col(data.f.col(j).data(), data.f.col(j).data() + data.f.rows());
    CHECK(std::abs(stats::variance(col) - 1.0) < 0.1);
    CHECK(std::abs(stats::mean(col)) < 0.1);
  }
  CHECK((data.X - data.f).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("model structure and true bases") {
  const GeneratedData c4 = generate({Scenario::Case4, 400, 0.0, 5, 1});
  CHECK(c4.X.rows() == 400);
  CHECK(c4.X.cols() == 10);
  CHECK(c4.true_d == 2);
  CHECK(c4.raw_d == 4);
  Matrix expected = Matrix::Zero(10, 2);
  expected(0, 0) = expected(1, 0) = expected(2, 1) = expected(3, 1) = 1.0;
  CHECK(vcc(c4.true_basis, expected) == doctest::Approx(1.0));
  for (Eigen::Index i = 0; i < 400; ++i) {
    const auto& f = c4.f;
    const double mean = (f(i, 0) + f(i, 1)) / (std::pow(f(i, 2) + f(i, 3) + 1.5, 2) + 0.5);
    CHECK(std::abs(c4.y(i) - mean) < 4.0);
  }

  const GeneratedData e2 = generate({Scenario::Example2, 200, 0.0, 5, 1});
  CHECK(e2.X.cols() == 6);
  CHECK(e2.true_d == 2);
  Matrix eta = Matrix::Zero(6, 2);
  eta(0, 0) = 2.0 * std::sqrt((std::exp(1.0 / 9.0) - 1.0) * std::exp(1.0 / 9.0));
  eta(2, 0) = std::sqrt(15.0) / 3.0;
  eta(3, 0) = eta(4, 0) = 1.0;
  eta(1, 1) = 1.0;
  CHECK(vcc(e2.true_basis, eta) == doctest::Approx(1.0).epsilon(1e-12));
  const GeneratedData e4 = generate({Scenario::Example4, 200, 0.5, 5, 1});
  CHECK(e4.true_d == 3);
  CHECK(example_sigma(Scenario::Example4, 2) == doctest::Approx(0.9418930955236609).epsilon(1e-10));
  CHECK(example_sigma(Scenario::Example3, 2) == doctest::Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("sample moments of the Example transforms match their sigmas") {
  const GeneratedData data = generate({Scenario::Example2, 200000, 0.0, 5, 41});
  for (Eigen::Index j : {0, 2}) {
    std::vector<double> col(data.f.col(j).data(), data.f.col(j).data() + data.f.rows());
    CHECK(std::sqrt(stats::variance(col)) == doctest::Approx(example_sigma(Scenario::Example2, static_cast<int>(j))).epsilon(0.03));
  }
}

TEST_CASE("generation is reproducible and seed dependent") {
  const ScenarioSpec spec{Scenario::Case7, 100, 0.0, 10, 99};
  const GeneratedData a = generate(spec);
  const GeneratedData b = generate(spec);
  CHECK(a.X == b.X);
  CHECK(a.y == b.y);
  const GeneratedData c = generate({Scenario::Case7, 100, 0.0, 10, 100});
  CHECK(a.X != c.X);
  CHECK(replication_seed(1, 0) != replication_seed(1, 1));
  CHECK(replication_seed(1, 0) != replication_seed(2, 0));
}

TEST_CASE("scenario parsing and validation") {
  CHECK(parse_scenario("case4") == Scenario::Case4);
  CHECK(parse_scenario("Example2") == Scenario::Example2);
  CHECK(scenario_names().size() == 12);
  try {
    parse_scenario("Case9");
    FAIL("expected UnknownScenario");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownScenario);
    CHECK(std::string(e.what()).find("Example4") != std::string::npos);
  }
  CHECK_THROWS_AS(generate({Scenario::Case1, 5, 0.0, 5, 1}), Error);
  CHECK_THROWS_AS(generate({Scenario::Example2, 50, 0.3, 5, 1}), Error);
  CHECK_THROWS_AS(generate({Scenario::Case7, 50, 0.0, 7, 1}), Error);
}
