#include "tsdr/simulate.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cctype>
#include <cmath>

#include "tsdr/error.hpp"
#include "tsdr/stats.hpp"

namespace tsdr {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct ScenarioName {
  Scenario scenario;
  std::string_view name;
};

constexpr ScenarioName kNames[] = {
    {Scenario::Case1, "Case1"},       {Scenario::Case2, "Case2"},       {Scenario::Case3, "Case3"},
    {Scenario::Case4, "Case4"},       {Scenario::Case5, "Case5"},       {Scenario::Case6, "Case6"},
    {Scenario::Case7, "Case7"},       {Scenario::Case8, "Case8"},       {Scenario::Example1, "Example1"},
    {Scenario::Example2, "Example2"}, {Scenario::Example3, "Example3"}, {Scenario::Example4, "Example4"},
};

Matrix ar1_matrix(int p, double rho) {
  Matrix s(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) s(i, j) = std::pow(rho, std::abs(i - j));
  }
  return s;
}

Matrix axis_basis(int p, std::initializer_list<int> axes) {
  Matrix b = Matrix::Zero(p, static_cast<Eigen::Index>(axes.size()));
  Eigen::Index col = 0;
  for (int axis : axes) b(axis, col++) = 1.0;
  return b;
}

double sign_power(double x, double power) { return std::copysign(std::pow(std::abs(x), power), x); }

Marginal case_marginal(Scenario s, int j) {
  switch (s) {
    case Scenario::Case2: return Marginal::SkewLaplace;
    case Scenario::Case3: return j < 3 ? Marginal::Beta3Half : Marginal::Exponential;
    case Scenario::Case4: return j < 3 ? Marginal::StudentT2 : (j < 6 ? Marginal::StudentT3 : Marginal::StudentT4);
    case Scenario::Case5: return Marginal::MarronWand5;
    case Scenario::Case6: return Marginal::Cauchy;
    case Scenario::Example1: {
      constexpr Marginal m[] = {Marginal::MarronWand2, Marginal::MarronWand3, Marginal::MarronWand4,
                                Marginal::MarronWand6};
      return m[j];
    }
    default: throw Error(ErrorCode::InvalidArgument, "scenario has no PIT marginal");
  }
}

// E[g(Z)^2] - E[g(Z)]^2 for Z ~ N(0, 1).
template <typename G>
double normal_sd(G g) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  auto density = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
  const double m1 = Rule::integrate([&](double z) { return g(z) * density(z); }, -14.0, 14.0, 10, 1e-14);
  const double m2 = Rule::integrate([&](double z) { return g(z) * g(z) * density(z); }, -14.0, 14.0, 10, 1e-14);
  return std::sqrt(m2 - m1 * m1);
}

double example_f1(double x) { return 2.0 * std::exp(x / 3.0); }

}  // namespace

std::string_view to_string(Scenario s) noexcept {
  for (const auto& entry : kNames) {
    if (entry.scenario == s) return entry.name;
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  auto lower = [](std::string_view v) {
    std::string out(v);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
  };
  const std::string key = lower(name);
  for (const auto& entry : kNames) {
    if (lower(entry.name) == key) return entry.scenario;
  }
  std::string valid;
  for (const auto& entry : kNames) valid += (valid.empty() ? "" : ", ") + std::string(entry.name);
  throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + std::string(name) + "'; valid: " + valid);
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& entry : kNames) out.emplace_back(entry.name);
  return out;
}

bool is_sir_scenario(Scenario s) noexcept {
  return s != Scenario::Example1 && s != Scenario::Example2 && s != Scenario::Example3 && s != Scenario::Example4;
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t replication) {
  return splitmix64(seed ^ splitmix64(replication * kGolden + 1));
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed + splitmix64(stream)));
}

double example_sigma(Scenario s, int j) {
  static const double ex_f1 = 2.0 * std::sqrt(std::exp(1.0 / 9.0) * (std::exp(1.0 / 9.0) - 1.0));
  static const double ex4_f3 = normal_sd([](double z) { return 3.0 / (1.0 + std::exp(-2.0 * z)); });
  switch (s) {
    case Scenario::Example2:
      if (j == 0) return ex_f1;
      if (j == 2) return std::sqrt(15.0) / 3.0;
      return 1.0;
    case Scenario::Example3:
      if (j == 0) return ex_f1;
      if (j == 2) return std::sqrt(3.0) / 2.0;
      return 1.0;
    case Scenario::Example4:
      if (j == 0) return std::sqrt(15.0) / 3.0;
      if (j == 2) return ex4_f3;
      return 1.0;
    default: return 1.0;
  }
}

void validate(const ScenarioSpec& spec) {
  if (spec.n < 10) throw Error(ErrorCode::InvalidArgument, "scenario sample size must be at least 10");
  if (!is_sir_scenario(spec.scenario) && spec.rho != 0.0 && spec.rho != 0.5) {
    throw Error(ErrorCode::InvalidArgument, "rho must be 0 or 0.5");
  }
  if (spec.scenario == Scenario::Case7 && spec.k != 5 && spec.k != 10 && spec.k != 20) {
    throw Error(ErrorCode::InvalidArgument, "Case7 degrees of freedom must be 5, 10 or 20");
  }
}

GeneratedData generate(const ScenarioSpec& spec) {
  validate(spec);
  const Scenario s = spec.scenario;
  const int n = spec.n;
  auto engine = make_engine(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  GeneratedData out;

  if (is_sir_scenario(s)) {
    constexpr int p = 10;
    const Matrix root = sqrt_psd(ar1_matrix(p, 0.5));
    Matrix raw(n, p);
    Vector noise(n);
    std::uniform_real_distribution<double> uniform(-std::sqrt(3.0), std::sqrt(3.0));
    std::chi_squared_distribution<double> chi2(spec.k);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) raw(i, j) = s == Scenario::Case8 ? uniform(engine) : normal(engine);
      if (s == Scenario::Case7) raw.row(i) /= std::sqrt(chi2(engine) / spec.k);
      noise(i) = normal(engine);
    }
    out.f = raw * root;  // rows are (root * z_i)^T; root is symmetric
    out.y.resize(n);
    for (int i = 0; i < n; ++i) {
      const auto& f = out.f;
      const double denom = std::pow(f(i, 2) + f(i, 3) + 1.5, 2) + 0.5;
      out.y(i) = (f(i, 0) + f(i, 1)) / denom + 0.5 * noise(i);
    }
    out.X.resize(n, p);
    for (int j = 0; j < p; ++j) {
      for (int i = 0; i < n; ++i) {
        const double f = out.f(i, j);
        if (s == Scenario::Case1) {
          out.X(i, j) = sign_power(f, 2.0);
        } else if (s == Scenario::Case7 || s == Scenario::Case8) {
          out.X(i, j) = f;
        } else {
          out.X(i, j) = pit_forward(case_marginal(s, j), f);
        }
      }
      if (s == Scenario::Case1) {
        out.transforms.emplace_back([](double x) { return sign_power(x, 0.5); });
      } else if (s == Scenario::Case7 || s == Scenario::Case8) {
        out.transforms.emplace_back([](double x) { return x; });
      } else {
        const Marginal m = case_marginal(s, j);
        out.transforms.emplace_back([m](double x) { return pit_inverse(m, x); });
      }
    }
    out.true_basis = Matrix::Zero(p, 2);
    out.true_basis(0, 0) = out.true_basis(1, 0) = 1.0;
    out.true_basis(2, 1) = out.true_basis(3, 1) = 1.0;
    out.true_d = 2;
    if (s == Scenario::Case7 || s == Scenario::Case8) {
      out.raw_basis = out.true_basis;
      out.raw_d = 2;
    } else {
      out.raw_basis = axis_basis(p, {0, 1, 2, 3});
      out.raw_d = 4;
    }
    return out;
  }

  constexpr int p = 6;
  const Matrix root = sqrt_psd(ar1_matrix(p, spec.rho));
  Matrix z(n, p);
  Vector noise(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) z(i, j) = normal(engine);
    noise(i) = normal(engine);
  }
  const Matrix gaussian = z * root;
  out.X.resize(n, p);
  out.f.resize(n, p);
  out.y.resize(n);
  const Matrix eta4 = [] {
    Matrix b = axis_basis(p, {0, 1, 2, 3});
    b(4, 3) = 1.0;
    return b;
  }();
  auto sigma = [&](int j) { return example_sigma(s, j); };

  switch (s) {
    case Scenario::Example1: {
      out.f = gaussian;
      for (int j = 0; j < p; ++j) {
        if (j < 4) {
          const Marginal m = case_marginal(s, j);
          for (int i = 0; i < n; ++i) out.X(i, j) = pit_forward(m, gaussian(i, j));
          out.transforms.emplace_back([m](double x) { return pit_inverse(m, x); });
        } else {
          out.X.col(j) = gaussian.col(j);
          out.transforms.emplace_back([](double x) { return x; });
        }
      }
      for (int i = 0; i < n; ++i) {
        const auto& f = out.f;
        out.y(i) = std::log(std::pow(f(i, 0) + f(i, 1), 2) + 1.0) * (f(i, 2) + f(i, 3)) + 0.5 * noise(i);
      }
      out.true_basis = Matrix::Zero(p, 2);
      out.true_basis(0, 0) = out.true_basis(1, 0) = 1.0;
      out.true_basis(2, 1) = out.true_basis(3, 1) = 1.0;
      out.true_d = 2;
      out.raw_basis = axis_basis(p, {0, 1, 2, 3});
      out.raw_d = 4;
      return out;
    }
    case Scenario::Example2:
    case Scenario::Example3:
    case Scenario::Example4: {
      out.X = gaussian;
      std::vector<std::function<double(double)>> maps(p, [](double x) { return x; });
      if (s == Scenario::Example4) {
        maps[0] = [](double x) { return x * x * x / 3.0; };
        maps[2] = [](double x) { return 3.0 / (1.0 + std::exp(-2.0 * x)); };
      } else {
        maps[0] = example_f1;
        maps[2] = s == Scenario::Example2 ? std::function<double(double)>([](double x) { return x * x * x / 3.0; })
                                          : std::function<double(double)>([](double x) { return sign_power(x, 2.0) / 2.0; });
      }
      for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) out.f(i, j) = maps[static_cast<std::size_t>(j)](out.X(i, j));
      }
      out.transforms = maps;
      const auto& f = out.f;
      for (int i = 0; i < n; ++i) {
        double mean = 0.0;
        double scale = 0.5;
        if (s == Scenario::Example2) {
          mean = f(i, 0) + f(i, 1) * f(i, 1) + f(i, 2) + f(i, 3) + f(i, 4);
        } else if (s == Scenario::Example3) {
          mean = (f(i, 0) + f(i, 1)) * (f(i, 2) + f(i, 3) + f(i, 4) + 1.0);
        } else {
          mean = f(i, 0) + (f(i, 1) + f(i, 2)) * (f(i, 3) + f(i, 4));
          scale = 0.3;
        }
        out.y(i) = mean + scale * noise(i);
      }
      if (s == Scenario::Example2) {
        out.true_basis = Matrix::Zero(p, 2);
        out.true_basis(0, 0) = sigma(0);
        out.true_basis(2, 0) = sigma(2);
        out.true_basis(3, 0) = sigma(3);
        out.true_basis(4, 0) = sigma(4);
        out.true_basis(1, 1) = 1.0;
        out.true_d = 2;
      } else if (s == Scenario::Example3) {
        out.true_basis = Matrix::Zero(p, 2);
        out.true_basis(0, 0) = sigma(0);
        out.true_basis(1, 0) = sigma(1);
        out.true_basis(2, 1) = sigma(2);
        out.true_basis(3, 1) = sigma(3);
        out.true_basis(4, 1) = sigma(4);
        out.true_d = 2;
      } else {
        out.true_basis = Matrix::Zero(p, 3);
        out.true_basis(0, 0) = 1.0;
        out.true_basis(1, 1) = sigma(1);
        out.true_basis(2, 1) = sigma(2);
        out.true_basis(3, 2) = sigma(3);
        out.true_basis(4, 2) = sigma(4);
        out.true_d = 3;
      }
      out.raw_basis = eta4;
      out.raw_d = 4;
      return out;
    }
    default: break;
  }
  throw Error(ErrorCode::UnknownScenario, "unhandled scenario");
}

}  // namespace tsdr
