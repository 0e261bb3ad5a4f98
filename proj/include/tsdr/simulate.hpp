#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tsdr/linalg.hpp"

namespace tsdr {

/// Marginal laws used to push Gaussian scores onto the observed predictors.
enum class Marginal {
  SkewLaplace,      // asymmetric Laplace, scale 2, asymmetry 6
  Beta3Half,        // Beta(3, 0.5)
  Exponential,      // mean 1
  StudentT2,
  StudentT3,
  StudentT4,
  MarronWand2,      // skewed unimodal
  MarronWand3,      // strongly skewed
  MarronWand4,      // kurtotic unimodal
  MarronWand5,      // outlier
  MarronWand6,      // bimodal
  Cauchy,
  StandardNormal,
};

std::string_view to_string(Marginal m) noexcept;

double marginal_cdf(Marginal m, double x);
/// 1 - F(x), computed without cancellation in the upper tail.
double marginal_survival(Marginal m, double x);
/// Inverse CDF; throws OutOfRange unless p lies in (0, 1). Normal mixtures
/// are inverted by bisection on the mixture CDF.
double marginal_quantile(Marginal m, double p);
/// x with 1 - F(x) = q, for accuracy in the upper tail.
double marginal_upper_quantile(Marginal m, double q);

/// X = F^{-1}(Phi(f)) evaluated through whichever tail is more accurate.
double pit_forward(Marginal m, double f);
/// Phi^{-1}(F(x)), the inverse of pit_forward.
double pit_inverse(Marginal m, double x);

enum class Scenario {
  Case1, Case2, Case3, Case4, Case5, Case6, Case7, Case8,
  Example1, Example2, Example3, Example4,
};

std::string_view to_string(Scenario s) noexcept;
/// Accepts "Case4", "case4", "Example2", ...; throws UnknownScenario.
Scenario parse_scenario(std::string_view name);
std::vector<std::string> scenario_names();
bool is_sir_scenario(Scenario s) noexcept;

struct ScenarioSpec {
  Scenario scenario = Scenario::Case4;
  int n = 400;
  double rho = 0.0;   // Examples only
  int k = 5;          // Case 7 degrees of freedom
  std::uint64_t seed = 1;
};

void validate(const ScenarioSpec& spec);

struct GeneratedData {
  Matrix X;
  Vector y;
  Matrix f;                 // true transformed predictors
  Matrix true_basis;        // basis of the transformed central subspace
  int true_d = 0;
  Matrix raw_basis;         // basis of the central subspace in X
  int raw_d = 0;
  std::vector<std::function<double(double)>> transforms;  // f_j as functions of x_j
};

GeneratedData generate(const ScenarioSpec& spec);

/// Random engine seeded from a base seed and a replication index through
/// SplitMix64, so replication r draws the same stream in serial and parallel
/// runs.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0);
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t replication);

/// Population standard deviations of the Example transforms (for the true bases).
double example_sigma(Scenario s, int j);

}  // namespace tsdr
