#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <vector>

#include "tsdr/error.hpp"
#include "tsdr/simulate.hpp"
#include "tsdr/stats.hpp"

namespace tsdr {

namespace {

namespace bm = boost::math;

struct Component {
  double weight;
  double mean;
  double sd;
};

// Normal mixture densities #2-#6 of Marron and Wand (1992, Table 1).
const std::vector<Component>& mixture(Marginal m) {
  static const std::vector<Component> skewed{{0.2, 0.0, 1.0}, {0.2, 0.5, 2.0 / 3.0}, {0.6, 13.0 / 12.0, 5.0 / 9.0}};
  static const std::vector<Component> strongly_skewed = [] {
    std::vector<Component> c;
    for (int l = 0; l < 8; ++l) {
      c.push_back({1.0 / 8.0, 3.0 * (std::pow(2.0 / 3.0, l) - 1.0), std::pow(2.0 / 3.0, l)});
    }
    return c;
  }();
  static const std::vector<Component> kurtotic{{2.0 / 3.0, 0.0, 1.0}, {1.0 / 3.0, 0.0, 0.1}};
  static const std::vector<Component> outlier{{0.1, 0.0, 1.0}, {0.9, 0.0, 0.1}};
  static const std::vector<Component> bimodal{{0.5, -1.0, 2.0 / 3.0}, {0.5, 1.0, 2.0 / 3.0}};
  switch (m) {
    case Marginal::MarronWand2: return skewed;
    case Marginal::MarronWand3: return strongly_skewed;
    case Marginal::MarronWand4: return kurtotic;
    case Marginal::MarronWand5: return outlier;
    case Marginal::MarronWand6: return bimodal;
    default: throw Error(ErrorCode::InvalidArgument, "not a normal mixture");
  }
}

bool is_mixture(Marginal m) {
  return m == Marginal::MarronWand2 || m == Marginal::MarronWand3 || m == Marginal::MarronWand4 ||
         m == Marginal::MarronWand5 || m == Marginal::MarronWand6;
}

double mixture_cdf(const std::vector<Component>& c, double x) {
  double total = 0.0;
  for (const auto& k : c) total += k.weight * stats::normal_cdf((x - k.mean) / k.sd);
  return total;
}

double mixture_survival(const std::vector<Component>& c, double x) {
  double total = 0.0;
  for (const auto& k : c) total += k.weight * stats::normal_cdf(-(x - k.mean) / k.sd);
  return total;
}

// Root of a monotone g on [lo, hi] by bisection, to 1e-12 relative width.
template <typename F>
double bisect(F g, double lo, double hi) {
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12 * std::max(1.0, std::abs(a)); };
  const auto bracket = bm::tools::bisect(g, lo, hi, tol);
  return 0.5 * (bracket.first + bracket.second);
}

std::pair<double, double> mixture_bracket(const std::vector<Component>& c) {
  double lo = 0.0, hi = 0.0;
  for (const auto& k : c) {
    lo = std::min(lo, k.mean - 40.0 * k.sd);
    hi = std::max(hi, k.mean + 40.0 * k.sd);
  }
  return {lo, hi};
}

// Asymmetric Laplace (Kotz, Kozubowski and Podgorski parametrization): the
// density is proportional to exp(sqrt(2) x / (sigma kappa)) for x < 0 and to
// exp(-sqrt(2) kappa x / sigma) for x >= 0; P(X < 0) = kappa^2 / (1 + kappa^2).
constexpr double kLaplaceSigma = 2.0;
constexpr double kLaplaceKappa = 6.0;
const double kLaplaceLeft = kLaplaceKappa * kLaplaceKappa / (1.0 + kLaplaceKappa * kLaplaceKappa);
const double kLeftScale = kLaplaceSigma * kLaplaceKappa / std::sqrt(2.0);
const double kRightScale = kLaplaceSigma / (std::sqrt(2.0) * kLaplaceKappa);

double laplace_cdf(double x) {
  if (x < 0.0) return kLaplaceLeft * std::exp(x / kLeftScale);
  return 1.0 - (1.0 - kLaplaceLeft) * std::exp(-x / kRightScale);
}

double laplace_survival(double x) {
  if (x < 0.0) return 1.0 - kLaplaceLeft * std::exp(x / kLeftScale);
  return (1.0 - kLaplaceLeft) * std::exp(-x / kRightScale);
}

double laplace_quantile(double p) {
  if (p <= kLaplaceLeft) return kLeftScale * std::log(p / kLaplaceLeft);
  return -kRightScale * std::log((1.0 - p) / (1.0 - kLaplaceLeft));
}

double laplace_upper_quantile(double q) {
  if (q <= 1.0 - kLaplaceLeft) return -kRightScale * std::log(q / (1.0 - kLaplaceLeft));
  return kLeftScale * std::log((1.0 - q) / kLaplaceLeft);
}

template <typename Dist>
double dispatch(Marginal m, Dist&& fn) {
  switch (m) {
    case Marginal::Beta3Half: return fn(bm::beta_distribution<double>(3.0, 0.5));
    case Marginal::Exponential: return fn(bm::exponential_distribution<double>(1.0));
    case Marginal::StudentT2: return fn(bm::students_t_distribution<double>(2.0));
    case Marginal::StudentT3: return fn(bm::students_t_distribution<double>(3.0));
    case Marginal::StudentT4: return fn(bm::students_t_distribution<double>(4.0));
    case Marginal::Cauchy: return fn(bm::cauchy_distribution<double>(0.0, 1.0));
    case Marginal::StandardNormal: return fn(bm::normal_distribution<double>(0.0, 1.0));
    default: throw Error(ErrorCode::InvalidArgument, "no closed-form distribution object");
  }
}

void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::OutOfRange, "probability must lie in (0, 1)");
}

}  // namespace

std::string_view to_string(Marginal m) noexcept {
  switch (m) {
    case Marginal::SkewLaplace: return "skew-laplace";
    case Marginal::Beta3Half: return "beta(3,0.5)";
    case Marginal::Exponential: return "exponential";
    case Marginal::StudentT2: return "t2";
    case Marginal::StudentT3: return "t3";
    case Marginal::StudentT4: return "t4";
    case Marginal::MarronWand2: return "mw2";
    case Marginal::MarronWand3: return "mw3";
    case Marginal::MarronWand4: return "mw4";
    case Marginal::MarronWand5: return "mw5";
    case Marginal::MarronWand6: return "mw6";
    case Marginal::Cauchy: return "cauchy";
    case Marginal::StandardNormal: return "normal";
  }
  return "unknown";
}

double marginal_cdf(Marginal m, double x) {
  if (m == Marginal::SkewLaplace) return laplace_cdf(x);
  if (is_mixture(m)) return mixture_cdf(mixture(m), x);
  return dispatch(m, [x](const auto& dist) {
    if (x <= bm::range(dist).first) return 0.0;
    if (x >= bm::range(dist).second) return 1.0;
    return bm::cdf(dist, x);
  });
}

double marginal_survival(Marginal m, double x) {
  if (m == Marginal::SkewLaplace) return laplace_survival(x);
  if (is_mixture(m)) return mixture_survival(mixture(m), x);
  return dispatch(m, [x](const auto& dist) {
    if (x <= bm::range(dist).first) return 1.0;
    if (x >= bm::range(dist).second) return 0.0;
    return bm::cdf(bm::complement(dist, x));
  });
}

double marginal_quantile(Marginal m, double p) {
  check_probability(p);
  if (m == Marginal::SkewLaplace) return laplace_quantile(p);
  if (is_mixture(m)) {
    const auto& c = mixture(m);
    const auto [lo, hi] = mixture_bracket(c);
    return bisect([&](double x) { return mixture_cdf(c, x) - p; }, lo, hi);
  }
  return dispatch(m, [p](const auto& dist) { return bm::quantile(dist, p); });
}

double marginal_upper_quantile(Marginal m, double q) {
  check_probability(q);
  if (m == Marginal::SkewLaplace) return laplace_upper_quantile(q);
  if (is_mixture(m)) {
    const auto& c = mixture(m);
    const auto [lo, hi] = mixture_bracket(c);
    return bisect([&](double x) { return q - mixture_survival(c, x); }, lo, hi);
  }
  return dispatch(m, [q](const auto& dist) { return bm::quantile(bm::complement(dist, q)); });
}

double pit_forward(Marginal m, double f) {
  if (f <= 0.0) return marginal_quantile(m, stats::normal_cdf(f));
  return marginal_upper_quantile(m, stats::normal_cdf(-f));
}

double pit_inverse(Marginal m, double x) {
  const double lower = marginal_cdf(m, x);
  if (lower <= 0.5) return stats::normal_quantile(lower);
  return -stats::normal_quantile(marginal_survival(m, x));
}

}  // namespace tsdr
