#pragma once

#include <span>

namespace tsdr::stats {

double normal_cdf(double x);
double normal_quantile(double p);
double chi_square_quantile(double df, double p);

double mean(std::span<const double> v);
/// Variance with denominator n.
double variance(std::span<const double> v);
/// Moment skewness m3 / m2^{3/2}; zero for a constant sample.
double skewness(std::span<const double> v);

}  // namespace tsdr::stats
