#pragma once

#include <span>

namespace collapse {

double mean(std::span<const double> xs);

// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_stddev(std::span<const double> xs);

// OLS slope of y against x.
double linear_slope(std::span<const double> x, std::span<const double> y);

// One-sided Welch test p-value for H1: mean(a) > mean(b).
double welch_one_sided_p(std::span<const double> a, std::span<const double> b);

// CDF of the standard Student-t distribution.
double student_t_cdf(double x, double df);

// Upper-tail probability of a chi-squared variate.
double chi_squared_upper_p(double statistic, double df);

}  // namespace collapse
