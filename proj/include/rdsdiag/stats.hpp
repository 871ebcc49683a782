#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace rdsdiag {

// Ranks 1..n, tied values share the average of their positions.
std::vector<double> average_ranks(const std::vector<double>& v);

// Sample quantile, linear interpolation between order statistics
// (h = (n-1)p). Throws InsufficientData on empty input.
double quantile(std::vector<double> v, double p);
double median(std::vector<double> v);
double mean(const std::vector<double>& v);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares y = a + b x. Throws InsufficientData when x has no
// spread.
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

double pearson(const std::vector<double>& x, const std::vector<double>& y);  // NaN if degenerate

// nullopt when either variable is constant.
std::optional<double> spearman_rho(const std::vector<double>& x, const std::vector<double>& y);
std::optional<double> kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y);

// Median of slopes over pairs with distinct x. Throws InsufficientData when
// there is no such pair.
double theil_sen_slope(const std::vector<double>& x, const std::vector<double>& y);

// Exact zero maps to 0.
int sign_of(double v) noexcept;

}  // namespace rdsdiag
