#pragma once

#include <functional>
#include <vector>

namespace shiftwalk {

// Regularized lower incomplete gamma P(a, x).
double reg_lower_gamma(double a, double x);

double chi_square_cdf(double x, double dof);
double chi_square_quantile(double p, double dof);

double normal_cdf(double x);  // standard normal

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;  // at the requested level
  size_t n = 0;
  bool reject = false;
};

// One-sample Kolmogorov-Smirnov against a continuous CDF. Asymptotic
// critical value c(level)/sqrt(n), c(level) = sqrt(-ln(level/2)/2).
KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf, double level);

// Two-sample Kolmogorov-Smirnov, asymptotic critical value
// c(level) * sqrt((n+m)/(n m)).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                       double level);

}  // namespace shiftwalk
