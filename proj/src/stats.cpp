#include "shiftwalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shiftwalk {

namespace {

// Lower incomplete gamma by series expansion, valid for x < a + 1.
double gamma_series(double a, double x) {
  double sum = 1.0 / a, term = sum, ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by continued fraction, valid for x >= a + 1.
double gamma_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double reg_lower_gamma(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("reg_lower_gamma domain");
  if (x == 0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_cf(a, x);
}

double chi_square_cdf(double x, double dof) {
  if (x <= 0) return 0.0;
  return reg_lower_gamma(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(double p, double dof) {
  if (p <= 0 || p >= 1) throw std::invalid_argument("quantile level in (0,1)");
  double lo = 0.0, hi = dof;
  while (chi_square_cdf(hi, dof) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (chi_square_cdf(mid, dof) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {
double ks_coeff(double level) { return std::sqrt(-0.5 * std::log(level / 2.0)); }
}  // namespace

KsResult ks_test(std::vector<double> samples,
                 const std::function<double(double)>& cdf, double level) {
  std::sort(samples.begin(), samples.end());
  size_t n = samples.size();
  double d = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double F = cdf(samples[i]);
    d = std::max(d, std::abs(F - double(i) / n));
    d = std::max(d, std::abs(double(i + 1) / n - F));
  }
  KsResult r;
  r.statistic = d;
  r.n = n;
  r.critical = ks_coeff(level) / std::sqrt(double(n));
  r.reject = d > r.critical;
  return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                       double level) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  KsResult r;
  r.statistic = d;
  r.n = a.size();
  r.critical =
      ks_coeff(level) *
      std::sqrt(double(a.size() + b.size()) / (double(a.size()) * b.size()));
  r.reject = d > r.critical;
  return r;
}

}  // namespace shiftwalk
