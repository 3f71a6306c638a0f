#include <cmath>
#include <random>

#include "doctest.h"
#include "shiftwalk/rng.hpp"
#include "shiftwalk/stats.hpp"

using namespace shiftwalk;

TEST_CASE("chi-square quantiles [frozen reference values]") {
  CHECK(chi_square_quantile(0.95, 1) == doctest::Approx(3.8415).epsilon(1e-4));
  CHECK(chi_square_quantile(0.999, 4) == doctest::Approx(18.467).epsilon(1e-4));
  CHECK(chi_square_quantile(0.99, 10) == doctest::Approx(23.209).epsilon(1e-4));
  CHECK(chi_square_cdf(chi_square_quantile(0.5, 7), 7) ==
        doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("normal cdf") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
}

TEST_CASE("KS one-sample accepts its own distribution") {
  std::mt19937_64 rng(21);
  std::vector<double> u(20000);
  for (auto& x : u) x = uniform01(rng);
  auto res = ks_test(u, [](double x) { return std::min(1.0, std::max(0.0, x)); },
                     0.01);
  CHECK(!res.reject);
  // Shifted distribution is rejected.
  auto res2 = ks_test(u, [](double x) { return normal_cdf(2.0 * (x - 0.6)); },
                      0.01);
  CHECK(res2.reject);
}

TEST_CASE("KS two-sample") {
  std::mt19937_64 rng(22);
  std::vector<double> a(15000), b(15000), c(15000);
  for (auto& x : a) x = uniform01(rng);
  for (auto& x : b) x = uniform01(rng);
  for (auto& x : c) x = 0.9 * uniform01(rng);
  CHECK(!ks_two_sample(a, b, 0.01).reject);
  CHECK(ks_two_sample(a, c, 0.01).reject);
}
