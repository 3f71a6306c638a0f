#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "shiftwalk/map.hpp"
#include "shiftwalk/stats.hpp"
#include "shiftwalk/transfer.hpp"

namespace shiftwalk {

// Parameters of the strictly stable law with characteristic function
// exp(-|t|^alpha (1 - i beta sgn(t) tan(pi alpha / 2))). beta is coerced
// to 0 when alpha == 1, where the skew term vanishes from the family.
struct StableParams {
  double alpha = 2.0;
  double beta = 0.0;

  StableParams(double a, double b);
};

// Centering/scaling selection for the generalized functional CLT, keyed on
// the tail exponent kappa of the step distribution.
enum class ScalingRegime {
  heavy_sub_one,   // 0 < kappa < 1
  kappa_one,       // kappa == 1
  stable_mid,      // 1 < kappa < 2
  kappa_two,       // kappa == 2
  gaussian         // kappa > 2
};

struct ScalingPlan {
  double kappa = 2.0;
  double c_plus = 0.0, c_minus = 0.0;
  std::optional<double> mean;      // required for kappa > 1
  std::optional<double> variance;  // required for kappa > 2
  ScalingRegime regime = ScalingRegime::gaussian;

  double alpha() const;
  double beta() const;
  StableParams stable() const { return {alpha(), beta()}; }
  double a_n(size_t n) const;
  double b_n(size_t n) const;
};

ScalingPlan scaling_plan(double kappa, double c_plus, double c_minus,
                         std::optional<double> mean = std::nullopt,
                         std::optional<double> variance = std::nullopt);

// Chambers-Mackey-Stuck draw from the law of StableParams.
double stable_sample(const StableParams& p, std::mt19937_64& rng);

// CDF by numerical inversion of the characteristic function (Gil-Pelaez),
// absolute error target 1e-6. Throws std::runtime_error with the achieved
// error when the quadrature fails to settle.
double stable_cdf(const StableParams& p, double x);

// Power-law fit of the exact integer-jump tail measures
// lambda{floor(F) > M} ~ c_plus M^-kappa (and the mirrored lower tail),
// least squares on the top two log-log decades up to M_max.
struct TailFit {
  double kappa = 0.0;
  double c_plus = 0.0, c_minus = 0.0;
  bool light_tailed = false;  // tails vanish beyond a finite jump size
};
TailFit tail_constants(const ShiftPeriodicMap& map, double M_max = 1e4);

// Jump intensity of the small-hole limit, gamma = 3(delta + eps)/16.
double ctrw_gamma(double eps, double delta);

// Rescaled walk V^(n)(t) = (Y_floor(nt) - a_n t) / b_n along one path.
// The walk is driven by the canonical piecewise-linear conjugate of the
// map (see simulate_vn in limits.cpp for why); `init` samples the initial
// point in the conjugate coordinate, so a uniform draw corresponds to
// starting the map at its invariant distribution h(U).
struct VnPath {
  std::vector<double> values;  // one per t_grid entry
  int resampled = 0;           // paths discarded due to singular hits
};
VnPath simulate_vn(const ShiftPeriodicMap& map,
                   const std::function<double(std::mt19937_64&)>& init,
                   size_t n, const std::vector<double>& t_grid,
                   const ScalingPlan& plan, std::mt19937_64& rng);

// Marginal V^(n)(t) over many paths with per-path RNG substreams.
std::vector<double> simulate_vn_ensemble(
    const ShiftPeriodicMap& map,
    const std::function<double(std::mt19937_64&)>& init, size_t n, double t,
    const ScalingPlan& plan, size_t n_paths, uint64_t seed, int threads = 1,
    long long* resampled = nullptr);

// Inverse-CDF sampler for a piecewise-constant density.
struct DensitySampler {
  std::vector<double> breaks;
  std::vector<double> cum;  // cumulative mass at each break

  explicit DensitySampler(const PiecewiseConstantDensity& d);
  double operator()(std::mt19937_64& rng) const;
};

// Time-rescaled small-hole walk Y_m(t) = floor(F^{floor(mt)}(X; eps/m,
// delta/m)): jump times j/m and signed unit jumps up to the horizon.
struct JumpRecord {
  size_t m = 1;
  std::vector<double> jump_times;
  std::vector<int> jump_signs;
  double horizon = 0.0;
};

enum class CtrwInit { invariant, cond_invariant, uniform };

// Initial sampler for the already-scaled parameters (eps/m, delta/m).
std::function<double(std::mt19937_64&)> ctrw_init_sampler(double eps,
                                                          double delta,
                                                          CtrwInit kind);

JumpRecord simulate_ctrw(double eps, double delta, size_t m, double horizon,
                         const std::function<double(std::mt19937_64&)>& init,
                         std::mt19937_64& rng);

std::vector<JumpRecord> simulate_ctrw_ensemble(double eps, double delta,
                                               size_t m, double horizon,
                                               CtrwInit kind, size_t n_paths,
                                               uint64_t seed, int threads = 1);

// KS comparison of pooled inter-jump waiting times against Exp(gamma).
// Gaps are only counted when they start early enough (start time at most
// horizon - 8/gamma) so right-censoring does not bias the pool.
struct WaitingTimeReport {
  double statistic = 0.0;
  size_t n = 0;
  double critical_5 = 0.0, critical_1 = 0.0;
  bool reject_5 = false, reject_1 = false;
};
WaitingTimeReport waiting_time_test(const std::vector<JumpRecord>& records,
                                    double gamma);

}  // namespace shiftwalk
