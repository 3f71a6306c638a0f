#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "shiftwalk/map.hpp"

namespace shiftwalk {

// Trajectory of the skew-product decomposition F^n(x) = F_r^n(x) + phi(x,n).
struct WalkRecord {
  std::vector<double> fractional;  // F_r^k(x0), k = 0..n
  std::vector<long long> cocycle;  // phi(x0, k), k = 0..n (cocycle[0] = 0)
  int singular_hit = -1;           // step index of first singular value, or -1

  size_t steps() const { return cocycle.empty() ? 0 : cocycle.size() - 1; }
  double position(size_t k) const { return fractional[k] + double(cocycle[k]); }
};

// Iterate n steps from x0 in [0,1]. After a singular hit the fractional
// state restarts at 0 and the cocycle increments are 0 from that step on.
WalkRecord iterate(const ShiftPeriodicMap& map, double x0, size_t n);

// One application of the skew product F_s(x, m) = (F_r(x), m + floor(F(x))).
// Singular x leaves m unchanged and sends x to 0.
std::pair<double, long long> skew_step(const ShiftPeriodicMap& map, double x,
                                       long long m);

// One monotone sub-piece of a branch on which floor(F) is constant.
struct JumpPiece {
  double xlo = 0.0, xhi = 0.0;
  long long jump = 0;
  const MonotoneBranch* branch = nullptr;

  double width() const { return xhi - xlo; }
  // Inverse of F_r restricted to the piece: t in [0,1] -> x.
  double invert_restricted(double t) const;
};

// Enumerate the pieces with |jump| <= bound; tail_mass collects the measure
// of the unresolved stubs hugging singular endpoints.
std::vector<JumpPiece> jump_pieces(const ShiftPeriodicMap& map, long long bound,
                                   double* tail_mass = nullptr);

struct TransitionTable {
  std::map<long long, double> p;  // p_m = lambda{x : floor(F(x)) = m}
  double tail_mass = 0.0;         // mass beyond the truncation bound
  long long bound = 0;

  double mean() const;
  double second_moment() const;
};

// Exact transition probabilities via per-branch preimages of integer levels.
TransitionTable transition_table(const ShiftPeriodicMap& map,
                                 long long bound = 1000000);

// Monte Carlo estimate of the same table. init draws x0 in [0,1].
TransitionTable empirical_transitions(
    const ShiftPeriodicMap& map,
    const std::function<double(std::mt19937_64&)>& init, size_t n,
    uint64_t seed);

struct IndependenceResult {
  double statistic = 0.0;
  int dof = 0;
  double quantile = 0.0;  // chi-square reference quantile at `level`
  double level = 0.999;
  bool independent = true;  // statistic below the reference quantile
  bool insufficient_counts = false;  // some expected cell count < 5
  long long pairs = 0;
};

// Chi-square independence test on consecutive increment pairs (Z_k, Z_{k+1})
// pooled over paths, with jump bins {<=-2, -1, 0, 1, >=2}.
IndependenceResult increment_independence_test(
    const ShiftPeriodicMap& map,
    const std::function<double(std::mt19937_64&)>& init, size_t n_steps,
    size_t n_paths, uint64_t seed, double level = 0.999, int threads = 1);

}  // namespace shiftwalk
