#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "shiftwalk/map.hpp"

namespace shiftwalk {

// Piecewise-constant probability density on [0,1]: values[i] on
// (breaks[i], breaks[i+1]). The algebra on which the transfer operator of
// the piecewise-linear example1 family acts exactly.
struct PiecewiseConstantDensity {
  std::vector<double> breaks;  // increasing, front() == 0, back() == 1
  std::vector<double> values;  // one per cell, nonnegative

  double integral() const;
  void normalize();                    // rescale so integral() == 1
  double value_at(double x) const;     // value of the cell containing x
  void merge_equal(double tol = 1e-14);

  static PiecewiseConstantDensity uniform();
  // x on (0,1/2) and 2-x on (1/2,1).
  static PiecewiseConstantDensity two_piece(double x);
  // k1 on (0,b), k2 on (b,1/2), k3 on (1/2,1) (b < 1/2), or the mirrored
  // form k1 on (0,1/2), k2 on (1/2,b), k3 on (b,1) (b > 1/2); normalized.
  static PiecewiseConstantDensity three_piece(double b, double k1, double k2,
                                              double k3);
};

// Exact sup-norm distance over the merged refinement of both break sets.
double sup_dist(const PiecewiseConstantDensity& a,
                const PiecewiseConstantDensity& b);

// Lebesgue measure of {x in a period cell : F(x; eps, delta) leaves it},
// i.e. ell(eps) + ell(delta) with ell(x) = x(3+x) / (2(x+2)(x+4)).
double hole_measure(double eps, double delta);

struct FpStepResult {
  PiecewiseConstantDensity density;  // renormalized image
  double C = 1.0;                    // mass surviving the hole
};

// One exact step of the transfer operator of example1(eps, delta)
// conditioned on staying in [0,1]. New breakpoints are branch images of the
// old ones; cell values are the three-branch preimage sums.
FpStepResult fp_step(double eps, double delta,
                     const PiecewiseConstantDensity& k);

// The unique fixed density of fp_step of the form nu on (0,1/2) and
// 2 - nu on (1/2,1).
struct CondInvariantDensity {
  double nu = 1.0;
  double epsilon = 0.0, delta = 0.0;

  PiecewiseConstantDensity density() const;
};
CondInvariantDensity cond_invariant_density(double eps, double delta);

// Value gap within the half interval carrying the extra breakpoint of a
// three-piece density (|k1 - k2| when b < 1/2, |k2 - k3| when b > 1/2).
// Throws std::invalid_argument unless k has that form.
double psi(const PiecewiseConstantDensity& k);

// Sup-norm distances || P^n(two_piece(x)) - f_c || for n = 1..n_max.
std::vector<double> convergence_check(double eps, double delta, double x,
                                      size_t n_max);

// Ulam discretization of the restricted map: row-stochastic cell-to-cell
// matrix (sparse rows) plus its stationary density.
struct UlamApproximation {
  std::vector<double> grid;  // cell boundaries, size cells + 1
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> stationary;  // per-cell density values
  double tail_mass = 0.0;          // measure not resolved by jump pieces

  size_t cells() const { return stationary.size(); }
  double row_sum(size_t i) const;
  double density_at(double x) const;
};

UlamApproximation ulam_invariant_density(const ShiftPeriodicMap& map,
                                         std::vector<double> grid,
                                         long long bound = 1024,
                                         int threads = 1);
UlamApproximation ulam_invariant_density(const ShiftPeriodicMap& map,
                                         size_t grid_n, long long bound = 1024,
                                         int threads = 1);

// Forward orbit v_n = F_r^n(1/4; eps, eps) for n = 1..n_max
// (v_1 = eps/4, v_{n+1} = (4+eps) v_n while the orbit climbs the first
// branch). These delimit the plateaus of the small-parameter invariant
// density: it is close to 1 + 1/4^n on (v_n, v_{n+1}) and its mirror.
std::vector<double> example1_orbit_endpoints(double eps, size_t n_max);

// Grid refined near 0 and 1 so that each orbit plateau (and the region
// below v_1) is resolved: orbit points v_1..v_{n_levels}, geometric
// subdivision below v_1, `subdiv` equal parts per plateau, mirrored, and a
// uniform interior filler.
std::vector<double> example1_adaptive_grid(double eps, size_t n_levels,
                                           size_t subdiv);

// Truncated closed-form invariant density of example1(eps, delta) built
// from the forward orbits of the critical points 1/4 and 3/4 and their
// cumulative one-sided derivatives. D = (D1L, D1R, D2L, D2R) weight
// constants, all 1 in the small-parameter limit.
struct GoraDensity {
  PiecewiseConstantDensity density;
  std::array<std::vector<double>, 2> orbit;       // F_r^n(c_j), n = 1..
  std::array<std::vector<double>, 2> beta_left;   // limits from above c_j
  std::array<std::vector<double>, 2> beta_right;  // limits from below c_j
  bool perturbed_breakpoint = false;  // orbit hit a breakpoint exactly
};
GoraDensity gora_density(double eps, double delta,
                         const std::array<double, 4>& D = {1.0, 1.0, 1.0, 1.0},
                         size_t n_terms = 20);

}  // namespace shiftwalk
