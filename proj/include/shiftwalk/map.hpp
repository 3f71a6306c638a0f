#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "shiftwalk/extended_real.hpp"

namespace shiftwalk {

enum class Orientation { increasing, decreasing };

// One monotone piece of a shift-periodic map restricted to [0,1].
// f may return +-inf near a singular endpoint; the one-sided limits at the
// endpoints are stored explicitly so that no numerical extrapolation is
// needed where exact values are known.
struct MonotoneBranch {
  double lo = 0.0;
  double hi = 1.0;
  Orientation orientation = Orientation::increasing;
  ExtendedReal left_limit;   // limit of f at lo from the right
  ExtendedReal right_limit;  // limit of f at hi from the left
  std::function<double(double)> f;
  // Optional closed-form inverse on the branch closure (value -> x).
  std::function<double(double)> inverse;

  bool increasing() const { return orientation == Orientation::increasing; }
  double width() const { return hi - lo; }

  // Smallest / largest branch value as extended reals.
  ExtendedReal value_min() const { return increasing() ? left_limit : right_limit; }
  ExtendedReal value_max() const { return increasing() ? right_limit : left_limit; }

  // Solve f(x) = y for x in [lo, hi]. Uses the closed-form inverse when
  // present, bisection otherwise. y must lie in the branch value range.
  double invert(double y) const;
};

// Piecewise-monotone shift-periodic interval map, F(x + 1) = F(x) + 1,
// described by its branches on [0,1].
struct ShiftPeriodicMap {
  std::string name;
  std::map<std::string, double> params;
  std::vector<MonotoneBranch> branches;  // ordered, closures cover [0,1]

  // Optional exact tail measures for maps with singularities:
  // upper_tail(y) = lambda{x in [0,1] : F(x) >= y} for large y,
  // lower_tail(y) = lambda{x in [0,1] : F(x) <= -y}.
  std::function<double(double)> upper_tail;
  std::function<double(double)> lower_tail;

  // F on the whole real line via F(x) = F({x}) + floor(x). At interior
  // breakpoints the right-hand branch closure value is used; singular
  // breakpoints return a symbolic infinity.
  ExtendedReal eval(double x) const;

  // Restricted map F_r(x) = {F(x)} on [0,1]; singular points map to 0.
  double eval_restricted(double x) const;

  const MonotoneBranch& branch_at(double frac) const;  // frac in [0,1)
  std::vector<double> breakpoints() const;
};

struct Violation {
  std::string condition;
  double witness = 0.0;
  std::string detail;
};

struct ValidationReport {
  bool is_shift_periodic = false;
  bool has_integer_spikes = false;
  std::vector<Violation> violations;
};

// Sampled verification of the defining conditions: branch cover and
// monotonicity (shift-periodic piecewise-monotone form), pairwise expansion
// |F(x)-F(y)| > |x-y| within branches, and integer-or-infinite one-sided
// branch limits. Declared limits are cross-checked against near-endpoint
// samples on a best-effort basis.
ValidationReport validate(const ShiftPeriodicMap& map, int grid_n,
                          double tol = 1e-9);

// Monotone scalar root solve: f(x) = y for monotone f on [lo, hi],
// bisection to absolute tolerance.
double bisect_monotone(const std::function<double(double)>& f, double lo,
                       double hi, double y, double tol = 1e-14);

}  // namespace shiftwalk
