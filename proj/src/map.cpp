#include "shiftwalk/map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace shiftwalk {

double bisect_monotone(const std::function<double(double)>& f, double lo,
                       double hi, double y, double tol) {
  double flo = f(lo), fhi = f(hi);
  bool inc = flo < fhi;
  double a = lo, b = hi;
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    if ((fm < y) == inc)
      a = m;
    else
      b = m;
  }
  return 0.5 * (a + b);
}

double MonotoneBranch::invert(double y) const {
  if (inverse) return inverse(y);
  return bisect_monotone(f, lo, hi, y);
}

const MonotoneBranch& ShiftPeriodicMap::branch_at(double frac) const {
  for (size_t i = branches.size(); i-- > 0;) {
    if (frac >= branches[i].lo) return branches[i];
  }
  return branches.front();
}

std::vector<double> ShiftPeriodicMap::breakpoints() const {
  std::vector<double> out;
  for (const auto& b : branches) out.push_back(b.lo);
  out.push_back(branches.back().hi);
  return out;
}

ExtendedReal ShiftPeriodicMap::eval(double x) const {
  double base = std::floor(x);
  double frac = x - base;
  if (frac >= 1.0) {  // guard against rounding for x just below an integer
    frac = 0.0;
    base += 1.0;
  }
  const MonotoneBranch& b = branch_at(frac);
  if (frac == b.lo) {
    // Breakpoint convention: right-hand branch closure value when finite,
    // otherwise the symbolic infinity of that one-sided limit.
    if (!b.left_limit.is_finite()) return b.left_limit;
    return ExtendedReal(b.left_limit.value() + base);
  }
  double v = b.f(frac);
  if (std::isinf(v)) return ExtendedReal(v);
  return ExtendedReal(v + base);
}

double ShiftPeriodicMap::eval_restricted(double x) const {
  ExtendedReal y = eval(x);
  if (!y.is_finite()) return 0.0;
  double frac = y.value() - std::floor(y.value());
  if (frac >= 1.0) frac = 0.0;
  return frac;
}

namespace {

void check_limit(const ShiftPeriodicMap& map, const MonotoneBranch& b,
                 bool left_side, double tol, ValidationReport& rep) {
  const ExtendedReal& lim = left_side ? b.left_limit : b.right_limit;
  double endpoint = left_side ? b.lo : b.hi;
  if (!is_integer_or_infinite(lim, tol)) {
    std::ostringstream os;
    os << "one-sided limit " << lim.v << " at t = " << endpoint
       << " is neither an integer nor infinite";
    rep.violations.push_back({"integer-limits", endpoint, os.str()});
    rep.has_integer_spikes = false;
  }
  // Best-effort consistency between declared limit and near-endpoint samples.
  double h = 1e-9 * std::max(1.0, b.width());
  double xs = left_side ? b.lo + h : b.hi - h;
  if (xs <= b.lo || xs >= b.hi) return;
  double v = b.f(xs);
  if (lim.is_finite()) {
    if (std::isfinite(v) && std::abs(v - lim.value()) > 1e-3) {
      std::ostringstream os;
      os << "declared limit " << lim.value() << " but f(" << xs << ") = " << v;
      rep.violations.push_back({"limit-consistency", endpoint, os.str()});
    }
  } else {
    double vfar =
        b.f(left_side ? b.lo + 1e-4 * b.width() : b.hi - 1e-4 * b.width());
    if (std::isfinite(v) && std::isfinite(vfar) &&
        std::abs(v) < std::abs(vfar)) {
      std::ostringstream os;
      os << "declared singular limit but samples do not diverge near t = "
         << endpoint;
      rep.violations.push_back({"limit-consistency", endpoint, os.str()});
    }
  }
}

}  // namespace

ValidationReport validate(const ShiftPeriodicMap& map, int grid_n, double tol) {
  ValidationReport rep;
  rep.is_shift_periodic = true;
  rep.has_integer_spikes = true;

  if (map.branches.empty()) {
    rep.violations.push_back({"cover", 0.0, "map has no branches"});
    rep.is_shift_periodic = rep.has_integer_spikes = false;
    return rep;
  }
  if (std::abs(map.branches.front().lo) > 1e-15 ||
      std::abs(map.branches.back().hi - 1.0) > 1e-15) {
    rep.violations.push_back(
        {"cover", map.branches.front().lo, "branches do not cover [0,1]"});
    rep.is_shift_periodic = rep.has_integer_spikes = false;
  }
  for (size_t i = 0; i + 1 < map.branches.size(); ++i) {
    if (std::abs(map.branches[i].hi - map.branches[i + 1].lo) > 1e-15) {
      rep.violations.push_back({"cover", map.branches[i].hi,
                                "gap or overlap between adjacent branches"});
      rep.is_shift_periodic = rep.has_integer_spikes = false;
    }
  }

  int per_branch = std::max(8, grid_n / std::max<int>(1, (int)map.branches.size()));
  for (const auto& b : map.branches) {
    double prev_x = 0.0, prev_v = 0.0;
    bool have_prev = false;
    bool mono_ok = true, exp_ok = true;
    for (int k = 1; k < per_branch; ++k) {
      double x = b.lo + b.width() * k / per_branch;
      double v = b.f(x);
      if (!std::isfinite(v)) {
        have_prev = false;
        continue;
      }
      if (have_prev) {
        double dv = v - prev_v;
        bool inc_here = dv > 0.0;
        if (dv == 0.0 || inc_here != b.increasing()) {
          if (mono_ok) {
            rep.violations.push_back(
                {"monotonicity", 0.5 * (x + prev_x),
                 "sampled values not strictly monotone in declared direction"});
            mono_ok = false;
          }
        }
        if (std::abs(dv) <= std::abs(x - prev_x)) {
          if (exp_ok) {
            std::ostringstream os;
            os << "|F(x)-F(y)| <= |x-y| between x = " << prev_x
               << " and y = " << x;
            rep.violations.push_back({"expansion", 0.5 * (x + prev_x), os.str()});
            exp_ok = false;
          }
        }
      }
      prev_x = x;
      prev_v = v;
      have_prev = true;
    }
    if (!mono_ok) rep.is_shift_periodic = rep.has_integer_spikes = false;
    if (!exp_ok) rep.has_integer_spikes = false;
    check_limit(map, b, true, tol, rep);
    check_limit(map, b, false, tol, rep);
  }
  if (!rep.is_shift_periodic) rep.has_integer_spikes = false;
  return rep;
}

}  // namespace shiftwalk
