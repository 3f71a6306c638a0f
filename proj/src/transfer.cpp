#include "shiftwalk/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shiftwalk/parallel.hpp"
#include "shiftwalk/walk.hpp"

namespace shiftwalk {

namespace {

void check_density(const PiecewiseConstantDensity& k) {
  if (k.breaks.size() < 2 || k.values.size() + 1 != k.breaks.size())
    throw std::invalid_argument("density: breaks/values size mismatch");
  if (k.breaks.front() != 0.0 || k.breaks.back() != 1.0)
    throw std::invalid_argument("density: breaks must span [0,1]");
  for (size_t i = 0; i + 1 < k.breaks.size(); ++i)
    if (!(k.breaks[i] < k.breaks[i + 1]))
      throw std::invalid_argument("density: breaks must increase");
  for (double v : k.values)
    if (!(v >= 0.0)) throw std::invalid_argument("density: negative value");
}

}  // namespace

double PiecewiseConstantDensity::integral() const {
  double s = 0.0;
  for (size_t i = 0; i < values.size(); ++i)
    s += values[i] * (breaks[i + 1] - breaks[i]);
  return s;
}

void PiecewiseConstantDensity::normalize() {
  double s = integral();
  if (!(s > 0.0)) throw std::invalid_argument("density: zero mass");
  for (double& v : values) v /= s;
}

double PiecewiseConstantDensity::value_at(double x) const {
  if (x <= breaks.front()) return values.front();
  if (x >= breaks.back()) return values.back();
  size_t i = std::upper_bound(breaks.begin(), breaks.end(), x) -
             breaks.begin() - 1;
  if (i >= values.size()) i = values.size() - 1;
  return values[i];
}

void PiecewiseConstantDensity::merge_equal(double tol) {
  std::vector<double> nb{breaks.front()};
  std::vector<double> nv;
  for (size_t i = 0; i < values.size(); ++i) {
    if (!nv.empty() && std::abs(nv.back() - values[i]) <= tol) {
      nb.back() = breaks[i + 1];
    } else {
      nv.push_back(values[i]);
      nb.push_back(breaks[i + 1]);
    }
  }
  breaks = std::move(nb);
  values = std::move(nv);
}

PiecewiseConstantDensity PiecewiseConstantDensity::uniform() {
  return {{0.0, 1.0}, {1.0}};
}

PiecewiseConstantDensity PiecewiseConstantDensity::two_piece(double x) {
  return {{0.0, 0.5, 1.0}, {x, 2.0 - x}};
}

PiecewiseConstantDensity PiecewiseConstantDensity::three_piece(double b,
                                                               double k1,
                                                               double k2,
                                                               double k3) {
  if (!(b > 0.0 && b < 1.0) || b == 0.5)
    throw std::invalid_argument("three_piece: b must be in (0,1) \\ {1/2}");
  PiecewiseConstantDensity k;
  if (b < 0.5)
    k = {{0.0, b, 0.5, 1.0}, {k1, k2, k3}};
  else
    k = {{0.0, 0.5, b, 1.0}, {k1, k2, k3}};
  k.normalize();
  return k;
}

double sup_dist(const PiecewiseConstantDensity& a,
                const PiecewiseConstantDensity& b) {
  std::vector<double> cuts;
  cuts.reserve(a.breaks.size() + b.breaks.size());
  cuts.insert(cuts.end(), a.breaks.begin(), a.breaks.end());
  cuts.insert(cuts.end(), b.breaks.begin(), b.breaks.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double d = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    d = std::max(d, std::abs(a.value_at(mid) - b.value_at(mid)));
  }
  return d;
}

double hole_measure(double eps, double delta) {
  auto ell = [](double x) {
    return x * (3.0 + x) / (2.0 * (x + 2.0) * (x + 4.0));
  };
  return ell(eps) + ell(delta);
}

namespace {

// Branches of example1(eps, delta) on the period cell and their inverses,
// used for the exact transfer-operator step.
struct Example1Branches {
  double eps, delta;

  double f1(double x) const { return (4.0 + eps) * x; }
  double f2(double x) const {
    return 1.0 + eps / 4.0 - (2.0 + eps) * (x - 0.25);
  }
  double f3(double x) const { return 0.5 - (2.0 + delta) * (x - 0.5); }
  double f4(double x) const {
    return -delta / 4.0 + (4.0 + delta) * (x - 0.75);
  }

  double inv1(double t) const { return t / (4.0 + eps); }
  double inv2(double t) const {
    return 0.25 + (1.0 + eps / 4.0 - t) / (2.0 + eps);
  }
  double inv3(double t) const { return 0.5 + (0.5 - t) / (2.0 + delta); }
  double inv4(double t) const {
    return 0.75 + (t + delta / 4.0) / (4.0 + delta);
  }
};

}  // namespace

FpStepResult fp_step(double eps, double delta,
                     const PiecewiseConstantDensity& k) {
  if (eps < 0.0 || delta < 0.0)
    throw std::invalid_argument("fp_step: eps and delta must be nonnegative");
  check_density(k);
  Example1Branches br{eps, delta};

  // Image breakpoints: pushing a cell boundary x of k through the branch
  // containing it marks where the corresponding preimage crosses a cell.
  std::vector<double> cuts{0.0, 0.5, 1.0};
  for (double x : k.breaks) {
    auto note = [&cuts](double t) {
      if (t > 0.0 && t < 1.0) cuts.push_back(t);
    };
    if (x <= 0.25) note(br.f1(x));
    if (x >= 0.25 && x <= 0.5) note(br.f2(x));
    if (x >= 0.5 && x <= 0.75) note(br.f3(x));
    if (x >= 0.75) note(br.f4(x));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  // Collapse numerically coincident cuts (keep 0, 1/2, 1).
  std::vector<double> cc{cuts.front()};
  for (size_t i = 1; i < cuts.size(); ++i) {
    if (cuts[i] - cc.back() < 1e-15 && cuts[i] != 0.5 && cuts[i] != 1.0)
      continue;
    cc.push_back(cuts[i]);
  }
  cuts = std::move(cc);

  PiecewiseConstantDensity out;
  out.breaks = cuts;
  out.values.resize(cuts.size() - 1);
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double t = 0.5 * (cuts[i] + cuts[i + 1]);
    double g;
    if (t < 0.5)
      g = k.value_at(br.inv1(t)) / (4.0 + eps) +
          k.value_at(br.inv3(t)) / (2.0 + delta) +
          k.value_at(br.inv4(t)) / (4.0 + delta);
    else
      g = k.value_at(br.inv1(t)) / (4.0 + eps) +
          k.value_at(br.inv2(t)) / (2.0 + eps) +
          k.value_at(br.inv4(t)) / (4.0 + delta);
    out.values[i] = g;
  }
  double C = out.integral();
  for (double& v : out.values) v /= C;
  out.merge_equal();
  return {std::move(out), C};
}

PiecewiseConstantDensity CondInvariantDensity::density() const {
  return PiecewiseConstantDensity::two_piece(nu);
}

CondInvariantDensity cond_invariant_density(double eps, double delta) {
  if (!(eps >= 0.0 && delta >= 0.0))
    throw std::invalid_argument("cond_invariant_density: negative parameter");
  // For the two-piece ansatz (nu, 2-nu) the fixed-point condition of the
  // conditioned operator reads nu * C(nu) = A(nu), where A is the image
  // value on (0,1/2) before normalization and C = (A + B) / 2 with B the
  // image value on (1/2,1). Both A and B are affine in nu.
  double p = 1.0 / (4.0 + eps);                       // A coeff of nu
  double q = 1.0 / (2.0 + delta) + 1.0 / (4.0 + delta);  // A coeff of 2-nu
  double r = 1.0 / (4.0 + eps) + 1.0 / (2.0 + eps);   // B coeff of nu
  double s = 1.0 / (4.0 + delta);                     // B coeff of 2-nu
  double a2 = p + r - q - s;
  double b1 = 4.0 * q + 2.0 * s - 2.0 * p;
  double c0 = -4.0 * q;
  double nu;
  if (std::abs(a2) < 1e-15) {
    nu = -c0 / b1;
  } else {
    double disc = b1 * b1 - 4.0 * a2 * c0;
    if (disc < 0.0)
      throw std::runtime_error("cond_invariant_density: no real root");
    double sq = std::sqrt(disc);
    // Numerically stable pair of roots.
    double u = (b1 >= 0.0) ? (-b1 - sq) / 2.0 : (-b1 + sq) / 2.0;
    double r1 = u / a2, r2 = c0 / u;
    bool ok1 = r1 >= -1e-12 && r1 <= 2.0 + 1e-12;
    bool ok2 = r2 >= -1e-12 && r2 <= 2.0 + 1e-12;
    if (!ok1 && !ok2)
      throw std::runtime_error("cond_invariant_density: no root in [0,2]");
    nu = ok1 ? r1 : r2;
  }
  nu = std::clamp(nu, 0.0, 2.0);
  CondInvariantDensity out{nu, eps, delta};
  if (eps > 0.0 || delta > 0.0) {
    auto step = fp_step(eps, delta, out.density());
    if (sup_dist(step.density, out.density()) > 1e-12)
      throw std::runtime_error("cond_invariant_density: not a fixed point");
  }
  return out;
}

double psi(const PiecewiseConstantDensity& k) {
  check_density(k);
  const double tol = 1e-12;
  auto is_half = [&](double x) { return std::abs(x - 0.5) <= tol; };
  size_t n = k.values.size();
  if (n == 1) return 0.0;
  if (n == 2) {
    // Either the plain two-piece form (gap 0) or a three-piece form whose
    // ends merged; the gap sits at the single interior breakpoint.
    if (is_half(k.breaks[1])) return 0.0;
    return std::abs(k.values[0] - k.values[1]);
  }
  if (n == 3) {
    if (is_half(k.breaks[2]))
      return std::abs(k.values[0] - k.values[1]);  // b < 1/2
    if (is_half(k.breaks[1]))
      return std::abs(k.values[1] - k.values[2]);  // b > 1/2
  }
  throw std::invalid_argument("psi: density not in three-piece form");
}

std::vector<double> convergence_check(double eps, double delta, double x,
                                      size_t n_max) {
  if (!(x >= 0.0 && x <= 2.0))
    throw std::invalid_argument("convergence_check: x must be in [0,2]");
  auto fc = cond_invariant_density(eps, delta).density();
  auto k = PiecewiseConstantDensity::two_piece(x);
  std::vector<double> dists;
  dists.reserve(n_max);
  for (size_t n = 0; n < n_max; ++n) {
    k = fp_step(eps, delta, k).density;
    dists.push_back(sup_dist(k, fc));
  }
  return dists;
}

double UlamApproximation::row_sum(size_t i) const {
  double s = 0.0;
  for (auto& [j, w] : rows[i]) s += w;
  return s;
}

double UlamApproximation::density_at(double x) const {
  if (x <= grid.front()) return stationary.front();
  if (x >= grid.back()) return stationary.back();
  size_t i =
      std::upper_bound(grid.begin(), grid.end(), x) - grid.begin() - 1;
  if (i >= stationary.size()) i = stationary.size() - 1;
  return stationary[i];
}

UlamApproximation ulam_invariant_density(const ShiftPeriodicMap& map,
                                         std::vector<double> grid,
                                         long long bound, int threads) {
  if (grid.size() < 2) throw std::invalid_argument("ulam: grid too small");
  for (size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw std::invalid_argument("ulam: grid must increase");
  if (grid.front() != 0.0 || grid.back() != 1.0)
    throw std::invalid_argument("ulam: grid must span [0,1]");

  UlamApproximation u;
  double tail = 0.0;
  auto pieces = jump_pieces(map, bound, &tail);
  u.tail_mass = tail;
  u.grid = std::move(grid);
  size_t n = u.grid.size() - 1;
  u.rows.resize(n);

  parallel_for(n, threads, [&](size_t lo_row, size_t hi_row) {
    for (size_t i = lo_row; i < hi_row; ++i) {
      double g_lo = u.grid[i], g_hi = u.grid[i + 1];
      double cell_w = g_hi - g_lo;
      std::vector<double> dense(n, 0.0);
      for (const auto& pc : pieces) {
        double a = std::max(pc.xlo, g_lo), b = std::min(pc.xhi, g_hi);
        if (!(b > a)) continue;
        double ya = std::clamp(pc.branch->f(a) - double(pc.jump), 0.0, 1.0);
        double yb = std::clamp(pc.branch->f(b) - double(pc.jump), 0.0, 1.0);
        double ylo = std::min(ya, yb), yhi = std::max(ya, yb);
        if (!(yhi > ylo)) continue;
        size_t j =
            std::upper_bound(u.grid.begin(), u.grid.end(), ylo) -
            u.grid.begin();
        j = (j == 0) ? 0 : j - 1;
        for (; j < n && u.grid[j] < yhi; ++j) {
          double ov_lo = std::max(ylo, u.grid[j]);
          double ov_hi = std::min(yhi, u.grid[j + 1]);
          if (!(ov_hi > ov_lo)) continue;
          double x1 = pc.invert_restricted(ov_lo);
          double x2 = pc.invert_restricted(ov_hi);
          double mass = std::min(std::abs(x2 - x1), b - a);
          if (mass > 0.0) dense[j] += mass / cell_w;
        }
      }
      double rs = 0.0;
      for (double w : dense) rs += w;
      auto& row = u.rows[i];
      if (rs <= 0.0) {
        // Cell unresolved by the truncated piece list: spread uniformly.
        for (size_t j = 0; j < n; ++j)
          row.emplace_back(int(j), u.grid[j + 1] - u.grid[j]);
      } else {
        for (size_t j = 0; j < n; ++j)
          if (dense[j] > 0.0) row.emplace_back(int(j), dense[j] / rs);
      }
    }
  });

  // Power iteration on cell masses, deterministic and single-threaded.
  std::vector<double> mu(n), next(n);
  for (size_t i = 0; i < n; ++i) mu[i] = u.grid[i + 1] - u.grid[i];
  const size_t max_iter = 100000;
  bool converged = false;
  for (size_t it = 0; it < max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (size_t i = 0; i < n; ++i)
      for (auto& [j, w] : u.rows[i]) next[j] += mu[i] * w;
    double total = 0.0;
    for (double m : next) total += m;
    for (double& m : next) m /= total;
    double res = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double w = u.grid[i + 1] - u.grid[i];
      res = std::max(res, std::abs(next[i] - mu[i]) / w);
    }
    mu.swap(next);
    if (res <= 1e-12) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw std::runtime_error("ulam: power iteration did not converge");
  u.stationary.resize(n);
  for (size_t i = 0; i < n; ++i)
    u.stationary[i] = mu[i] / (u.grid[i + 1] - u.grid[i]);
  return u;
}

UlamApproximation ulam_invariant_density(const ShiftPeriodicMap& map,
                                         size_t grid_n, long long bound,
                                         int threads) {
  if (grid_n < 16) throw std::invalid_argument("ulam: grid_n must be >= 16");
  std::vector<double> grid(grid_n + 1);
  for (size_t i = 0; i <= grid_n; ++i) grid[i] = double(i) / double(grid_n);
  grid.front() = 0.0;
  grid.back() = 1.0;
  return ulam_invariant_density(map, std::move(grid), bound, threads);
}

std::vector<double> example1_orbit_endpoints(double eps, size_t n_max) {
  Example1Branches br{eps, eps};
  std::vector<double> v;
  double x = eps / 4.0;  // F_r(1/4)
  for (size_t i = 0; i < n_max; ++i) {
    v.push_back(x);
    if (x < 0.25)
      x = br.f1(x);
    else if (x < 0.5)
      x = br.f2(x);
    else if (x < 0.75)
      x = br.f3(x);
    else
      x = br.f4(x) + 1.0;
    x = x - std::floor(x);
  }
  return v;
}

std::vector<double> example1_adaptive_grid(double eps, size_t n_levels,
                                           size_t subdiv) {
  auto v = example1_orbit_endpoints(eps, n_levels + 1);
  std::vector<double> cuts{0.0, 0.5, 1.0};
  auto both = [&cuts](double x) {
    if (x > 0.0 && x < 1.0) {
      cuts.push_back(x);
      cuts.push_back(1.0 - x);
    }
  };
  // Geometric refinement below v_1 (same expansion ratio as the orbit).
  double lo = v[0];
  for (int d = 0; d < 8 && lo > 1e-300; ++d) {
    both(lo);
    lo /= (4.0 + eps);
  }
  // subdiv equal parts within each plateau (v_n, v_{n+1}).
  for (size_t nlev = 0; nlev + 1 < v.size(); ++nlev) {
    double a = v[nlev], b = v[nlev + 1];
    for (size_t s = 1; s <= subdiv; ++s)
      both(a + (b - a) * double(s) / double(subdiv));
  }
  // Interior filler so no cell is too wide for the power iteration.
  for (int k = 1; k < 64; ++k) both(v.back() + (0.5 - v.back()) * k / 64.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> grid{0.0};
  for (double c : cuts)
    if (c - grid.back() > 1e-320) grid.push_back(c);
  if (grid.back() != 1.0) grid.push_back(1.0);
  return grid;
}

GoraDensity gora_density(double eps, double delta,
                         const std::array<double, 4>& D, size_t n_terms) {
  if (n_terms < 1) throw std::invalid_argument("gora_density: n_terms >= 1");
  if (!(eps >= 0.0 && delta >= 0.0))
    throw std::invalid_argument("gora_density: negative parameter");
  Example1Branches br{eps, delta};
  GoraDensity out;

  auto slope_at = [&](double x) {
    if (x < 0.25) return 4.0 + eps;
    if (x < 0.5) return -(2.0 + eps);
    if (x < 0.75) return -(2.0 + delta);
    return 4.0 + delta;
  };
  auto step_restricted = [&](double x) {
    double y;
    if (x < 0.25)
      y = br.f1(x);
    else if (x < 0.5)
      y = br.f2(x);
    else if (x < 0.75)
      y = br.f3(x);
    else
      y = br.f4(x);
    return y - std::floor(y);
  };

  // Orbits start at the one-sided limits of F_r at the critical points;
  // both sides land on the same value.
  double start[2] = {eps / 4.0, 1.0 - delta / 4.0};
  // First cumulative-derivative factors: the one-sided slopes at c_j
  // (left = limit from above, right = limit from below).
  double bl1[2] = {-(2.0 + eps), 4.0 + delta};
  double br1[2] = {4.0 + eps, -(2.0 + delta)};

  for (int j = 0; j < 2; ++j) {
    double x = start[j];
    double bl = bl1[j], brv = br1[j];
    for (size_t n = 1; n <= n_terms; ++n) {
      for (double bp : {0.0, 0.25, 0.5, 0.75, 1.0})
        if (x == bp) {
          x = (bp >= 1.0) ? bp - 1e-15 : bp + 1e-15;
          out.perturbed_breakpoint = true;
        }
      out.orbit[j].push_back(x);
      out.beta_left[j].push_back(bl);
      out.beta_right[j].push_back(brv);
      double sl = slope_at(x);
      bl *= sl;
      brv *= sl;
      x = step_restricted(x);
    }
  }

  // Each term is an indicator of [0,A] (when its sign is positive) or
  // [A,1] weighted by D / |beta|; assemble the piecewise-constant sum.
  std::vector<double> cuts{0.0, 1.0};
  for (int j = 0; j < 2; ++j)
    for (double a : out.orbit[j])
      if (a > 0.0 && a < 1.0) cuts.push_back(a);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  PiecewiseConstantDensity f;
  f.breaks = cuts;
  f.values.assign(cuts.size() - 1, 1.0);
  auto add_term = [&](double A, double B, double w) {
    if (B == 0.0) return;
    for (size_t i = 0; i + 1 < f.breaks.size(); ++i) {
      double mid = 0.5 * (f.breaks[i] + f.breaks[i + 1]);
      if ((B > 0.0 && mid < A) || (B < 0.0 && mid > A)) f.values[i] += w;
    }
  };
  for (int j = 0; j < 2; ++j)
    for (size_t n = 0; n < out.orbit[j].size(); ++n) {
      double A = out.orbit[j][n];
      add_term(A, -out.beta_left[j][n],
               D[2 * j] / std::abs(out.beta_left[j][n]));
      add_term(A, out.beta_right[j][n],
               D[2 * j + 1] / std::abs(out.beta_right[j][n]));
    }
  f.normalize();
  f.merge_equal();
  out.density = std::move(f);
  return out;
}

}  // namespace shiftwalk
