#include "shiftwalk/walk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "shiftwalk/parallel.hpp"
#include "shiftwalk/rng.hpp"
#include "shiftwalk/stats.hpp"

namespace shiftwalk {

WalkRecord iterate(const ShiftPeriodicMap& map, double x0, size_t n) {
  WalkRecord rec;
  rec.fractional.reserve(n + 1);
  rec.cocycle.reserve(n + 1);
  rec.fractional.push_back(x0);
  rec.cocycle.push_back(0);
  double x = x0;
  bool dead = false;
  for (size_t k = 0; k < n; ++k) {
    ExtendedReal y = map.eval(x);
    long long inc = 0;
    if (!y.is_finite()) {
      if (rec.singular_hit < 0) rec.singular_hit = int(k);
      dead = true;
      x = 0.0;
    } else {
      double fl = std::floor(y.value());
      x = y.value() - fl;
      if (x >= 1.0) {
        x = 0.0;
        fl += 1.0;
      }
      inc = dead ? 0 : (long long)(fl);
    }
    rec.fractional.push_back(x);
    rec.cocycle.push_back(rec.cocycle.back() + (dead ? 0 : inc));
  }
  return rec;
}

std::pair<double, long long> skew_step(const ShiftPeriodicMap& map, double x,
                                       long long m) {
  ExtendedReal y = map.eval(x);
  if (!y.is_finite()) return {0.0, m};
  double fl = std::floor(y.value());
  double frac = y.value() - fl;
  if (frac >= 1.0) {
    frac = 0.0;
    fl += 1.0;
  }
  return {frac, m + (long long)(fl)};
}

double JumpPiece::invert_restricted(double t) const {
  return branch->invert(double(jump) + t);
}

std::vector<JumpPiece> jump_pieces(const ShiftPeriodicMap& map,
                                   long long bound, double* tail_mass) {
  std::vector<JumpPiece> out;
  double tail = 0.0;
  for (const auto& b : map.branches) {
    ExtendedReal vlo = b.value_min();
    ExtendedReal vhi = b.value_max();
    long long m_lo = vlo.is_finite() ? (long long)std::floor(vlo.value())
                                     : -(bound + 1);
    long long m_hi = vhi.is_finite() ? (long long)std::ceil(vhi.value()) - 1
                                     : bound;
    // Degenerate guard: branch contained in a single integer cell.
    if (vlo.is_finite() && vhi.is_finite() && m_hi < m_lo) m_hi = m_lo;

    // x-coordinate of the level-v preimage on this branch, with branch
    // endpoints for levels at/past the value range.
    auto level_x = [&](double v) {
      if (vlo.is_finite() && v <= vlo.value())
        return b.increasing() ? b.lo : b.hi;
      if (vhi.is_finite() && v >= vhi.value())
        return b.increasing() ? b.hi : b.lo;
      return b.invert(v);
    };

    for (long long m = std::max(m_lo, -bound); m <= std::min(m_hi, bound);
         ++m) {
      double xa = level_x(double(m));
      double xb = level_x(double(m + 1));
      JumpPiece p;
      p.xlo = std::min(xa, xb);
      p.xhi = std::max(xa, xb);
      p.jump = m;
      p.branch = &b;
      if (p.xhi > p.xlo) out.push_back(p);
    }
    // Unresolved stubs hugging singular endpoints.
    if (!vhi.is_finite()) {
      double x_cut = b.invert(double(bound + 1));
      double endpoint = b.increasing() ? b.hi : b.lo;
      tail += std::abs(endpoint - x_cut);
    }
    if (!vlo.is_finite()) {
      double x_cut = b.invert(double(-bound));
      double endpoint = b.increasing() ? b.lo : b.hi;
      tail += std::abs(x_cut - endpoint);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const JumpPiece& a, const JumpPiece& b) { return a.xlo < b.xlo; });
  if (tail_mass) *tail_mass = tail;
  return out;
}

double TransitionTable::mean() const {
  double s = 0.0;
  for (const auto& [m, pm] : p) s += double(m) * pm;
  return s;
}

double TransitionTable::second_moment() const {
  double s = 0.0;
  for (const auto& [m, pm] : p) s += double(m) * double(m) * pm;
  return s;
}

TransitionTable transition_table(const ShiftPeriodicMap& map, long long bound) {
  TransitionTable t;
  t.bound = bound;
  auto pieces = jump_pieces(map, bound, &t.tail_mass);
  for (const auto& p : pieces) t.p[p.jump] += p.width();
  return t;
}

TransitionTable empirical_transitions(
    const ShiftPeriodicMap& map,
    const std::function<double(std::mt19937_64&)>& init, size_t n,
    uint64_t seed) {
  TransitionTable t;
  std::mt19937_64 rng = path_rng(seed, 0);
  size_t effective = 0;
  for (size_t i = 0; i < n; ++i) {
    double x = init(rng);
    ExtendedReal y = map.eval(x);
    if (!y.is_finite()) continue;
    t.p[(long long)std::floor(y.value())] += 1.0;
    ++effective;
  }
  for (auto& [m, pm] : t.p) pm /= double(effective);
  return t;
}

IndependenceResult increment_independence_test(
    const ShiftPeriodicMap& map,
    const std::function<double(std::mt19937_64&)>& init, size_t n_steps,
    size_t n_paths, uint64_t seed, double level, int threads) {
  constexpr int kBins = 5;
  auto bin_of = [](long long z) {
    if (z <= -2) return 0;
    if (z >= 2) return 4;
    return int(z) + 2;
  };

  int nblocks = std::max(1, threads);
  std::vector<std::array<long long, kBins * kBins>> partial(
      nblocks, std::array<long long, kBins * kBins>{});
  size_t chunk = (n_paths + nblocks - 1) / nblocks;
  parallel_for(n_paths, threads, [&](size_t lo, size_t hi) {
    auto& counts = partial[lo / std::max<size_t>(1, chunk)];
    for (size_t path = lo; path < hi; ++path) {
      std::mt19937_64 rng = path_rng(seed, path);
      double x0 = init(rng);
      WalkRecord rec = iterate(map, x0, n_steps);
      for (size_t k = 2; k + 0 < rec.cocycle.size(); ++k) {
        long long z0 = rec.cocycle[k - 1] - rec.cocycle[k - 2];
        long long z1 = rec.cocycle[k] - rec.cocycle[k - 1];
        counts[bin_of(z0) * kBins + bin_of(z1)] += 1;
      }
    }
  });
  std::array<long long, kBins * kBins> counts{};
  for (const auto& p : partial)
    for (int i = 0; i < kBins * kBins; ++i) counts[i] += p[i];

  std::array<long long, kBins> row{}, col{};
  long long total = 0;
  for (int i = 0; i < kBins; ++i)
    for (int j = 0; j < kBins; ++j) {
      row[i] += counts[i * kBins + j];
      col[j] += counts[i * kBins + j];
      total += counts[i * kBins + j];
    }

  IndependenceResult res;
  res.level = level;
  res.pairs = total;

  // Drop empty categories, then merge sparse ones (Cochran's rule: all
  // expected cell counts at least 5) pairwise by smallest margin. The same
  // grouping applies to rows and columns since both index the same variable.
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < kBins; ++i)
    if (row[i] + col[i] > 0) groups.push_back({i});
  auto margins = [&](std::vector<long long>& r, std::vector<long long>& c) {
    r.assign(groups.size(), 0);
    c.assign(groups.size(), 0);
    for (size_t g = 0; g < groups.size(); ++g)
      for (int b : groups[g]) {
        r[g] += row[b];
        c[g] += col[b];
      }
  };
  std::vector<long long> grow, gcol;
  for (;;) {
    margins(grow, gcol);
    double min_e = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < groups.size(); ++i)
      for (size_t j = 0; j < groups.size(); ++j)
        min_e = std::min(min_e,
                         double(grow[i]) * double(gcol[j]) / double(total));
    if (min_e >= 5.0 || groups.size() <= 2) break;
    size_t a = 0, b = 1;
    long long best = std::numeric_limits<long long>::max();
    for (size_t g = 0; g < groups.size(); ++g)
      if (grow[g] + gcol[g] < best) {
        best = grow[g] + gcol[g];
        a = g;
      }
    best = std::numeric_limits<long long>::max();
    for (size_t g = 0; g < groups.size(); ++g)
      if (g != a && grow[g] + gcol[g] < best) {
        best = grow[g] + gcol[g];
        b = g;
      }
    groups[a].insert(groups[a].end(), groups[b].begin(), groups[b].end());
    groups.erase(groups.begin() + b);
  }

  margins(grow, gcol);
  int g = int(groups.size());
  res.dof = std::max(1, (g - 1) * (g - 1));
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      double e = double(grow[i]) * double(gcol[j]) / double(total);
      if (!(e > 0.0)) continue;
      if (e < 5.0) res.insufficient_counts = true;
      long long o = 0;
      for (int bi : groups[i])
        for (int bj : groups[j]) o += counts[bi * kBins + bj];
      res.statistic += (double(o) - e) * (double(o) - e) / e;
    }
  res.quantile = chi_square_quantile(level, res.dof);
  res.independent = res.statistic <= res.quantile;
  return res;
}

}  // namespace shiftwalk
