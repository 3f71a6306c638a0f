#include "shiftwalk/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "shiftwalk/rng.hpp"

namespace shiftwalk {

int FullBranchPartition::locate(double x) const {
  size_t lo = 0, hi = intervals.size();
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (intervals[mid].xhi <= x)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < intervals.size() && x > intervals[lo].xlo && x < intervals[lo].xhi)
    return int(lo);
  return -1;
}

FullBranchPartition full_branch_partition(const ShiftPeriodicMap& map,
                                          long long bound) {
  for (const auto& b : map.branches) {
    for (const ExtendedReal& lim : {b.left_limit, b.right_limit}) {
      if (!is_integer_or_infinite(lim, 1e-9))
        throw std::invalid_argument(
            "full_branch_partition requires integer spikes (branch limit " +
            std::to_string(lim.v) + " is neither integer nor infinite)");
    }
  }
  FullBranchPartition part;
  part.intervals = jump_pieces(map, bound, &part.residual_measure);
  for (const auto& b : map.branches) {
    if (!b.value_max().is_finite()) {
      double cut = b.invert(double(bound + 1));
      double endpoint = b.increasing() ? b.hi : b.lo;
      part.stubs.emplace_back(std::min(cut, endpoint), std::max(cut, endpoint));
    }
    if (!b.value_min().is_finite()) {
      double cut = b.invert(double(-bound));
      double endpoint = b.increasing() ? b.lo : b.hi;
      part.stubs.emplace_back(std::min(cut, endpoint), std::max(cut, endpoint));
    }
  }
  return part;
}

double linearization_restricted(const FullBranchPartition& part, double x) {
  int i = part.locate(x);
  if (i < 0)
    throw std::invalid_argument("point outside the full-branch partition");
  const JumpPiece& p = part.intervals[i];
  double t = (x - p.xlo) / p.width();
  return p.branch->increasing() ? t : 1.0 - t;
}

namespace {

struct Sym {
  double a = 0.0, b = 0.0;
  bool inc = true;
  const JumpPiece* piece = nullptr;  // null for unresolved stubs
  double width() const { return b - a; }
};

struct Node {
  double g_lo, g_hi, f_lo, f_hi;
  std::vector<int> itinerary;  // symbol indices, first symbol first
};

}  // namespace

HomeomorphismApprox build_h(const ShiftPeriodicMap& map, int depth,
                            const BuildHOptions& opts) {
  FullBranchPartition part = full_branch_partition(map, opts.bound);

  std::vector<Sym> syms;
  for (const auto& p : part.intervals)
    syms.push_back({p.xlo, p.xhi, p.branch->increasing(), &p});
  for (const auto& s : part.stubs) syms.push_back({s.first, s.second, true, nullptr});
  std::sort(syms.begin(), syms.end(),
            [](const Sym& x, const Sym& y) { return x.a < y.a; });

  // Chained inverses mapping a point of (0,1) into the cylinder with the
  // given itinerary (f dynamics and the linearization respectively).
  auto psi_f = [&](const std::vector<int>& it, double y) {
    for (size_t k = it.size(); k-- > 0;) {
      const Sym& s = syms[it[k]];
      y = s.piece->invert_restricted(y);
    }
    return y;
  };
  auto psi_g = [&](const std::vector<int>& it, double y) {
    for (size_t k = it.size(); k-- > 0;) {
      const Sym& s = syms[it[k]];
      y = s.inc ? s.a + y * s.width() : s.b - y * s.width();
    }
    return y;
  };

  HomeomorphismApprox h;
  h.depth = depth;
  std::vector<std::pair<double, double>> knots;
  knots.emplace_back(0.0, 0.0);
  knots.emplace_back(1.0, 1.0);
  double max_unrefined = 0.0;

  std::deque<Node> queue;
  queue.push_back({0.0, 1.0, 0.0, 1.0, {}});
  while (!queue.empty()) {
    Node node = std::move(queue.front());
    queue.pop_front();
    double gw = node.g_hi - node.g_lo;
    double fw = node.f_hi - node.f_lo;
    double scale = std::max(gw, fw);

    // Select the symbols worth resolving inside this cylinder; skipped runs
    // stay linear in h and are charged to max_unrefined.
    double pending_gap = 0.0;
    for (size_t j = 0; j < syms.size(); ++j) {
      const Sym& s = syms[j];
      if (s.width() * scale <= opts.prune_width || knots.size() > opts.max_knots) {
        pending_gap += s.width();
        continue;
      }
      max_unrefined = std::max(max_unrefined, pending_gap * scale);
      pending_gap = 0.0;
      double ga = psi_g(node.itinerary, s.a), gb = psi_g(node.itinerary, s.b);
      double fa = psi_f(node.itinerary, s.a), fb = psi_f(node.itinerary, s.b);
      if (ga > gb) std::swap(ga, gb);
      if (fa > fb) std::swap(fa, fb);
      knots.emplace_back(ga, fa);
      knots.emplace_back(gb, fb);
      bool deep_enough = int(node.itinerary.size()) + 1 >= depth;
      bool tiny = (gb - ga) <= opts.prune_width && (fb - fa) <= opts.prune_width;
      if (s.piece && !deep_enough && !tiny &&
          knots.size() <= opts.max_knots) {
        Node child{ga, gb, fa, fb, node.itinerary};
        child.itinerary.push_back(int(j));
        queue.push_back(std::move(child));
      } else {
        max_unrefined = std::max(max_unrefined, fb - fa);
      }
    }
    max_unrefined = std::max(max_unrefined, pending_gap * scale);
  }

  std::sort(knots.begin(), knots.end());
  std::vector<std::pair<double, double>> clean;
  for (const auto& k : knots) {
    if (!clean.empty()) {
      if (k.first <= clean.back().first) continue;
      if (k.second <= clean.back().second) continue;  // enforce monotone
    }
    clean.push_back(k);
  }
  if (clean.back().first < 1.0) clean.emplace_back(1.0, 1.0);
  h.knots = std::move(clean);
  h.max_unrefined_width = max_unrefined;
  return h;
}

double HomeomorphismApprox::operator()(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  auto it = std::upper_bound(
      knots.begin(), knots.end(), u,
      [](double x, const std::pair<double, double>& k) { return x < k.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  double t = (u - lo.first) / (hi.first - lo.first);
  return lo.second + t * (hi.second - lo.second);
}

double HomeomorphismApprox::inverse(double y) const {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  auto it = std::upper_bound(knots.begin(), knots.end(), y,
                             [](double x, const std::pair<double, double>& k) {
                               return x < k.second;
                             });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  double t = (y - lo.second) / (hi.second - lo.second);
  return lo.first + t * (hi.first - lo.first);
}

double conjugacy_residual(const HomeomorphismApprox& h,
                          const ShiftPeriodicMap& map, int n_probe) {
  FullBranchPartition part = full_branch_partition(map);
  double worst = 0.0;
  for (int k = 0; k < n_probe; ++k) {
    double u = (k + 0.3819660112501051) / n_probe;
    int i = part.locate(u);
    if (i < 0) continue;
    double g = linearization_restricted(part, u);
    double lhs = h(g);
    double rhs = map.eval_restricted(h(u));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double sample_invariant(const HomeomorphismApprox& h, std::mt19937_64& rng) {
  return h(uniform01(rng));
}

}  // namespace shiftwalk
