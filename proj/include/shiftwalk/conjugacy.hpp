#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "shiftwalk/map.hpp"
#include "shiftwalk/walk.hpp"

namespace shiftwalk {

// Partition of (0,1) into maximal intervals on which floor(F) is constant
// and F_r maps onto (0,1) monotonically. For singular maps the intervals
// accumulating at the singularities are truncated at |jump| <= bound and the
// remaining stubs are reported as unresolved residual.
struct FullBranchPartition {
  std::vector<JumpPiece> intervals;                // ordered by xlo
  std::vector<std::pair<double, double>> stubs;    // unresolved near poles
  double residual_measure = 0.0;

  // Index of the interval containing x, or -1 if x falls in a stub / on a
  // boundary.
  int locate(double x) const;
};

FullBranchPartition full_branch_partition(const ShiftPeriodicMap& map,
                                          long long bound = 1024);

// Piecewise-linear approximation of the conjugating homeomorphism h with
// h o g_r = F_r o h, where g_r is the restricted endpoint-matching
// linearization of the map. Knots pair (u, h(u)); deeper refinements keep
// all knots of shallower ones.
struct HomeomorphismApprox {
  int depth = 0;
  std::vector<std::pair<double, double>> knots;  // strictly increasing in both
  double max_unrefined_width = 0.0;  // largest pruned cylinder width (x side)

  double operator()(double u) const;  // piecewise-linear evaluation
  double inverse(double y) const;
};

struct BuildHOptions {
  long long bound = 1024;       // jump truncation for singular maps
  double prune_width = 1e-12;   // stop refining cylinders below this width
  size_t max_knots = 40000000;  // safety budget
};

// Cylinder-matching construction: depth-n cylinders of the linearization are
// matched to the cylinders of F_r with the same itinerary.
HomeomorphismApprox build_h(const ShiftPeriodicMap& map, int depth,
                            const BuildHOptions& opts = {});

// sup over probe points of |h(g_r(u)) - F_r(h(u))|, the conjugacy defect of
// the approximation.
double conjugacy_residual(const HomeomorphismApprox& h,
                          const ShiftPeriodicMap& map, int n_probe);

// Draw from the F_r-invariant distribution h(U), U uniform on (0,1).
double sample_invariant(const HomeomorphismApprox& h, std::mt19937_64& rng);

// Restricted linearization g_r associated with a partition: linear on each
// interval, onto (0,1) with the same orientation as F_r.
double linearization_restricted(const FullBranchPartition& part, double x);

}  // namespace shiftwalk
