#pragma once

#include <map>
#include <string>
#include <vector>

#include "shiftwalk/map.hpp"

namespace shiftwalk {

// Construct one of the built-in map families by name:
//   climbing_sine      params: a > 0
//   climbing_tangent   params: (none)
//   example1           params: eps >= 0, delta >= 0
//   example2           params: kappa > 0
//   pomeau_manneville  params: a >= 1, b >= 1, eps >= 0
//   nonint_example     params: kappa > 0
//   conjugated_example1 params: (none)
// Throws std::invalid_argument on unknown names, missing parameters, or
// out-of-range values.
ShiftPeriodicMap builtin(const std::string& name,
                         const std::map<std::string, double>& params = {});

std::vector<std::string> builtin_names();

}  // namespace shiftwalk
