#pragma once

#include <vector>

#include "mexed/params.hpp"

namespace fixtures {

inline const std::vector<double>& aircond() {
  static const std::vector<double> v{23, 261, 87, 7,  120, 14, 62, 47, 225, 71, 246, 21, 42, 20, 5,
                                     12, 120, 11, 3,  14,  71, 11, 14, 11,  16, 90,  1,  16, 52, 95};
  return v;
}

/// Parameter grid for the analytic-identity checks.
inline std::vector<mexed::Params> parameter_grid() {
  std::vector<mexed::Params> out;
  for (double a : {0.3, 0.7, 1.0, 2.5})
    for (double l : {0.0, 0.5, 2.0})
      for (double b : {0.0, 0.1, 1.0})
        if (l + b > 0.0) out.emplace_back(a, l, b);
  return out;
}

}  // namespace fixtures
