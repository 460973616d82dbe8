#pragma once

#include <span>
#include <vector>

namespace mexed {

struct HpdInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  double length() const noexcept { return upper - lower; }
};

/// Shortest interval [x_(i), x_(i+k-1)] over all windows of k = ceil(level N)
/// consecutive order statistics; ties go to the smallest lower endpoint.
/// sorted_draws must be ascending (ValidationError otherwise) and hold at least
/// ceil(1 / (1 - level)) values (InsufficientDataError otherwise).
HpdInterval hpd_interval(std::span<const double> sorted_draws, double level);

/// Convenience overload that sorts a copy first.
HpdInterval hpd_interval_unsorted(std::vector<double> draws, double level);

/// Equal-tailed interval between the (1-level)/2 and (1+level)/2 order statistics,
/// using the same window size k as hpd_interval.
HpdInterval equal_tailed_interval(std::span<const double> sorted_draws, double level);

}  // namespace mexed
