#include "mexed/hpd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mexed/error.hpp"

namespace mexed {

namespace {

// ceil() that ignores representation noise such as 0.95 * 100 = 95.00000000000001.
std::size_t robust_ceil(double v) { return static_cast<std::size_t>(std::ceil(v - 1e-9)); }

std::size_t window_size(std::size_t n, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("credible level must lie in (0, 1)");
  const std::size_t need = robust_ceil(1.0 / (1.0 - level));
  if (n < need) {
    std::ostringstream msg;
    msg << "credible interval at level " << level << " needs at least " << need << " draws, got " << n;
    throw InsufficientDataError(msg.str());
  }
  return std::max<std::size_t>(1, robust_ceil(level * static_cast<double>(n)));
}

}  // namespace

HpdInterval hpd_interval(std::span<const double> sorted_draws, double level) {
  const std::size_t n = sorted_draws.size();
  const std::size_t k = window_size(n, level);
  if (!std::is_sorted(sorted_draws.begin(), sorted_draws.end()))
    throw ValidationError("hpd_interval expects draws in ascending order");
  std::size_t best = 0;
  double best_len = sorted_draws[k - 1] - sorted_draws[0];
  for (std::size_t i = 1; i + k <= n; ++i) {
    const double len = sorted_draws[i + k - 1] - sorted_draws[i];
    if (len < best_len) {
      best_len = len;
      best = i;
    }
  }
  return {sorted_draws[best], sorted_draws[best + k - 1], level};
}

HpdInterval hpd_interval_unsorted(std::vector<double> draws, double level) {
  std::sort(draws.begin(), draws.end());
  return hpd_interval(draws, level);
}

HpdInterval equal_tailed_interval(std::span<const double> sorted_draws, double level) {
  const std::size_t n = sorted_draws.size();
  const std::size_t k = window_size(n, level);
  const std::size_t lo = (n - k) / 2;
  return {sorted_draws[lo], sorted_draws[lo + k - 1], level};
}

}  // namespace mexed
