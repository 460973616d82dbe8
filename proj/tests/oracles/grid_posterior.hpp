#pragma once

// Posterior expectations by brute-force trapezoidal quadrature on a G^3 grid.
// The unnormalized posterior is evaluated directly from the density formula,
// independently of the library's likelihood kernels.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace oracle {

struct GammaPrior {
  double shape = 1.0;
  double rate = 0.0;
  double log_kernel(double x) const { return (shape - 1.0) * std::log(x) - rate * x; }
};

struct Box {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
};

struct GridMoments {
  std::array<double, 3> mean{};
  double reliability = 0.0;
  double hazard = 0.0;
  /// Share of the total mass sitting on the box faces; large values mean the
  /// box cuts off posterior mass.
  double edge_mass = 0.0;
};

inline double log_posterior_direct(const std::vector<double>& x, const std::array<GammaPrior, 3>& prior, double a,
                                   double l, double b) {
  if (!(a > 0.0 && l > 0.0 && b > 0.0)) return -INFINITY;
  double s = prior[0].log_kernel(a) + prior[1].log_kernel(l) + prior[2].log_kernel(b);
  for (double v : x) {
    const double z = 1.0 + l * v + b * v * v;
    s += std::log(a) + std::log(l + 2.0 * b * v) + (a - 1.0) * std::log(z) + 1.0 - std::pow(z, a);
  }
  return std::isfinite(s) ? s : -INFINITY;
}

inline GridMoments grid_moments(const std::vector<double>& x, const std::array<GammaPrior, 3>& prior, const Box& box,
                                double t, int G = 64) {
  const long total = static_cast<long>(G) * G * G;
  auto node = [&](int axis, int i) { return box.lo[axis] + (box.hi[axis] - box.lo[axis]) * i / (G - 1); };
  std::vector<double> lp(total);
#pragma omp parallel for schedule(static)
  for (long idx = 0; idx < total; ++idx) {
    const int i = static_cast<int>(idx / (G * G)), j = static_cast<int>((idx / G) % G), k = static_cast<int>(idx % G);
    lp[idx] = log_posterior_direct(x, prior, node(0, i), node(1, j), node(2, k));
  }
  const double peak = *std::max_element(lp.begin(), lp.end());

  double Z = 0.0, edge = 0.0, R = 0.0, H = 0.0;
  std::array<double, 3> m{};
  for (long idx = 0; idx < total; ++idx) {
    const int i = static_cast<int>(idx / (G * G)), j = static_cast<int>((idx / G) % G), k = static_cast<int>(idx % G);
    auto wt = [&](int q) { return (q == 0 || q == G - 1) ? 0.5 : 1.0; };
    const double w = wt(i) * wt(j) * wt(k) * std::exp(lp[idx] - peak);
    if (w == 0.0) continue;
    const double a = node(0, i), l = node(1, j), b = node(2, k);
    const double z = 1.0 + l * t + b * t * t;
    Z += w;
    m[0] += w * a;
    m[1] += w * l;
    m[2] += w * b;
    R += w * std::exp(1.0 - std::pow(z, a));
    H += w * a * (l + 2.0 * b * t) * std::pow(z, a - 1.0);
    if (i == 0 || j == 0 || k == 0 || i == G - 1 || j == G - 1 || k == G - 1) edge += w;
  }
  return {{m[0] / Z, m[1] / Z, m[2] / Z}, R / Z, H / Z, edge / Z};
}

/// Box from sample quantiles [q, 1 - q] of pilot draws, padded by `pad` times
/// the width on each side and clipped at 0.
inline Box box_from_draws(const std::array<std::vector<double>, 3>& draws, double q = 1e-3, double pad = 0.5) {
  Box box;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> v = draws[c];
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double lo = v[static_cast<std::size_t>(q * (n - 1))];
    const double hi = v[static_cast<std::size_t>((1.0 - q) * (n - 1))];
    const double w = hi - lo;
    box.lo[c] = std::max(0.0, lo - pad * w);
    box.hi[c] = hi + pad * w;
  }
  return box;
}

}  // namespace oracle
