#include "mexed/kernels.hpp"

#include <cmath>

namespace mexed::kernels {

namespace {

// Accumulator slots: 0 value, 1-3 gradient, 4-9 hessian, 10-19 third.
constexpr int kSlots = 20;

// Adds the contribution of one observation to acc.  The n-dependent terms
// (n ln alpha, n/alpha, ...) are added once in finish().
template <int Order>
inline void add_point(double a, double l, double b, double x, double* acc) {
  const double r = l + 2.0 * b * x;
  const double lz = std::log1p(x * (l + b * x));
  const double z = 1.0 + x * (l + b * x);
  const double w = std::exp(a * lz);  // z^a
  acc[0] += std::log(r) + (a - 1.0) * lz + (1.0 - w);
  if constexpr (Order >= 1) {
    const double inv_r = 1.0 / r;
    const double inv_z = 1.0 / z;
    const double w1 = w * inv_z;  // z^(a-1)
    const double x2 = x * x;
    acc[1] += lz - w * lz;
    acc[2] += inv_r + (a - 1.0) * x * inv_z - a * x * w1;
    acc[3] += 2.0 * x * inv_r + (a - 1.0) * x2 * inv_z - a * x2 * w1;
    if constexpr (Order >= 2) {
      const double x3 = x2 * x;
      const double x4 = x2 * x2;
      const double inv_r2 = inv_r * inv_r;
      const double inv_z2 = inv_z * inv_z;
      const double w2 = w1 * inv_z;  // z^(a-2)
      const double aa = a * a - a;
      const double cross = w1 * (1.0 + a * lz);
      acc[4] += -w * lz * lz;
      acc[5] += x * inv_z - x * cross;
      acc[6] += x2 * inv_z - x2 * cross;
      acc[7] += -inv_r2 - (a - 1.0) * x2 * inv_z2 - aa * x2 * w2;
      acc[8] += -2.0 * x * inv_r2 - (a - 1.0) * x3 * inv_z2 - aa * x3 * w2;
      acc[9] += -4.0 * x2 * inv_r2 - (a - 1.0) * x4 * inv_z2 - aa * x4 * w2;
      if constexpr (Order >= 3) {
        const double x5 = x4 * x;
        const double x6 = x3 * x3;
        const double inv_r3 = inv_r2 * inv_r;
        const double inv_z3 = inv_z2 * inv_z;
        const double w3 = w2 * inv_z;  // z^(a-3)
        const double aaa = a * (a - 1.0) * (a - 2.0);
        const double mixed_a = w1 * lz * (a * lz + 2.0);
        const double mixed_aa = w2 * ((2.0 * a - 1.0) + a * (a - 1.0) * lz);
        acc[10] += -w * lz * lz * lz;
        acc[11] += -x * mixed_a;
        acc[12] += -x2 * mixed_a;
        acc[13] += -x2 * inv_z2 - x2 * mixed_aa;
        acc[14] += -x3 * inv_z2 - x3 * mixed_aa;
        acc[15] += -x4 * inv_z2 - x4 * mixed_aa;
        acc[16] += 2.0 * inv_r3 + (a - 1.0) * 2.0 * x3 * inv_z3 - aaa * x3 * w3;
        acc[17] += 4.0 * x * inv_r3 + (a - 1.0) * 2.0 * x4 * inv_z3 - aaa * x4 * w3;
        acc[18] += 8.0 * x2 * inv_r3 + (a - 1.0) * 2.0 * x5 * inv_z3 - aaa * x5 * w3;
        acc[19] += 16.0 * x3 * inv_r3 + (a - 1.0) * 2.0 * x6 * inv_z3 - aaa * x6 * w3;
      }
    }
  }
}

LikelihoodDerivatives finish(double a, double n, const double* acc, Order order) {
  LikelihoodDerivatives out;
  out.value = n * std::log(a) + acc[0];
  if (order >= Order::gradient) {
    out.gradient = {n / a + acc[1], acc[2], acc[3]};
  }
  if (order >= Order::hessian) {
    for (int k = 0; k < 6; ++k) out.hessian[k] = acc[4 + k];
    out.hessian[0] += -n / (a * a);
  }
  if (order >= Order::third) {
    for (int k = 0; k < 10; ++k) out.third[k] = acc[10 + k];
    out.third[0] += 2.0 * n / (a * a * a);
  }
  return out;
}

template <int Order>
void run_serial(const Params& p, std::span<const double> x, double* acc) {
  const double a = p.alpha(), l = p.lambda(), b = p.beta();
  for (double xi : x) add_point<Order>(a, l, b, xi, acc);
}

template <int Order>
void run_omp(const Params& p, std::span<const double> x, double* acc) {
  const double a = p.alpha(), l = p.lambda(), b = p.beta();
  const double* data = x.data();
  const long n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static) reduction(+ : acc[:kSlots])
  for (long i = 0; i < n; ++i) add_point<Order>(a, l, b, data[i], acc);
}

template <typename Runner>
LikelihoodDerivatives dispatch(const Params& p, std::span<const double> x, Order order, Runner&& runner) {
  double acc[kSlots] = {};
  switch (order) {
    case Order::value: runner.template operator()<0>(p, x, acc); break;
    case Order::gradient: runner.template operator()<1>(p, x, acc); break;
    case Order::hessian: runner.template operator()<2>(p, x, acc); break;
    case Order::third: runner.template operator()<3>(p, x, acc); break;
  }
  return finish(p.alpha(), static_cast<double>(x.size()), acc, order);
}

struct SerialRunner {
  template <int O>
  void operator()(const Params& p, std::span<const double> x, double* acc) const { run_serial<O>(p, x, acc); }
};

struct OmpRunner {
  template <int O>
  void operator()(const Params& p, std::span<const double> x, double* acc) const { run_omp<O>(p, x, acc); }
};

}  // namespace

namespace serial {
LikelihoodDerivatives likelihood(const Params& p, std::span<const double> x, Order order) {
  return dispatch(p, x, order, SerialRunner{});
}
}  // namespace serial

namespace omp {
LikelihoodDerivatives likelihood(const Params& p, std::span<const double> x, Order order) {
  return dispatch(p, x, order, OmpRunner{});
}
}  // namespace omp

LikelihoodDerivatives likelihood(const Params& p, std::span<const double> x, Order order) {
  return x.size() >= kParallelThreshold ? omp::likelihood(p, x, order) : serial::likelihood(p, x, order);
}

}  // namespace mexed::kernels
