#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "mexed/params.hpp"

namespace mexed::kernels {

/// How far up the derivative ladder a likelihood pass should go.
enum class Order { value = 0, gradient = 1, hessian = 2, third = 3 };

/// Log-likelihood and its partial derivatives in (alpha, lambda, beta) order.
///
/// hessian is packed upper-triangular: (11, 12, 13, 22, 23, 33).
/// third is the 10 distinct entries of the symmetric third-derivative tensor:
/// (111, 112, 113, 122, 123, 133, 222, 223, 233, 333).
struct LikelihoodDerivatives {
  double value = 0.0;
  std::array<double, 3> gradient{};
  std::array<double, 6> hessian{};
  std::array<double, 10> third{};
};

/// Index of (i, j) in the packed hessian array.
constexpr std::size_t packed2(std::size_t i, std::size_t j) noexcept {
  if (i > j) return packed2(j, i);
  constexpr std::size_t row_start[3] = {0, 3, 5};
  return row_start[i] + (j - i);
}

/// Index of (i, j, k) in the packed third-derivative array.
constexpr std::size_t packed3(std::size_t i, std::size_t j, std::size_t k) noexcept {
  // sort the three indices
  if (i > j) return packed3(j, i, k);
  if (j > k) return packed3(i, k, j);
  constexpr std::size_t table[3][3][3] = {
      {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}},
      {{1, 3, 4}, {3, 6, 7}, {4, 7, 8}},
      {{2, 4, 5}, {4, 7, 8}, {5, 8, 9}},
  };
  return table[i][j][k];
}

/// Observations at or above this count go through the OpenMP kernel.
inline constexpr std::size_t kParallelThreshold = 4096;

namespace serial {
/// Reference single-threaded accumulation; kept for testing the parallel path.
LikelihoodDerivatives likelihood(const Params& p, std::span<const double> x, Order order);
}  // namespace serial

namespace omp {
/// OpenMP reduction over observations.
LikelihoodDerivatives likelihood(const Params& p, std::span<const double> x, Order order);
}  // namespace omp

/// Dispatches to the OpenMP kernel for large samples, serial otherwise.
LikelihoodDerivatives likelihood(const Params& p, std::span<const double> x, Order order);

}  // namespace mexed::kernels
