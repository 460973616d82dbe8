#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mexed {

/// Parameter triple (alpha, lambda, beta) of the modified extended exponential
/// distribution.  alpha is a dimensionless shape, lambda a rate (1/time) and
/// beta a rate (1/time^2).
///
/// Invariants: alpha > 0, lambda >= 0, beta >= 0, lambda + beta > 0, all finite.
class Params {
 public:
  /// Throws ValidationError when the invariants do not hold.
  Params(double alpha, double lambda, double beta);

  double alpha() const noexcept { return alpha_; }
  double lambda() const noexcept { return lambda_; }
  double beta() const noexcept { return beta_; }

  /// (alpha, lambda, beta) in that order; the order every vector/matrix in the
  /// library uses.
  std::array<double, 3> as_array() const noexcept { return {alpha_, lambda_, beta_}; }

  /// True when all three coordinates are strictly positive.
  bool interior() const noexcept { return lambda_ > 0.0 && beta_ > 0.0; }

  static bool valid(double alpha, double lambda, double beta) noexcept;

  friend bool operator==(const Params&, const Params&) = default;

 private:
  double alpha_;
  double lambda_;
  double beta_;
};

/// Ordered collection of strictly positive, finite lifetimes (n >= 1).
class Dataset {
 public:
  explicit Dataset(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double mean() const noexcept;
  double sum() const noexcept;
  /// Copy of the values in ascending order.
  std::vector<double> sorted() const;

 private:
  std::vector<double> values_;
};

}  // namespace mexed
