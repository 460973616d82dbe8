#include "mexed/params.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mexed/error.hpp"

namespace mexed {

bool Params::valid(double alpha, double lambda, double beta) noexcept {
  return std::isfinite(alpha) && std::isfinite(lambda) && std::isfinite(beta) && alpha > 0.0 &&
         lambda >= 0.0 && beta >= 0.0 && lambda + beta > 0.0;
}

Params::Params(double alpha, double lambda, double beta)
    : alpha_(alpha), lambda_(lambda), beta_(beta) {
  if (!valid(alpha, lambda, beta)) {
    std::ostringstream msg;
    msg << "invalid parameters (alpha=" << alpha << ", lambda=" << lambda << ", beta=" << beta
        << "): need alpha > 0, lambda >= 0, beta >= 0, lambda + beta > 0";
    throw ValidationError(msg.str());
  }
}

Dataset::Dataset(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("dataset is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v <= 0.0) {
      std::ostringstream msg;
      msg << "dataset value #" << (i + 1) << " = " << v << " is not a positive finite number";
      throw ValidationError(msg.str());
    }
  }
}

double Dataset::sum() const noexcept { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double Dataset::mean() const noexcept { return sum() / static_cast<double>(values_.size()); }

std::vector<double> Dataset::sorted() const {
  std::vector<double> out = values_;
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mexed
