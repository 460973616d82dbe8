#include "mexed/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "mexed/distribution.hpp"
#include "mexed/error.hpp"
#include "mexed/kernels.hpp"
#include "mexed/likelihood.hpp"
#include "mexed/optimize.hpp"

namespace mexed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Layout {
  std::vector<int> free;                // indices of the searched coordinates
  std::array<double, 3> fixed_value{};  // used where opts.fixed is set
  std::array<bool, 3> is_fixed{};
};

Layout make_layout(const FitOptions& opts) {
  Layout lay;
  for (int j = 0; j < 3; ++j) {
    if (opts.fixed[j]) {
      lay.is_fixed[j] = true;
      lay.fixed_value[j] = *opts.fixed[j];
    } else {
      lay.free.push_back(j);
    }
  }
  return lay;
}

std::array<double, 3> expand(const Layout& lay, const Eigen::VectorXd& theta) {
  std::array<double, 3> p = lay.fixed_value;
  for (std::size_t k = 0; k < lay.free.size(); ++k) p[lay.free[k]] = std::exp(theta[k]);
  return p;
}

double tolerance_for(double loglik) { return 1e-7 * std::max(1.0, std::fabs(loglik)); }

bool on_floor(double v, double floor) { return v <= floor * (1.0 + 1e-9); }

// Score sup-norm over free coordinates that are not pinned at the floor with an
// outward-pointing score.
double projected_score_norm(const Layout& lay, const std::array<double, 3>& p, const std::array<double, 3>& g,
                            double floor) {
  double norm = 0.0;
  for (int j : lay.free) {
    if (j > 0 && on_floor(p[j], floor) && g[j] <= 0.0) continue;
    norm = std::max(norm, std::fabs(g[j]));
  }
  return norm;
}

struct StartOutcome {
  std::array<double, 3> p{};
  double loglik = -kInf;
  int iterations = 0;
  bool converged = false;
};

// Newton refinement in the original coordinates over the free interior block.
int newton_polish(const Layout& lay, std::array<double, 3>& p, std::span<const double> x, double floor) {
  int iters = 0;
  for (; iters < 30; ++iters) {
    std::vector<int> act;
    for (int j : lay.free)
      if (j == 0 || !on_floor(p[j], floor)) act.push_back(j);
    if (act.empty()) break;
    const auto der = kernels::likelihood(Params(p[0], p[1], p[2]), x, kernels::Order::hessian);
    const int m = static_cast<int>(act.size());
    Eigen::MatrixXd neg_h(m, m);
    Eigen::VectorXd g(m);
    for (int a = 0; a < m; ++a) {
      g[a] = der.gradient[act[a]];
      for (int b = 0; b < m; ++b) neg_h(a, b) = -der.hessian[kernels::packed2(act[a], act[b])];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(neg_h);
    if (llt.info() != Eigen::Success) break;
    const Eigen::VectorXd step = llt.solve(g);
    double t = 1.0;
    bool improved = false;
    std::array<double, 3> trial = p;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      trial = p;
      bool ok = true;
      for (int a = 0; a < m; ++a) {
        trial[act[a]] = p[act[a]] + t * step[a];
        if (!(trial[act[a]] > (act[a] == 0 ? 0.0 : floor))) ok = false;
      }
      if (!ok) continue;
      const double v = log_likelihood(trial[0], trial[1], trial[2], x);
      if (v >= der.value) {
        improved = true;
        break;
      }
    }
    if (!improved) break;
    double rel = 0.0;
    for (int a = 0; a < m; ++a) rel = std::max(rel, std::fabs(trial[act[a]] - p[act[a]]) / std::fabs(p[act[a]]));
    p = trial;
    if (rel < 1e-13) {
      ++iters;
      break;
    }
  }
  return iters;
}

StartOutcome run_start(const Layout& lay, const std::array<double, 3>& start, std::span<const double> x,
                       const FitOptions& opts) {
  const double floor = opts.boundary_floor;
  const int dim = static_cast<int>(lay.free.size());
  Eigen::VectorXd theta0(dim);
  Eigen::VectorXd lower(dim);
  for (int k = 0; k < dim; ++k) {
    const int j = lay.free[k];
    const double v = j == 0 ? start[j] : std::max(start[j], floor);
    theta0[k] = std::log(v);
    lower[k] = j == 0 ? -kInf : std::log(floor);
  }

  auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    const auto p = expand(lay, theta);
    if (!Params::valid(p[0], p[1], p[2])) {
      grad.setZero(dim);
      return kInf;
    }
    const auto der = kernels::likelihood(Params(p[0], p[1], p[2]), x, kernels::Order::gradient);
    grad.resize(dim);
    for (int k = 0; k < dim; ++k) grad[k] = -der.gradient[lay.free[k]] * p[lay.free[k]];
    return std::isfinite(der.value) ? -der.value : kInf;
  };
  auto stop = [&](const Eigen::VectorXd& theta, double f, const Eigen::VectorXd& grad) {
    const auto p = expand(lay, theta);
    std::array<double, 3> g{};
    for (int k = 0; k < dim; ++k) g[lay.free[k]] = -grad[k] / p[lay.free[k]];
    return projected_score_norm(lay, p, g, floor) < tolerance_for(f);
  };

  optimize::BfgsOptions bopts;
  bopts.max_iterations = opts.max_iterations;
  const auto res = optimize::minimize_bfgs(objective, theta0, lower, bopts, stop);

  StartOutcome out;
  out.p = expand(lay, res.x);
  out.iterations = res.iterations;
  if (!std::isfinite(res.f)) return out;
  out.iterations += newton_polish(lay, out.p, x, floor);
  const auto der = kernels::likelihood(Params(out.p[0], out.p[1], out.p[2]), x, kernels::Order::gradient);
  out.loglik = der.value;
  out.converged = projected_score_norm(lay, out.p, der.gradient, floor) < tolerance_for(der.value);
  return out;
}

}  // namespace

std::vector<Params> default_starts(const Dataset& d) {
  const double xbar = d.mean();
  const double x2 = xbar * xbar;
  std::vector<Params> out;
  for (double a : {0.3, 1.0, 2.0})
    for (double b : {1e-6, 1e-2, 1.0, 30.0}) out.emplace_back(a, a / xbar, b / x2);
  return out;
}

double two_sided_z(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
  boost::math::normal_distribution<double> unit;
  return boost::math::quantile(unit, 0.5 + 0.5 * level);
}

void fill_uncertainty(FitResult& fit) {
  std::vector<int> free;
  for (int j = 0; j < 3; ++j)
    if (!fit.fixed[j]) free.push_back(j);
  const int m = static_cast<int>(free.size());
  Eigen::MatrixXd block(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) block(a, b) = fit.info_matrix(free[a], free[b]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(block);
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double threshold = 1e-10 * std::fabs(block.trace());
  fit.cov_reliable = m > 0 && ev.minCoeff() > threshold;
  Eigen::VectorXd inv_ev(m);
  for (int k = 0; k < m; ++k) inv_ev[k] = ev[k] > threshold ? 1.0 / ev[k] : 0.0;
  const Eigen::MatrixXd cov_block = eig.eigenvectors() * inv_ev.asDiagonal() * eig.eigenvectors().transpose();

  fit.cov_matrix.setZero();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) fit.cov_matrix(free[a], free[b]) = 0.5 * (cov_block(a, b) + cov_block(b, a));

  const double z = two_sided_z(fit.ci_level);
  const auto est = fit.params_hat.as_array();
  for (int j = 0; j < 3; ++j) {
    const double half = z * std::sqrt(std::max(0.0, fit.cov_matrix(j, j)));
    fit.ci[j] = {std::max(0.0, est[j] - half), est[j] + half};
  }
}

FitResult fit_mle(const Dataset& d, const FitOptions& opts) {
  if (d.size() < 2) throw InsufficientDataError("maximum-likelihood fit needs at least 2 observations");
  if (!(opts.boundary_floor > 0.0)) throw ValidationError("boundary floor must be positive");
  const Layout lay = make_layout(opts);
  const auto x = d.values();

  std::vector<std::array<double, 3>> starts;
  for (const auto& s : default_starts(d)) starts.push_back(s.as_array());
  if (opts.init) starts.push_back(opts.init->as_array());
  for (auto& s : starts)
    for (int j = 0; j < 3; ++j)
      if (lay.is_fixed[j]) s[j] = lay.fixed_value[j];

  FitResult fit;
  fit.n = d.size();
  fit.ci_level = opts.ci_level;
  fit.fixed = lay.is_fixed;
  fit.starts.resize(starts.size());

  if (lay.free.empty()) {
    const Params p(starts[0][0], starts[0][1], starts[0][2]);
    fit.params_hat = p;
    fit.loglik = log_likelihood(p, d);
    fit.converged = true;
    fit.info_matrix = observed_information(p, d);
    fill_uncertainty(fit);
    return fit;
  }

  std::vector<StartOutcome> outcomes(starts.size());
  const long count = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic) if (opts.parallel_starts)
  for (long k = 0; k < count; ++k) outcomes[k] = run_start(lay, starts[k], x, opts);

  std::size_t best = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const auto& s = starts[k];
    fit.starts[k] = {s, log_likelihood(s[0], s[1], s[2], x), outcomes[k].loglik, outcomes[k].converged};
    if (outcomes[k].loglik > outcomes[best].loglik) best = k;
  }
  const StartOutcome& win = outcomes[best];
  if (!std::isfinite(win.loglik)) throw NumericError("likelihood maximization failed from every starting point");

  std::array<double, 3> p = win.p;
  for (int j = 1; j < 3; ++j) {
    if (!lay.is_fixed[j] && on_floor(p[j], opts.boundary_floor)) fit.at_boundary[j] = true;
  }
  // Snap floored coordinates to zero unless that would leave lambda = beta = 0.
  if (!(fit.at_boundary[1] && fit.at_boundary[2])) {
    for (int j = 1; j < 3; ++j)
      if (fit.at_boundary[j]) p[j] = 0.0;
  }
  fit.params_hat = Params(p[0], p[1], p[2]);
  fit.iterations = win.iterations;

  const auto der = kernels::likelihood(fit.params_hat, x, kernels::Order::gradient);
  fit.loglik = der.value;
  fit.gradient_tolerance = tolerance_for(der.value);
  double gnorm = 0.0;
  for (int j : lay.free) {
    if (fit.at_boundary[j] && der.gradient[j] <= 0.0) continue;
    gnorm = std::max(gnorm, std::fabs(der.gradient[j]));
  }
  fit.gradient_norm = gnorm;
  fit.converged = win.converged && gnorm < fit.gradient_tolerance;
  fit.info_matrix = observed_information(fit.params_hat, d);
  fill_uncertainty(fit);
  return fit;
}

double plugin_reliability(const FitResult& fit, double t) { return survival(fit.params_hat, t); }

double plugin_hazard(const FitResult& fit, double t) { return hazard(fit.params_hat, t); }

}  // namespace mexed
