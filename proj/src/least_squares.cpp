#include "asyncmot/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "asyncmot/errors.hpp"

namespace asyncmot {

namespace {

constexpr double kInteriorFraction = 0.995;

// Solves min |J p + r| subject to |p| <= radius.
Eigen::VectorXd trust_region_step(const Eigen::MatrixXd& jac, const Eigen::VectorXd& r,
                                  double radius) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const Eigen::VectorXd uf = svd.matrixU().transpose() * r;
  const double cutoff = sv.size() > 0 ? sv(0) * 1e-12 : 0.0;

  auto step_for = [&](double mu) {
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) <= cutoff) continue;
      coeff(i) = -sv(i) * uf(i) / (sv(i) * sv(i) + mu);
    }
    return Eigen::VectorXd(svd.matrixV() * coeff);
  };

  Eigen::VectorXd p = step_for(0.0);
  if (p.norm() <= radius) return p;

  // |p(mu)| decreases monotonically in mu; bisect on log(mu) for |p| = radius.
  double lo = 0.0;
  double hi = 1.0;
  while (step_for(hi).norm() > radius) hi *= 10.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = lo == 0.0 ? hi * 1e-3 : std::sqrt(lo * hi);
    if (step_for(mid).norm() > radius) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (lo > 0.0 && hi / lo < 1.0 + 1e-6) break;
  }
  return step_for(hi);
}

// Largest t in [0, inf) with lower <= x + t * s <= upper, and the variable
// that binds first (-1 if none).
std::pair<double, Eigen::Index> step_to_bound(const Eigen::VectorXd& x, const Eigen::VectorXd& s,
                                              const Eigen::VectorXd& lower,
                                              const Eigen::VectorXd& upper) {
  double t = std::numeric_limits<double>::infinity();
  Eigen::Index hit = -1;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double ti = std::numeric_limits<double>::infinity();
    if (s(i) > 0.0) ti = (upper(i) - x(i)) / s(i);
    if (s(i) < 0.0) ti = (lower(i) - x(i)) / s(i);
    if (ti < t) {
      t = ti;
      hit = i;
    }
  }
  return {std::max(t, 0.0), hit};
}

}  // namespace

Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& r, const Eigen::VectorXd& steps,
                                           const Eigen::VectorXd& upper) {
  Eigen::MatrixXd jac(r.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x;
    double h = steps(j);
    if (x(j) + h > upper(j)) h = -h;
    xp(j) += h;
    jac.col(j) = (residual(xp) - r) / h;
  }
  return jac;
}

TrustRegionResult solve_bounded_least_squares(const ResidualFn& residual, Eigen::VectorXd x0,
                                              const Eigen::VectorXd& lower,
                                              const Eigen::VectorXd& upper,
                                              const TrustRegionOptions& options) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n) {
    throw ValidationError("least squares: bound dimensions do not match the state");
  }
  if ((lower.array() > upper.array()).any()) {
    throw ValidationError("least squares: lower bound exceeds upper bound");
  }
  const Eigen::VectorXd steps =
      options.fd_steps.size() == n ? options.fd_steps : Eigen::VectorXd::Constant(n, 1e-6);

  TrustRegionResult out;
  Eigen::VectorXd x = x0.cwiseMax(lower).cwiseMin(upper);
  Eigen::VectorXd r = residual(x);
  ++out.evaluations;
  double cost = 0.5 * r.squaredNorm();
  out.initial_cost = cost;
  double radius = options.initial_radius;

  for (out.iterations = 0; out.iterations < options.max_iterations;) {
    ++out.iterations;
    const Eigen::MatrixXd jac = finite_difference_jacobian(residual, x, r, steps, upper);
    out.evaluations += static_cast<int>(n);
    const Eigen::VectorXd grad = jac.transpose() * r;

    Eigen::VectorXd scale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = 1.0;
      if (grad(i) < 0.0 && std::isfinite(upper(i))) v = upper(i) - x(i);
      if (grad(i) > 0.0 && std::isfinite(lower(i))) v = x(i) - lower(i);
      scale(i) = std::sqrt(std::max(v, 0.0));
    }
    if ((grad.array() * scale.array().square()).abs().maxCoeff() < options.gradient_tolerance) {
      out.converged = true;
      break;
    }

    const Eigen::MatrixXd jac_scaled = jac * scale.asDiagonal();
    const Eigen::VectorXd p = trust_region_step(jac_scaled, r, radius);
    const Eigen::VectorXd s = scale.cwiseProduct(p);
    if (s.norm() == 0.0) {
      out.converged = true;
      break;
    }

    // Candidate steps: the full step when feasible, otherwise a step stopped
    // just inside the box and a step reflected off the first bound.
    std::vector<Eigen::VectorXd> candidates;
    const auto [t_bound, hit] = step_to_bound(x, s, lower, upper);
    if (t_bound >= 1.0) {
      candidates.push_back(x + s);
    } else {
      candidates.push_back(x + kInteriorFraction * t_bound * s);
      const Eigen::VectorXd on_bound = x + t_bound * s;
      Eigen::VectorXd reflected = (1.0 - t_bound) * s;
      reflected(hit) = -reflected(hit);
      const auto [t_reflect, unused] = step_to_bound(on_bound, reflected, lower, upper);
      candidates.push_back(on_bound + std::min(1.0, kInteriorFraction * t_reflect) * reflected);
    }

    Eigen::VectorXd best_x = x;
    Eigen::VectorXd best_r = r;
    double best_cost = std::numeric_limits<double>::infinity();
    for (auto& cand : candidates) {
      cand = cand.cwiseMax(lower).cwiseMin(upper);
      Eigen::VectorXd rc = residual(cand);
      ++out.evaluations;
      const double cc = 0.5 * rc.squaredNorm();
      if (cc < best_cost) {
        best_cost = cc;
        best_x = cand;
        best_r = std::move(rc);
      }
    }

    const Eigen::VectorXd taken = best_x - x;
    const double predicted = -(grad.dot(taken) + 0.5 * (jac * taken).squaredNorm());
    const double actual = cost - best_cost;
    const double ratio = predicted > 0.0 ? actual / predicted : (actual > 0.0 ? 1.0 : -1.0);

    const double p_norm = p.norm();
    if (ratio < 0.25) {
      radius = 0.25 * p_norm;
    } else if (ratio > 0.75 && p_norm >= 0.95 * radius) {
      radius = 2.0 * radius;
    }

    if (actual > 0.0) {
      const double change = std::abs(best_r.norm() - r.norm());
      x = std::move(best_x);
      r = std::move(best_r);
      cost = best_cost;
      if (change < options.residual_tolerance) {
        out.converged = true;
        break;
      }
    }
    if (radius < options.min_radius) break;
  }

  out.x = std::move(x);
  out.cost = cost;
  return out;
}

}  // namespace asyncmot
