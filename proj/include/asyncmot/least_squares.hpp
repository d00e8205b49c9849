#pragma once

#include <functional>

#include <Eigen/Core>

namespace asyncmot {

/// Residual vector r(x); the solver minimizes 0.5 * |r(x)|^2.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct TrustRegionOptions {
  int max_iterations = 50;
  /// Stop after an accepted step that changes |r| by less than this.
  double residual_tolerance = 1e-6;
  double gradient_tolerance = 1e-12;
  double initial_radius = 1.0;
  double min_radius = 1e-10;
  /// Forward-difference step per variable. Empty means 1e-6 for every variable.
  Eigen::VectorXd fd_steps;
};

struct TrustRegionResult {
  Eigen::VectorXd x;
  double cost = 0.0;          // 0.5 * |r|^2 at x
  double initial_cost = 0.0;  // at the starting point
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Bound-constrained nonlinear least squares with a trust-region method.
/// The Jacobian is taken by forward differences (backward next to an upper
/// bound). Variables are rescaled by their distance to the active bound
/// (Coleman-Li scaling) and steps that leave the box are reflected off the
/// first bound they cross. The returned point is never worse than `x0`.
/// `x0` is clamped into [lower, upper] first.
TrustRegionResult solve_bounded_least_squares(const ResidualFn& residual, Eigen::VectorXd x0,
                                              const Eigen::VectorXd& lower,
                                              const Eigen::VectorXd& upper,
                                              const TrustRegionOptions& options = {});

/// Forward-difference Jacobian of `residual` at x given r(x).
Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& r, const Eigen::VectorXd& steps,
                                           const Eigen::VectorXd& upper);

}  // namespace asyncmot
