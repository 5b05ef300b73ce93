#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "godm/greedy.hpp"

namespace godm {

/// Proximal operator of kappa |.|: shrink v toward zero by kappa.
double soft_threshold(double v, double kappa);

struct AdmmOptions {
  double rho = 1.0;
  double tol_abs = 1e-8;
  double tol_rel = 1e-8;
  std::size_t max_iter = 5000;
  bool record_trace = false;
};

/// Iterate state for min  -g^T x + lambda ||z||_1  s.t.  x = z,
/// a_i <= x_i <= b_i with a_i = -1 - s_i and b_i = 1 - s_i.
struct AdmmState {
  std::vector<double> x;  // box-feasible iterate
  std::vector<double> z;  // sparse iterate
  std::vector<double> u;  // scaled dual
  double rho = 1.0;
  double lambda = 0.0;
  std::size_t iterations = 0;
  double primal_residual = 0.0;  // ||x - z||_2
  double dual_residual = 0.0;    // rho ||z - z_prev||_2
};

struct AdmmTraceRow {
  std::size_t iteration = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
};

struct AdmmResult {
  AllocationPlan plan;  // delta_s = z
  AdmmState state;
  std::vector<AdmmTraceRow> trace;
};

/// -g^T dx + lambda ||dx||_1
double l1_objective(std::span<const double> g, std::span<const double> delta_s, double lambda);

/// Scaled-form ADMM from x = z = u = 0:
///   x <- clip(z - u + g / rho, a, b)
///   z <- soft_threshold(x + u, lambda / rho)
///   u <- u + x - z
/// Stops when ||x - z|| <= sqrt(n) tol_abs + tol_rel max(||x||, ||z||) and
/// rho ||z - z_prev|| <= sqrt(n) tol_abs + tol_rel rho ||u||.
/// Throws ConvergenceError on hitting max_iter, InternalError on NaN.
AdmmResult admm_solve(std::span<const double> g, std::span<const double> s, double lambda,
                      const AdmmOptions& options = {});

/// Exact minimizer of the same problem, which separates by coordinate:
/// b_i when g_i > lambda, a_i when g_i < -lambda, 0 otherwise.
std::vector<double> coordinate_oracle(std::span<const double> g, std::span<const double> s,
                                      double lambda);

struct LambdaCalibration {
  double lambda = 0.0;
  std::vector<double> delta_s;
};

/// Bisects lambda on [0, max |g_i|] for the smallest value whose oracle
/// allocation fits the budget, then spends what is left on the dead-zone
/// nodes in decreasing |g_i|. The result spends the budget exactly like
/// greedy_allocate.
LambdaCalibration calibrate_lambda(std::span<const double> g, std::span<const double> s,
                                   double budget, double tol_budget = 1e-12);

/// Budget-constrained solve by ADMM: calibrates lambda, runs admm_solve at a
/// lambda strictly inside the gap that separates the active set from the
/// dead zone, then applies the marginal partial push.
AdmmResult admm_solve_budget(std::span<const double> g, std::span<const double> s, double budget,
                             Objective objective = Objective::Maximize,
                             const AdmmOptions& options = {});

}  // namespace godm
