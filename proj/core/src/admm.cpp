#include "godm/admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "godm/error.hpp"

namespace godm {

namespace {

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double lower_bound(double s_i) { return -1.0 - s_i; }
double upper_bound(double s_i) { return 1.0 - s_i; }

void check_inputs(std::span<const double> g, std::span<const double> s) {
  if (g.size() != s.size()) throw InvalidArgument("g and s have different lengths");
  require_feasible_opinions(s);
}

// Budget the oracle allocation at `lambda` would use.
double oracle_spend(std::span<const double> g, std::span<const double> s, double lambda) {
  double used = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > lambda) {
      used += upper_bound(s[i]);
    } else if (g[i] < -lambda) {
      used += -lower_bound(s[i]);
    }
  }
  return used;
}

// Spends `leftover` on nodes with |g_i| <= lambda, largest |g_i| first.
// Appends to `touched` and returns the amount spent.
double fill_dead_zone(std::span<const double> g, std::span<const double> s, double lambda,
                      double leftover, std::vector<double>& delta_s,
                      std::vector<std::pair<NodeId, double>>* touched) {
  std::vector<NodeId> dead;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (g[i] != 0.0 && std::abs(g[i]) <= lambda && delta_s[i] == 0.0) dead.push_back(i);
  }
  std::stable_sort(dead.begin(), dead.end(),
                   [&](NodeId a, NodeId b) { return std::abs(g[a]) > std::abs(g[b]); });
  double spent = 0.0;
  for (NodeId i : dead) {
    if (leftover <= 0.0) break;
    const double sign = g[i] > 0.0 ? 1.0 : -1.0;
    const double cost = 1.0 - sign * s[i];
    if (cost <= 0.0) continue;
    const double amount = std::min(cost, leftover);
    delta_s[i] = sign * amount;
    if (touched) touched->emplace_back(i, delta_s[i]);
    leftover -= amount;
    spent += amount;
  }
  return spent;
}

}  // namespace

double soft_threshold(double v, double kappa) {
  if (kappa < 0.0) throw InvalidArgument("soft-threshold width must be nonnegative");
  if (v > kappa) return v - kappa;
  if (v < -kappa) return v + kappa;
  return 0.0;
}

double l1_objective(std::span<const double> g, std::span<const double> delta_s, double lambda) {
  if (g.size() != delta_s.size()) throw InvalidArgument("g and delta_s have different lengths");
  double obj = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) obj += -g[i] * delta_s[i] + lambda * std::abs(delta_s[i]);
  return obj;
}

AdmmResult admm_solve(std::span<const double> g, std::span<const double> s, double lambda,
                      const AdmmOptions& options) {
  check_inputs(g, s);
  if (!(options.rho > 0.0)) throw InvalidArgument("ADMM penalty rho must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("L1 weight lambda must be a finite nonnegative number");
  }

  const std::size_t n = g.size();
  const double rho = options.rho;
  const double kappa = lambda / rho;
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  AdmmResult result;
  AdmmState& st = result.state;
  st.x.assign(n, 0.0);
  st.z.assign(n, 0.0);
  st.u.assign(n, 0.0);
  st.rho = rho;
  st.lambda = lambda;

  std::vector<double> z_prev(n);
  bool converged = n == 0;
  for (std::size_t k = 1; k <= options.max_iter && !converged; ++k) {
    z_prev = st.z;
    double primal_sq = 0.0, dual_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      st.x[i] = std::clamp(st.z[i] - st.u[i] + g[i] / rho, lower_bound(s[i]), upper_bound(s[i]));
      st.z[i] = soft_threshold(st.x[i] + st.u[i], kappa);
      st.u[i] += st.x[i] - st.z[i];
      const double r = st.x[i] - st.z[i];
      const double d = st.z[i] - z_prev[i];
      primal_sq += r * r;
      dual_sq += d * d;
    }
    st.iterations = k;
    st.primal_residual = std::sqrt(primal_sq);
    st.dual_residual = rho * std::sqrt(dual_sq);
    if (!std::isfinite(st.primal_residual) || !std::isfinite(st.dual_residual)) {
      throw InternalError("ADMM iterate became non-finite");
    }
    if (options.record_trace) {
      result.trace.push_back({k, st.primal_residual, st.dual_residual,
                              l1_objective(g, st.z, lambda)});
    }
    const double eps_primal =
        sqrt_n * options.tol_abs + options.tol_rel * std::max(norm2(st.x), norm2(st.z));
    const double eps_dual = sqrt_n * options.tol_abs + options.tol_rel * rho * norm2(st.u);
    converged = st.primal_residual <= eps_primal && st.dual_residual <= eps_dual;
  }
  if (!converged) {
    std::ostringstream os;
    os << "ADMM did not converge in " << options.max_iter << " iterations (primal "
       << st.primal_residual << ", dual " << st.dual_residual << ")";
    throw ConvergenceError(os.str(), std::max(st.primal_residual, st.dual_residual),
                           options.max_iter);
  }

  AllocationPlan& plan = result.plan;
  plan.method = Method::Admm;
  plan.delta_s = st.z;
  for (std::size_t i = 0; i < n; ++i) {
    plan.spent += std::abs(st.z[i]);
    if (st.z[i] != 0.0) plan.touched.emplace_back(i, st.z[i]);
  }
  plan.budget = plan.spent;
  return result;
}

std::vector<double> coordinate_oracle(std::span<const double> g, std::span<const double> s,
                                      double lambda) {
  check_inputs(g, s);
  if (!(lambda >= 0.0)) throw InvalidArgument("L1 weight lambda must be nonnegative");
  std::vector<double> dx(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > lambda) {
      dx[i] = upper_bound(s[i]);
    } else if (g[i] < -lambda) {
      dx[i] = lower_bound(s[i]);
    }
  }
  return dx;
}

LambdaCalibration calibrate_lambda(std::span<const double> g, std::span<const double> s,
                                   double budget, double tol_budget) {
  check_inputs(g, s);
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw InvalidArgument("budget must be a finite nonnegative number");
  }
  auto fits = [&](double lambda) { return oracle_spend(g, s, lambda) <= budget + tol_budget; };

  LambdaCalibration cal;
  double max_abs = 0.0;
  for (double v : g) max_abs = std::max(max_abs, std::abs(v));

  if (fits(0.0)) {
    cal.lambda = 0.0;
  } else {
    // fits(lo) is false and fits(hi) is true throughout.
    double lo = 0.0, hi = max_abs;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (fits(mid) ? hi : lo) = mid;
    }
    // The feasible set is [lambda*, inf) where lambda* is one of the |g_i|.
    // Snap onto it when bisection stopped just above.
    double snapped = 0.0;
    for (double v : g) {
      if (std::abs(v) <= hi) snapped = std::max(snapped, std::abs(v));
    }
    cal.lambda = fits(snapped) ? snapped : hi;
  }

  cal.delta_s = coordinate_oracle(g, s, cal.lambda);
  double used = 0.0;
  for (double v : cal.delta_s) used += std::abs(v);
  fill_dead_zone(g, s, cal.lambda, budget - used, cal.delta_s, nullptr);
  return cal;
}

AdmmResult admm_solve_budget(std::span<const double> g_in, std::span<const double> s,
                             double budget, Objective objective, const AdmmOptions& options) {
  check_inputs(g_in, s);
  std::vector<double> g(g_in.begin(), g_in.end());
  if (objective == Objective::Minimize) {
    for (auto& v : g) v = -v;
  }
  const auto cal = calibrate_lambda(g, s, budget);

  // Pick a lambda strictly between the dead zone and the active set so the
  // ADMM fixed point is unique and equal to the oracle at cal.lambda.
  double dead_max = 0.0;
  double active_min = std::numeric_limits<double>::infinity();
  for (double v : g) {
    const double a = std::abs(v);
    if (a > cal.lambda) {
      active_min = std::min(active_min, a);
    } else {
      dead_max = std::max(dead_max, a);
    }
  }
  const double run_lambda =
      std::isfinite(active_min) ? 0.5 * (dead_max + active_min) : 2.0 * dead_max + 1.0;

  AdmmResult result = admm_solve(g, s, run_lambda, options);
  auto& plan = result.plan;
  plan.budget = budget;
  plan.delta_s.assign(g.size(), 0.0);
  plan.touched.clear();
  plan.spent = 0.0;
  // Keep z inside the box; it can overshoot a bound by the ADMM tolerance.
  for (NodeId i = 0; i < g.size(); ++i) {
    const double v = std::clamp(result.state.z[i], lower_bound(s[i]), upper_bound(s[i]));
    if (v == 0.0) continue;
    plan.delta_s[i] = v;
    plan.touched.emplace_back(i, v);
    plan.spent += std::abs(v);
  }
  plan.spent += fill_dead_zone(g, s, run_lambda, budget - plan.spent, plan.delta_s, &plan.touched);
  return result;
}

}  // namespace godm
