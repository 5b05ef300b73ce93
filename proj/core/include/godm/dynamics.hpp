#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "godm/confidence.hpp"
#include "godm/graph.hpp"

namespace godm {

/// The Nash-equilibrium operator M = Lambda + (I - Lambda) L of a trust
/// network under a confidence vector. Row i has diagonal
/// alpha_i + (1 - alpha_i) d_ii and off-diagonal -(1 - alpha_i) w_ij for each
/// successor j. M is kept in sparse row form and never densified.
///
/// Construction checks strict row diagonal dominance, which holds whenever
/// every alpha_i is strictly inside (0, 1).
class GodmSystem {
 public:
  GodmSystem(const SignedDigraph& graph, const ConfidenceVector& confidence);
  GodmSystem(const SignedDigraph& graph, std::vector<double> alpha);

  std::size_t size() const noexcept { return alpha_.size(); }
  std::span<const double> alpha() const noexcept { return alpha_; }
  std::span<const double> out_strength() const noexcept { return degree_; }

  /// Successors of i with their trust weights w_ij (not the M entries).
  std::span<const Arc> successors(NodeId i) const {
    return {arcs_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t nonzeros() const noexcept { return arcs_.size() + size(); }

  double diagonal(NodeId i) const { return alpha_[i] + (1.0 - alpha_[i]) * degree_[i]; }
  double off_diagonal_scale(NodeId i) const { return -(1.0 - alpha_[i]); }

  /// M x
  std::vector<double> apply(std::span<const double> x) const;
  /// Lambda s
  std::vector<double> scaled_opinions(std::span<const double> s) const;
  /// ||M z - Lambda s||_inf
  double residual(std::span<const double> z, std::span<const double> s) const;

 private:
  void check_dominance() const;

  std::vector<double> alpha_;
  std::vector<double> degree_;
  std::vector<std::size_t> offsets_;
  std::vector<Arc> arcs_;
};

struct EquilibriumResult {
  std::vector<double> z_star;
  std::size_t iterations = 0;  // 0 for a direct solve
  double residual = 0.0;       // ||M z* - Lambda s||_inf
};

inline constexpr double kDefaultSolveTol = 1e-10;

/// Preconditioned Krylov solver for M (and, lazily on request, for M^T) that can be
/// reused across many right-hand sides.
class EquilibriumSolver {
 public:
  explicit EquilibriumSolver(const GodmSystem& system);
  ~EquilibriumSolver();
  EquilibriumSolver(EquilibriumSolver&&) noexcept;
  EquilibriumSolver& operator=(EquilibriumSolver&&) noexcept;

  /// Solves M z = Lambda s. The residual is held to
  /// tol * max(1, ||Lambda s||_inf); InternalError otherwise.
  EquilibriumResult solve(std::span<const double> s, double tol = kDefaultSolveTol) const;

  /// g = 1^T M^{-1} Lambda via M^T y = 1, g_i = alpha_i y_i.
  std::vector<double> contribution_index(double tol = kDefaultSolveTol) const;

 private:
  struct Impl;
  const GodmSystem* system_;
  std::unique_ptr<Impl> impl_;
};

/// alpha_i (z_i - s_i)^2 + (1 - alpha_i) sum_j |w_ij| (z_i - sgn(w_ij) z_j)^2
double node_cost(const GodmSystem& system, NodeId i, std::span<const double> z,
                 std::span<const double> s);

/// d node_cost / d z_i
double node_cost_derivative(const GodmSystem& system, NodeId i, std::span<const double> z,
                            std::span<const double> s);

EquilibriumResult equilibrium_direct(const GodmSystem& system, std::span<const double> s,
                                     double tol = kDefaultSolveTol);

/// Synchronous sweeps of the best-response update
///   z_i <- (alpha_i s_i + (1 - alpha_i) sum_j w_ij z_j) / (alpha_i + (1 - alpha_i) d_ii)
/// from z = s until ||z_new - z||_inf < tol. Throws ConvergenceError.
EquilibriumResult equilibrium_iterative(const GodmSystem& system, std::span<const double> s,
                                        double tol = 1e-12, std::size_t max_iter = 1000000);

/// p(z*) = sum_i z*_i
double overall_opinion(std::span<const double> z_star);

std::vector<double> contribution_index(const GodmSystem& system, double tol = kDefaultSolveTol);

}  // namespace godm
