#include "godm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <mutex>
#include <optional>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "godm/error.hpp"

namespace godm {

namespace {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Relative 2-norm target handed to BiCGSTAB. Refinement rounds then drive the
// max-norm residual under the caller's tolerance.
constexpr double kKrylovTol = 1e-14;
constexpr int kRefineRounds = 6;

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_length(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw InvalidArgument(std::string(what) + " has length " + std::to_string(v.size()) +
                          ", expected " + std::to_string(n));
  }
}

SparseRowMatrix assemble(const GodmSystem& system, bool transpose) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(system.nonzeros());
  for (NodeId i = 0; i < system.size(); ++i) {
    const int row = static_cast<int>(i);
    triplets.emplace_back(row, row, system.diagonal(i));
    const double scale = system.off_diagonal_scale(i);
    for (const auto& a : system.successors(i)) {
      const int col = static_cast<int>(a.node);
      if (transpose) {
        triplets.emplace_back(col, row, scale * a.weight);
      } else {
        triplets.emplace_back(row, col, scale * a.weight);
      }
    }
  }
  const int n = static_cast<int>(system.size());
  SparseRowMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

std::vector<double> transpose_apply(const GodmSystem& system, std::span<const double> y) {
  std::vector<double> out(system.size(), 0.0);
  for (NodeId i = 0; i < system.size(); ++i) {
    out[i] += system.diagonal(i) * y[i];
    const double scale = system.off_diagonal_scale(i) * y[i];
    for (const auto& a : system.successors(i)) out[a.node] += scale * a.weight;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// GodmSystem

GodmSystem::GodmSystem(const SignedDigraph& graph, const ConfidenceVector& confidence)
    : GodmSystem(graph, confidence.alpha) {}

GodmSystem::GodmSystem(const SignedDigraph& graph, std::vector<double> alpha)
    : alpha_(std::move(alpha)), degree_(graph.node_count(), 0.0) {
  const std::size_t n = graph.node_count();
  if (alpha_.size() != n) throw InvalidArgument("confidence vector length does not match graph");
  offsets_.assign(n + 1, 0);
  arcs_.reserve(graph.edge_count());
  for (NodeId i = 0; i < n; ++i) {
    for (const auto& a : graph.successors(i)) {
      arcs_.push_back(a);
      degree_[i] += std::abs(a.weight);
    }
    offsets_[i + 1] = arcs_.size();
  }
  check_dominance();
}

void GodmSystem::check_dominance() const {
  for (NodeId i = 0; i < size(); ++i) {
    const double a = alpha_[i];
    if (!(a > 0.0 && a < 1.0)) {
      std::ostringstream os;
      os << "confidence index of node " << i << " is " << a << "; must lie strictly in (0, 1)";
      throw InvalidArgument(os.str());
    }
    // |M_ii| - sum_j |M_ij| = alpha_i > 0 analytically; verify numerically.
    const double off = (1.0 - a) * degree_[i];
    if (!(std::abs(diagonal(i)) > off)) {
      throw InvalidArgument("system row " + std::to_string(i) +
                            " is not strictly diagonally dominant");
    }
  }
}

std::vector<double> GodmSystem::apply(std::span<const double> x) const {
  check_length(x, size(), "vector");
  std::vector<double> y(size());
  for (NodeId i = 0; i < size(); ++i) {
    double acc = 0.0;
    for (const auto& a : successors(i)) acc += a.weight * x[a.node];
    y[i] = diagonal(i) * x[i] + off_diagonal_scale(i) * acc;
  }
  return y;
}

std::vector<double> GodmSystem::scaled_opinions(std::span<const double> s) const {
  check_length(s, size(), "internal opinion vector");
  std::vector<double> b(size());
  for (NodeId i = 0; i < size(); ++i) b[i] = alpha_[i] * s[i];
  return b;
}

double GodmSystem::residual(std::span<const double> z, std::span<const double> s) const {
  const auto mz = apply(z);
  const auto b = scaled_opinions(s);
  double r = 0.0;
  for (NodeId i = 0; i < size(); ++i) r = std::max(r, std::abs(mz[i] - b[i]));
  return r;
}

// ---------------------------------------------------------------------------
// EquilibriumSolver

namespace {

// Jacobi-preconditioned BiCGSTAB on one matrix. Unlike the stationary sweep,
// it does not slow down when many confidences sit at the clamp.
class KrylovSolver {
 public:
  void compute(SparseRowMatrix a) {
    a_ = std::move(a);
    solver_.setTolerance(kKrylovTol);
    solver_.setMaxIterations(std::max<Eigen::Index>(1000, 4 * a_.rows()));
    solver_.compute(a_);
  }

  // x with ||b - A x||_inf <= target when reachable; the caller checks.
  Eigen::VectorXd solve(const Eigen::VectorXd& b, double target) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd r = b;
    for (int round = 0; round < kRefineRounds && r.lpNorm<Eigen::Infinity>() > target; ++round) {
      const Eigen::VectorXd dx = solver_.solve(r);
      if (!dx.allFinite()) break;
      x += dx;
      r = b - a_ * x;
    }
    return x;
  }

 private:
  SparseRowMatrix a_;
  Eigen::BiCGSTAB<SparseRowMatrix, Eigen::DiagonalPreconditioner<double>> solver_;
};

}  // namespace

struct EquilibriumSolver::Impl {
  KrylovSolver forward;
  // Built on first use; once_flag keeps concurrent const callers safe.
  std::once_flag transpose_once;
  KrylovSolver transpose;
};

EquilibriumSolver::EquilibriumSolver(const GodmSystem& system)
    : system_(&system), impl_(std::make_unique<Impl>()) {
  if (system.size() == 0) return;
  impl_->forward.compute(assemble(system, false));
}

EquilibriumSolver::~EquilibriumSolver() = default;
EquilibriumSolver::EquilibriumSolver(EquilibriumSolver&&) noexcept = default;
EquilibriumSolver& EquilibriumSolver::operator=(EquilibriumSolver&&) noexcept = default;

EquilibriumResult EquilibriumSolver::solve(std::span<const double> s, double tol) const {
  const GodmSystem& sys = *system_;
  const auto b = sys.scaled_opinions(s);
  EquilibriumResult result;
  if (sys.size() == 0) return result;

  const double target = tol * std::max(1.0, inf_norm(b));
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  const Eigen::VectorXd z = impl_->forward.solve(rhs, target);
  result.z_star.assign(z.data(), z.data() + z.size());
  result.residual = sys.residual(result.z_star, s);
  if (!std::isfinite(result.residual) || result.residual > target) {
    std::ostringstream os;
    os << "equilibrium solve left residual " << result.residual << " above " << target;
    throw InternalError(os.str());
  }
  return result;
}

std::vector<double> EquilibriumSolver::contribution_index(double tol) const {
  const GodmSystem& sys = *system_;
  const std::size_t n = sys.size();
  if (n == 0) return {};
  std::call_once(impl_->transpose_once, [&] { impl_->transpose.compute(assemble(sys, true)); });
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  const Eigen::VectorXd y = impl_->transpose.solve(ones, tol);
  std::vector<double> yv(y.data(), y.data() + y.size());

  const auto mty = transpose_apply(sys, yv);
  double residual = 0.0;
  for (double v : mty) residual = std::max(residual, std::abs(v - 1.0));
  if (!std::isfinite(residual) || residual > tol) {
    std::ostringstream os;
    os << "transpose solve for the contribution index left residual " << residual;
    throw InternalError(os.str());
  }

  std::vector<double> g(n);
  for (NodeId i = 0; i < n; ++i) g[i] = sys.alpha()[i] * yv[i];
  return g;
}

// ---------------------------------------------------------------------------
// Free functions

double node_cost(const GodmSystem& system, NodeId i, std::span<const double> z,
                 std::span<const double> s) {
  check_length(z, system.size(), "expressed opinion vector");
  check_length(s, system.size(), "internal opinion vector");
  if (i >= system.size()) throw InvalidArgument("node index out of range");
  const double a = system.alpha()[i];
  const double self = z[i] - s[i];
  double social = 0.0;
  for (const auto& arc : system.successors(i)) {
    const double sgn = arc.weight < 0.0 ? -1.0 : 1.0;
    const double diff = z[i] - sgn * z[arc.node];
    social += std::abs(arc.weight) * diff * diff;
  }
  return a * self * self + (1.0 - a) * social;
}

double node_cost_derivative(const GodmSystem& system, NodeId i, std::span<const double> z,
                            std::span<const double> s) {
  check_length(z, system.size(), "expressed opinion vector");
  check_length(s, system.size(), "internal opinion vector");
  if (i >= system.size()) throw InvalidArgument("node index out of range");
  const double a = system.alpha()[i];
  double social = 0.0;
  for (const auto& arc : system.successors(i)) {
    const double sgn = arc.weight < 0.0 ? -1.0 : 1.0;
    social += std::abs(arc.weight) * (z[i] - sgn * z[arc.node]);
  }
  return 2.0 * a * (z[i] - s[i]) + 2.0 * (1.0 - a) * social;
}

EquilibriumResult equilibrium_direct(const GodmSystem& system, std::span<const double> s,
                                     double tol) {
  return EquilibriumSolver(system).solve(s, tol);
}

EquilibriumResult equilibrium_iterative(const GodmSystem& system, std::span<const double> s,
                                        double tol, std::size_t max_iter) {
  check_length(s, system.size(), "internal opinion vector");
  if (!(tol > 0.0)) throw InvalidArgument("iterative tolerance must be positive");
  const std::size_t n = system.size();
  const auto alpha = system.alpha();

  std::vector<double> z(s.begin(), s.end()), next(n);
  EquilibriumResult result;
  double change = 0.0;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    change = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      double acc = 0.0;
      for (const auto& a : system.successors(i)) acc += a.weight * z[a.node];
      next[i] = (alpha[i] * s[i] + (1.0 - alpha[i]) * acc) / system.diagonal(i);
      change = std::max(change, std::abs(next[i] - z[i]));
    }
    z.swap(next);
    if (!std::isfinite(change)) throw InternalError("non-finite iterate in best-response sweep");
    if (change < tol) {
      result.iterations = k;
      result.residual = system.residual(z, s);
      result.z_star = std::move(z);
      return result;
    }
  }
  throw ConvergenceError("best-response iteration did not converge", change, max_iter);
}

double overall_opinion(std::span<const double> z_star) {
  return std::accumulate(z_star.begin(), z_star.end(), 0.0);
}

std::vector<double> contribution_index(const GodmSystem& system, double tol) {
  return EquilibriumSolver(system).contribution_index(tol);
}

}  // namespace godm
