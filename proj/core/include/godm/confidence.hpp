#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "godm/graph.hpp"

namespace godm {

inline constexpr double kDefaultAlphaClamp = 1e-6;

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-12;  // L1 change between sweeps
  std::size_t max_iter = 10000;
};

/// Stationary PageRank distribution (sums to 1). Edge weights and signs are
/// ignored; teleport mass is (1 - d) / N and dangling nodes spread their rank
/// uniformly. Throws ConvergenceError with the last L1 change.
std::vector<double> pagerank_distribution(const SignedDigraph& graph,
                                          const PageRankOptions& options = {});

/// pagerank_distribution divided by its maximum entry, so max r = 1.
std::vector<double> pagerank(const SignedDigraph& graph, const PageRankOptions& options = {});

/// Mean incoming edge weight per node; 0 for nodes without predecessors.
std::vector<double> mean_evaluation(const SignedDigraph& graph);

struct FixedAlpha {
  double value = 0.5;
};

struct AdjustedAlpha {
  double q = 0.5;
  PageRankOptions pagerank;
};

using AlphaMode = std::variant<FixedAlpha, AdjustedAlpha>;

/// "fixed:<v>" or "adjusted:<q>", the same spelling the CLI accepts.
std::string describe(const AlphaMode& mode);
AlphaMode parse_alpha_mode(const std::string& text, const PageRankOptions& pagerank = {});

/// Per-node confidence index. Every entry lies in [clamp, 1 - clamp].
struct ConfidenceVector {
  std::vector<double> alpha;
  AlphaMode mode;
  double clamp = kDefaultAlphaClamp;
  /// Kept for reporting when the mode is adjusted.
  std::optional<std::vector<double>> mean_evaluation;
  std::optional<std::vector<double>> pagerank;

  std::size_t size() const noexcept { return alpha.size(); }
};

/// clamp(max(0, q m + (1 - q) r), eps, 1 - eps)
double adjusted_confidence(double m, double r, double q, double eps = kDefaultAlphaClamp);

/// alpha_i = adjusted_confidence(m_i, r_i, q, eps) with m from
/// mean_evaluation and r from pagerank.
ConfidenceVector confidence_adjusted(const SignedDigraph& graph, double q,
                                     const PageRankOptions& pagerank = {},
                                     double eps = kDefaultAlphaClamp);

/// Constant alpha0 in (0, 1), clamped into [eps, 1 - eps].
ConfidenceVector confidence_fixed(std::size_t n, double alpha0, double eps = kDefaultAlphaClamp);

ConfidenceVector compute_confidence(const SignedDigraph& graph, const AlphaMode& mode,
                                    double eps = kDefaultAlphaClamp);

}  // namespace godm
