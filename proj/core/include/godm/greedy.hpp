#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "godm/graph.hpp"

namespace godm {

enum class Method { Greedy, Admm, Rand, Trust, IO };
enum class Objective { Maximize, Minimize };

std::string to_string(Method method);
std::string to_string(Objective objective);
Method parse_method(const std::string& text);
Objective parse_objective(const std::string& text);

/// A modification of internal opinions. `touched` lists the nonzero entries
/// of delta_s in the order they were allocated.
struct AllocationPlan {
  Method method = Method::Greedy;
  double budget = 0.0;
  std::vector<double> delta_s;
  double spent = 0.0;  // ||delta_s||_1
  std::vector<std::pair<NodeId, double>> touched;

  double leftover() const noexcept { return budget > spent ? budget - spent : 0.0; }
};

/// Throws InvalidArgument if any s_i lies outside [-1, 1] or is not finite.
void require_feasible_opinions(std::span<const double> s);

/// Optimal budgeted allocation: walks nodes in decreasing |g_i| (lower index
/// first on ties), pushing each opinion toward sign(g_i) at cost
/// 1 - sign(g_i) s_i, with a partial push when the budget runs short. Nodes
/// with g_i = 0 or already saturated are skipped. Minimize runs the same walk
/// on -g.
AllocationPlan greedy_allocate(std::span<const double> g, std::span<const double> s,
                               double budget, Objective objective = Objective::Maximize);

/// g^T delta_s
double benefit(std::span<const double> g, const AllocationPlan& plan);

struct RandomOrder {
  std::uint64_t seed = 0;
};
struct TrustOrder {};
struct OpinionOrder {};
using RankMethod = std::variant<RandomOrder, TrustOrder, OpinionOrder>;

/// Baseline node orderings:
///  - RandomOrder: seeded shuffle.
///  - TrustOrder: descending signed in-trust sum (ties by index).
///  - OpinionOrder: ascending internal opinion (ties by index).
std::vector<NodeId> rank_nodes(const SignedDigraph& graph, std::span<const double> s,
                               const RankMethod& method);

/// Walks `ordering`, pushing each node toward +1 until the budget is gone.
AllocationPlan baseline_allocate(std::span<const NodeId> ordering, std::span<const double> s,
                                 double budget, Method tag);

}  // namespace godm
