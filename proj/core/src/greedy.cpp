#include "godm/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "godm/error.hpp"

namespace godm {

std::string to_string(Method method) {
  switch (method) {
    case Method::Greedy: return "greedy";
    case Method::Admm: return "admm";
    case Method::Rand: return "rand";
    case Method::Trust: return "trust";
    case Method::IO: return "io";
  }
  return "unknown";
}

std::string to_string(Objective objective) {
  return objective == Objective::Maximize ? "max" : "min";
}

Method parse_method(const std::string& text) {
  for (Method m : {Method::Greedy, Method::Admm, Method::Rand, Method::Trust, Method::IO}) {
    if (text == to_string(m)) return m;
  }
  throw InvalidArgument("unknown method '" + text + "' (expected greedy|admm|rand|trust|io)");
}

Objective parse_objective(const std::string& text) {
  if (text == "max" || text == "maximize") return Objective::Maximize;
  if (text == "min" || text == "minimize") return Objective::Minimize;
  throw InvalidArgument("unknown objective '" + text + "' (expected max|min)");
}

void require_feasible_opinions(std::span<const double> s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] >= -1.0 && s[i] <= 1.0)) {
      throw InvalidArgument("internal opinion of node " + std::to_string(i) +
                            " is outside [-1, 1]");
    }
  }
}

namespace {

void check_budget(double budget) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw InvalidArgument("budget must be a finite nonnegative number");
  }
}

// Pushes node i toward `target_sign` (+1 or -1) using at most `remaining`.
// Returns the amount spent.
double push(AllocationPlan& plan, NodeId i, double s_i, double target_sign, double remaining) {
  const double cost = 1.0 - target_sign * s_i;
  if (cost <= 0.0) return 0.0;  // saturated
  const double amount = std::min(cost, remaining);
  plan.delta_s[i] = target_sign * amount;
  plan.touched.emplace_back(i, plan.delta_s[i]);
  return amount;
}

}  // namespace

AllocationPlan greedy_allocate(std::span<const double> g, std::span<const double> s,
                               double budget, Objective objective) {
  if (g.size() != s.size()) throw InvalidArgument("g and s have different lengths");
  check_budget(budget);
  require_feasible_opinions(s);

  const double orient = objective == Objective::Maximize ? 1.0 : -1.0;
  AllocationPlan plan;
  plan.method = Method::Greedy;
  plan.budget = budget;
  plan.delta_s.assign(s.size(), 0.0);

  std::vector<NodeId> order(g.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return std::abs(g[a]) > std::abs(g[b]); });

  double remaining = budget;
  for (NodeId i : order) {
    if (remaining <= 0.0) break;
    const double gi = orient * g[i];
    if (gi == 0.0) break;  // sorted: everything after is zero too
    const double spent = push(plan, i, s[i], gi > 0.0 ? 1.0 : -1.0, remaining);
    remaining -= spent;
    plan.spent += spent;
  }
  return plan;
}

double benefit(std::span<const double> g, const AllocationPlan& plan) {
  if (g.size() != plan.delta_s.size()) throw InvalidArgument("g and plan have different lengths");
  double b = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) b += g[i] * plan.delta_s[i];
  return b;
}

std::vector<NodeId> rank_nodes(const SignedDigraph& graph, std::span<const double> s,
                               const RankMethod& method) {
  const std::size_t n = graph.node_count();
  if (s.size() != n) throw InvalidArgument("opinion vector length does not match graph");
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});

  if (const auto* rnd = std::get_if<RandomOrder>(&method)) {
    std::mt19937_64 rng(rnd->seed);
    std::shuffle(order.begin(), order.end(), rng);
  } else if (std::holds_alternative<TrustOrder>(method)) {
    std::vector<double> key(n);
    for (NodeId i = 0; i < n; ++i) key[i] = graph.in_trust_sum(i, TrustSum::Signed);
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return key[a] > key[b]; });
  } else {
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return s[a] < s[b]; });
  }
  return order;
}

AllocationPlan baseline_allocate(std::span<const NodeId> ordering, std::span<const double> s,
                                 double budget, Method tag) {
  check_budget(budget);
  require_feasible_opinions(s);
  AllocationPlan plan;
  plan.method = tag;
  plan.budget = budget;
  plan.delta_s.assign(s.size(), 0.0);
  double remaining = budget;
  for (NodeId i : ordering) {
    if (remaining <= 0.0) break;
    if (i >= s.size()) throw InvalidArgument("ordering refers to a node outside the graph");
    const double spent = push(plan, i, s[i], 1.0, remaining);
    remaining -= spent;
    plan.spent += spent;
  }
  return plan;
}

}  // namespace godm
