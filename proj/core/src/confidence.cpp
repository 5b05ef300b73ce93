#include "godm/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "godm/error.hpp"

namespace godm {

namespace {

void check_clamp(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("alpha clamp must lie in (0, 1/2)");
}

std::string format_value(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

std::vector<double> pagerank_distribution(const SignedDigraph& graph,
                                          const PageRankOptions& options) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw InvalidArgument("pagerank of an empty graph");
  if (!(options.damping > 0.0 && options.damping < 1.0)) {
    throw InvalidArgument("pagerank damping must lie in (0, 1)");
  }
  if (!(options.tol > 0.0)) throw InvalidArgument("pagerank tolerance must be positive");

  const double nd = static_cast<double>(n);
  const double d = options.damping;
  std::vector<double> rank(n, 1.0 / nd), next(n);
  double change = 0.0;
  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    double dangling = 0.0;
    for (NodeId u = 0; u < n; ++u) {
      if (graph.successors(u).empty()) dangling += rank[u];
    }
    const double base = (1.0 - d) / nd + d * dangling / nd;
    for (NodeId v = 0; v < n; ++v) {
      double acc = 0.0;
      for (const auto& a : graph.predecessors(v)) {
        acc += rank[a.node] / static_cast<double>(graph.successors(a.node).size());
      }
      next[v] = base + d * acc;
    }
    change = 0.0;
    for (NodeId v = 0; v < n; ++v) change += std::abs(next[v] - rank[v]);
    rank.swap(next);
    if (change < options.tol) return rank;
  }
  throw ConvergenceError("pagerank did not converge", change, options.max_iter);
}

std::vector<double> pagerank(const SignedDigraph& graph, const PageRankOptions& options) {
  auto r = pagerank_distribution(graph, options);
  const double max = *std::max_element(r.begin(), r.end());
  for (auto& v : r) v /= max;
  return r;
}

std::vector<double> mean_evaluation(const SignedDigraph& graph) {
  std::vector<double> m(graph.node_count(), 0.0);
  for (NodeId i = 0; i < graph.node_count(); ++i) {
    const auto preds = graph.predecessors(i);
    if (preds.empty()) continue;
    double sum = 0.0;
    for (const auto& a : preds) sum += a.weight;
    m[i] = sum / static_cast<double>(preds.size());
  }
  return m;
}

std::string describe(const AlphaMode& mode) {
  if (const auto* f = std::get_if<FixedAlpha>(&mode)) return "fixed:" + format_value(f->value);
  return "adjusted:" + format_value(std::get<AdjustedAlpha>(mode).q);
}

AlphaMode parse_alpha_mode(const std::string& text, const PageRankOptions& pagerank) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw InvalidArgument("alpha mode must be fixed:<v> or adjusted:<q>, got '" + text + "'");
  }
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  double value = 0.0;
  // Accept plain decimals and simple fractions such as 2/3.
  const auto slash = arg.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      value = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
    } else {
      std::size_t used_den = 0;
      const std::string num_text = arg.substr(0, slash);
      const std::string den_text = arg.substr(slash + 1);
      const double num = std::stod(num_text, &used);
      const double den = std::stod(den_text, &used_den);
      if (used != num_text.size() || used_den != den_text.size() || den == 0.0) {
        throw std::invalid_argument(arg);
      }
      value = num / den;
    }
  } catch (const std::logic_error&) {
    throw InvalidArgument("cannot parse alpha parameter '" + arg + "'");
  }
  if (kind == "fixed") return FixedAlpha{value};
  if (kind == "adjusted") return AdjustedAlpha{value, pagerank};
  throw InvalidArgument("unknown alpha mode '" + kind + "'");
}

double adjusted_confidence(double m, double r, double q, double eps) {
  return std::clamp(std::max(0.0, q * m + (1.0 - q) * r), eps, 1.0 - eps);
}

ConfidenceVector confidence_adjusted(const SignedDigraph& graph, double q,
                                     const PageRankOptions& pagerank_options, double eps) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in [0, 1]");
  check_clamp(eps);

  ConfidenceVector cv;
  cv.mode = AdjustedAlpha{q, pagerank_options};
  cv.clamp = eps;
  auto m = mean_evaluation(graph);
  auto r = pagerank(graph, pagerank_options);
  cv.alpha.resize(graph.node_count());
  for (NodeId i = 0; i < graph.node_count(); ++i) {
    cv.alpha[i] = adjusted_confidence(m[i], r[i], q, eps);
  }
  cv.mean_evaluation = std::move(m);
  cv.pagerank = std::move(r);
  return cv;
}

ConfidenceVector confidence_fixed(std::size_t n, double alpha0, double eps) {
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw InvalidArgument("fixed alpha must lie in (0, 1)");
  check_clamp(eps);
  ConfidenceVector cv;
  cv.mode = FixedAlpha{alpha0};
  cv.clamp = eps;
  cv.alpha.assign(n, std::clamp(alpha0, eps, 1.0 - eps));
  return cv;
}

ConfidenceVector compute_confidence(const SignedDigraph& graph, const AlphaMode& mode,
                                    double eps) {
  if (const auto* f = std::get_if<FixedAlpha>(&mode)) {
    return confidence_fixed(graph.node_count(), f->value, eps);
  }
  const auto& adj = std::get<AdjustedAlpha>(mode);
  return confidence_adjusted(graph, adj.q, adj.pagerank, eps);
}

}  // namespace godm
