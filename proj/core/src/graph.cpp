#include "godm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "godm/error.hpp"

namespace godm {

namespace {

bool weight_in_range(double w) { return std::isfinite(w) && w >= -1.0 && w <= 1.0; }

std::string describe(const EdgeRecord& r) {
  std::ostringstream os;
  os << "(" << r.src << ", " << r.dst << ", " << r.weight << ")";
  return os.str();
}

}  // namespace

SignedDigraph::SignedDigraph(std::vector<std::string> labels,
                             std::span<const IndexedEdge> edges)
    : labels_(std::move(labels)) {
  const std::size_t n = labels_.size();
  index_.reserve(n);
  for (NodeId i = 0; i < n; ++i) {
    if (!index_.emplace(labels_[i], i).second) {
      throw InvalidArgument("duplicate node label '" + labels_[i] + "'");
    }
  }

  std::vector<std::size_t> out_count(n, 0), in_count(n, 0);
  for (const auto& e : edges) {
    if (e.src >= n || e.dst >= n) throw InvalidArgument("edge endpoint out of range");
    if (e.src == e.dst) throw InvalidArgument("self-loop on node " + labels_[e.src]);
    if (!weight_in_range(e.weight) || e.weight == 0.0) {
      std::ostringstream os;
      os << "edge weight " << e.weight << " on (" << labels_[e.src] << ", " << labels_[e.dst]
         << ") must be nonzero and in [-1, 1]";
      throw InvalidArgument(os.str());
    }
    ++out_count[e.src];
    ++in_count[e.dst];
  }

  succ_offsets_.assign(n + 1, 0);
  pred_offsets_.assign(n + 1, 0);
  for (NodeId i = 0; i < n; ++i) {
    succ_offsets_[i + 1] = succ_offsets_[i] + out_count[i];
    pred_offsets_[i + 1] = pred_offsets_[i] + in_count[i];
  }
  insertion_order_.assign(edges.begin(), edges.end());
  succ_arcs_.resize(edges.size());
  pred_arcs_.resize(edges.size());
  std::vector<std::size_t> succ_fill(succ_offsets_.begin(), succ_offsets_.end() - 1);
  std::vector<std::size_t> pred_fill(pred_offsets_.begin(), pred_offsets_.end() - 1);
  for (const auto& e : edges) {
    succ_arcs_[succ_fill[e.src]++] = Arc{e.dst, e.weight};
    pred_arcs_[pred_fill[e.dst]++] = Arc{e.src, e.weight};
  }

  // Duplicate check: sort each successor row by head and look for repeats.
  // Sorting also makes the layout independent of input order within a row.
  auto by_node = [](const Arc& a, const Arc& b) { return a.node < b.node; };
  for (NodeId i = 0; i < n; ++i) {
    auto first = succ_arcs_.begin() + static_cast<std::ptrdiff_t>(succ_offsets_[i]);
    auto last = succ_arcs_.begin() + static_cast<std::ptrdiff_t>(succ_offsets_[i + 1]);
    std::sort(first, last, by_node);
    auto dup = std::adjacent_find(first, last,
                                  [](const Arc& a, const Arc& b) { return a.node == b.node; });
    if (dup != last) {
      throw InvalidArgument("duplicate edge (" + labels_[i] + ", " + labels_[dup->node] +
                            "); dedupe the edge list first");
    }
    auto pfirst = pred_arcs_.begin() + static_cast<std::ptrdiff_t>(pred_offsets_[i]);
    auto plast = pred_arcs_.begin() + static_cast<std::ptrdiff_t>(pred_offsets_[i + 1]);
    std::sort(pfirst, plast, by_node);
  }
}

void SignedDigraph::check_node(NodeId i) const {
  if (i >= node_count()) {
    throw InvalidArgument("node index " + std::to_string(i) + " out of range (n = " +
                          std::to_string(node_count()) + ")");
  }
}

std::span<const Arc> SignedDigraph::successors(NodeId i) const {
  check_node(i);
  return {succ_arcs_.data() + succ_offsets_[i], succ_offsets_[i + 1] - succ_offsets_[i]};
}

std::span<const Arc> SignedDigraph::predecessors(NodeId i) const {
  check_node(i);
  return {pred_arcs_.data() + pred_offsets_[i], pred_offsets_[i + 1] - pred_offsets_[i]};
}

const std::string& SignedDigraph::label(NodeId i) const {
  check_node(i);
  return labels_[i];
}

std::optional<NodeId> SignedDigraph::find(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double SignedDigraph::out_strength(NodeId i) const {
  double d = 0.0;
  for (const auto& a : successors(i)) d += std::abs(a.weight);
  return d;
}

double SignedDigraph::in_trust_sum(NodeId i, TrustSum variant) const {
  double sum = 0.0;
  for (const auto& a : predecessors(i)) {
    sum += variant == TrustSum::Absolute ? std::abs(a.weight) : a.weight;
  }
  return sum;
}

LaplacianView SignedDigraph::laplacian() const { return LaplacianView(*this); }

bool SignedDigraph::same_as(const SignedDigraph& other) const {
  if (node_count() != other.node_count() || edge_count() != other.edge_count()) return false;
  std::vector<NodeId> to_other(node_count());
  for (NodeId i = 0; i < node_count(); ++i) {
    const auto j = other.find(labels_[i]);
    if (!j) return false;
    to_other[i] = *j;
  }
  std::vector<Arc> mine;
  for (NodeId i = 0; i < node_count(); ++i) {
    const auto theirs = other.successors(to_other[i]);
    mine.clear();
    for (const auto& a : successors(i)) mine.push_back(Arc{to_other[a.node], a.weight});
    std::sort(mine.begin(), mine.end(), [](const Arc& x, const Arc& y) { return x.node < y.node; });
    if (!std::equal(mine.begin(), mine.end(), theirs.begin(), theirs.end())) return false;
  }
  return true;
}

std::vector<EdgeRecord> SignedDigraph::edge_records() const {
  std::vector<EdgeRecord> out;
  out.reserve(edge_count());
  for (const auto& e : insertion_order_) {
    out.push_back(EdgeRecord{labels_[e.src], labels_[e.dst], e.weight, std::nullopt});
  }
  return out;
}

LaplacianView::LaplacianView(const SignedDigraph& graph)
    : graph_(&graph), degree_(graph.node_count(), 0.0) {
  for (NodeId i = 0; i < graph.node_count(); ++i) degree_[i] = graph.out_strength(i);
}

std::vector<double> LaplacianView::apply(std::span<const double> x) const {
  if (x.size() != degree_.size()) throw InvalidArgument("vector length does not match graph");
  std::vector<double> y(x.size());
  for (NodeId i = 0; i < x.size(); ++i) {
    double acc = degree_[i] * x[i];
    for (const auto& a : graph_->successors(i)) acc -= a.weight * x[a.node];
    y[i] = acc;
  }
  return y;
}

BuildResult build_graph(std::span<const EdgeRecord> records) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> index;
  auto intern = [&](const std::string& label) {
    auto [it, inserted] = index.emplace(label, labels.size());
    if (inserted) labels.push_back(label);
    return it->second;
  };

  BuildResult result;
  std::vector<IndexedEdge> edges;
  edges.reserve(records.size());
  for (const auto& r : records) {
    if (r.src.empty() || r.dst.empty()) {
      throw InvalidArgument("empty node label in record " + describe(r));
    }
    if (!weight_in_range(r.weight)) {
      throw InvalidArgument("weight out of [-1, 1] in record " + describe(r));
    }
    if (r.weight == 0.0) {
      throw InvalidArgument("zero weight in record " + describe(r) +
                            "; zero means no edge and should be dropped at normalization");
    }
    const NodeId s = intern(r.src);
    const NodeId d = intern(r.dst);
    if (s == d) {
      ++result.dropped_self_loops;
      continue;
    }
    edges.push_back(IndexedEdge{s, d, r.weight});
  }
  result.graph = SignedDigraph(std::move(labels), edges);
  return result;
}

GraphDiagnostics validate(const SignedDigraph& graph) {
  GraphDiagnostics d;
  d.nodes = graph.node_count();
  d.edges = graph.edge_count();
  for (NodeId i = 0; i < graph.node_count(); ++i) {
    const auto succ = graph.successors(i);
    const bool no_out = succ.empty();
    const bool no_in = graph.predecessors(i).empty();
    if (no_out) ++d.sinks;
    if (no_in) ++d.sources;
    if (no_out && no_in) ++d.isolated;
    for (const auto& a : succ) {
      if (a.weight < 0.0) ++d.negative_edges;
      d.min_weight = d.min_weight ? std::min(*d.min_weight, a.weight) : a.weight;
      d.max_weight = d.max_weight ? std::max(*d.max_weight, a.weight) : a.weight;
    }
  }
  return d;
}

}  // namespace godm
