#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace godm {

using NodeId = std::size_t;

/// One raw edge as read from a dataset. `weight` is pre-normalization.
struct EdgeRecord {
  std::string src;
  std::string dst;
  double weight = 0.0;
  std::optional<std::int64_t> timestamp;

  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

/// Adjacency entry. In a successor list `node` is the head j of i->j; in a
/// predecessor list it is the tail.
struct Arc {
  NodeId node = 0;
  double weight = 0.0;

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Dense-index edge used when constructing a graph without string labels.
struct IndexedEdge {
  NodeId src = 0;
  NodeId dst = 0;
  double weight = 0.0;
};

enum class TrustSum { Signed, Absolute };

/// Degree matrix D (absolute out-strengths) and row access to L = D - A.
class LaplacianView;

/// Signed weighted directed trust network in CSR form, with a mirrored
/// predecessor index. Immutable after construction.
///
/// Invariants: no self-loops, at most one arc per ordered pair, every weight
/// is nonzero and lies in [-1, 1], and the successor and predecessor indices
/// describe the same arc set.
class SignedDigraph {
 public:
  SignedDigraph() = default;

  /// Builds from dense indices. Throws InvalidArgument on out-of-range
  /// weights, self-loops, duplicate pairs, or node indices >= labels.size().
  SignedDigraph(std::vector<std::string> labels, std::span<const IndexedEdge> edges);

  std::size_t node_count() const noexcept { return labels_.size(); }
  std::size_t edge_count() const noexcept { return succ_arcs_.size(); }

  std::span<const Arc> successors(NodeId i) const;
  std::span<const Arc> predecessors(NodeId i) const;

  const std::string& label(NodeId i) const;
  std::span<const std::string> labels() const noexcept { return labels_; }
  std::optional<NodeId> find(const std::string& label) const;

  /// d_ii = sum of |w_ij| over successors j. Zero for sinks.
  double out_strength(NodeId i) const;

  /// Sum of incoming weights w_ji, signed or absolute.
  double in_trust_sum(NodeId i, TrustSum variant) const;

  LaplacianView laplacian() const;

  /// Edge list in construction order. Feeding it back through build_graph
  /// reproduces this graph whenever every node has at least one edge
  /// (isolated nodes have no edge-list representation).
  std::vector<EdgeRecord> edge_records() const;

  /// Same labeled nodes and the same labeled weighted arcs. Dense indices may
  /// differ, since they follow label first-appearance order.
  friend bool operator==(const SignedDigraph& a, const SignedDigraph& b) { return a.same_as(b); }

 private:
  void check_node(NodeId i) const;
  bool same_as(const SignedDigraph& other) const;

  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::size_t> succ_offsets_{0};
  std::vector<Arc> succ_arcs_;
  std::vector<std::size_t> pred_offsets_{0};
  std::vector<Arc> pred_arcs_;
  std::vector<IndexedEdge> insertion_order_;
};

class LaplacianView {
 public:
  explicit LaplacianView(const SignedDigraph& graph);

  std::span<const double> out_strength() const noexcept { return degree_; }
  double diagonal(NodeId i) const { return degree_.at(i); }
  /// Off-diagonal entries of row i are -w_ij for each successor j.
  std::span<const Arc> adjacency_row(NodeId i) const { return graph_->successors(i); }

  /// Computes L x.
  std::vector<double> apply(std::span<const double> x) const;

 private:
  const SignedDigraph* graph_;
  std::vector<double> degree_;
};

struct BuildResult {
  SignedDigraph graph;
  std::size_t dropped_self_loops = 0;
};

/// Maps labels to indices in first-appearance order. Self-loops are dropped
/// and counted (their endpoint still becomes a node). Throws InvalidArgument
/// for an out-of-range weight, an empty label, or a duplicate ordered pair.
BuildResult build_graph(std::span<const EdgeRecord> records);

struct GraphDiagnostics {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t negative_edges = 0;
  std::optional<double> min_weight;
  std::optional<double> max_weight;
  std::size_t sinks = 0;     // no successors
  std::size_t sources = 0;   // no predecessors
  std::size_t isolated = 0;  // neither
};

GraphDiagnostics validate(const SignedDigraph& graph);

}  // namespace godm
