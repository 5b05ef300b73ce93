#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "godm/error.hpp"
#include "godm/graph.hpp"

namespace godm {

/// Column layout of a delimited edge list. The timestamp column is optional
/// per line: a line that stops after the weight column simply has none.
struct EdgeListFormat {
  char delimiter = ',';
  std::size_t src_column = 0;
  std::size_t dst_column = 1;
  std::size_t weight_column = 2;
  std::optional<std::size_t> timestamp_column = 3;
  bool has_header = false;
  std::string comment_prefix = "#";
};

struct ParseReport {
  std::vector<EdgeRecord> records;
  std::vector<MalformedLine> malformed;
};

/// Reads one EdgeRecord per data line. Blank, comment and header lines are
/// skipped; bad lines are collected with their 1-based line numbers.
/// Throws ParseError (carrying the report) when the stream is unreadable or
/// when there were data lines and none of them parsed.
ParseReport parse_edge_list(std::istream& in, const EdgeListFormat& format = {});

/// Writes records as `src,dst,weight[,timestamp]` using the format's
/// delimiter, with full round-trip precision.
void write_edge_list(std::ostream& out, std::span<const EdgeRecord> records,
                     const EdgeListFormat& format = {});

struct NormalizeScheme {
  enum class Kind { DivideByMaxAbs, DivideByConstant, Identity };
  Kind kind = Kind::DivideByMaxAbs;
  double constant = 1.0;

  static NormalizeScheme max_abs() { return {Kind::DivideByMaxAbs, 1.0}; }
  static NormalizeScheme divide_by(double c) { return {Kind::DivideByConstant, c}; }
  static NormalizeScheme identity() { return {Kind::Identity, 1.0}; }
};

struct NormalizeResult {
  std::vector<EdgeRecord> records;
  std::size_t dropped_zero = 0;
};

/// Scales weights into [-1, 1] and drops zero-weight records. Throws
/// InvalidArgument when a scaled weight still falls outside [-1, 1], when
/// c <= 0, or when every weight is zero under DivideByMaxAbs.
NormalizeResult normalize_weights(std::span<const EdgeRecord> records, NormalizeScheme scheme);

enum class DedupePolicy { KeepLast, KeepFirst, MeanWeight };

/// One record per ordered (src, dst) pair, in first-appearance order of the
/// pair. KeepLast prefers the highest timestamp and falls back to input order;
/// KeepFirst prefers the lowest; MeanWeight averages raw weights and keeps
/// the latest timestamp.
std::vector<EdgeRecord> dedupe_edges(std::span<const EdgeRecord> records, DedupePolicy policy);

enum class InitKind { Uniform, Normal, DegreeProportional };

struct InitScheme {
  InitKind kind = InitKind::Uniform;
  std::uint64_t seed = 0;
};

/// Draws internal opinions, each in [-1, 1].
///  - Uniform: i.i.d. U(-1, 1).
///  - Normal: i.i.d. N(0, 1) clipped to [-1, 1].
///  - DegreeProportional: absolute in-strength divided by its maximum, so the
///    values land in [0, 1]. Throws InvalidArgument on an edgeless graph.
std::vector<double> init_opinions(const SignedDigraph& graph, InitScheme scheme);

enum class WeightDistribution { Uniform, Unit };

struct SyntheticSpec {
  std::size_t n = 100;
  double edge_prob = 0.05;
  double negative_prob = 0.0;
  /// Uniform draws magnitudes from (0, 1]; Unit uses magnitude 1.
  WeightDistribution weights = WeightDistribution::Uniform;
  std::uint64_t seed = 0;
};

/// Directed G(n, p) with signed weights. Node labels are "0".."n-1".
SignedDigraph gen_synthetic(const SyntheticSpec& spec);

}  // namespace godm
