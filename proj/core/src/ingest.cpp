#include "godm/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <string_view>

namespace godm {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return !prefix.empty() && s.substr(0, prefix.size()) == prefix;
}

}  // namespace

ParseReport parse_edge_list(std::istream& in, const EdgeListFormat& format) {
  if (!in) throw ParseError("edge list stream is not readable", {});

  const std::size_t required =
      std::max({format.src_column, format.dst_column, format.weight_column}) + 1;

  ParseReport report;
  std::string line;
  std::size_t line_number = 0;
  std::size_t data_lines = 0;
  bool header_pending = format.has_header;
  while (std::getline(in, line)) {
    ++line_number;
    const auto content = trim(line);
    if (content.empty() || starts_with(content, format.comment_prefix)) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    ++data_lines;
    auto reject = [&](std::string reason) {
      report.malformed.push_back({line_number, std::string(content), std::move(reason)});
    };

    const auto fields = split(content, format.delimiter);
    if (fields.size() < required) {
      reject("expected at least " + std::to_string(required) + " columns, found " +
             std::to_string(fields.size()));
      continue;
    }
    EdgeRecord rec;
    rec.src = std::string(fields[format.src_column]);
    rec.dst = std::string(fields[format.dst_column]);
    if (rec.src.empty() || rec.dst.empty()) {
      reject("empty node label");
      continue;
    }
    const auto weight = parse_number<double>(fields[format.weight_column]);
    if (!weight || !std::isfinite(*weight)) {
      reject("weight is not a finite number");
      continue;
    }
    rec.weight = *weight;
    if (format.timestamp_column && *format.timestamp_column < fields.size() &&
        !fields[*format.timestamp_column].empty()) {
      const auto ts = parse_number<std::int64_t>(fields[*format.timestamp_column]);
      if (!ts) {
        reject("timestamp is not an integer");
        continue;
      }
      rec.timestamp = *ts;
    }
    report.records.push_back(std::move(rec));
  }
  if (in.bad()) throw ParseError("I/O error while reading edge list", std::move(report.malformed));
  if (data_lines > 0 && report.records.empty()) {
    throw ParseError("every data line of the edge list is malformed",
                     std::move(report.malformed));
  }
  return report;
}

void write_edge_list(std::ostream& out, std::span<const EdgeRecord> records,
                     const EdgeListFormat& format) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : records) {
    out << r.src << format.delimiter << r.dst << format.delimiter << r.weight;
    if (r.timestamp) out << format.delimiter << *r.timestamp;
    out << '\n';
  }
  out.precision(old_precision);
}

NormalizeResult normalize_weights(std::span<const EdgeRecord> records, NormalizeScheme scheme) {
  double divisor = 1.0;
  switch (scheme.kind) {
    case NormalizeScheme::Kind::Identity:
      break;
    case NormalizeScheme::Kind::DivideByConstant:
      if (!(scheme.constant > 0.0) || !std::isfinite(scheme.constant)) {
        throw InvalidArgument("normalization constant must be positive");
      }
      divisor = scheme.constant;
      break;
    case NormalizeScheme::Kind::DivideByMaxAbs: {
      if (records.empty()) throw InvalidArgument("cannot normalize an empty edge list by max |w|");
      double max_abs = 0.0;
      for (const auto& r : records) max_abs = std::max(max_abs, std::abs(r.weight));
      if (max_abs == 0.0) throw InvalidArgument("every edge weight is zero");
      divisor = max_abs;
      break;
    }
  }

  NormalizeResult result;
  result.records.reserve(records.size());
  for (const auto& r : records) {
    if (r.weight == 0.0) {
      ++result.dropped_zero;
      continue;
    }
    EdgeRecord out = r;
    out.weight = r.weight / divisor;
    if (!(out.weight >= -1.0 && out.weight <= 1.0)) {
      throw InvalidArgument("weight " + std::to_string(r.weight) + " on (" + r.src + ", " + r.dst +
                            ") falls outside [-1, 1] after normalization");
    }
    result.records.push_back(std::move(out));
  }
  return result;
}

std::vector<EdgeRecord> dedupe_edges(std::span<const EdgeRecord> records, DedupePolicy policy) {
  struct Slot {
    std::size_t position;  // index into `out`
    std::size_t count = 1;
    double weight_sum;
  };
  std::map<std::pair<std::string, std::string>, Slot> seen;
  std::vector<EdgeRecord> out;

  // Whether `cand` (later in input) should replace `kept`.
  auto replaces = [policy](const EdgeRecord& kept, const EdgeRecord& cand) {
    const bool both_stamped = kept.timestamp && cand.timestamp;
    if (policy == DedupePolicy::KeepLast) {
      return both_stamped && *kept.timestamp != *cand.timestamp
                 ? *cand.timestamp > *kept.timestamp
                 : true;
    }
    return both_stamped && *kept.timestamp != *cand.timestamp ? *cand.timestamp < *kept.timestamp
                                                              : false;
  };

  for (const auto& r : records) {
    auto [it, inserted] = seen.try_emplace({r.src, r.dst}, Slot{out.size(), 1, r.weight});
    if (inserted) {
      out.push_back(r);
      continue;
    }
    Slot& slot = it->second;
    EdgeRecord& kept = out[slot.position];
    if (policy == DedupePolicy::MeanWeight) {
      ++slot.count;
      slot.weight_sum += r.weight;
      kept.weight = slot.weight_sum / static_cast<double>(slot.count);
      if (r.timestamp && (!kept.timestamp || *r.timestamp > *kept.timestamp)) {
        kept.timestamp = r.timestamp;
      }
    } else if (replaces(kept, r)) {
      kept = r;
    }
  }
  return out;
}

std::vector<double> init_opinions(const SignedDigraph& graph, InitScheme scheme) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw InvalidArgument("cannot initialize opinions on an empty graph");
  std::vector<double> s(n);
  std::mt19937_64 rng(scheme.seed);
  switch (scheme.kind) {
    case InitKind::Uniform: {
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      for (auto& v : s) v = dist(rng);
      break;
    }
    case InitKind::Normal: {
      std::normal_distribution<double> dist(0.0, 1.0);
      for (auto& v : s) v = std::clamp(dist(rng), -1.0, 1.0);
      break;
    }
    case InitKind::DegreeProportional: {
      double max_sum = 0.0;
      for (NodeId i = 0; i < n; ++i) {
        s[i] = graph.in_trust_sum(i, TrustSum::Absolute);
        max_sum = std::max(max_sum, s[i]);
      }
      if (max_sum == 0.0) {
        throw InvalidArgument("degree-proportional init needs at least one edge");
      }
      for (auto& v : s) v /= max_sum;
      break;
    }
  }
  return s;
}

SignedDigraph gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 2) throw InvalidArgument("synthetic graph needs n >= 2");
  if (!(spec.edge_prob > 0.0 && spec.edge_prob <= 1.0)) {
    throw InvalidArgument("edge probability must be in (0, 1]");
  }
  if (!(spec.negative_prob >= 0.0 && spec.negative_prob <= 1.0)) {
    throw InvalidArgument("negative-sign probability must be in [0, 1]");
  }

  // Walk the n(n-1) ordered pairs by geometric gaps between present edges,
  // so the cost is O(n + m) rather than O(n^2). Each edge always consumes a
  // sign and a magnitude draw, so the edge set for a seed does not depend on
  // the weight distribution.
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::geometric_distribution<std::uint64_t> gap(spec.edge_prob);
  const std::uint64_t row = spec.n - 1;
  const std::uint64_t pairs = static_cast<std::uint64_t>(spec.n) * row;
  std::vector<IndexedEdge> edges;
  edges.reserve(static_cast<std::size_t>(static_cast<double>(pairs) * spec.edge_prob * 1.1));
  for (std::uint64_t k = gap(rng); k < pairs; k += 1 + gap(rng)) {
    const NodeId i = k / row;
    const NodeId r = k % row;
    const NodeId j = r < i ? r : r + 1;
    const double sign_draw = unit(rng);
    const double magnitude_draw = unit(rng);
    double magnitude = 1.0;
    if (spec.weights == WeightDistribution::Uniform) magnitude = 1.0 - magnitude_draw;  // (0, 1]
    const double sign = sign_draw < spec.negative_prob ? -1.0 : 1.0;
    edges.push_back(IndexedEdge{i, j, sign * magnitude});
  }
  std::vector<std::string> labels(spec.n);
  for (NodeId i = 0; i < spec.n; ++i) labels[i] = std::to_string(i);
  return SignedDigraph(std::move(labels), edges);
}

}  // namespace godm
