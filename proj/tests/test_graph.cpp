#include <doctest.h>

#include <cmath>
#include <vector>

#include <godm/error.hpp>
#include <godm/graph.hpp>
#include <godm/ingest.hpp>

using namespace godm;

namespace {

SignedDigraph from(std::vector<EdgeRecord> records) { return build_graph(records).graph; }

}  // namespace

TEST_CASE("build_graph maps labels in first-appearance order") {
  const auto result = build_graph(std::vector<EdgeRecord>{{"a", "b", 0.5, {}}});
  const auto& g = result.graph;
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
  REQUIRE(g.successors(0).size() == 1);
  CHECK(g.successors(0)[0] == Arc{1, 0.5});
  CHECK(g.label(0) == "a");
  CHECK(g.label(1) == "b");
  CHECK(*g.find("b") == 1);
  CHECK_FALSE(g.find("zz").has_value());
  CHECK(result.dropped_self_loops == 0);
}

TEST_CASE("self-loops are dropped and counted") {
  const auto result = build_graph(std::vector<EdgeRecord>{{"a", "a", 1.0, {}}});
  CHECK(result.graph.node_count() == 1);
  CHECK(result.graph.edge_count() == 0);
  CHECK(result.dropped_self_loops == 1);
}

TEST_CASE("build_graph rejects bad records") {
  SUBCASE("duplicate pair") {
    std::vector<EdgeRecord> r{{"a", "b", 0.5, {}}, {"a", "b", 0.7, {}}};
    CHECK_THROWS_AS(build_graph(r), InvalidArgument);
    try {
      build_graph(r);
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find("dedupe") != std::string::npos);
    }
  }
  SUBCASE("weight out of range names the record") {
    std::vector<EdgeRecord> r{{"x", "y", 1.5, {}}};
    try {
      build_graph(r);
      FAIL("expected rejection");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find("(x, y, 1.5)") != std::string::npos);
    }
  }
  SUBCASE("empty label") {
    std::vector<EdgeRecord> r{{"", "y", 0.5, {}}};
    CHECK_THROWS_AS(build_graph(r), InvalidArgument);
  }
  SUBCASE("reverse pair is not a duplicate") {
    std::vector<EdgeRecord> r{{"a", "b", 0.5, {}}, {"b", "a", -0.5, {}}};
    CHECK(build_graph(r).graph.edge_count() == 2);
  }
}

TEST_CASE("out_strength sums absolute successor weights") {
  const auto g = from({{"0", "1", 0.5, {}}, {"0", "2", -0.5, {}}});
  CHECK(g.out_strength(0) == doctest::Approx(1.0));
  CHECK(g.out_strength(1) == 0.0);  // sink
  const auto h = from({{"0", "1", -0.3, {}}});
  CHECK(h.out_strength(0) == doctest::Approx(0.3));
  CHECK_THROWS_AS(g.out_strength(3), InvalidArgument);
}

TEST_CASE("in_trust_sum signed and absolute variants") {
  const auto g = from({{"a", "c", 0.5, {}}, {"b", "c", -0.5, {}}});
  const NodeId c = *g.find("c");
  CHECK(g.in_trust_sum(c, TrustSum::Signed) == doctest::Approx(0.0));
  CHECK(g.in_trust_sum(c, TrustSum::Absolute) == doctest::Approx(1.0));
  const NodeId a = *g.find("a");
  CHECK(g.in_trust_sum(a, TrustSum::Signed) == 0.0);
  CHECK(g.in_trust_sum(a, TrustSum::Absolute) == 0.0);
  CHECK_THROWS_AS(g.in_trust_sum(9, TrustSum::Signed), InvalidArgument);
}

TEST_CASE("validate reports counts") {
  SUBCASE("empty graph") {
    const auto d = validate(SignedDigraph{});
    CHECK(d.nodes == 0);
    CHECK(d.edges == 0);
    CHECK(d.sinks == 0);
    CHECK(d.isolated == 0);
    CHECK_FALSE(d.min_weight.has_value());
  }
  SUBCASE("path with one sink") {
    const auto d = validate(from({{"a", "b", 0.2, {}}, {"b", "c", -0.4, {}}}));
    CHECK(d.nodes == 3);
    CHECK(d.edges == 2);
    CHECK(d.sinks == 1);
    CHECK(d.sources == 1);
    CHECK(d.negative_edges == 1);
    CHECK(*d.min_weight == -0.4);
    CHECK(*d.max_weight == 0.2);
  }
  SUBCASE("unit weights") {
    const auto d = validate(from({{"a", "b", 1.0, {}}, {"b", "a", 1.0, {}}}));
    CHECK(*d.min_weight == 1.0);
    CHECK(*d.max_weight == 1.0);
  }
  SUBCASE("isolated node from a dropped self-loop") {
    const auto d = validate(from({{"a", "b", 1.0, {}}, {"c", "c", 1.0, {}}}));
    CHECK(d.isolated == 1);
  }
}

TEST_CASE("edge list round trip reproduces the graph") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = gen_synthetic({30, 0.3, 0.4, WeightDistribution::Uniform, seed});
    bool has_isolated = validate(g).isolated > 0;
    if (has_isolated) continue;
    const auto records = g.edge_records();
    const auto rebuilt = build_graph(records).graph;
    CHECK(rebuilt == g);
  }
}

TEST_CASE("successor and predecessor indices agree") {
  const auto g = gen_synthetic({40, 0.2, 0.5, WeightDistribution::Uniform, 7});
  std::vector<double> via_pred(g.node_count(), 0.0);
  std::size_t pred_arcs = 0;
  for (NodeId j = 0; j < g.node_count(); ++j) {
    for (const auto& a : g.predecessors(j)) {
      via_pred[a.node] += std::abs(a.weight);
      ++pred_arcs;
      // the mirrored arc exists in the successor list with the same weight
      bool found = false;
      for (const auto& b : g.successors(a.node)) found |= (b.node == j && b.weight == a.weight);
      CHECK(found);
    }
  }
  CHECK(pred_arcs == g.edge_count());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    CHECK(g.out_strength(i) == doctest::Approx(via_pred[i]).epsilon(1e-14));
  }
}

TEST_CASE("Laplacian rows applied to ones give d_ii minus signed row sum") {
  const auto g = gen_synthetic({25, 0.3, 0.5, WeightDistribution::Uniform, 3});
  const auto lap = g.laplacian();
  const std::vector<double> ones(g.node_count(), 1.0);
  const auto l1 = lap.apply(ones);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    double signed_sum = 0.0;
    for (const auto& a : g.successors(i)) signed_sum += a.weight;
    CHECK(l1[i] == doctest::Approx(lap.diagonal(i) - signed_sum).epsilon(1e-12));
    CHECK(lap.diagonal(i) >= 0.0);
    CHECK((lap.diagonal(i) == 0.0) == g.successors(i).empty());
  }

  const auto pos = gen_synthetic({25, 0.3, 0.0, WeightDistribution::Uniform, 3});
  const auto lpos = pos.laplacian().apply(std::vector<double>(pos.node_count(), 1.0));
  for (double v : lpos) CHECK(std::abs(v) < 1e-12);
}
