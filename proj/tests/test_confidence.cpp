#include <doctest.h>

#include <algorithm>
#include <numeric>

#include <godm/confidence.hpp>
#include <godm/error.hpp>
#include <godm/ingest.hpp>

#include "support/oracles.hpp"

using namespace godm;

namespace {

SignedDigraph from(std::vector<EdgeRecord> records) { return build_graph(records).graph; }

}  // namespace

TEST_CASE("pagerank on a two-node cycle is uniform") {
  const auto g = from({{"a", "b", 1.0, {}}, {"b", "a", -0.5, {}}});
  const auto r = pagerank(g);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(r[1] == doctest::Approx(1.0));
}

TEST_CASE("pagerank on a star puts the hub at 1") {
  const auto g = from({{"l1", "hub", 1.0, {}},
                       {"l2", "hub", 0.3, {}},
                       {"l3", "hub", -1.0, {}},
                       {"l4", "hub", 0.7, {}}});
  const auto r = pagerank(g);
  const NodeId hub = *g.find("hub");
  CHECK(r[hub] == 1.0);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    if (i == hub) continue;
    CHECK(r[i] < 1.0);
    CHECK(r[i] == doctest::Approx(r[*g.find("l1")]).epsilon(1e-12));
  }
}

TEST_CASE("pagerank on a chain matches dense power iteration") {
  const auto g = from({{"a", "b", 0.4, {}}, {"b", "c", -0.9, {}}});
  const auto r = pagerank(g, {0.85, 1e-15, 10000});
  const auto expected = oracle::dense_pagerank(g, 0.85, 1000);
  for (NodeId i = 0; i < 3; ++i) CHECK(std::abs(r[i] - expected[i]) < 1e-10);
}

TEST_CASE("pagerank distribution sums to one and matches the dense oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = gen_synthetic({30, 0.08, 0.5, WeightDistribution::Uniform, seed});
    const auto dist = pagerank_distribution(g, {0.85, 1e-14, 10000});
    CHECK(std::accumulate(dist.begin(), dist.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    const auto r = pagerank(g, {0.85, 1e-14, 10000});
    CHECK(*std::max_element(r.begin(), r.end()) == 1.0);
    CHECK(oracle::max_abs_diff(r, oracle::dense_pagerank(g, 0.85, 1000)) < 1e-10);
  }
}

TEST_CASE("pagerank errors") {
  const auto g = from({{"a", "b", 1.0, {}}});
  CHECK_THROWS_AS(pagerank(g, {1.0, 1e-10, 100}), InvalidArgument);
  CHECK_THROWS_AS(pagerank(SignedDigraph{}), InvalidArgument);
  try {
    pagerank(gen_synthetic({50, 0.1, 0.0, WeightDistribution::Unit, 1}), {0.85, 1e-15, 2});
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual() > 0.0);
    CHECK(e.iterations() == 2);
  }
}

TEST_CASE("mean_evaluation averages incoming weights") {
  const auto g = from({{"a", "x", 0.5, {}},
                       {"b", "x", -0.5, {}},
                       {"a", "y", 1.0, {}},
                       {"b", "y", 1.0, {}},
                       {"c", "y", -1.0, {}}});
  const auto m = mean_evaluation(g);
  CHECK(m[*g.find("x")] == doctest::Approx(0.0));
  CHECK(m[*g.find("y")] == doctest::Approx(1.0 / 3.0));
  CHECK(m[*g.find("a")] == 0.0);
}

TEST_CASE("adjusted confidence formula") {
  const double eps = 1e-6;
  CHECK(adjusted_confidence(-1.0, 0.0, 0.5, eps) == eps);
  CHECK(adjusted_confidence(1.0, 1.0, 0.5, eps) == 1.0 - eps);
  CHECK(adjusted_confidence(0.2, 0.6, 0.5, eps) == doctest::Approx(0.4));
  CHECK(adjusted_confidence(0.8, 0.1, 1.0, eps) == doctest::Approx(0.8));
  CHECK(adjusted_confidence(0.8, 0.1, 0.0, eps) == doctest::Approx(0.1));
}

TEST_CASE("adjusted confidence is monotone in m and r") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> m(-1.0, 1.0), r(0.0, 1.0), q(0.0, 1.0), step(0.0, 0.2);
  for (int k = 0; k < 1000; ++k) {
    const double mi = m(rng), ri = r(rng), qq = q(rng);
    const double base = adjusted_confidence(mi, ri, qq);
    CHECK(adjusted_confidence(mi + step(rng), ri, qq) >= base);
    CHECK(adjusted_confidence(mi, ri + step(rng), qq) >= base);
  }
}

TEST_CASE("confidence_adjusted stays inside the clamp") {
  const auto g = gen_synthetic({200, 0.05, 0.6, WeightDistribution::Uniform, 4});
  const auto cv = confidence_adjusted(g, 0.5, {}, 1e-6);
  REQUIRE(cv.mean_evaluation.has_value());
  REQUIRE(cv.pagerank.has_value());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    CHECK(cv.alpha[i] >= 1e-6);
    CHECK(cv.alpha[i] <= 1.0 - 1e-6);
    CHECK(cv.alpha[i] == adjusted_confidence((*cv.mean_evaluation)[i], (*cv.pagerank)[i], 0.5));
  }
  CHECK(confidence_adjusted(g, 0.5).alpha == cv.alpha);  // deterministic
  CHECK_THROWS_AS(confidence_adjusted(g, 1.5), InvalidArgument);
  CHECK_THROWS_AS(confidence_adjusted(g, 0.5, {}, 0.5), InvalidArgument);
}

TEST_CASE("confidence_fixed") {
  const auto half = confidence_fixed(3, 0.5);
  CHECK(half.alpha == std::vector<double>{0.5, 0.5, 0.5});
  const auto quarter = confidence_fixed(4, 0.25);
  for (double a : quarter.alpha) CHECK(a == 0.25);
  CHECK_THROWS_AS(confidence_fixed(3, 1.0), InvalidArgument);
  CHECK_THROWS_AS(confidence_fixed(3, 0.0), InvalidArgument);
  // values inside (0, eps) are pulled up to the clamp
  CHECK(confidence_fixed(1, 1e-9, 1e-6).alpha[0] == 1e-6);
}

TEST_CASE("alpha mode text round trip") {
  CHECK(describe(parse_alpha_mode("fixed:0.5")) == "fixed:0.5");
  CHECK(describe(parse_alpha_mode("adjusted:0.5")) == "adjusted:0.5");
  const auto two_thirds = std::get<FixedAlpha>(parse_alpha_mode("fixed:2/3"));
  CHECK(two_thirds.value == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(parse_alpha_mode("fixed"), InvalidArgument);
  CHECK_THROWS_AS(parse_alpha_mode("weird:0.5"), InvalidArgument);
  CHECK_THROWS_AS(parse_alpha_mode("fixed:abc"), InvalidArgument);
}
