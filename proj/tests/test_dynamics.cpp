#include <doctest.h>

#include <cmath>
#include <random>

#include <godm/dynamics.hpp>
#include <godm/error.hpp>
#include <godm/ingest.hpp>

#include "support/oracles.hpp"

using namespace godm;

namespace {

SignedDigraph from(std::vector<EdgeRecord> records) { return build_graph(records).graph; }

// 1 -> 2 with weight w; labels "1", "2".
SignedDigraph pair_graph(double w) { return from({{"1", "2", w, {}}}); }

std::vector<double> random_alpha(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.05, 0.95);
  std::vector<double> a(n);
  for (auto& v : a) v = d(rng);
  return a;
}

std::vector<double> random_opinions(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> s(n);
  for (auto& v : s) v = d(rng);
  return s;
}

}  // namespace

TEST_CASE("node_cost examples") {
  SUBCASE("isolated node") {
    const auto g = from({{"a", "b", 1.0, {}}});  // b is a sink
    const GodmSystem sys(g, std::vector<double>{0.5, 0.5});
    const std::vector<double> z{0.0, 0.0}, s{0.0, 1.0};
    CHECK(node_cost(sys, 1, z, s) == doctest::Approx(0.5));
  }
  SUBCASE("global minimum") {
    const auto g = from({{"a", "b", 0.7, {}}, {"a", "c", -0.4, {}}});
    const GodmSystem sys(g, std::vector<double>{0.3, 0.5, 0.5});
    const std::vector<double> z{0.6, 0.6, -0.6}, s{0.6, 0.1, 0.2};
    CHECK(node_cost(sys, 0, z, s) == doctest::Approx(0.0));
  }
  SUBCASE("sign flip term") {
    const GodmSystem sys(pair_graph(-1.0), std::vector<double>{0.5, 0.5});
    const std::vector<double> z{1.0, 1.0}, s{1.0, 0.0};
    CHECK(node_cost(sys, 0, z, s) == doctest::Approx(2.0));
  }
}

TEST_CASE("node_cost derivative matches central differences") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = gen_synthetic({15, 0.3, 0.5, WeightDistribution::Uniform, std::uint64_t(trial)});
    const GodmSystem sys(g, random_alpha(15, rng));
    auto z = random_opinions(15, rng);
    const auto s = random_opinions(15, rng);
    for (NodeId i = 0; i < 15; ++i) {
      const double h = 1e-5;
      const double zi = z[i];
      z[i] = zi + h;
      const double up = node_cost(sys, i, z, s);
      z[i] = zi - h;
      const double down = node_cost(sys, i, z, s);
      z[i] = zi;
      const double fd = (up - down) / (2.0 * h);
      const double an = node_cost_derivative(sys, i, z, s);
      CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("equilibrium_direct examples") {
  SUBCASE("edgeless graph returns s") {
    const auto g = from({{"a", "a", 1.0, {}}, {"b", "b", 1.0, {}}});
    const GodmSystem sys(g, std::vector<double>{0.3, 0.9});
    const std::vector<double> s{0.25, -0.75};
    const auto r = equilibrium_direct(sys, s);
    CHECK(r.z_star[0] == doctest::Approx(0.25));
    CHECK(r.z_star[1] == doctest::Approx(-0.75));
    CHECK(r.iterations == 0);
  }
  SUBCASE("positive pair") {
    // M = [[1, -0.5], [0, 0.5]], Lambda s = (0.5, 0) => z* = (0.5, 0)
    const GodmSystem sys(pair_graph(1.0), std::vector<double>{0.5, 0.5});
    const std::vector<double> s{1.0, 0.0};
    const auto r = equilibrium_direct(sys, s);
    CHECK(r.z_star[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(r.z_star[1]) < 1e-15);
    CHECK(r.residual <= 1e-10);
    CHECK(overall_opinion(r.z_star) == doctest::Approx(0.5));
  }
  SUBCASE("negative pair") {
    const GodmSystem sys(pair_graph(-1.0), std::vector<double>{0.5, 0.5});
    const std::vector<double> s{1.0, 1.0};
    const auto r = equilibrium_direct(sys, s);
    CHECK(std::abs(r.z_star[0]) < 1e-15);
    CHECK(r.z_star[1] == doctest::Approx(1.0));
  }
}

TEST_CASE("direct solve matches the dense inverse oracle") {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = gen_synthetic({40, 0.15, 0.4, WeightDistribution::Uniform, seed});
    const auto alpha = random_alpha(40, rng);
    const auto s = random_opinions(40, rng);
    const GodmSystem sys(g, alpha);
    const auto r = equilibrium_direct(sys, s);
    CHECK(oracle::max_abs_diff(r.z_star, oracle::dense_equilibrium(g, alpha, s)) < 1e-12);
    CHECK(r.residual <= 1e-10);
  }
}

TEST_CASE("equilibrium_iterative") {
  SUBCASE("edgeless graph converges in one sweep") {
    const auto g = from({{"a", "a", 1.0, {}}, {"b", "b", 1.0, {}}});
    const GodmSystem sys(g, std::vector<double>{0.3, 0.9});
    const std::vector<double> s{0.25, -0.75};
    const auto r = equilibrium_iterative(sys, s, 1e-12);
    CHECK(r.iterations == 1);
    CHECK(r.z_star == s);
  }
  SUBCASE("agrees with the direct solve") {
    std::mt19937_64 rng(9);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto g = gen_synthetic({60, 0.1, 0.5, WeightDistribution::Uniform, seed});
      const GodmSystem sys(g, random_alpha(60, rng));
      const auto s = random_opinions(60, rng);
      const auto it = equilibrium_iterative(sys, s, 1e-12);
      const auto dr = equilibrium_direct(sys, s);
      CHECK(oracle::max_abs_diff(it.z_star, dr.z_star) < 1e-10);
      CHECK(it.iterations > 0);
    }
  }
  SUBCASE("alpha near one pins z to s") {
    const auto g = gen_synthetic({30, 0.2, 0.5, WeightDistribution::Uniform, 1});
    const double eps = 1e-6;
    const GodmSystem sys(g, std::vector<double>(30, 1.0 - eps));
    std::mt19937_64 rng(1);
    const auto s = random_opinions(30, rng);
    const auto r = equilibrium_iterative(sys, s, 1e-14);
    double max_degree = 0.0;
    for (NodeId i = 0; i < 30; ++i) max_degree = std::max(max_degree, g.out_strength(i));
    // |z - s| <= (1 - a)/a * 2 d_max for each row
    CHECK(oracle::max_abs_diff(r.z_star, s) <= 4.0 * eps * max_degree);
  }
  SUBCASE("iteration cap raises ConvergenceError") {
    const auto g = gen_synthetic({30, 0.5, 0.0, WeightDistribution::Unit, 1});
    const GodmSystem sys(g, std::vector<double>(30, 0.01));
    std::mt19937_64 rng(2);
    CHECK_THROWS_AS(equilibrium_iterative(sys, random_opinions(30, rng), 1e-14, 3), ConvergenceError);
  }
}

TEST_CASE("Nash condition: no single-coordinate deviation lowers the cost") {
  std::mt19937_64 rng(17);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = gen_synthetic({50, 0.1, 0.5, WeightDistribution::Uniform, seed});
    const GodmSystem sys(g, random_alpha(50, rng));
    const auto s = random_opinions(50, rng);
    auto z = equilibrium_direct(sys, s).z_star;
    for (NodeId i = 0; i < 50; ++i) {
      const double base = node_cost(sys, i, z, s);
      for (double h : {1e-4, -1e-4}) {
        z[i] += h;
        CHECK(node_cost(sys, i, z, s) >= base - 1e-8);
        z[i] -= h;
      }
    }
  }
}

TEST_CASE("contribution index") {
  SUBCASE("edgeless graph gives all ones") {
    const auto g = from({{"a", "a", 1.0, {}}, {"b", "b", 1.0, {}}, {"c", "c", 1.0, {}}});
    const GodmSystem sys(g, std::vector<double>{0.2, 0.5, 0.7});
    for (double v : contribution_index(sys)) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("positive pair matches the dense 2x2 inverse") {
    const auto g = pair_graph(1.0);
    const std::vector<double> alpha{0.5, 0.5};
    const auto expected = oracle::dense_contribution(g, alpha);
    CHECK(expected[0] == doctest::Approx(0.5));
    CHECK(expected[1] == doctest::Approx(1.5));
    const auto gi = contribution_index(GodmSystem(g, alpha));
    CHECK(oracle::max_abs_diff(gi, expected) < 1e-14);
  }
  SUBCASE("g.s equals the overall opinion for random s") {
    std::mt19937_64 rng(31);
    const auto g = gen_synthetic({80, 0.08, 0.5, WeightDistribution::Uniform, 3});
    const auto alpha = random_alpha(80, rng);
    const GodmSystem sys(g, alpha);
    const EquilibriumSolver solver(sys);
    const auto gi = solver.contribution_index();
    CHECK(oracle::max_abs_diff(gi, oracle::dense_contribution(g, alpha)) < 1e-11);
    for (int k = 0; k < 100; ++k) {
      const auto s = random_opinions(80, rng);
      const double p = overall_opinion(solver.solve(s).z_star);
      CHECK(std::abs(oracle::dot(gi, s) - p) <= 1e-10);
    }
  }
}

TEST_CASE("half confidence reduces to the OMSTN and Friedkin-Johnsen updates") {
  const auto g = gen_synthetic({40, 0.15, 0.5, WeightDistribution::Uniform, 12});
  std::mt19937_64 rng(4);
  const auto s = random_opinions(40, rng);
  const GodmSystem sys(g, std::vector<double>(40, 0.5));
  const auto z = equilibrium_direct(sys, s).z_star;
  for (NodeId i = 0; i < 40; ++i) {
    double num = s[i], den = 1.0;
    for (const auto& a : g.successors(i)) {
      num += a.weight * z[a.node];
      den += std::abs(a.weight);
    }
    CHECK(z[i] == doctest::Approx(num / den).epsilon(1e-12));
  }

  const auto pos = gen_synthetic({40, 0.15, 0.0, WeightDistribution::Uniform, 12});
  const auto zp = equilibrium_direct(GodmSystem(pos, std::vector<double>(40, 0.5)), s).z_star;
  for (NodeId i = 0; i < 40; ++i) {
    double num = s[i], den = 1.0;
    for (const auto& a : pos.successors(i)) {
      num += a.weight * zp[a.node];
      den += a.weight;  // no absolute value in the FJ form
    }
    CHECK(zp[i] == doctest::Approx(num / den).epsilon(1e-12));
  }
}

TEST_CASE("equilibrium is bounded by s on positive graphs and linear in s") {
  std::mt19937_64 rng(41);
  const auto pos = gen_synthetic({60, 0.1, 0.0, WeightDistribution::Uniform, 2});
  const GodmSystem sys(pos, random_alpha(60, rng));
  const EquilibriumSolver solver(sys);
  for (int k = 0; k < 20; ++k) {
    const auto s1 = random_opinions(60, rng);
    const auto s2 = random_opinions(60, rng);
    const auto z1 = solver.solve(s1).z_star;
    double s_inf = 0.0, z_inf = 0.0;
    for (NodeId i = 0; i < 60; ++i) {
      s_inf = std::max(s_inf, std::abs(s1[i]));
      z_inf = std::max(z_inf, std::abs(z1[i]));
    }
    CHECK(z_inf <= s_inf + 1e-12);

    std::vector<double> sum(60);
    for (NodeId i = 0; i < 60; ++i) sum[i] = s1[i] + s2[i];
    const auto z2 = solver.solve(s2).z_star;
    const auto z12 = solver.solve(sum).z_star;
    for (NodeId i = 0; i < 60; ++i) CHECK(std::abs(z12[i] - z1[i] - z2[i]) < 1e-12);
  }
}

TEST_CASE("system construction rejects alpha outside (0, 1)") {
  const auto g = pair_graph(1.0);
  CHECK_THROWS_AS(GodmSystem(g, std::vector<double>{0.0, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(GodmSystem(g, std::vector<double>{0.5, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(GodmSystem(g, std::vector<double>{0.5}), InvalidArgument);
  const GodmSystem sys(g, std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(equilibrium_direct(sys, std::vector<double>{1.0}), InvalidArgument);
}
