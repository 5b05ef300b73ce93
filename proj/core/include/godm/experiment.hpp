#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "godm/admm.hpp"
#include "godm/confidence.hpp"
#include "godm/dynamics.hpp"
#include "godm/greedy.hpp"
#include "godm/ingest.hpp"

namespace godm {

/// Where the trust network comes from: an edge-list file or a synthetic
/// generator. Exactly one of `path` and `synthetic` is set.
struct GraphSource {
  std::optional<std::string> path;
  std::optional<SyntheticSpec> synthetic;
  EdgeListFormat format;
  NormalizeScheme normalize = NormalizeScheme::max_abs();
  DedupePolicy dedupe = DedupePolicy::KeepLast;
};

struct LoadedGraph {
  SignedDigraph graph;
  std::size_t malformed_lines = 0;
  std::size_t duplicate_records = 0;
  std::size_t dropped_zero = 0;
  std::size_t dropped_self_loops = 0;
};

/// parse -> dedupe -> normalize -> build, or gen_synthetic.
LoadedGraph load_graph(const GraphSource& source);

struct ExperimentConfig {
  GraphSource graph;
  InitKind init = InitKind::Uniform;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<AlphaMode> alpha_modes{AdjustedAlpha{}};
  double alpha_clamp = kDefaultAlphaClamp;
  std::vector<Method> methods{Method::Greedy};
  std::vector<double> budgets{200.0};
  Objective objective = Objective::Maximize;
  double solve_tol = kDefaultSolveTol;
  AdmmOptions admm{1.0, 1e-9, 1e-9, 1000000, false};
  bool record_timings = false;
  std::string output;  // CSV path; empty means stdout
};

/// Throws InvalidArgument describing the first problem found.
void validate_config(const ExperimentConfig& config);

/// Canonical JSON text of the config (sorted keys, fixed formatting).
std::string config_to_json(const ExperimentConfig& config);
/// Parses a JSON config document. Missing keys keep their defaults.
ExperimentConfig config_from_json(const std::string& text);

/// 16 hex digits of FNV-1a over config_to_json(config).
std::string config_fingerprint(const ExperimentConfig& config);

struct ExperimentRow {
  std::string alpha;
  std::uint64_t seed = 0;
  Method method = Method::Greedy;
  double budget = 0.0;
  double spent = 0.0;
  double p_before = 0.0;
  double p_after = 0.0;
  double benefit = 0.0;         // p_after - p_before, from two equilibrium solves
  double linear_benefit = 0.0;  // g^T delta_s
  double unit_benefit = 0.0;    // benefit / budget, 0 when the budget is 0
  std::optional<double> wall_ms;
};

struct AggregateRow {
  std::string alpha;
  Method method = Method::Greedy;
  double budget = 0.0;
  std::size_t count = 0;
  double mean_benefit = 0.0;
  double std_benefit = 0.0;  // sample standard deviation, 0 for one seed
  double mean_p_before = 0.0;
  double mean_p_after = 0.0;
  double mean_unit_benefit = 0.0;
};

struct ExperimentReport {
  std::string fingerprint;
  std::string graph_name;
  InitKind init = InitKind::Uniform;
  Objective objective = Objective::Maximize;
  std::vector<ExperimentRow> rows;
  std::vector<AggregateRow> aggregates;
};

/// Runs every (alpha mode, seed, method, budget) cell. The contribution
/// index is computed once per alpha mode; each row re-solves the equilibrium
/// at s + delta_s and checks it against g^T delta_s (InternalError past 1e-6).
ExperimentReport run_experiment(const ExperimentConfig& config);

/// run_experiment over a nonempty, strictly increasing budget grid.
ExperimentReport sweep_budget(const ExperimentConfig& config);

/// Groups rows by (alpha, method, budget) in first-appearance order.
std::vector<AggregateRow> aggregate(std::span<const ExperimentRow> rows);

/// CSV with header
/// record,fingerprint,graph,init,objective,alpha,method,seed,budget,spent,
/// p_before,p_after,benefit,linear_benefit,unit_benefit,benefit_std,count,wall_ms
/// "cell" rows first, then "mean" rows.
void write_report_csv(std::ostream& out, const ExperimentReport& report);

/// Budget grid from "start:stop:step" (inclusive of stop within 1e-9) or a
/// comma-separated list.
std::vector<double> parse_budget_grid(const std::string& text);

std::string to_string(InitKind kind);
InitKind parse_init_kind(const std::string& text);

/// ||z_GODM - z_OMSTN||_inf with every alpha_i = 1/2, where the OMSTN fixed
/// point z_i = (s_i + sum_j w_ij z_j) / (1 + sum_j |w_ij|) is found by its
/// own sweep loop.
double compare_models(const SignedDigraph& graph, std::span<const double> s);

}  // namespace godm
