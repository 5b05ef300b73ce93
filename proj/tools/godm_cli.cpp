#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <godm/admm.hpp>
#include <godm/confidence.hpp>
#include <godm/dynamics.hpp>
#include <godm/error.hpp>
#include <godm/experiment.hpp>
#include <godm/greedy.hpp>
#include <godm/ingest.hpp>

using namespace godm;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void error_line(const std::string& kind, const std::string& message) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

// Output goes to a file when a path is given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw InvalidArgument("cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

struct GraphArgs {
  std::string path;
  std::size_t synthetic_n = 0;
  double edge_prob = 0.05;
  double negative_prob = 0.2;
  std::string weights = "uniform";
  std::uint64_t graph_seed = 0;
  std::string delimiter = ",";
  bool header = false;
  std::string comment = "#";
  int timestamp_column = 3;
  std::string normalize = "maxabs";
  std::string dedupe = "last";
};

void add_graph_options(CLI::App* app, GraphArgs& a) {
  auto* path = app->add_option("--graph", a.path, "edge-list file (src,dst,weight[,timestamp])");
  auto* syn = app->add_option("--synthetic", a.synthetic_n, "generate a random graph with N nodes");
  path->excludes(syn);
  app->add_option("--edge-prob", a.edge_prob, "synthetic edge probability")->capture_default_str();
  app->add_option("--negative-prob", a.negative_prob, "synthetic share of negative edges")
      ->capture_default_str();
  app->add_option("--weights", a.weights, "synthetic weight distribution")
      ->check(CLI::IsMember({"uniform", "unit"}))
      ->capture_default_str();
  app->add_option("--graph-seed", a.graph_seed, "synthetic generator seed")->capture_default_str();
  app->add_option("--delimiter", a.delimiter, "field delimiter; 'tab' for tabs")->capture_default_str();
  app->add_flag("--header", a.header, "skip the first data line");
  app->add_option("--comment", a.comment, "comment prefix")->capture_default_str();
  app->add_option("--timestamp-column", a.timestamp_column, "timestamp column, -1 for none")
      ->capture_default_str();
  app->add_option("--normalize", a.normalize, "maxabs | identity | const:<c>")->capture_default_str();
  app->add_option("--dedupe", a.dedupe, "last | first | mean")->capture_default_str();
}

bool graph_given(const GraphArgs& a) { return !a.path.empty() || a.synthetic_n > 0; }

// Reuses the config parser so the CLI and config files accept the same spelling.
GraphSource to_source(const GraphArgs& a) {
  if (!graph_given(a)) throw InvalidArgument("pass --graph <file> or --synthetic <n>");
  nlohmann::json g;
  if (!a.path.empty()) {
    g["path"] = a.path;
  } else {
    g["synthetic"] = {{"n", a.synthetic_n},
                      {"p", a.edge_prob},
                      {"negative", a.negative_prob},
                      {"weights", a.weights},
                      {"seed", a.graph_seed}};
  }
  const std::string delim = a.delimiter == "tab" ? "\t" : a.delimiter;
  nlohmann::json format{{"delimiter", delim}, {"header", a.header}, {"comment", a.comment}};
  format["timestamp"] = a.timestamp_column < 0 ? nlohmann::json(nullptr) : nlohmann::json(a.timestamp_column);
  g["format"] = format;
  g["normalize"] = a.normalize;
  g["dedupe"] = a.dedupe;
  return config_from_json(nlohmann::json{{"graph", g}}.dump()).graph;
}

void report_load(const LoadedGraph& lg) {
  if (lg.malformed_lines + lg.duplicate_records + lg.dropped_zero + lg.dropped_self_loops == 0) return;
  std::cerr << "loaded graph: skipped " << lg.malformed_lines << " malformed lines, "
            << lg.duplicate_records << " duplicates, " << lg.dropped_zero << " zero weights, "
            << lg.dropped_self_loops << " self-loops\n";
}

struct ModelArgs {
  std::string alpha = "adjusted:0.5";
  double alpha_clamp = kDefaultAlphaClamp;
  double damping = 0.85;
  double pr_tol = 1e-12;
  std::string init = "uniform";
  std::uint64_t seed = 0;
  std::string solver = "direct";
  double tol = kDefaultSolveTol;
};

void add_model_options(CLI::App* app, ModelArgs& m) {
  app->add_option("--alpha", m.alpha, "fixed:<v> or adjusted:<q>")->capture_default_str();
  app->add_option("--alpha-clamp", m.alpha_clamp, "alpha is clamped into [eps, 1 - eps]")
      ->capture_default_str();
  app->add_option("--damping", m.damping, "PageRank damping")->capture_default_str();
  app->add_option("--pr-tol", m.pr_tol, "PageRank L1 tolerance")->capture_default_str();
  app->add_option("--init", m.init, "uniform | normal | degree")->capture_default_str();
  app->add_option("--seed", m.seed, "seed for the internal opinions")->capture_default_str();
  app->add_option("--solver", m.solver, "equilibrium solver")
      ->check(CLI::IsMember({"direct", "iterative"}))
      ->capture_default_str();
  app->add_option("--tol", m.tol, "equilibrium tolerance")->capture_default_str();
}

struct Model {
  LoadedGraph loaded;
  ConfidenceVector confidence;
  std::unique_ptr<GodmSystem> system;
  std::unique_ptr<EquilibriumSolver> solver;
  std::vector<double> s;
  std::vector<double> g;
};

Model build_model(const GraphArgs& ga, const ModelArgs& ma) {
  Model m;
  m.loaded = load_graph(to_source(ga));
  report_load(m.loaded);
  const auto& graph = m.loaded.graph;
  PageRankOptions pr;
  pr.damping = ma.damping;
  pr.tol = ma.pr_tol;
  m.confidence = compute_confidence(graph, parse_alpha_mode(ma.alpha, pr), ma.alpha_clamp);
  m.system = std::make_unique<GodmSystem>(graph, m.confidence);
  m.solver = std::make_unique<EquilibriumSolver>(*m.system);
  m.s = init_opinions(graph, {parse_init_kind(ma.init), ma.seed});
  m.g = m.solver->contribution_index(ma.tol);
  return m;
}

std::vector<double> equilibrium(const Model& m, const ModelArgs& ma, std::span<const double> s) {
  if (ma.solver == "iterative") return equilibrium_iterative(*m.system, s, ma.tol).z_star;
  return m.solver->solve(s, ma.tol).z_star;
}

int run_solve(const GraphArgs& ga, const ModelArgs& ma, const std::string& out) {
  const auto m = build_model(ga, ma);
  const auto z = equilibrium(m, ma, m.s);
  Sink sink(out);
  auto& os = sink.stream();
  os << "node_label,s,z_star,alpha,g\n";
  for (NodeId i = 0; i < z.size(); ++i) {
    os << m.loaded.graph.label(i) << ',' << num(m.s[i]) << ',' << num(z[i]) << ','
       << num(m.confidence.alpha[i]) << ',' << num(m.g[i]) << '\n';
  }
  os << "# overall_opinion=" << num(overall_opinion(z)) << '\n';
  return 0;
}

struct MaximizeArgs {
  double budget = 200.0;
  std::string method = "greedy";
  std::string objective = "max";
  std::optional<double> lambda;
  double rho = 1.0;
  double admm_tol = 1e-9;
  std::size_t admm_max_iter = 1000000;
  std::string trace;
  std::string out;
};

int run_maximize(const GraphArgs& ga, const ModelArgs& ma, const MaximizeArgs& xa) {
  const auto m = build_model(ga, ma);
  const Method method = parse_method(xa.method);
  const Objective objective = parse_objective(xa.objective);
  const auto& graph = m.loaded.graph;

  AdmmOptions opts{xa.rho, xa.admm_tol, xa.admm_tol, xa.admm_max_iter, !xa.trace.empty()};
  AllocationPlan plan;
  std::vector<AdmmTraceRow> trace;
  std::optional<double> lambda_used;
  switch (method) {
    case Method::Greedy: plan = greedy_allocate(m.g, m.s, xa.budget, objective); break;
    case Method::Admm: {
      AdmmResult r;
      if (xa.lambda) {
        // Fixed-lambda mode solves the penalized problem; the budget is ignored.
        std::vector<double> g = m.g;
        if (objective == Objective::Minimize) {
          for (auto& v : g) v = -v;
        }
        r = admm_solve(g, m.s, *xa.lambda, opts);
      } else {
        r = admm_solve_budget(m.g, m.s, xa.budget, objective, opts);
      }
      lambda_used = r.state.lambda;
      plan = std::move(r.plan);
      trace = std::move(r.trace);
      break;
    }
    case Method::Rand:
      plan = baseline_allocate(rank_nodes(graph, m.s, RandomOrder{ma.seed}), m.s, xa.budget, method);
      break;
    case Method::Trust:
      plan = baseline_allocate(rank_nodes(graph, m.s, TrustOrder{}), m.s, xa.budget, method);
      break;
    case Method::IO:
      plan = baseline_allocate(rank_nodes(graph, m.s, OpinionOrder{}), m.s, xa.budget, method);
      break;
  }

  std::vector<double> after(m.s);
  for (NodeId i = 0; i < after.size(); ++i) after[i] = std::clamp(after[i] + plan.delta_s[i], -1.0, 1.0);
  const double p_before = overall_opinion(equilibrium(m, ma, m.s));
  const double p_after = overall_opinion(equilibrium(m, ma, after));

  Sink sink(xa.out);
  auto& os = sink.stream();
  os << "node,delta_s\n";
  for (NodeId i = 0; i < plan.delta_s.size(); ++i) {
    if (plan.delta_s[i] != 0.0) os << graph.label(i) << ',' << num(plan.delta_s[i]) << '\n';
  }
  os << "# summary: method=" << to_string(method) << " objective=" << to_string(objective)
     << " budget=" << num(plan.budget) << " spent=" << num(plan.spent)
     << " benefit=" << num(p_after - p_before) << " linear_benefit=" << num(benefit(m.g, plan))
     << " p_before=" << num(p_before) << " p_after=" << num(p_after);
  if (lambda_used) os << " lambda=" << num(*lambda_used);
  os << '\n';

  if (!xa.trace.empty()) {
    Sink t(xa.trace);
    t.stream() << "iteration,primal_residual,dual_residual,objective\n";
    for (const auto& row : trace) {
      t.stream() << row.iteration << ',' << num(row.primal_residual) << ',' << num(row.dual_residual)
                 << ',' << num(row.objective) << '\n';
    }
  }
  return 0;
}

int run_compare(const GraphArgs& ga, const ModelArgs& ma) {
  const auto loaded = load_graph(to_source(ga));
  report_load(loaded);
  const auto s = init_opinions(loaded.graph, {parse_init_kind(ma.init), ma.seed});
  const double dev = compare_models(loaded.graph, s);
  std::cout << "omstn_deviation=" << num(dev) << '\n';
  if (dev > 1e-8) {
    error_line("internal", "GODM at alpha = 1/2 deviates from OMSTN by " + num(dev));
    return kExitFailure;
  }
  return 0;
}

struct SweepArgs {
  std::string config;
  std::string budget_grid;
  std::vector<std::string> methods;
  std::vector<std::string> alphas;
  std::vector<std::uint64_t> seeds;
  std::size_t repetitions = 0;
  std::string init;
  std::string objective;
  bool timings = false;
  std::string out;
};

int run_sweep(const GraphArgs& ga, const SweepArgs& sa) {
  ExperimentConfig c;
  if (!sa.config.empty()) {
    std::ifstream in(sa.config);
    if (!in) throw InvalidArgument("cannot open config '" + sa.config + "'");
    std::stringstream text;
    text << in.rdbuf();
    c = config_from_json(text.str());
  }
  if (graph_given(ga)) c.graph = to_source(ga);
  if (!sa.budget_grid.empty()) c.budgets = parse_budget_grid(sa.budget_grid);
  if (!sa.methods.empty()) {
    c.methods.clear();
    for (const auto& m : sa.methods) c.methods.push_back(parse_method(m));
  }
  if (!sa.alphas.empty()) {
    c.alpha_modes.clear();
    for (const auto& a : sa.alphas) c.alpha_modes.push_back(parse_alpha_mode(a));
  }
  if (!sa.seeds.empty()) c.seeds = sa.seeds;
  if (sa.repetitions > 0) {
    c.seeds.resize(sa.repetitions);
    for (std::size_t k = 0; k < sa.repetitions; ++k) c.seeds[k] = k;
  }
  if (!sa.init.empty()) c.init = parse_init_kind(sa.init);
  if (!sa.objective.empty()) c.objective = parse_objective(sa.objective);
  if (sa.timings) c.record_timings = true;
  if (!sa.out.empty()) c.output = sa.out;

  const auto report = sweep_budget(c);
  Sink sink(c.output);
  write_report_csv(sink.stream(), report);
  return 0;
}

int run_gen(const GraphArgs& ga, const std::string& out) {
  if (ga.synthetic_n == 0) throw InvalidArgument("gen needs --synthetic <n>");
  const auto graph = load_graph(to_source(ga)).graph;
  Sink sink(out);
  write_edge_list(sink.stream(), graph.edge_records());
  return 0;
}

int run_validate(const GraphArgs& ga) {
  const auto loaded = load_graph(to_source(ga));
  const auto d = validate(loaded.graph);
  auto& os = std::cout;
  os << "nodes=" << d.nodes << '\n'
     << "edges=" << d.edges << '\n'
     << "negative_edges=" << d.negative_edges << '\n';
  if (d.min_weight) os << "min_weight=" << num(*d.min_weight) << '\n' << "max_weight=" << num(*d.max_weight) << '\n';
  os << "sinks=" << d.sinks << '\n'
     << "sources=" << d.sources << '\n'
     << "isolated=" << d.isolated << '\n'
     << "malformed_lines=" << loaded.malformed_lines << '\n'
     << "duplicate_records=" << loaded.duplicate_records << '\n'
     << "dropped_zero=" << loaded.dropped_zero << '\n'
     << "dropped_self_loops=" << loaded.dropped_self_loops << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized opinion dynamics on signed trust networks"};
  app.require_subcommand(1);

  GraphArgs ga;
  ModelArgs ma;
  MaximizeArgs xa;
  SweepArgs sa;
  std::string out;

  auto* solve = app.add_subcommand("solve", "equilibrium opinions and contribution indices");
  add_graph_options(solve, ga);
  add_model_options(solve, ma);
  solve->add_option("--out", out, "CSV output path (default stdout)");

  auto* maximize = app.add_subcommand("maximize", "allocate a budget of internal-opinion changes");
  add_graph_options(maximize, ga);
  add_model_options(maximize, ma);
  maximize->add_option("--budget", xa.budget, "L1 budget mu")->capture_default_str();
  maximize->add_option("--method", xa.method, "greedy | admm | rand | trust | io")->capture_default_str();
  maximize->add_option("--objective", xa.objective, "max | min")->capture_default_str();
  maximize->add_option("--lambda", xa.lambda, "ADMM: solve the penalized problem at this lambda");
  maximize->add_option("--rho", xa.rho, "ADMM penalty")->capture_default_str();
  maximize->add_option("--admm-tol", xa.admm_tol, "ADMM absolute and relative tolerance")
      ->capture_default_str();
  maximize->add_option("--admm-max-iter", xa.admm_max_iter, "ADMM iteration cap")->capture_default_str();
  maximize->add_option("--trace", xa.trace, "write the ADMM residual trace to this CSV");
  maximize->add_option("--out", xa.out, "CSV output path (default stdout)");

  auto* compare = app.add_subcommand("compare", "deviation between GODM at alpha = 1/2 and OMSTN");
  add_graph_options(compare, ga);
  compare->add_option("--init", ma.init, "uniform | normal | degree")->capture_default_str();
  compare->add_option("--seed", ma.seed, "seed for the internal opinions")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "run an experiment config over a budget grid");
  add_graph_options(sweep, ga);
  sweep->add_option("--config", sa.config, "JSON experiment config");
  sweep->add_option("--budget-grid", sa.budget_grid, "start:stop:step or a comma list");
  sweep->add_option("--methods", sa.methods, "methods to run")->delimiter(',');
  sweep->add_option("--alpha", sa.alphas, "alpha modes")->delimiter(',');
  sweep->add_option("--seeds", sa.seeds, "explicit seed list")->delimiter(',');
  sweep->add_option("--repetitions", sa.repetitions, "use seeds 0..R-1");
  sweep->add_option("--init", sa.init, "uniform | normal | degree");
  sweep->add_option("--objective", sa.objective, "max | min");
  sweep->add_flag("--timings", sa.timings, "record per-row wall time (output is no longer reproducible)");
  sweep->add_option("--out", sa.out, "CSV output path (default stdout)");

  auto* gen = app.add_subcommand("gen", "write a synthetic edge list");
  add_graph_options(gen, ga);
  gen->add_option("--out", out, "output path (default stdout)");

  auto* val = app.add_subcommand("validate", "load a graph and print diagnostics");
  add_graph_options(val, ga);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_line("usage", e.what());
    return kExitUsage;
  }

  try {
    if (*solve) return run_solve(ga, ma, out);
    if (*maximize) return run_maximize(ga, ma, xa);
    if (*compare) return run_compare(ga, ma);
    if (*sweep) return run_sweep(ga, sa);
    if (*gen) return run_gen(ga, out);
    if (*val) return run_validate(ga);
  } catch (const ParseError& e) {
    std::string msg = e.what();
    if (!e.malformed().empty()) {
      const auto& first = e.malformed().front();
      msg += " (line " + std::to_string(first.line_number) + ": " + first.reason + ")";
    }
    error_line(e.kind(), msg);
    return kExitFailure;
  } catch (const Error& e) {
    error_line(e.kind(), e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    error_line("error", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
