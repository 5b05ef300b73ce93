#include "godm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "godm/error.hpp"

namespace godm {

using nlohmann::json;

namespace {

constexpr double kBenefitCrossCheckTol = 1e-6;

std::string normalize_to_string(const NormalizeScheme& n) {
  switch (n.kind) {
    case NormalizeScheme::Kind::DivideByMaxAbs: return "maxabs";
    case NormalizeScheme::Kind::Identity: return "identity";
    case NormalizeScheme::Kind::DivideByConstant: {
      std::ostringstream os;
      os << "const:" << std::setprecision(17) << n.constant;
      return os.str();
    }
  }
  return "maxabs";
}

NormalizeScheme parse_normalize(const std::string& text) {
  if (text == "maxabs") return NormalizeScheme::max_abs();
  if (text == "identity") return NormalizeScheme::identity();
  if (text.rfind("const:", 0) == 0) {
    try {
      return NormalizeScheme::divide_by(std::stod(text.substr(6)));
    } catch (const std::logic_error&) {
    }
  }
  throw InvalidArgument("normalization must be maxabs, identity or const:<c>, got '" + text + "'");
}

std::string dedupe_to_string(DedupePolicy p) {
  switch (p) {
    case DedupePolicy::KeepLast: return "last";
    case DedupePolicy::KeepFirst: return "first";
    case DedupePolicy::MeanWeight: return "mean";
  }
  return "last";
}

DedupePolicy parse_dedupe(const std::string& text) {
  if (text == "last") return DedupePolicy::KeepLast;
  if (text == "first") return DedupePolicy::KeepFirst;
  if (text == "mean") return DedupePolicy::MeanWeight;
  throw InvalidArgument("dedupe policy must be last, first or mean, got '" + text + "'");
}

std::string graph_name(const GraphSource& source) {
  if (source.path) return std::filesystem::path(*source.path).filename().string();
  const auto& syn = *source.synthetic;
  std::ostringstream os;
  os << "synthetic(n=" << syn.n << ";p=" << syn.edge_prob << ";neg=" << syn.negative_prob
     << ";seed=" << syn.seed << ")";
  return os.str();
}

// describe() rounds for display; the config keeps every digit so it round-trips.
std::string alpha_to_config(const AlphaMode& mode) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  if (const auto* f = std::get_if<FixedAlpha>(&mode)) {
    os << "fixed:" << f->value;
  } else {
    os << "adjusted:" << std::get<AdjustedAlpha>(mode).q;
  }
  return os.str();
}

PageRankOptions pagerank_of(const std::vector<AlphaMode>& modes) {
  for (const auto& m : modes) {
    if (const auto* adj = std::get_if<AdjustedAlpha>(&m)) return adj->pagerank;
  }
  return {};
}

// CSV field quoting for labels that may contain the delimiter.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

json config_json(const ExperimentConfig& c, bool include_output) {
  json j;
  json graph;
  if (c.graph.path) graph["path"] = *c.graph.path;
  if (c.graph.synthetic) {
    const auto& s = *c.graph.synthetic;
    graph["synthetic"] = {{"n", s.n},
                          {"p", s.edge_prob},
                          {"negative", s.negative_prob},
                          {"weights", s.weights == WeightDistribution::Unit ? "unit" : "uniform"},
                          {"seed", s.seed}};
  }
  const auto& f = c.graph.format;
  graph["format"] = {{"delimiter", std::string(1, f.delimiter)},
                     {"src", f.src_column},
                     {"dst", f.dst_column},
                     {"weight", f.weight_column},
                     {"timestamp", f.timestamp_column ? json(*f.timestamp_column) : json(nullptr)},
                     {"header", f.has_header},
                     {"comment", f.comment_prefix}};
  graph["normalize"] = normalize_to_string(c.graph.normalize);
  graph["dedupe"] = dedupe_to_string(c.graph.dedupe);
  j["graph"] = graph;

  j["init"] = to_string(c.init);
  j["seeds"] = c.seeds;
  json alphas = json::array();
  for (const auto& m : c.alpha_modes) alphas.push_back(alpha_to_config(m));
  j["alpha"] = alphas;
  j["alpha_clamp"] = c.alpha_clamp;
  const auto pr = pagerank_of(c.alpha_modes);
  j["pagerank"] = {{"damping", pr.damping}, {"tol", pr.tol}, {"max_iter", pr.max_iter}};
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["budgets"] = c.budgets;
  j["objective"] = to_string(c.objective);
  j["solve_tol"] = c.solve_tol;
  j["admm"] = {{"rho", c.admm.rho},
               {"tol_abs", c.admm.tol_abs},
               {"tol_rel", c.admm.tol_rel},
               {"max_iter", c.admm.max_iter}};
  j["timings"] = c.record_timings;
  if (include_output) j["output"] = c.output;
  return j;
}

void append_row_fields(std::ostream& os, const ExperimentReport& report) {
  os << csv_field(report.fingerprint) << ',' << csv_field(report.graph_name) << ','
     << to_string(report.init) << ',' << to_string(report.objective) << ',';
}

}  // namespace

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::Uniform: return "uniform";
    case InitKind::Normal: return "normal";
    case InitKind::DegreeProportional: return "degree";
  }
  return "uniform";
}

InitKind parse_init_kind(const std::string& text) {
  if (text == "uniform") return InitKind::Uniform;
  if (text == "normal") return InitKind::Normal;
  if (text == "degree") return InitKind::DegreeProportional;
  throw InvalidArgument("init scheme must be uniform, normal or degree, got '" + text + "'");
}

LoadedGraph load_graph(const GraphSource& source) {
  if (source.path.has_value() == source.synthetic.has_value()) {
    throw InvalidArgument("graph source needs exactly one of a file path or a synthetic spec");
  }
  LoadedGraph loaded;
  if (source.synthetic) {
    loaded.graph = gen_synthetic(*source.synthetic);
    return loaded;
  }
  std::ifstream in(*source.path);
  if (!in) throw InvalidArgument("cannot open edge list '" + *source.path + "'");
  auto report = parse_edge_list(in, source.format);
  loaded.malformed_lines = report.malformed.size();
  auto unique = dedupe_edges(report.records, source.dedupe);
  loaded.duplicate_records = report.records.size() - unique.size();
  auto normalized = normalize_weights(unique, source.normalize);
  loaded.dropped_zero = normalized.dropped_zero;
  auto built = build_graph(normalized.records);
  loaded.dropped_self_loops = built.dropped_self_loops;
  loaded.graph = std::move(built.graph);
  return loaded;
}

void validate_config(const ExperimentConfig& c) {
  if (c.graph.path.has_value() == c.graph.synthetic.has_value()) {
    throw InvalidArgument("config needs exactly one of graph.path or graph.synthetic");
  }
  if (c.seeds.empty()) throw InvalidArgument("config needs at least one seed");
  if (c.alpha_modes.empty()) throw InvalidArgument("config needs at least one alpha mode");
  if (c.methods.empty()) throw InvalidArgument("config needs at least one method");
  if (c.budgets.empty()) throw InvalidArgument("config needs at least one budget");
  for (double b : c.budgets) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidArgument("budgets must be nonnegative");
  }
  if (!(c.solve_tol > 0.0)) throw InvalidArgument("solve_tol must be positive");
}

std::string config_to_json(const ExperimentConfig& config) {
  return config_json(config, true).dump();
}

ExperimentConfig config_from_json(const std::string& text) {
  ExperimentConfig c;
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (j.contains("graph")) {
      const auto& g = j.at("graph");
      if (g.contains("path")) c.graph.path = g.at("path").get<std::string>();
      if (g.contains("synthetic")) {
        const auto& s = g.at("synthetic");
        SyntheticSpec spec;
        spec.n = s.value("n", spec.n);
        spec.edge_prob = s.value("p", spec.edge_prob);
        spec.negative_prob = s.value("negative", spec.negative_prob);
        const auto w = s.value("weights", std::string("uniform"));
        if (w != "uniform" && w != "unit") throw InvalidArgument("weights must be uniform or unit");
        spec.weights = w == "unit" ? WeightDistribution::Unit : WeightDistribution::Uniform;
        spec.seed = s.value("seed", spec.seed);
        c.graph.synthetic = spec;
      }
      if (g.contains("format")) {
        const auto& f = g.at("format");
        auto& fmt = c.graph.format;
        const auto delim = f.value("delimiter", std::string(","));
        if (delim.size() != 1) throw InvalidArgument("delimiter must be a single character");
        fmt.delimiter = delim == "\\t" ? '\t' : delim[0];
        fmt.src_column = f.value("src", fmt.src_column);
        fmt.dst_column = f.value("dst", fmt.dst_column);
        fmt.weight_column = f.value("weight", fmt.weight_column);
        if (f.contains("timestamp")) {
          fmt.timestamp_column = f.at("timestamp").is_null()
                                     ? std::nullopt
                                     : std::optional(f.at("timestamp").get<std::size_t>());
        }
        fmt.has_header = f.value("header", fmt.has_header);
        fmt.comment_prefix = f.value("comment", fmt.comment_prefix);
      }
      if (g.contains("normalize")) c.graph.normalize = parse_normalize(g.at("normalize"));
      if (g.contains("dedupe")) c.graph.dedupe = parse_dedupe(g.at("dedupe"));
    }
    if (j.contains("init")) c.init = parse_init_kind(j.at("init"));
    if (j.contains("seeds")) {
      c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } else if (j.contains("repetitions")) {
      // R repetitions means seeds 0..R-1
      const auto r = j.at("repetitions").get<std::uint64_t>();
      c.seeds.resize(r);
      for (std::uint64_t k = 0; k < r; ++k) c.seeds[k] = k;
    }
    PageRankOptions pr;
    if (j.contains("pagerank")) {
      const auto& p = j.at("pagerank");
      pr.damping = p.value("damping", pr.damping);
      pr.tol = p.value("tol", pr.tol);
      pr.max_iter = p.value("max_iter", pr.max_iter);
    }
    if (j.contains("alpha")) {
      c.alpha_modes.clear();
      for (const auto& a : j.at("alpha")) c.alpha_modes.push_back(parse_alpha_mode(a, pr));
    } else {
      c.alpha_modes = {AdjustedAlpha{0.5, pr}};
    }
    c.alpha_clamp = j.value("alpha_clamp", c.alpha_clamp);
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m));
    }
    if (j.contains("budgets")) c.budgets = j.at("budgets").get<std::vector<double>>();
    if (j.contains("budget_grid")) c.budgets = parse_budget_grid(j.at("budget_grid"));
    if (j.contains("objective")) c.objective = parse_objective(j.at("objective"));
    c.solve_tol = j.value("solve_tol", c.solve_tol);
    if (j.contains("admm")) {
      const auto& a = j.at("admm");
      c.admm.rho = a.value("rho", c.admm.rho);
      c.admm.tol_abs = a.value("tol_abs", c.admm.tol_abs);
      c.admm.tol_rel = a.value("tol_rel", c.admm.tol_rel);
      c.admm.max_iter = a.value("max_iter", c.admm.max_iter);
    }
    c.record_timings = j.value("timings", c.record_timings);
    c.output = j.value("output", c.output);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad config field: ") + e.what());
  }
  return c;
}

std::string config_fingerprint(const ExperimentConfig& config) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0')
     << fnv1a(config_json(config, false).dump());
  return os.str();
}

std::vector<double> parse_budget_grid(const std::string& text) {
  auto to_double = [&](const std::string& t) {
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::logic_error&) {
      throw InvalidArgument("cannot parse budget '" + t + "' in '" + text + "'");
    }
  };
  std::vector<double> grid;
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    const double start = to_double(text.substr(0, c1));
    const double stop = to_double(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = to_double(text.substr(c2 + 1));
    if (!(step > 0.0) || stop < start) throw InvalidArgument("budget grid needs step > 0, stop >= start");
    for (std::size_t k = 0;; ++k) {
      const double v = start + static_cast<double>(k) * step;
      if (v > stop + 1e-9) break;
      grid.push_back(v);
    }
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(to_double(item));
  }
  if (grid.empty()) throw InvalidArgument("empty budget grid");
  return grid;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const LoadedGraph loaded = load_graph(config.graph);
  const SignedDigraph& graph = loaded.graph;
  if (graph.node_count() == 0) throw InvalidArgument("graph has no nodes");

  ExperimentReport report;
  report.fingerprint = config_fingerprint(config);
  report.graph_name = graph_name(config.graph);
  report.init = config.init;
  report.objective = config.objective;

  using Clock = std::chrono::steady_clock;
  for (const auto& mode : config.alpha_modes) {
    const std::string alpha_name = describe(mode);
    const auto confidence = compute_confidence(graph, mode, config.alpha_clamp);
    const GodmSystem system(graph, confidence);
    const EquilibriumSolver solver(system);
    const auto g = solver.contribution_index(config.solve_tol);

    for (std::uint64_t seed : config.seeds) {
      const auto s = init_opinions(graph, InitScheme{config.init, seed});
      const double p_before = overall_opinion(solver.solve(s, config.solve_tol).z_star);

      for (Method method : config.methods) {
        for (double budget : config.budgets) {
          const auto start = Clock::now();
          AllocationPlan plan;
          switch (method) {
            case Method::Greedy:
              plan = greedy_allocate(g, s, budget, config.objective);
              break;
            case Method::Admm:
              plan = admm_solve_budget(g, s, budget, config.objective, config.admm).plan;
              break;
            case Method::Rand:
            case Method::Trust:
            case Method::IO: {
              RankMethod rank = OpinionOrder{};
              if (method == Method::Rand) rank = RandomOrder{seed ^ 0x9E3779B97F4A7C15ULL};
              if (method == Method::Trust) rank = TrustOrder{};
              const auto order = rank_nodes(graph, s, rank);
              plan = baseline_allocate(order, s, budget, method);
              break;
            }
          }
          std::vector<double> s_after(s);
          for (std::size_t i = 0; i < s.size(); ++i) {
            s_after[i] = std::clamp(s[i] + plan.delta_s[i], -1.0, 1.0);
          }
          const double p_after = overall_opinion(solver.solve(s_after, config.solve_tol).z_star);
          const auto elapsed = std::chrono::duration<double, std::milli>(Clock::now() - start);

          ExperimentRow row;
          row.alpha = alpha_name;
          row.seed = seed;
          row.method = method;
          row.budget = budget;
          row.spent = plan.spent;
          row.p_before = p_before;
          row.p_after = p_after;
          row.benefit = p_after - p_before;
          row.linear_benefit = benefit(g, plan);
          row.unit_benefit = budget > 0.0 ? row.benefit / budget : 0.0;
          if (config.record_timings) row.wall_ms = elapsed.count();
          if (!(std::abs(row.benefit - row.linear_benefit) <= kBenefitCrossCheckTol)) {
            std::ostringstream os;
            os << "benefit cross-check failed for " << to_string(method) << " seed " << seed
               << " budget " << budget << ": re-solve " << row.benefit << " vs g.ds "
               << row.linear_benefit;
            throw InternalError(os.str());
          }
          report.rows.push_back(std::move(row));
        }
      }
    }
  }
  report.aggregates = aggregate(report.rows);
  return report;
}

ExperimentReport sweep_budget(const ExperimentConfig& config) {
  if (config.budgets.empty()) throw InvalidArgument("budget grid is empty");
  for (std::size_t k = 1; k < config.budgets.size(); ++k) {
    if (!(config.budgets[k] > config.budgets[k - 1])) {
      throw InvalidArgument("budget grid must be strictly increasing");
    }
  }
  return run_experiment(config);
}

std::vector<AggregateRow> aggregate(std::span<const ExperimentRow> rows) {
  std::vector<AggregateRow> out;
  std::vector<std::vector<const ExperimentRow*>> members;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const AggregateRow& a) {
      return a.alpha == r.alpha && a.method == r.method && a.budget == r.budget;
    });
    if (it == out.end()) {
      AggregateRow a;
      a.alpha = r.alpha;
      a.method = r.method;
      a.budget = r.budget;
      out.push_back(a);
      members.emplace_back();
      it = out.end() - 1;
    }
    members[static_cast<std::size_t>(it - out.begin())].push_back(&r);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& a = out[k];
    const auto& group = members[k];
    a.count = group.size();
    const double cnt = static_cast<double>(a.count);
    for (const auto* r : group) {
      a.mean_benefit += r->benefit / cnt;
      a.mean_p_before += r->p_before / cnt;
      a.mean_p_after += r->p_after / cnt;
      a.mean_unit_benefit += r->unit_benefit / cnt;
    }
    if (a.count > 1) {
      double ss = 0.0;
      for (const auto* r : group) ss += (r->benefit - a.mean_benefit) * (r->benefit - a.mean_benefit);
      a.std_benefit = std::sqrt(ss / (cnt - 1.0));
    }
  }
  return out;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "record,fingerprint,graph,init,objective,alpha,method,seed,budget,spent,p_before,"
         "p_after,benefit,linear_benefit,unit_benefit,benefit_std,count,wall_ms\n";
  for (const auto& r : report.rows) {
    out << "cell,";
    append_row_fields(out, report);
    out << r.alpha << ',' << to_string(r.method) << ',' << r.seed << ',' << r.budget << ','
        << r.spent << ',' << r.p_before << ',' << r.p_after << ',' << r.benefit << ','
        << r.linear_benefit << ',' << r.unit_benefit << ",,1,";
    if (r.wall_ms) out << *r.wall_ms;
    out << '\n';
  }
  for (const auto& a : report.aggregates) {
    out << "mean,";
    append_row_fields(out, report);
    out << a.alpha << ',' << to_string(a.method) << ",," << a.budget << ",," << a.mean_p_before
        << ',' << a.mean_p_after << ',' << a.mean_benefit << ",," << a.mean_unit_benefit << ','
        << a.std_benefit << ',' << a.count << ",\n";
  }
  out.precision(old_precision);
}

double compare_models(const SignedDigraph& graph, std::span<const double> s) {
  const std::size_t n = graph.node_count();
  if (s.size() != n) throw InvalidArgument("opinion vector length does not match graph");
  const GodmSystem system(graph, std::vector<double>(n, 0.5));
  const auto godm = equilibrium_direct(system, s).z_star;

  std::vector<double> z(s.begin(), s.end()), next(n);
  constexpr std::size_t kMaxSweeps = 1000000;
  for (std::size_t k = 0; k < kMaxSweeps; ++k) {
    double change = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      double num = s[i], den = 1.0;
      for (const auto& a : graph.successors(i)) {
        num += a.weight * z[a.node];
        den += std::abs(a.weight);
      }
      next[i] = num / den;
      change = std::max(change, std::abs(next[i] - z[i]));
    }
    z.swap(next);
    if (change < 1e-14) break;
    if (k + 1 == kMaxSweeps) throw ConvergenceError("OMSTN fixed point did not converge", change, k + 1);
  }
  double dev = 0.0;
  for (NodeId i = 0; i < n; ++i) dev = std::max(dev, std::abs(godm[i] - z[i]));
  return dev;
}

}  // namespace godm
