// Command-line front end: solve, bound, oracle-check, experiment, generate,
// dump-system and dump-mapping.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dccc/canonical.hpp"
#include "dccc/error.hpp"
#include "dccc/harness.hpp"
#include "dccc/io.hpp"
#include "dccc/markov_approx.hpp"
#include "dccc/oracle.hpp"
#include "dccc/query.hpp"
#include "dccc/search.hpp"

namespace {

using namespace dccc;

struct SearchOptions {
  std::string mode = "exhaustive";
  bool coverage = false;
  std::string lowprob;
  std::optional<int> support_size;
  std::optional<std::size_t> max_solutions;
  int threads = 1;

  SearchConfig config() const {
    SearchConfig c;
    if (mode == "heuristic") {
      c.mode = SearchMode::heuristic;
    } else if (mode != "exhaustive") {
      throw Error("unknown search mode '" + mode + "'");
    }
    c.heuristics.coverage = coverage;
    if (!lowprob.empty()) {
      const auto comma = lowprob.find(',');
      if (comma == std::string::npos) throw Error("--lowprob expects k,cap");
      c.heuristics.low_probability = true;
      c.heuristics.low_probability_rows = std::stoi(lowprob.substr(0, comma));
      c.heuristics.low_probability_budget = std::stoi(lowprob.substr(comma + 1));
    }
    if ((coverage || !lowprob.empty()) && c.mode == SearchMode::exhaustive) c.mode = SearchMode::heuristic;
    c.support_size = support_size;
    c.max_solutions = max_solutions;
    c.threads = threads;
    return c;
  }
};

void add_search_options(CLI::App* cmd, SearchOptions& s) {
  cmd->add_option("--mode", s.mode, "exhaustive | heuristic")->check(CLI::IsMember({"exhaustive", "heuristic"}));
  cmd->add_flag("--coverage", s.coverage, "skip supports leaving a positive row uncovered");
  cmd->add_option("--lowprob", s.lowprob, "k,cap: at most cap support columns on the k smallest rows");
  cmd->add_option("--support-size", s.support_size, "support size (default: system rank)");
  cmd->add_option("--max-solutions", s.max_solutions, "stop after this many vertices per exogenous variable");
  cmd->add_option("--threads", s.threads, "worker threads for the support search");
}

struct Inputs {
  std::string model;
  std::string evidence;
  std::string regime = "s-o";
  bool exact_merge = false;
};

void add_input_options(CLI::App* cmd, Inputs& in, bool with_regime = true) {
  cmd->add_option("--model", in.model, "model JSON")->required();
  cmd->add_option("--evidence", in.evidence, "evidence JSON")->required();
  if (with_regime)
    cmd->add_option("--regime", in.regime, "s-o | s-oe | s-e | markov | mm-o | ms-o")
        ->check(CLI::IsMember({"s-o", "s-oe", "s-e", "markov", "markovian", "mm-o", "ms-o"}));
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

bool is_approximation(const std::string& regime) { return regime == "mm-o" || regime == "ms-o"; }

/// Solutions and the model they are expressed over.
ApproachSolution solve_inputs(const Inputs& in, const SearchConfig& config) {
  const auto model = parse_model(read_text_file(in.model)).without_priors();
  const auto evidence = parse_evidence(read_text_file(in.evidence), model);
  if (in.exact_merge) {
    // Confounded variables go through the restricted merged search and are
    // mapped back; the remaining ones are solved directly.
    ApproachSolution out{model, {}};
    for (const auto& u : model.exogenous_ids()) {
      if (model.children_of(u).size() > 1)
        out.solutions.emplace(u, solve_via_merge(model, evidence, u, config));
      else
        out.solutions.emplace(u, search(build_system(model, evidence, u, Regime::s_o), config));
    }
    return out;
  }
  if (is_approximation(in.regime)) return solve_approach(model, evidence, parse_approach(in.regime), config);
  return {model, solve_credal(model, evidence, parse_regime(in.regime), config)};
}

std::string regime_name(const Inputs& in) { return in.exact_merge ? "s-o (merged)" : in.regime; }

int run_oracle_check(const Inputs& in, const SearchConfig& config, const std::string& query_text) {
  if (is_approximation(in.regime) || in.exact_merge)
    throw Error("oracle-check compares exact regimes only (s-o, s-oe, s-e, markov)");
  const auto model = parse_model(read_text_file(in.model)).without_priors();
  const auto evidence = parse_evidence(read_text_file(in.evidence), model);
  const auto regime = parse_regime(in.regime);
  const auto solutions = solve_credal(model, evidence, regime, config);

  std::vector<std::string> free;
  for (const auto& [id, set] : solutions)
    if (set.points.size() != 1) free.push_back(id);
  if (free.size() > 1)
    throw Error("oracle-check needs every credal set but one to be a single vertex; " + std::to_string(free.size()) +
                " are not");
  const std::string target = free.empty() ? solutions.begin()->first : free.front();

  const auto query = Query::parse(query_text);
  const auto interval = bound_query(solutions, model, query);
  const auto system = build_system(model, evidence, target, regime);
  std::map<std::string, SolutionSet> others = solutions;
  others.erase(target);
  const auto functional = query_functional(model, query, system, others);
  const double lo = lp_bound(system, functional, Sense::minimize);
  const double hi = lp_bound(system, functional, Sense::maximize);
  const bool ok = std::abs(lo - interval.lower) <= 1e-7 && std::abs(hi - interval.upper) <= 1e-7;

  std::cout << (ok ? "PASS" : "FAIL") << " " << query.str() << " regime=" << in.regime << " over " << target
            << "\n  dccc [" << format_double(interval.lower) << ", " << format_double(interval.upper) << "]"
            << (interval.complete ? "" : " (incomplete)") << "\n  lp   [" << format_double(lo) << ", "
            << format_double(hi) << "]\n";
  return ok ? 0 : 1;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds counterfactual queries by enumerating exogenous credal-set vertices"};
  app.require_subcommand(1);

  Inputs in;
  SearchOptions search_opts;
  std::string out;
  std::string query_text;

  auto* solve = app.add_subcommand("solve", "enumerate the vertices of every exogenous credal set");
  add_input_options(solve, in);
  add_search_options(solve, search_opts);
  solve->add_flag("--exact-merge", in.exact_merge,
                  "solve confounded variables through the merged model with forbidden states removed");
  solve->add_option("--out", out, "output JSON (default stdout)");

  auto* bound = app.add_subcommand("bound", "interval of a query over the credal sets");
  add_input_options(bound, in);
  add_search_options(bound, search_opts);
  bound->add_flag("--exact-merge", in.exact_merge,
                  "solve confounded variables through the merged model with forbidden states removed");
  bound->add_option("--query", query_text, "pns:C:E[:x,x',y,y'] or do:C:E[:x,y]")->required();
  bound->add_option("--out", out, "output JSON (default stdout)");

  auto* oracle = app.add_subcommand("oracle-check", "compare the vertex interval with exact LP bounds");
  add_input_options(oracle, in);
  add_search_options(oracle, search_opts);
  oracle->add_option("--query", query_text, "query to check")->required();

  ExperimentConfig exp;
  std::string regimes = "s-o,s-oe,s-e,mm-o,ms-o";
  std::string queries = "pns:X:Y1,pns:X:Y2,pns:Y1:Y2";
  std::string exp_out = "results";
  auto* experiment = app.add_subcommand("experiment", "random-instance experiment on the confounded chain");
  experiment->add_option("--n", exp.n_models, "number of instances")->check(CLI::PositiveNumber);
  experiment->add_option("--seed", exp.seed, "experiment seed");
  experiment->add_option("--regimes", regimes, "comma-separated approaches");
  experiment->add_option("--queries", queries, "comma-separated queries");
  experiment->add_option("--out", exp_out, "output directory");
  experiment->add_option("--threads", exp.threads, "instances solved in parallel");
  experiment->add_flag("--raw-tables", exp.raw_tables, "draw evidence slices independently instead of from an SCM");

  std::uint64_t gen_seed = 7;
  bool gen_raw = false;
  std::string gen_model = "model.json", gen_evidence = "evidence.json";
  auto* generate = app.add_subcommand("generate", "write one random chain instance");
  generate->add_option("--seed", gen_seed, "instance seed");
  generate->add_option("--model-out", gen_model, "model JSON (includes the generating priors)");
  generate->add_option("--evidence-out", gen_evidence, "evidence JSON");
  generate->add_flag("--raw-tables", gen_raw, "draw evidence slices independently");

  std::string exogenous;
  auto* dump_system = app.add_subcommand("dump-system", "constraint system of one exogenous variable as CSV");
  add_input_options(dump_system, in);
  dump_system->add_option("--exogenous", exogenous, "exogenous variable id")->required();
  dump_system->add_option("--out", out, "output CSV (default stdout)");

  std::string mapping_model;
  auto* dump_mapping = app.add_subcommand("dump-mapping", "merged-state to original-state correspondence as CSV");
  dump_mapping->add_option("--model", mapping_model, "model JSON")->required();
  dump_mapping->add_option("--exogenous", exogenous, "confounding exogenous variable id")->required();
  dump_mapping->add_option("--out", out, "output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = search_opts.config();
    if (*solve) {
      const auto solved = solve_inputs(in, config);
      emit(out, dump_solutions(solved.solutions, regime_name(in)));
    } else if (*bound) {
      const auto query = Query::parse(query_text);
      const auto solved = solve_inputs(in, config);
      const auto interval = bound_query(solved.solutions, solved.model, query);
      emit(out, dump_interval(interval, query, regime_name(in), solved.solutions));
    } else if (*oracle) {
      return run_oracle_check(in, config, query_text);
    } else if (*experiment) {
      exp.approaches.clear();
      for (const auto& r : split(regimes)) exp.approaches.push_back(parse_approach(r));
      for (const auto& q : split(queries)) exp.queries.push_back(Query::parse(q));
      exp.output_dir = exp_out;
      const auto rows = run_experiment(exp);
      std::size_t failed = 0;
      for (const auto& row : rows) failed += row.status != RowStatus::ok;
      std::cerr << rows.size() << " rows written to " << exp_out << " (" << failed << " not ok)\n";
    } else if (*generate) {
      const auto inst = generate_instance(gen_seed, gen_raw);
      write_text_file(gen_model, dump_model(inst.full));
      write_text_file(gen_evidence, dump_evidence(inst.evidence));
    } else if (*dump_system) {
      if (is_approximation(in.regime)) throw Error("dump-system takes an exact regime");
      const auto model = parse_model(read_text_file(in.model)).without_priors();
      const auto evidence = parse_evidence(read_text_file(in.evidence), model);
      std::ostringstream csv;
      build_system(model, evidence, exogenous, parse_regime(in.regime)).write_csv(csv);
      emit(out, csv.str());
    } else if (*dump_mapping) {
      const auto model = parse_model(read_text_file(mapping_model)).without_priors();
      const auto [merged, spec] = endogenous_merge(model, exogenous);
      const auto mapping =
          build_state_mapping(extract_domain(model, exogenous), extract_domain(merged, spec.merged_exogenous_id));
      std::ostringstream csv;
      csv << "merged_state,state\n";
      for (int s = 0; s < merged.variable(spec.merged_exogenous_id).domain_size; ++s) {
        const auto it = mapping.groups.find(s);
        if (it == mapping.groups.end()) {
          csv << s << ",\n";
          continue;
        }
        for (int member : it->second) csv << s << "," << member << "\n";
      }
      emit(out, csv.str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
