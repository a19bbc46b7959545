#include "dccc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "dccc/error.hpp"
#include "dccc/io.hpp"
#include "dccc/markov_approx.hpp"

namespace dccc {

namespace {

constexpr double kContainmentTolerance = 1e-9;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> out(n);
  double total = 0.0;
  for (double& x : out) total += (x = gamma(rng));
  for (double& x : out) x /= total;
  return out;
}

ConditionalTable raw_table(std::mt19937_64& rng, std::vector<std::string> targets, std::vector<int> target_sizes,
                           std::vector<std::string> given, std::vector<int> given_sizes) {
  ConditionalTable t{std::move(targets), std::move(given), std::move(target_sizes), std::move(given_sizes), {}};
  for (std::size_t g = 0; g < t.given_configurations(); ++g) {
    const auto slice = dirichlet(rng, t.target_configurations());
    t.values.insert(t.values.end(), slice.begin(), slice.end());
  }
  return t;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::string> confounders(const PartialScm& model) {
  std::vector<std::string> out;
  for (const auto& u : model.exogenous_ids())
    if (model.children_of(u).size() > 1) out.push_back(u);
  return out;
}

struct RowKey {
  std::size_t model_index;
  Approach approach;
  std::string query;
  bool operator<(const RowKey& o) const {
    return std::tie(model_index, approach, query) < std::tie(o.model_index, o.approach, o.query);
  }
};

std::map<RowKey, const ExperimentRow*> index_ok(const std::vector<ExperimentRow>& rows) {
  std::map<RowKey, const ExperimentRow*> out;
  for (const auto& r : rows)
    if (r.status == RowStatus::ok) out[{r.model_index, r.approach, r.query}] = &r;
  return out;
}

// Queries and approaches in first-seen order.
template <typename T, typename F>
std::vector<T> distinct(const std::vector<ExperimentRow>& rows, F field) {
  std::vector<T> out;
  for (const auto& r : rows)
    if (std::find(out.begin(), out.end(), field(r)) == out.end()) out.push_back(field(r));
  return out;
}

std::string percent(std::size_t k, std::size_t n) {
  if (n == 0) return "";
  return format_double(100.0 * static_cast<double>(k) / static_cast<double>(n));
}

}  // namespace

Approach parse_approach(const std::string& text) {
  if (text == "s-o") return Approach::s_o;
  if (text == "s-oe") return Approach::s_oe;
  if (text == "s-e") return Approach::s_e;
  if (text == "mm-o") return Approach::mm_o;
  if (text == "ms-o") return Approach::ms_o;
  throw Error("unknown approach '" + text + "'");
}

const char* to_string(Approach approach) {
  switch (approach) {
    case Approach::s_o: return "s-o";
    case Approach::s_oe: return "s-oe";
    case Approach::s_e: return "s-e";
    case Approach::mm_o: return "mm-o";
    case Approach::ms_o: return "ms-o";
  }
  return "unknown";
}

const char* to_string(RowStatus status) {
  switch (status) {
    case RowStatus::ok: return "ok";
    case RowStatus::not_computable: return "not_computable";
    case RowStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

PartialScm chain_skeleton() {
  std::vector<Variable> variables{
      {"X", VariableKind::endogenous, 2, {}, 0, {}},
      {"Y1", VariableKind::endogenous, 2, {}, 0, {}},
      {"Y2", VariableKind::endogenous, 2, {}, 0, {}},
      {"U0", VariableKind::exogenous, 0, {}, 0, {}},
      {"U", VariableKind::exogenous, 0, {}, 0, {}},
  };
  std::vector<StructuralEquation> equations{
      {"X", {"U0"}, {}},
      {"Y1", {"X", "U"}, {}},
      {"Y2", {"Y1", "U"}, {}},
  };
  return PartialScm(std::move(variables), std::move(equations));
}

std::uint64_t instance_seed(std::uint64_t seed, std::size_t index) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(index));
}

Instance generate_instance(std::uint64_t seed, bool raw_tables) {
  std::mt19937_64 rng(seed);
  const auto skeleton = chain_skeleton();
  if (raw_tables) {
    Instance inst{skeleton, {}};
    inst.evidence.observational.push_back(raw_table(rng, {"X"}, {2}, {}, {}));
    inst.evidence.observational.push_back(raw_table(rng, {"Y1", "Y2"}, {2, 2}, {"X"}, {2}));
    inst.evidence.experimental.push_back(raw_table(rng, {"Y1"}, {2}, {"X"}, {2}));
    inst.evidence.experimental.push_back(raw_table(rng, {"Y2"}, {2}, {"Y1"}, {2}));
    return inst;
  }
  Priors priors;
  priors["U0"] = dirichlet(rng, static_cast<std::size_t>(skeleton.variable("U0").domain_size));
  priors["U"] = dirichlet(rng, static_cast<std::size_t>(skeleton.variable("U").domain_size));
  Instance inst{skeleton.with_priors(std::move(priors)), {}};
  const std::vector<std::string> x{"X"}, y1{"Y1"}, y2{"Y2"}, ys{"Y1", "Y2"}, none;
  inst.evidence.observational.push_back(observational_table(inst.full, x, none));
  inst.evidence.observational.push_back(observational_table(inst.full, ys, x));
  inst.evidence.experimental.push_back(experimental_table(inst.full, y1, x));
  inst.evidence.experimental.push_back(experimental_table(inst.full, y2, y1));
  return inst;
}

ApproachSolution solve_approach(const PartialScm& skeleton, const Evidence& evidence, Approach approach,
                                const SearchConfig& config) {
  switch (approach) {
    case Approach::s_o: return {skeleton, solve_credal(skeleton, evidence, Regime::s_o, config)};
    case Approach::s_oe: return {skeleton, solve_credal(skeleton, evidence, Regime::s_oe, config)};
    case Approach::s_e: return {skeleton, solve_credal(skeleton, evidence, Regime::s_e, config)};
    case Approach::mm_o: {
      PartialScm model = skeleton;
      Evidence ev = evidence;
      for (const auto& u : confounders(skeleton)) {
        if (!model.has_variable(u)) continue;
        auto [merged, spec] = endogenous_merge(model, u);
        ev = merge_evidence(ev, spec);
        model = std::move(merged);
      }
      auto solutions = solve_credal(model, ev, Regime::markovian, config);
      return {std::move(model), std::move(solutions)};
    }
    case Approach::ms_o: {
      PartialScm model = skeleton;
      for (const auto& u : confounders(skeleton)) model = exogenous_split(model, u);
      Evidence ev;
      ev.observational = evidence.observational;
      auto solutions = solve_credal(model, ev, Regime::markovian, config);
      return {std::move(model), std::move(solutions)};
    }
  }
  throw Error("unknown approach");
}

std::vector<ExperimentRow> run_instance(const Instance& instance, std::size_t model_index,
                                        const ExperimentConfig& config) {
  const auto skeleton = instance.full.without_priors();
  std::vector<ExperimentRow> rows;
  for (const auto approach : config.approaches) {
    const auto start = std::chrono::steady_clock::now();
    const auto solved = solve_approach(skeleton, instance.evidence, approach, config.search);
    const double solve_ms = elapsed_ms(start);
    std::size_t vertices = 0;
    bool complete = true;
    for (const auto& [id, set] : solved.solutions) {
      vertices += set.points.size();
      complete = complete && set.complete;
    }
    for (const auto& query : config.queries) {
      ExperimentRow row;
      row.model_index = model_index;
      row.approach = approach;
      row.query = query.str();
      row.n_vertices = vertices;
      row.complete = complete;
      const auto bound_start = std::chrono::steady_clock::now();
      try {
        const auto interval = bound_query(solved.solutions, solved.model, query);
        row.lower = interval.lower;
        row.upper = interval.upper;
      } catch (const NotComputable&) {
        row.status = RowStatus::not_computable;
      } catch (const InfeasibleEvidence&) {
        row.status = RowStatus::infeasible;
      }
      row.wallclock_ms = solve_ms + elapsed_ms(bound_start);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  if (config.n_models < 1) throw Error("experiment needs at least one model");
  if (config.queries.empty()) throw Error("experiment needs at least one query");
  std::vector<std::vector<ExperimentRow>> per_instance(config.n_models);
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(config.n_models);
  auto worker = [&] {
    for (std::size_t i = next++; i < config.n_models; i = next++) {
      try {
        per_instance[i] = run_instance(generate_instance(instance_seed(config.seed, i), config.raw_tables), i, config);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, config.threads));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, config.n_models); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < config.n_models; ++i)
    if (!errors[i].empty()) throw Error("instance " + std::to_string(i) + ": " + errors[i]);

  std::vector<ExperimentRow> rows;
  for (auto& part : per_instance) rows.insert(rows.end(), part.begin(), part.end());
  if (config.output_dir) write_experiment(rows, *config.output_dir);
  return rows;
}

Containment compare_intervals(double al, double au, double bl, double bu) {
  const bool a_in_b = al >= bl - kContainmentTolerance && au <= bu + kContainmentTolerance;
  const bool b_in_a = bl >= al - kContainmentTolerance && bu <= au + kContainmentTolerance;
  if (a_in_b && b_in_a) return Containment::equal;
  if (a_in_b) return Containment::a_in_b;
  if (b_in_a) return Containment::b_in_a;
  return Containment::none;
}

std::string rows_csv(const std::vector<ExperimentRow>& rows, bool with_wallclock) {
  std::ostringstream out;
  out << "model_index,regime,query,lower,upper,length" << (with_wallclock ? ",wallclock_ms" : "")
      << ",n_vertices,complete,status\n";
  for (const auto& r : rows) {
    out << r.model_index << ',' << to_string(r.approach) << ',' << r.query << ',';
    if (r.status == RowStatus::ok)
      out << format_double(r.lower) << ',' << format_double(r.upper) << ',' << format_double(r.upper - r.lower);
    else
      out << ",,";
    if (with_wallclock) out << ',' << format_double(std::round(r.wallclock_ms * 1000.0) / 1000.0);
    out << ',' << r.n_vertices << ',' << (r.complete ? "true" : "false") << ',' << to_string(r.status) << '\n';
  }
  return out.str();
}

std::string summary_lengths_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << "regime,query,n,mean_length,mean_lower,mean_upper\n";
  const auto approaches = distinct<Approach>(rows, [](const ExperimentRow& r) { return r.approach; });
  const auto queries = distinct<std::string>(rows, [](const ExperimentRow& r) { return r.query; });
  for (const auto a : approaches) {
    for (const auto& q : queries) {
      std::size_t n = 0;
      double length = 0.0, lower = 0.0, upper = 0.0;
      for (const auto& r : rows) {
        if (r.approach != a || r.query != q || r.status != RowStatus::ok) continue;
        ++n;
        length += r.upper - r.lower;
        lower += r.lower;
        upper += r.upper;
      }
      out << to_string(a) << ',' << q << ',' << n;
      if (n > 0) {
        const auto d = static_cast<double>(n);
        out << ',' << format_double(length / d) << ',' << format_double(lower / d) << ','
            << format_double(upper / d) << '\n';
      } else {
        out << ",,,\n";
      }
    }
  }
  return out.str();
}

std::string summary_containment_csv(const std::vector<ExperimentRow>& rows) {
  static const std::vector<std::pair<Approach, Approach>> pairs{{Approach::s_oe, Approach::s_o},
                                                                {Approach::s_oe, Approach::s_e},
                                                                {Approach::s_o, Approach::s_e},
                                                                {Approach::s_o, Approach::mm_o},
                                                                {Approach::s_o, Approach::ms_o}};
  std::ostringstream out;
  out << "a,b,query,n,equal_pct,a_strictly_in_b_pct,b_strictly_in_a_pct,incomparable_pct,a_not_in_b_pct\n";
  const auto ok = index_ok(rows);
  const auto approaches = distinct<Approach>(rows, [](const ExperimentRow& r) { return r.approach; });
  const auto queries = distinct<std::string>(rows, [](const ExperimentRow& r) { return r.query; });
  const auto models = distinct<std::size_t>(rows, [](const ExperimentRow& r) { return r.model_index; });
  auto present = [&](Approach a) { return std::find(approaches.begin(), approaches.end(), a) != approaches.end(); };
  for (const auto& [a, b] : pairs) {
    if (!present(a) || !present(b)) continue;
    for (const auto& q : queries) {
      std::size_t n = 0;
      std::size_t counts[4] = {0, 0, 0, 0};
      for (const auto m : models) {
        const auto ia = ok.find({m, a, q});
        const auto ib = ok.find({m, b, q});
        if (ia == ok.end() || ib == ok.end()) continue;
        ++n;
        ++counts[static_cast<int>(
            compare_intervals(ia->second->lower, ia->second->upper, ib->second->lower, ib->second->upper))];
      }
      if (n == 0) continue;
      out << to_string(a) << ',' << to_string(b) << ',' << q << ',' << n << ',' << percent(counts[0], n) << ','
          << percent(counts[1], n) << ',' << percent(counts[2], n) << ',' << percent(counts[3], n) << ','
          << percent(counts[2] + counts[3], n) << '\n';
    }
  }
  return out.str();
}

std::string summary_rmse_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << "# rmse = sqrt(((lower_method - lower_s-o)^2 + (upper_method - upper_s-o)^2) / 2)\n";
  out << "model_index,method,query,rmse\n";
  const auto ok = index_ok(rows);
  for (const auto& r : rows) {
    if (r.status != RowStatus::ok || (r.approach != Approach::mm_o && r.approach != Approach::ms_o)) continue;
    const auto ref = ok.find({r.model_index, Approach::s_o, r.query});
    if (ref == ok.end()) continue;
    const double dl = r.lower - ref->second->lower;
    const double du = r.upper - ref->second->upper;
    out << r.model_index << ',' << to_string(r.approach) << ',' << r.query << ','
        << format_double(std::sqrt((dl * dl + du * du) / 2.0)) << '\n';
  }
  return out.str();
}

void write_experiment(const std::vector<ExperimentRow>& rows, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "rows.csv", rows_csv(rows));
  write_text_file(dir / "summary_lengths.csv", summary_lengths_csv(rows));
  write_text_file(dir / "summary_containment.csv", summary_containment_csv(rows));
  write_text_file(dir / "summary_rmse.csv", summary_rmse_csv(rows));
}

std::vector<Query> default_queries() {
  return {Query::parse("pns:X:Y1"), Query::parse("pns:X:Y2"), Query::parse("pns:Y1:Y2")};
}

}  // namespace dccc
