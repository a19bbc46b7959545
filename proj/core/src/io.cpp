#include "dccc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dccc/error.hpp"

namespace dccc {

using nlohmann::json;

namespace {

std::vector<std::string> id_list(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  const auto& v = j.at(key);
  if (v.is_string()) return {v.get<std::string>()};
  return v.get<std::vector<std::string>>();
}

ConditionalTable table_from(const json& j, std::vector<std::string> targets, std::vector<std::string> given,
                            const PartialScm& model) {
  for (const auto* ids : {&targets, &given})
    for (const auto& id : *ids)
      if (!model.has_variable(id)) throw EvidenceError("evidence over unknown variable '" + id + "'");
  ConditionalTable t;
  t.targets = std::move(targets);
  t.given = std::move(given);
  for (const auto& id : t.targets) t.target_sizes.push_back(model.variable(id).domain_size);
  for (const auto& id : t.given) t.given_sizes.push_back(model.variable(id).domain_size);
  t.values = j.at("table").get<std::vector<double>>();
  t.validate();
  return t;
}

json table_to(const ConditionalTable& t, const char* target_key, const char* given_key) {
  json j;
  j[target_key] = t.targets;
  j[given_key] = t.given;
  j["table"] = t.values;
  return j;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return {buffer, result.ptr};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
}

PartialScm parse_model(const std::string& text) {
  try {
    const auto j = json::parse(text);
    std::vector<Variable> variables;
    for (const auto& v : j.at("variables")) {
      Variable var;
      var.id = v.at("id").get<std::string>();
      const auto kind = v.value("kind", std::string("endogenous"));
      if (kind == "exogenous") {
        var.kind = VariableKind::exogenous;
      } else if (kind != "endogenous") {
        throw ModelError("unknown variable kind '" + kind + "'");
      }
      var.domain_size = v.value("domain_size", 0);
      variables.push_back(std::move(var));
    }
    std::vector<StructuralEquation> equations;
    for (const auto& e : j.at("equations")) {
      StructuralEquation eq;
      eq.child = e.at("child").get<std::string>();
      eq.parents = e.at("parents").get<std::vector<std::string>>();
      const bool canonical = e.value("canonical", false);
      if (canonical && e.contains("table")) throw ModelError("equation of '" + eq.child + "' is both canonical and explicit");
      if (!canonical) eq.table = e.at("table").get<std::vector<int>>();
      if (!canonical && eq.table.empty()) throw ModelError("equation of '" + eq.child + "' has an empty table");
      equations.push_back(std::move(eq));
    }
    Priors priors;
    if (j.contains("priors"))
      for (const auto& [id, p] : j.at("priors").items()) priors[id] = p.get<std::vector<double>>();
    return PartialScm(std::move(variables), std::move(equations), std::move(priors));
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model document: ") + e.what());
  }
}

std::string dump_model(const PartialScm& model) {
  json j;
  j["variables"] = json::array();
  for (const auto& v : model.variables())
    j["variables"].push_back(
        {{"id", v.id}, {"kind", v.is_exogenous() ? "exogenous" : "endogenous"}, {"domain_size", v.domain_size}});
  j["equations"] = json::array();
  for (const auto& eq : model.equations())
    j["equations"].push_back({{"child", eq.child}, {"parents", eq.parents}, {"table", eq.table}});
  if (!model.priors().empty()) {
    j["priors"] = json::object();
    for (const auto& [id, p] : model.priors()) j["priors"][id] = p;
  }
  return j.dump(2) + "\n";
}

Evidence parse_evidence(const std::string& text, const PartialScm& model) {
  try {
    const auto j = json::parse(text);
    Evidence ev;
    if (j.contains("observational"))
      for (const auto& t : j.at("observational"))
        ev.observational.push_back(table_from(t, id_list(t, "targets"), id_list(t, "context"), model));
    if (j.contains("experimental"))
      for (const auto& t : j.at("experimental"))
        ev.experimental.push_back(table_from(t, id_list(t, "target"), id_list(t, "do"), model));
    ev.check_against(model);
    return ev;
  } catch (const json::exception& e) {
    throw EvidenceError(std::string("malformed evidence document: ") + e.what());
  }
}

std::string dump_evidence(const Evidence& evidence) {
  json j;
  j["observational"] = json::array();
  for (const auto& t : evidence.observational) j["observational"].push_back(table_to(t, "targets", "context"));
  j["experimental"] = json::array();
  for (const auto& t : evidence.experimental) j["experimental"].push_back(table_to(t, "target", "do"));
  return j.dump(2) + "\n";
}

std::string dump_solutions(const std::map<std::string, SolutionSet>& solutions, const std::string& regime) {
  json j;
  j["regime"] = regime;
  j["solutions"] = json::array();
  for (const auto& [id, set] : solutions) {
    json s;
    s["exogenous"] = id;
    s["complete"] = set.complete;
    s["labels"] = set.col_labels;
    s["vertices"] = json::array();
    for (const auto& p : set.points) s["vertices"].push_back(p.probabilities);
    s["stats"] = {{"supports_total", set.stats.supports_total},
                  {"supports_examined", set.stats.supports_examined},
                  {"supports_pruned", set.stats.supports_pruned},
                  {"rank_deficient", set.stats.rank_deficient},
                  {"inconsistent", set.stats.inconsistent},
                  {"negative", set.stats.negative},
                  {"feasible", set.stats.feasible}};
    j["solutions"].push_back(std::move(s));
  }
  return j.dump(2) + "\n";
}

std::map<std::string, SolutionSet> parse_solutions(const std::string& text) {
  try {
    const auto j = json::parse(text);
    std::map<std::string, SolutionSet> out;
    for (const auto& s : j.at("solutions")) {
      SolutionSet set;
      set.exogenous_id = s.at("exogenous").get<std::string>();
      set.complete = s.at("complete").get<bool>();
      set.col_labels = s.at("labels").get<std::vector<int>>();
      for (const auto& v : s.at("vertices")) {
        ExtremePoint p;
        p.exogenous_id = set.exogenous_id;
        p.probabilities = v.get<std::vector<double>>();
        for (std::size_t c = 0; c < p.probabilities.size(); ++c)
          if (p.probabilities[c] > kNegativityTolerance) p.support.push_back(static_cast<int>(c));
        set.points.push_back(std::move(p));
      }
      out.emplace(set.exogenous_id, std::move(set));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed solutions document: ") + e.what());
  }
}

std::string dump_interval(const QueryInterval& interval, const Query& query, const std::string& regime,
                          const std::map<std::string, SolutionSet>& solutions) {
  json j;
  j["query"] = query.str();
  j["regime"] = regime;
  j["lower"] = interval.lower;
  j["upper"] = interval.upper;
  j["complete"] = interval.complete;
  j["combinations"] = interval.combinations;
  j["arg_lower"] = json::object();
  j["arg_upper"] = json::object();
  for (std::size_t k = 0; k < interval.exogenous.size(); ++k) {
    j["arg_lower"][interval.exogenous[k]] = interval.arg_lower[k];
    j["arg_upper"][interval.exogenous[k]] = interval.arg_upper[k];
  }
  j["vertex_counts"] = json::object();
  for (const auto& [id, set] : solutions) j["vertex_counts"][id] = set.points.size();
  return j.dump(2) + "\n";
}

}  // namespace dccc
