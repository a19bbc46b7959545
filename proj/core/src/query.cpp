#include "dccc/query.hpp"

#include <sstream>

#include "dccc/error.hpp"

namespace dccc {

namespace {

constexpr std::size_t kMaxJointStates = std::size_t{1} << 22;
constexpr std::size_t kMaxCombinations = 10'000'000;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

int parse_state(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw Error("invalid state index '" + s + "' in query");
  }
  if (used != s.size() || v < 0) throw Error("invalid state index '" + s + "' in query");
  return v;
}

// Where to read a variable's value: a plain variable or one coordinate of a
// merged product variable.
struct Reader {
  std::size_t index = 0;
  int component = -1;
  std::vector<int> component_sizes;

  [[nodiscard]] int read(const std::vector<int>& values) const {
    if (component < 0) return values[index];
    return joint_states(static_cast<std::size_t>(values[index]), component_sizes)[static_cast<std::size_t>(component)];
  }
};

Reader resolve_effect(const PartialScm& model, const std::string& id, int& size) {
  Reader r;
  if (model.has_variable(id)) {
    const auto& v = model.variable(id);
    if (v.is_exogenous()) throw ModelError("query effect '" + id + "' is exogenous");
    r.index = model.index_of(id);
    size = v.domain_size;
    return r;
  }
  for (std::size_t i = 0; i < model.variables().size(); ++i) {
    const auto& v = model.variables()[i];
    for (std::size_t k = 0; k < v.components.size(); ++k) {
      if (v.components[k].id != id) continue;
      r.index = i;
      r.component = static_cast<int>(k);
      for (const auto& c : v.components) r.component_sizes.push_back(c.size);
      size = v.components[k].size;
      return r;
    }
  }
  throw ModelError("unknown query variable '" + id + "'");
}

const std::string& resolve_cause(const PartialScm& model, const std::string& id) {
  if (model.has_variable(id)) {
    if (model.variable(id).is_exogenous()) throw ModelError("cannot intervene on exogenous '" + id + "'");
    return id;
  }
  for (const auto& v : model.variables())
    for (const auto& c : v.components)
      if (c.id == id)
        throw NotComputable("'" + id + "' is a component of the merged variable '" + v.id +
                            "' and cannot be intervened on separately");
  throw ModelError("unknown query variable '" + id + "'");
}

}  // namespace

Query Query::parse(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3 && parts.size() != 4) throw Error("malformed query '" + text + "'");
  Query q;
  if (parts[0] == "pns") {
    q.kind = QueryKind::pns;
  } else if (parts[0] == "do") {
    q.kind = QueryKind::interventional;
  } else {
    throw Error("unknown query kind '" + parts[0] + "'");
  }
  q.cause = parts[1];
  q.effect = parts[2];
  if (q.cause.empty() || q.effect.empty()) throw Error("malformed query '" + text + "'");
  if (parts.size() == 4) {
    const auto states = split(parts[3], ',');
    if (q.kind == QueryKind::pns) {
      if (states.size() != 4) throw Error("pns query needs four states x,x',y,y'");
      q.x = parse_state(states[0]);
      q.x_prime = parse_state(states[1]);
      q.y = parse_state(states[2]);
      q.y_prime = parse_state(states[3]);
    } else {
      if (states.size() != 2) throw Error("interventional query needs two states x,y");
      q.x = parse_state(states[0]);
      q.y = parse_state(states[1]);
    }
  }
  if (q.cause == q.effect) throw Error("query cause and effect coincide");
  if (q.kind == QueryKind::pns && (q.x == q.x_prime || q.y == q.y_prime))
    throw Error("pns query needs x != x' and y != y'");
  return q;
}

std::string Query::str() const {
  std::string out = (kind == QueryKind::pns ? "pns:" : "do:") + cause + ":" + effect;
  if (kind == QueryKind::pns) {
    if (x != 1 || x_prime != 0 || y != 1 || y_prime != 0)
      out += ":" + std::to_string(x) + "," + std::to_string(x_prime) + "," + std::to_string(y) + "," +
             std::to_string(y_prime);
  } else if (x != 1 || y != 1) {
    out += ":" + std::to_string(x) + "," + std::to_string(y);
  }
  return out;
}

QueryIndicator::QueryIndicator(const PartialScm& skeleton, const Query& query) {
  const auto& cause = resolve_cause(skeleton, query.cause);
  int effect_size = 0;
  const auto effect = resolve_effect(skeleton, query.effect, effect_size);
  const int cause_size = skeleton.variable(cause).domain_size;
  auto check = [](int s, int size, const char* what) {
    if (s < 0 || s >= size) throw Error(std::string("query state ") + what + " out of range");
  };
  check(query.x, cause_size, "x");
  check(query.y, effect_size, "y");
  if (query.kind == QueryKind::pns) {
    check(query.x_prime, cause_size, "x'");
    check(query.y_prime, effect_size, "y'");
  }

  const auto& vars = skeleton.variables();
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!vars[i].is_exogenous()) continue;
    exogenous_.push_back(vars[i].id);
    sizes_.push_back(vars[i].domain_size);
    positions.push_back(i);
  }
  const auto total = joint_size(sizes_);
  if (total > kMaxJointStates) throw BudgetExceeded("joint exogenous space too large for query evaluation");

  std::vector<int> state(vars.size(), 0);
  std::vector<int> values(vars.size(), 0);
  const std::map<std::string, int> world{{cause, query.x}};
  const std::map<std::string, int> twin{{cause, query.x_prime}};
  for (std::size_t j = 0; j < total; ++j) {
    auto digits = joint_states(j, sizes_);
    for (std::size_t k = 0; k < positions.size(); ++k) state[positions[k]] = digits[k];
    propagate(skeleton, state, world, values);
    bool hit = effect.read(values) == query.y;
    if (hit && query.kind == QueryKind::pns) {
      propagate(skeleton, state, twin, values);
      hit = effect.read(values) == query.y_prime;
    }
    if (hit) hits_.push_back(std::move(digits));
  }
}

double QueryIndicator::evaluate(const std::vector<const std::vector<double>*>& priors) const {
  double total = 0.0;
  for (const auto& h : hits_) {
    double w = 1.0;
    for (std::size_t k = 0; k < h.size(); ++k) w *= (*priors[k])[static_cast<std::size_t>(h[k])];
    total += w;
  }
  return total;
}

double evaluate_pns(const PartialScm& model, const Query& query) {
  if (!model.fully_specified()) throw ModelError("query evaluation needs every exogenous prior");
  const QueryIndicator indicator(model, query);
  std::vector<const std::vector<double>*> priors;
  for (const auto& u : indicator.exogenous()) priors.push_back(&model.priors().at(u));
  return indicator.evaluate(priors);
}

ProbabilityTable evaluate_interventional(const PartialScm& model, const std::string& target,
                                         const std::map<std::string, int>& interventions) {
  Conditioning c;
  c.interventions = interventions;
  const std::vector<std::string> targets{target};
  return evaluate_full_model(model, targets, c);
}

double evaluate_query(const PartialScm& model, const Query& query) { return evaluate_pns(model, query); }

std::vector<double> prior_from_point(const SolutionSet& set, std::size_t point, const PartialScm& skeleton) {
  const auto& v = skeleton.variable(set.exogenous_id);
  std::map<int, std::size_t> position;
  for (int s = 0; s < v.domain_size; ++s) position[v.label(s)] = static_cast<std::size_t>(s);
  std::vector<double> out(static_cast<std::size_t>(v.domain_size), 0.0);
  const auto& p = set.points.at(point).probabilities;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const auto it = position.find(set.col_labels.at(c));
    if (it == position.end()) {
      if (p[c] > kNegativityTolerance)
        throw ModelError("vertex of '" + set.exogenous_id + "' has mass on a state missing from the model");
      continue;
    }
    out[it->second] += p[c];
  }
  return out;
}

QueryInterval bound_query(const std::map<std::string, SolutionSet>& solutions, const PartialScm& skeleton,
                          const Query& query) {
  const QueryIndicator indicator(skeleton, query);
  QueryInterval out;
  out.exogenous = indicator.exogenous();
  out.complete = true;

  std::vector<std::vector<std::vector<double>>> priors;
  std::size_t combinations = 1;
  for (const auto& u : out.exogenous) {
    const auto it = solutions.find(u);
    if (it == solutions.end()) throw Error("no solution set for exogenous '" + u + "'");
    const auto& set = it->second;
    if (set.points.empty()) throw InfeasibleEvidence("evidence admits no distribution over '" + u + "'");
    out.complete = out.complete && set.complete;
    std::vector<std::vector<double>> dense;
    for (std::size_t i = 0; i < set.points.size(); ++i) dense.push_back(prior_from_point(set, i, skeleton));
    priors.push_back(std::move(dense));
    combinations *= set.points.size();
    if (combinations > kMaxCombinations) throw BudgetExceeded("too many vertex combinations to aggregate");
  }
  out.combinations = combinations;

  std::vector<std::size_t> choice(priors.size(), 0);
  std::vector<const std::vector<double>*> current(priors.size());
  for (std::size_t n = 0; n < combinations; ++n) {
    for (std::size_t k = 0; k < priors.size(); ++k) current[k] = &priors[k][choice[k]];
    const double value = indicator.evaluate(current);
    if (n == 0 || value < out.lower) {
      out.lower = value;
      out.arg_lower = choice;
    }
    if (n == 0 || value > out.upper) {
      out.upper = value;
      out.arg_upper = choice;
    }
    for (std::size_t k = priors.size(); k-- > 0;) {
      if (++choice[k] < priors[k].size()) break;
      choice[k] = 0;
    }
  }
  return out;
}

PartialScm instantiate(const std::map<std::string, SolutionSet>& solutions, const PartialScm& skeleton,
                       const std::vector<std::size_t>& choice) {
  Priors priors;
  std::size_t k = 0;
  for (const auto& u : skeleton.exogenous_ids()) {
    const auto& set = solutions.at(u);
    priors[u] = prior_from_point(set, choice.at(k++), skeleton);
  }
  return skeleton.with_priors(std::move(priors));
}

}  // namespace dccc
