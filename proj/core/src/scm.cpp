#include "dccc/scm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "dccc/canonical.hpp"
#include "dccc/error.hpp"

namespace dccc {

namespace {

constexpr double kPriorTolerance = 1e-9;
constexpr std::size_t kMaxJointExogenous = std::size_t{1} << 26;

}  // namespace

std::size_t joint_size(std::span<const int> sizes) {
  std::size_t n = 1;
  for (int s : sizes) n *= static_cast<std::size_t>(s);
  return n;
}

std::size_t joint_index(std::span<const int> states, std::span<const int> sizes) {
  std::size_t index = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    index = index * static_cast<std::size_t>(sizes[i]) + static_cast<std::size_t>(states[i]);
  }
  return index;
}

std::vector<int> joint_states(std::size_t index, std::span<const int> sizes) {
  std::vector<int> states(sizes.size());
  for (std::size_t i = sizes.size(); i-- > 0;) {
    const auto s = static_cast<std::size_t>(sizes[i]);
    states[i] = static_cast<int>(index % s);
    index /= s;
  }
  return states;
}

double ProbabilityTable::at(std::span<const int> states) const {
  return values.at(joint_index(states, sizes));
}

double ProbabilityTable::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

PartialScm::PartialScm(std::vector<Variable> variables, std::vector<StructuralEquation> equations,
                       Priors priors)
    : variables_(std::move(variables)), equations_(std::move(equations)), priors_(std::move(priors)) {
  validate_structure();
  fill_canonical_tables();
  validate_tables();
  validate_priors();
}

void PartialScm::validate_structure() {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (v.id.empty()) throw ModelError("variable with empty id");
    if (!index_.emplace(v.id, i).second) throw ModelError("duplicate variable id '" + v.id + "'");
    if (v.is_exogenous()) {
      if (v.domain_size < 0) throw ModelError("negative domain size for '" + v.id + "'");
      if (!v.state_labels.empty()) {
        if (static_cast<int>(v.state_labels.size()) != v.domain_size)
          throw ModelError("state labels of '" + v.id + "' do not match its domain");
        std::set<int> seen(v.state_labels.begin(), v.state_labels.end());
        if (seen.size() != v.state_labels.size() || *seen.begin() < 0 ||
            *seen.rbegin() >= v.full_size())
          throw ModelError("invalid state labels for '" + v.id + "'");
      }
    } else {
      if (v.domain_size < 1) throw ModelError("endogenous '" + v.id + "' needs a positive domain");
      if (!v.components.empty()) {
        int product = 1;
        for (const auto& c : v.components) product *= c.size;
        if (product != v.domain_size)
          throw ModelError("components of '" + v.id + "' do not multiply to its domain size");
      }
    }
  }

  for (std::size_t e = 0; e < equations_.size(); ++e) {
    const auto& eq = equations_[e];
    if (!has_variable(eq.child)) throw ModelError("equation for unknown variable '" + eq.child + "'");
    if (variable(eq.child).is_exogenous())
      throw ModelError("exogenous variable '" + eq.child + "' cannot have an equation");
    if (!equation_index_.emplace(eq.child, e).second)
      throw ModelError("duplicate equation for '" + eq.child + "'");
    if (eq.parents.empty()) throw ModelError("'" + eq.child + "' has no exogenous parent");
    std::set<std::string> seen;
    for (std::size_t p = 0; p < eq.parents.size(); ++p) {
      const auto& pid = eq.parents[p];
      if (!has_variable(pid)) throw ModelError("unknown parent '" + pid + "' of '" + eq.child + "'");
      if (!seen.insert(pid).second) throw ModelError("repeated parent '" + pid + "'");
      const bool last = p + 1 == eq.parents.size();
      if (variable(pid).is_exogenous() != last)
        throw ModelError("'" + eq.child + "' must list its endogenous parents followed by exactly one exogenous parent");
    }
  }
  for (const auto& v : variables_) {
    if (!v.is_exogenous() && !equation_index_.contains(v.id))
      throw ModelError("endogenous '" + v.id + "' has no structural equation");
  }

  // Kahn's algorithm, picking the earliest-declared ready variable each time.
  std::map<std::string, int> pending;
  for (const auto& v : variables_) {
    if (v.is_exogenous()) continue;
    int n = 0;
    for (const auto& p : equation(v.id).parents)
      if (!variable(p).is_exogenous()) ++n;
    pending[v.id] = n;
  }
  std::vector<bool> done(variables_.size(), false);
  for (;;) {
    bool progressed = false;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      const auto& v = variables_[i];
      if (v.is_exogenous() || done[i] || pending[v.id] != 0) continue;
      done[i] = true;
      order_.push_back(v.id);
      for (const auto& eq : equations_) {
        if (std::find(eq.parents.begin(), eq.parents.end(), v.id) != eq.parents.end())
          --pending[eq.child];
      }
      progressed = true;
      break;
    }
    if (!progressed) break;
  }
  if (order_.size() != equations_.size()) throw ModelError("the causal graph contains a cycle");
}

void PartialScm::fill_canonical_tables() {
  for (auto& u : variables_) {
    if (!u.is_exogenous()) continue;
    const auto children = children_of(u.id);
    if (children.empty()) {
      if (u.domain_size < 1) throw ModelError("exogenous '" + u.id + "' has no domain");
      continue;
    }
    const auto empty = std::count_if(children.begin(), children.end(), [&](const auto& c) {
      return equation(c).table.empty();
    });
    if (empty == 0) continue;
    if (empty != static_cast<long>(children.size()))
      throw ModelError("children of '" + u.id + "' mix explicit and canonical equations");

    CanonicalDomain domain;
    if (children.size() == 1) {
      domain = build_canonical_markovian(*this, children[0]);
    } else if (children.size() == 2) {
      domain = build_canonical_semimarkovian_chain(*this, children[0], children[1]);
    } else {
      throw ModelError("canonical specification of '" + u.id +
                       "' is only available for one child or a two-child chain");
    }
    const int size = static_cast<int>(domain.size());
    if (u.domain_size != 0 && u.domain_size != size)
      throw ModelError("declared domain of '" + u.id + "' (" + std::to_string(u.domain_size) +
                       ") differs from its canonical size " + std::to_string(size));
    u.domain_size = size;
    for (const auto& c : children) {
      equations_[equation_index_.at(c)].table = equation_table(domain, c);
    }
  }
}

void PartialScm::validate_tables() const {
  for (const auto& eq : equations_) {
    std::vector<int> sizes;
    for (const auto& p : eq.parents) sizes.push_back(variable(p).domain_size);
    const auto rows = joint_size(sizes);
    if (eq.table.size() != rows)
      throw ModelError("table of '" + eq.child + "' has " + std::to_string(eq.table.size()) +
                       " entries, expected " + std::to_string(rows));
    const int q = variable(eq.child).domain_size;
    for (int s : eq.table) {
      if (s < 0 || s >= q) throw ModelError("table of '" + eq.child + "' maps outside its domain");
    }
  }
}

void PartialScm::validate_priors() const {
  for (const auto& [id, p] : priors_) {
    if (!has_variable(id) || !variable(id).is_exogenous())
      throw ModelError("prior for non-exogenous '" + id + "'");
    if (static_cast<int>(p.size()) != variable(id).domain_size)
      throw ModelError("prior of '" + id + "' has wrong length");
    double total = 0.0;
    for (double x : p) {
      if (!(x >= 0.0)) throw ModelError("prior of '" + id + "' has a negative entry");
      total += x;
    }
    if (std::abs(total - 1.0) > kPriorTolerance)
      throw ModelError("prior of '" + id + "' does not sum to 1");
  }
}

bool PartialScm::has_variable(std::string_view id) const { return index_.find(id) != index_.end(); }

std::size_t PartialScm::index_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ModelError("unknown variable '" + std::string(id) + "'");
  return it->second;
}

const Variable& PartialScm::variable(std::string_view id) const { return variables_[index_of(id)]; }

const StructuralEquation& PartialScm::equation(std::string_view child) const {
  auto it = equation_index_.find(child);
  if (it == equation_index_.end())
    throw ModelError("no structural equation for '" + std::string(child) + "'");
  return equations_[it->second];
}

std::vector<std::string> PartialScm::exogenous_ids() const {
  std::vector<std::string> ids;
  for (const auto& v : variables_)
    if (v.is_exogenous()) ids.push_back(v.id);
  return ids;
}

std::vector<std::string> PartialScm::endogenous_ids() const {
  std::vector<std::string> ids;
  for (const auto& v : variables_)
    if (!v.is_exogenous()) ids.push_back(v.id);
  return ids;
}

std::vector<std::string> PartialScm::children_of(std::string_view exogenous) const {
  std::vector<std::string> out;
  for (const auto& id : order_) {
    if (equation(id).parents.back() == exogenous) out.push_back(id);
  }
  return out;
}

std::vector<std::string> PartialScm::endogenous_parents(std::string_view child) const {
  const auto& parents = equation(child).parents;
  return {parents.begin(), parents.end() - 1};
}

const std::string& PartialScm::exogenous_parent(std::string_view child) const {
  return equation(child).parents.back();
}

bool PartialScm::is_ancestor(std::string_view ancestor, std::string_view descendant) const {
  if (ancestor == descendant) return false;
  std::vector<std::string> stack{std::string(descendant)};
  std::set<std::string> seen;
  while (!stack.empty()) {
    auto id = stack.back();
    stack.pop_back();
    if (variable(id).is_exogenous()) continue;
    for (const auto& p : endogenous_parents(id)) {
      if (p == ancestor) return true;
      if (seen.insert(p).second) stack.push_back(p);
    }
  }
  return false;
}

bool PartialScm::fully_specified() const {
  for (const auto& v : variables_)
    if (v.is_exogenous() && !priors_.contains(v.id)) return false;
  return true;
}

PartialScm PartialScm::with_priors(Priors priors) const {
  return PartialScm(variables_, equations_, std::move(priors));
}

PartialScm PartialScm::without_priors() const { return PartialScm(variables_, equations_, {}); }

PartialScm reduce(const PartialScm& model, std::span<const ExogenousState> states) {
  std::map<std::string, std::set<int>> removal;
  for (const auto& [id, label] : states) {
    const auto& v = model.variable(id);
    if (!v.is_exogenous()) throw ModelError("cannot reduce endogenous '" + id + "'");
    if (label < 0 || label >= v.full_size())
      throw ModelError("state " + std::to_string(label) + " does not exist in '" + id + "'");
    removal[id].insert(label);
  }
  if (removal.empty()) return model;

  auto variables = model.variables();
  auto equations = model.equations();
  auto priors = model.priors();
  for (const auto& [id, labels] : removal) {
    auto& v = variables[model.index_of(id)];
    std::vector<int> kept;  // current state indices that survive
    for (int s = 0; s < v.domain_size; ++s)
      if (!labels.contains(v.label(s))) kept.push_back(s);
    if (kept.empty()) throw ModelError("reduction removes every state of '" + id + "'");
    if (static_cast<int>(kept.size()) == v.domain_size) continue;

    std::vector<int> new_labels;
    for (int s : kept) new_labels.push_back(v.label(s));
    const int old_size = v.domain_size;
    const int new_size = static_cast<int>(kept.size());
    v.original_size = v.full_size();
    v.state_labels = std::move(new_labels);
    v.domain_size = new_size;

    for (auto& eq : equations) {
      if (eq.parents.back() != id) continue;
      const std::size_t configs = eq.table.size() / static_cast<std::size_t>(old_size);
      std::vector<int> table(configs * static_cast<std::size_t>(new_size));
      for (std::size_t x = 0; x < configs; ++x)
        for (int j = 0; j < new_size; ++j)
          table[x * new_size + j] = eq.table[x * old_size + kept[j]];
      eq.table = std::move(table);
    }
    if (auto it = priors.find(id); it != priors.end()) {
      std::vector<double> p;
      for (int s : kept) p.push_back(it->second[s]);
      const double total = std::accumulate(p.begin(), p.end(), 0.0);
      if (!(total > 0.0)) throw ModelError("reduction removes all prior mass of '" + id + "'");
      for (double& x : p) x /= total;
      it->second = std::move(p);
    }
  }
  return PartialScm(std::move(variables), std::move(equations), std::move(priors));
}

void propagate(const PartialScm& model, std::span<const int> exogenous_states,
               const std::map<std::string, int>& interventions, std::span<int> values) {
  const auto& vars = model.variables();
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].is_exogenous()) values[i] = exogenous_states[i];
  for (const auto& id : model.topological_order()) {
    const auto idx = model.index_of(id);
    if (auto it = interventions.find(id); it != interventions.end()) {
      values[idx] = it->second;
      continue;
    }
    const auto& eq = model.equation(id);
    std::size_t row = 0;
    for (const auto& p : eq.parents) {
      const auto pi = model.index_of(p);
      row = row * static_cast<std::size_t>(vars[pi].domain_size) + static_cast<std::size_t>(values[pi]);
    }
    values[idx] = eq.table[row];
  }
}

ProbabilityTable evaluate_full_model(const PartialScm& model, std::span<const std::string> targets,
                                     const Conditioning& conditioning) {
  if (!model.fully_specified()) throw ModelError("evaluation needs every exogenous prior");
  for (const auto& [id, s] : conditioning.interventions) {
    const auto& v = model.variable(id);
    if (v.is_exogenous() || s < 0 || s >= v.domain_size)
      throw ModelError("invalid intervention on '" + id + "'");
  }
  for (const auto& [id, s] : conditioning.observations) {
    const auto& v = model.variable(id);
    if (v.is_exogenous() || s < 0 || s >= v.domain_size)
      throw ModelError("invalid observation on '" + id + "'");
  }

  ProbabilityTable out;
  std::vector<std::size_t> target_index;
  for (const auto& t : targets) {
    out.variables.push_back(t);
    out.sizes.push_back(model.variable(t).domain_size);
    target_index.push_back(model.index_of(t));
  }
  out.values.assign(joint_size(out.sizes), 0.0);

  const auto& vars = model.variables();
  std::vector<std::size_t> exo;
  std::vector<int> exo_sizes;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].is_exogenous()) {
      exo.push_back(i);
      exo_sizes.push_back(vars[i].domain_size);
    }
  }
  const auto total = joint_size(exo_sizes);
  if (total > kMaxJointExogenous) throw BudgetExceeded("joint exogenous space too large to enumerate");

  std::vector<int> state(vars.size(), 0);
  std::vector<int> values(vars.size(), 0);
  std::vector<int> target_states(targets.size());
  double evidence_mass = 0.0;
  for (std::size_t j = 0; j < total; ++j) {
    double w = 1.0;
    auto digits = joint_states(j, exo_sizes);
    for (std::size_t k = 0; k < exo.size(); ++k) {
      state[exo[k]] = digits[k];
      w *= model.priors().at(vars[exo[k]].id)[digits[k]];
    }
    if (w == 0.0) continue;
    propagate(model, state, conditioning.interventions, values);
    bool consistent = true;
    for (const auto& [id, s] : conditioning.observations) {
      if (values[model.index_of(id)] != s) {
        consistent = false;
        break;
      }
    }
    if (!consistent) continue;
    evidence_mass += w;
    for (std::size_t t = 0; t < target_index.size(); ++t) target_states[t] = values[target_index[t]];
    out.values[joint_index(target_states, out.sizes)] += w;
  }
  if (!(evidence_mass > 0.0)) throw ModelError("conditioning event has probability zero");
  for (double& x : out.values) x /= evidence_mass;
  return out;
}

}  // namespace dccc
