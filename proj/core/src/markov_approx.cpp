#include "dccc/markov_approx.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dccc/error.hpp"

namespace dccc {

namespace {

constexpr std::size_t kMaxChoicesPerPoint = std::size_t{1} << 20;

bool contains(const std::vector<std::string>& v, const std::string& id) {
  return std::find(v.begin(), v.end(), id) != v.end();
}

std::string join(const std::vector<std::string>& ids, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < ids.size(); ++k) out += (k > 0 ? sep : "") + ids[k];
  return out;
}

// Members closed under in-between chains and shared exogenous parents.
std::set<std::string> merge_closure(const PartialScm& model, const std::string& exogenous) {
  const auto first = model.children_of(exogenous);
  std::set<std::string> members(first.begin(), first.end());
  const auto endogenous = model.endogenous_ids();
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& v : endogenous) {
      if (members.contains(v)) continue;
      bool below = false;
      bool above = false;
      for (const auto& m : members) {
        below = below || model.is_ancestor(m, v);
        above = above || model.is_ancestor(v, m);
      }
      bool shares = false;
      for (const auto& m : members) shares = shares || model.exogenous_parent(m) == model.exogenous_parent(v);
      if ((below && above) || shares) {
        members.insert(v);
        changed = true;
      }
    }
  }
  return members;
}

}  // namespace

std::pair<PartialScm, MergeSpec> endogenous_merge(const PartialScm& model, const std::string& exogenous) {
  const auto& u = model.variable(exogenous);
  if (!u.is_exogenous()) throw ModelError("'" + exogenous + "' is not exogenous");
  if (model.children_of(exogenous).size() < 2)
    throw ModelError("'" + exogenous + "' has a single child; nothing to merge");

  const auto closure = merge_closure(model, exogenous);
  MergeSpec spec;
  spec.exogenous_id = exogenous;
  for (const auto& id : model.topological_order()) {
    if (!closure.contains(id)) continue;
    spec.members.push_back(id);
    spec.member_sizes.push_back(model.variable(id).domain_size);
    const auto& e = model.exogenous_parent(id);
    if (!contains(spec.replaced_exogenous, e)) spec.replaced_exogenous.push_back(e);
  }
  for (const auto& m : spec.members)
    for (const auto& p : model.endogenous_parents(m))
      if (!closure.contains(p) && !contains(spec.external_parents, p)) spec.external_parents.push_back(p);
  spec.merged_id = join(spec.members, "&");
  spec.merged_exogenous_id = join(spec.replaced_exogenous, "&") + "*";
  if (model.has_variable(spec.merged_id) || model.has_variable(spec.merged_exogenous_id))
    throw ModelError("merged identifiers collide with existing variables");
  spec.merged_domain_size = static_cast<int>(joint_size(spec.member_sizes));

  std::vector<Variable> variables;
  bool merged_placed = false;
  bool exogenous_placed = false;
  for (const auto& v : model.variables()) {
    if (closure.contains(v.id)) {
      if (!merged_placed) {
        Variable merged;
        merged.id = spec.merged_id;
        merged.domain_size = spec.merged_domain_size;
        for (std::size_t k = 0; k < spec.members.size(); ++k)
          merged.components.push_back({spec.members[k], spec.member_sizes[k]});
        variables.push_back(std::move(merged));
        merged_placed = true;
      }
    } else if (contains(spec.replaced_exogenous, v.id)) {
      if (!exogenous_placed) {
        Variable star;
        star.id = spec.merged_exogenous_id;
        star.kind = VariableKind::exogenous;
        variables.push_back(std::move(star));
        exogenous_placed = true;
      }
    } else {
      variables.push_back(v);
    }
  }

  std::vector<StructuralEquation> equations;
  for (const auto& eq : model.equations()) {
    if (closure.contains(eq.child)) continue;
    const bool touches = std::any_of(eq.parents.begin(), eq.parents.end(),
                                     [&](const std::string& p) { return closure.contains(p); });
    if (!touches) {
      equations.push_back(eq);
      continue;
    }
    StructuralEquation out;
    out.child = eq.child;
    for (const auto& p : eq.parents) {
      const auto& id = closure.contains(p) ? spec.merged_id : p;
      if (!contains(out.parents, id)) out.parents.push_back(id);
    }
    std::vector<int> new_sizes;
    for (const auto& p : out.parents)
      new_sizes.push_back(p == spec.merged_id ? spec.merged_domain_size : model.variable(p).domain_size);
    std::vector<int> old_sizes;
    for (const auto& p : eq.parents) old_sizes.push_back(model.variable(p).domain_size);
    const auto configs = joint_size(new_sizes);
    out.table.resize(configs);
    std::vector<int> old_states(eq.parents.size());
    for (std::size_t j = 0; j < configs; ++j) {
      const auto states = joint_states(j, new_sizes);
      for (std::size_t k = 0; k < eq.parents.size(); ++k) {
        const auto& p = eq.parents[k];
        if (closure.contains(p)) {
          const auto pos = static_cast<std::size_t>(std::find(out.parents.begin(), out.parents.end(), spec.merged_id) -
                                                    out.parents.begin());
          const auto comps = joint_states(static_cast<std::size_t>(states[pos]), spec.member_sizes);
          const auto m = static_cast<std::size_t>(std::find(spec.members.begin(), spec.members.end(), p) -
                                                  spec.members.begin());
          old_states[k] = comps[m];
        } else {
          const auto pos = static_cast<std::size_t>(std::find(out.parents.begin(), out.parents.end(), p) -
                                                    out.parents.begin());
          old_states[k] = states[pos];
        }
      }
      out.table[j] = eq.table[joint_index(old_states, old_sizes)];
    }
    equations.push_back(std::move(out));
  }
  StructuralEquation merged_eq;
  merged_eq.child = spec.merged_id;
  merged_eq.parents = spec.external_parents;
  merged_eq.parents.push_back(spec.merged_exogenous_id);
  equations.push_back(std::move(merged_eq));

  Priors priors;
  for (const auto& [id, p] : model.priors())
    if (!contains(spec.replaced_exogenous, id)) priors.emplace(id, p);
  return {PartialScm(std::move(variables), std::move(equations), std::move(priors)), std::move(spec)};
}

Evidence merge_evidence(const Evidence& evidence, const MergeSpec& spec) {
  auto touches = [&](const ConditionalTable& t) {
    return std::any_of(t.targets.begin(), t.targets.end(), [&](const auto& v) { return contains(spec.members, v); }) ||
           std::any_of(t.given.begin(), t.given.end(), [&](const auto& v) { return contains(spec.members, v); });
  };
  Evidence out;
  for (const auto& t : evidence.observational)
    if (!touches(t)) out.observational.push_back(t);
  for (const auto& t : evidence.experimental)
    if (!touches(t)) out.experimental.push_back(t);
  auto joint = derive_conditional(evidence, spec.members, spec.external_parents);
  joint.targets = {spec.merged_id};
  joint.target_sizes = {spec.merged_domain_size};
  out.observational.push_back(std::move(joint));
  return out;
}

PartialScm exogenous_split(const PartialScm& model, const std::string& exogenous) {
  const auto& u = model.variable(exogenous);
  if (!u.is_exogenous()) throw ModelError("'" + exogenous + "' is not exogenous");
  const auto children = model.children_of(exogenous);
  if (children.size() != 2)
    throw ModelError("exogenous split needs exactly two children, '" + exogenous + "' has " +
                     std::to_string(children.size()));
  const std::string first = exogenous + "_1";
  const std::string second = exogenous + "_2";
  if (model.has_variable(first) || model.has_variable(second))
    throw ModelError("split identifiers collide with existing variables");

  std::vector<Variable> variables;
  for (const auto& v : model.variables()) {
    if (v.id != exogenous) {
      variables.push_back(v);
      continue;
    }
    for (const auto& id : {first, second}) {
      Variable fresh;
      fresh.id = id;
      fresh.kind = VariableKind::exogenous;
      variables.push_back(std::move(fresh));
    }
  }
  auto equations = model.equations();
  for (auto& eq : equations) {
    if (eq.child == children[0] || eq.child == children[1]) {
      eq.parents.back() = eq.child == children[0] ? first : second;
      eq.table.clear();
    }
  }
  auto priors = model.priors();
  priors.erase(exogenous);
  return PartialScm(std::move(variables), std::move(equations), std::move(priors));
}

StateMapping build_state_mapping(const CanonicalDomain& semi_domain, const CanonicalDomain& merged_domain) {
  if (merged_domain.children.size() != 1) throw ModelError("merged domain must have a single child");
  if (semi_domain.external_parents() != merged_domain.external_parents() ||
      semi_domain.external_sizes() != merged_domain.external_sizes())
    throw ModelError("semi-Markovian and merged domains have different parent signatures");
  if (static_cast<std::size_t>(merged_domain.child_sizes[0]) != joint_size(semi_domain.child_sizes))
    throw ModelError("merged child size differs from the joint of the semi-Markovian children");

  const int configs = semi_domain.external_configurations();
  std::map<std::vector<int>, std::vector<int>> by_signature;
  for (std::size_t u = 0; u < semi_domain.size(); ++u) {
    std::vector<int> signature;
    for (int g = 0; g < configs; ++g)
      signature.push_back(static_cast<int>(joint_index(semi_domain.respond(u, g), semi_domain.child_sizes)));
    by_signature[signature].push_back(semi_domain.labels[u]);
  }
  StateMapping mapping;
  for (std::size_t s = 0; s < merged_domain.size(); ++s) {
    std::vector<int> signature;
    for (int g = 0; g < configs; ++g) signature.push_back(merged_domain.respond(s, g)[0]);
    const int label = merged_domain.labels[s];
    if (auto it = by_signature.find(signature); it != by_signature.end()) {
      mapping.groups[label] = it->second;
    } else {
      mapping.forbidden.push_back(label);
    }
  }
  return mapping;
}

SolutionSet map_extreme_points(const SolutionSet& merged, const StateMapping& mapping,
                               const std::string& semi_exogenous_id, std::size_t semi_size) {
  SolutionSet out;
  out.exogenous_id = semi_exogenous_id;
  out.complete = merged.complete;
  out.stats = merged.stats;
  out.col_labels.resize(semi_size);
  for (std::size_t i = 0; i < semi_size; ++i) out.col_labels[i] = static_cast<int>(i);

  std::vector<std::vector<double>> points;
  for (const auto& point : merged.points) {
    std::vector<std::pair<double, const std::vector<int>*>> active;
    std::size_t combinations = 1;
    for (std::size_t c = 0; c < point.probabilities.size(); ++c) {
      const double mass = point.probabilities[c];
      if (mass <= kNegativityTolerance) continue;
      const int label = merged.col_labels.at(c);
      const auto it = mapping.groups.find(label);
      if (it == mapping.groups.end())
        throw Error("merged vertex puts mass on forbidden state u*" + std::to_string(label));
      active.emplace_back(mass, &it->second);
      combinations = std::min(combinations * it->second.size(), kMaxChoicesPerPoint + 1);
    }
    if (combinations > kMaxChoicesPerPoint) {
      combinations = kMaxChoicesPerPoint;
      out.complete = false;
    }
    std::vector<std::size_t> choice(active.size(), 0);
    for (std::size_t n = 0; n < combinations; ++n) {
      std::vector<double> p(semi_size, 0.0);
      for (std::size_t a = 0; a < active.size(); ++a)
        p.at(static_cast<std::size_t>((*active[a].second)[choice[a]])) += active[a].first;
      bool duplicate = false;
      for (const auto& q : points) {
        bool same = true;
        for (std::size_t i = 0; i < semi_size && same; ++i) same = std::abs(p[i] - q[i]) <= kDedupTolerance;
        if (same) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) points.push_back(std::move(p));
      for (std::size_t a = active.size(); a-- > 0;) {
        if (++choice[a] < active[a].second->size()) break;
        choice[a] = 0;
      }
    }
  }
  std::sort(points.begin(), points.end());
  for (auto& p : points) {
    ExtremePoint e;
    e.exogenous_id = semi_exogenous_id;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] > kNegativityTolerance) e.support.push_back(static_cast<int>(i));
    e.probabilities = std::move(p);
    out.points.push_back(std::move(e));
  }
  return out;
}

SolutionSet solve_via_merge(const PartialScm& model, const Evidence& evidence, const std::string& exogenous,
                            const SearchConfig& config) {
  const auto semi = extract_domain(model, exogenous);
  const auto [merged_model, spec] = endogenous_merge(model, exogenous);
  const auto merged = extract_domain(merged_model, spec.merged_exogenous_id);
  const auto mapping = build_state_mapping(semi, merged);
  const auto system = build_markovian_system(merged, merge_evidence(evidence, spec));
  std::vector<int> keep;
  for (std::size_t c = 0; c < system.cols(); ++c)
    if (mapping.groups.contains(system.col_labels()[c])) keep.push_back(static_cast<int>(c));
  const auto restricted = system.restrict_columns(keep);
  const auto solutions = search(restricted, config);
  return map_extreme_points(solutions, mapping, exogenous,
                            static_cast<std::size_t>(model.variable(exogenous).full_size()));
}

int merged_state(const MergeSpec& spec, const std::vector<int>& member_states) {
  return static_cast<int>(joint_index(member_states, spec.member_sizes));
}

}  // namespace dccc
