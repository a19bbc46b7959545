#include "dccc/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dccc/error.hpp"

namespace dccc {

namespace {

constexpr double kSliceTolerance = 1e-9;

bool same_set(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() != b.size()) return false;
  std::set<std::string> sa(a.begin(), a.end());
  std::set<std::string> sb(b.begin(), b.end());
  return sa == sb;
}

// Joint distribution over an ordered variable list.
struct Joint {
  std::vector<std::string> vars;
  std::vector<int> sizes;
  std::vector<double> values;

  [[nodiscard]] bool has(const std::string& id) const {
    return std::find(vars.begin(), vars.end(), id) != vars.end();
  }
};

Joint extend(const Joint& joint, const ConditionalTable& t) {
  Joint out = joint;
  for (std::size_t k = 0; k < t.targets.size(); ++k) {
    out.vars.push_back(t.targets[k]);
    out.sizes.push_back(t.target_sizes[k]);
  }
  out.values.assign(joint_size(out.sizes), 0.0);
  std::map<std::string, int> assignment;
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    const auto states = joint_states(j, out.sizes);
    for (std::size_t k = 0; k < out.vars.size(); ++k) assignment[out.vars[k]] = states[k];
    const auto base = joint_index(std::span(states).first(joint.vars.size()), joint.sizes);
    out.values[j] = joint.values[base] * t.probability(assignment);
  }
  return out;
}

}  // namespace

double ConditionalTable::probability(const std::map<std::string, int>& assignment) const {
  std::size_t g = 0;
  for (std::size_t k = 0; k < given.size(); ++k)
    g = g * static_cast<std::size_t>(given_sizes[k]) + static_cast<std::size_t>(assignment.at(given[k]));
  std::size_t t = 0;
  for (std::size_t k = 0; k < targets.size(); ++k)
    t = t * static_cast<std::size_t>(target_sizes[k]) + static_cast<std::size_t>(assignment.at(targets[k]));
  return at(g, t);
}

bool ConditionalTable::matches(std::span<const std::string> t, std::span<const std::string> g) const {
  return same_set(targets, t) && same_set(given, g);
}

void ConditionalTable::validate() const {
  if (targets.empty()) throw EvidenceError("evidence table without targets");
  if (targets.size() != target_sizes.size() || given.size() != given_sizes.size())
    throw EvidenceError("evidence table axes and sizes disagree");
  const std::size_t per_slice = target_configurations();
  if (values.size() != per_slice * given_configurations())
    throw EvidenceError("evidence table over '" + targets.front() + "' has " +
                        std::to_string(values.size()) + " entries, expected " +
                        std::to_string(per_slice * given_configurations()));
  for (std::size_t g = 0; g < given_configurations(); ++g) {
    double total = 0.0;
    for (std::size_t t = 0; t < per_slice; ++t) {
      const double p = at(g, t);
      if (!(p >= 0.0) || !std::isfinite(p)) throw EvidenceError("negative or non-finite evidence entry");
      total += p;
    }
    if (std::abs(total - 1.0) > kSliceTolerance)
      throw EvidenceError("evidence slice over '" + targets.front() + "' sums to " + std::to_string(total));
  }
}

const ConditionalTable* Evidence::find_observational(std::span<const std::string> targets,
                                                     std::span<const std::string> given) const {
  for (const auto& t : observational)
    if (t.matches(targets, given)) return &t;
  return nullptr;
}

const ConditionalTable* Evidence::find_experimental(std::span<const std::string> targets,
                                                    std::span<const std::string> intervened) const {
  for (const auto& t : experimental)
    if (t.matches(targets, intervened)) return &t;
  return nullptr;
}

void Evidence::validate() const {
  for (const auto& t : observational) t.validate();
  for (const auto& t : experimental) t.validate();
}

void Evidence::check_against(const PartialScm& model) const {
  auto check = [&](const ConditionalTable& t) {
    auto axis = [&](const std::vector<std::string>& ids, const std::vector<int>& sizes) {
      if (ids.size() != sizes.size()) throw EvidenceError("evidence table axes and sizes disagree");
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (!model.has_variable(ids[k])) throw EvidenceError("evidence over unknown variable '" + ids[k] + "'");
        const auto& v = model.variable(ids[k]);
        if (v.is_exogenous()) throw EvidenceError("evidence over exogenous '" + ids[k] + "'");
        if (v.domain_size != sizes[k]) throw EvidenceError("evidence axis '" + ids[k] + "' has wrong size");
      }
    };
    axis(t.targets, t.target_sizes);
    axis(t.given, t.given_sizes);
  };
  for (const auto& t : observational) check(t);
  for (const auto& t : experimental) check(t);
}

ConditionalTable observational_table(const PartialScm& model, std::span<const std::string> targets,
                                     std::span<const std::string> given) {
  ConditionalTable out;
  out.targets.assign(targets.begin(), targets.end());
  out.given.assign(given.begin(), given.end());
  for (const auto& t : targets) out.target_sizes.push_back(model.variable(t).domain_size);
  for (const auto& g : given) out.given_sizes.push_back(model.variable(g).domain_size);

  std::vector<std::string> all(given.begin(), given.end());
  all.insert(all.end(), targets.begin(), targets.end());
  const auto joint = evaluate_full_model(model, all);
  const std::size_t per_slice = out.target_configurations();
  out.values = joint.values;
  for (std::size_t g = 0; g < out.given_configurations(); ++g) {
    double mass = 0.0;
    for (std::size_t t = 0; t < per_slice; ++t) mass += out.values[g * per_slice + t];
    if (!(mass > 0.0)) throw EvidenceError("conditioning configuration has probability zero");
    for (std::size_t t = 0; t < per_slice; ++t) out.values[g * per_slice + t] /= mass;
  }
  return out;
}

ConditionalTable experimental_table(const PartialScm& model, std::span<const std::string> targets,
                                    std::span<const std::string> intervened) {
  ConditionalTable out;
  out.targets.assign(targets.begin(), targets.end());
  out.given.assign(intervened.begin(), intervened.end());
  for (const auto& t : targets) out.target_sizes.push_back(model.variable(t).domain_size);
  for (const auto& g : intervened) out.given_sizes.push_back(model.variable(g).domain_size);
  for (std::size_t g = 0; g < out.given_configurations(); ++g) {
    Conditioning c;
    const auto states = joint_states(g, out.given_sizes);
    for (std::size_t k = 0; k < out.given.size(); ++k) c.interventions[out.given[k]] = states[k];
    const auto table = evaluate_full_model(model, targets, c);
    out.values.insert(out.values.end(), table.values.begin(), table.values.end());
  }
  return out;
}

ConditionalTable derive_conditional(const Evidence& evidence, std::span<const std::string> targets,
                                    std::span<const std::string> given) {
  if (const auto* direct = evidence.find_observational(targets, given)) {
    // Reorder axes to the requested order.
    ConditionalTable out;
    out.targets.assign(targets.begin(), targets.end());
    out.given.assign(given.begin(), given.end());
    auto size_of = [&](const std::string& id) {
      for (std::size_t k = 0; k < direct->targets.size(); ++k)
        if (direct->targets[k] == id) return direct->target_sizes[k];
      for (std::size_t k = 0; k < direct->given.size(); ++k)
        if (direct->given[k] == id) return direct->given_sizes[k];
      return 0;
    };
    for (const auto& t : out.targets) out.target_sizes.push_back(size_of(t));
    for (const auto& g : out.given) out.given_sizes.push_back(size_of(g));
    std::map<std::string, int> assignment;
    for (std::size_t g = 0; g < out.given_configurations(); ++g) {
      const auto gs = joint_states(g, out.given_sizes);
      for (std::size_t k = 0; k < gs.size(); ++k) assignment[out.given[k]] = gs[k];
      for (std::size_t t = 0; t < out.target_configurations(); ++t) {
        const auto ts = joint_states(t, out.target_sizes);
        for (std::size_t k = 0; k < ts.size(); ++k) assignment[out.targets[k]] = ts[k];
        out.values.push_back(direct->probability(assignment));
      }
    }
    return out;
  }

  std::set<std::string> needed(targets.begin(), targets.end());
  needed.insert(given.begin(), given.end());

  Joint joint;
  joint.values = {1.0};
  std::vector<bool> used(evidence.observational.size(), false);
  auto covered = [&] {
    return std::all_of(needed.begin(), needed.end(), [&](const auto& id) { return joint.has(id); });
  };
  while (!covered()) {
    bool progressed = false;
    for (std::size_t i = 0; i < evidence.observational.size(); ++i) {
      const auto& t = evidence.observational[i];
      if (used[i]) continue;
      const bool given_known = std::all_of(t.given.begin(), t.given.end(), [&](const auto& g) { return joint.has(g); });
      const bool targets_new = std::none_of(t.targets.begin(), t.targets.end(), [&](const auto& x) { return joint.has(x); });
      if (!given_known || !targets_new) continue;
      joint = extend(joint, t);
      used[i] = true;
      progressed = true;
      break;
    }
    if (!progressed) throw EvidenceError("observational tables do not determine the requested conditional");
  }

  ConditionalTable out;
  out.targets.assign(targets.begin(), targets.end());
  out.given.assign(given.begin(), given.end());
  auto size_in_joint = [&](const std::string& id) {
    return joint.sizes[static_cast<std::size_t>(std::find(joint.vars.begin(), joint.vars.end(), id) - joint.vars.begin())];
  };
  for (const auto& t : out.targets) out.target_sizes.push_back(size_in_joint(t));
  for (const auto& g : out.given) out.given_sizes.push_back(size_in_joint(g));
  const std::size_t per_slice = out.target_configurations();
  out.values.assign(per_slice * out.given_configurations(), 0.0);
  for (std::size_t j = 0; j < joint.values.size(); ++j) {
    const auto states = joint_states(j, joint.sizes);
    auto state_of = [&](const std::string& id) {
      return states[static_cast<std::size_t>(std::find(joint.vars.begin(), joint.vars.end(), id) - joint.vars.begin())];
    };
    std::size_t g = 0;
    for (std::size_t k = 0; k < out.given.size(); ++k)
      g = g * static_cast<std::size_t>(out.given_sizes[k]) + static_cast<std::size_t>(state_of(out.given[k]));
    std::size_t t = 0;
    for (std::size_t k = 0; k < out.targets.size(); ++k)
      t = t * static_cast<std::size_t>(out.target_sizes[k]) + static_cast<std::size_t>(state_of(out.targets[k]));
    out.values[g * per_slice + t] += joint.values[j];
  }
  for (std::size_t g = 0; g < out.given_configurations(); ++g) {
    double mass = 0.0;
    for (std::size_t t = 0; t < per_slice; ++t) mass += out.values[g * per_slice + t];
    if (!(mass > 0.0)) throw EvidenceError("conditioning slice of the derived table has zero mass");
    for (std::size_t t = 0; t < per_slice; ++t) out.values[g * per_slice + t] /= mass;
  }
  return out;
}

}  // namespace dccc
