#include "dccc/canonical.hpp"

#include <algorithm>
#include <limits>

#include "dccc/error.hpp"

namespace dccc {

namespace {

constexpr std::size_t kMaxCanonicalSize = 50'000'000;

std::size_t checked_power(int base, int exponent) {
  std::size_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (result > kMaxCanonicalSize / static_cast<std::size_t>(std::max(base, 1)))
      throw ModelError("canonical domain too large");
    result *= static_cast<std::size_t>(base);
  }
  return result;
}

int configurations(const PartialScm& model, const std::vector<std::string>& ids) {
  std::size_t n = 1;
  for (const auto& id : ids) n *= static_cast<std::size_t>(model.variable(id).domain_size);
  if (n > static_cast<std::size_t>(std::numeric_limits<int>::max()))
    throw ModelError("too many parent configurations");
  return static_cast<int>(n);
}

std::vector<int> sizes_of(const PartialScm& model, const std::vector<std::string>& ids) {
  std::vector<int> out;
  for (const auto& id : ids) out.push_back(model.variable(id).domain_size);
  return out;
}

}  // namespace

std::vector<int> decode_base(std::size_t index, int base, int digits) {
  std::vector<int> out(static_cast<std::size_t>(digits), 0);
  for (int d = digits; d-- > 0;) {
    out[static_cast<std::size_t>(d)] = static_cast<int>(index % static_cast<std::size_t>(base));
    index /= static_cast<std::size_t>(base);
  }
  return out;
}

std::size_t encode_base(std::span<const int> digits, int base) {
  std::size_t index = 0;
  for (int d : digits) index = index * static_cast<std::size_t>(base) + static_cast<std::size_t>(d);
  return index;
}

std::vector<std::string> CanonicalDomain::external_parents() const {
  std::vector<std::string> out;
  for (const auto& ps : parents) {
    for (const auto& p : ps) {
      const bool is_child = std::find(children.begin(), children.end(), p) != children.end();
      if (!is_child && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
  }
  return out;
}

std::vector<int> CanonicalDomain::external_sizes() const {
  std::vector<int> out;
  std::vector<std::string> seen;
  for (std::size_t c = 0; c < parents.size(); ++c) {
    for (std::size_t k = 0; k < parents[c].size(); ++k) {
      const auto& p = parents[c][k];
      const bool is_child = std::find(children.begin(), children.end(), p) != children.end();
      if (!is_child && std::find(seen.begin(), seen.end(), p) == seen.end()) {
        seen.push_back(p);
        out.push_back(parent_sizes[c][k]);
      }
    }
  }
  return out;
}

int CanonicalDomain::external_configurations() const {
  return static_cast<int>(joint_size(external_sizes()));
}

std::vector<int> CanonicalDomain::respond(std::size_t state, int external_config) const {
  const auto ext = external_parents();
  const auto ext_states = joint_states(static_cast<std::size_t>(external_config), external_sizes());
  std::vector<int> out(children.size(), 0);
  std::vector<int> parent_states;
  for (std::size_t c = 0; c < children.size(); ++c) {
    parent_states.clear();
    for (const auto& p : parents[c]) {
      if (auto it = std::find(children.begin(), children.end(), p); it != children.end()) {
        parent_states.push_back(out[static_cast<std::size_t>(it - children.begin())]);
      } else {
        const auto e = static_cast<std::size_t>(std::find(ext.begin(), ext.end(), p) - ext.begin());
        parent_states.push_back(ext_states[e]);
      }
    }
    out[c] = functions[state][c][joint_index(parent_states, parent_sizes[c])];
  }
  return out;
}

Mechanism CanonicalDomain::composed(std::size_t state) const {
  if (children.size() != 2) throw ModelError("composition needs a two-child domain");
  Mechanism out;
  for (int x = 0; x < external_configurations(); ++x) out.push_back(respond(state, x)[1]);
  return out;
}

CanonicalDomain build_canonical_markovian(const PartialScm& model, std::string_view child) {
  const auto& v = model.variable(child);
  if (v.is_exogenous()) throw ModelError("'" + std::string(child) + "' is not endogenous");
  const auto& u = model.exogenous_parent(child);
  if (model.children_of(u).size() != 1)
    throw ModelError("exogenous '" + u + "' has several children; use the semi-Markovian builder");

  CanonicalDomain d;
  d.exogenous_id = u;
  d.children = {std::string(child)};
  d.child_sizes = {v.domain_size};
  d.parents = {model.endogenous_parents(child)};
  d.parent_sizes = {sizes_of(model, d.parents[0])};
  const int p = configurations(model, d.parents[0]);
  const int q = v.domain_size;
  const auto size = checked_power(q, p);
  d.functions.reserve(size);
  d.labels.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    d.functions.push_back({decode_base(i, q, p)});
    d.labels.push_back(static_cast<int>(i));
  }
  return d;
}

CanonicalDomain build_canonical_semimarkovian_chain(const PartialScm& model, std::string_view first,
                                                    std::string_view second) {
  const auto& v1 = model.variable(first);
  const auto& v2 = model.variable(second);
  if (v1.is_exogenous() || v2.is_exogenous())
    throw ModelError("chain children must be endogenous");
  const auto& u = model.exogenous_parent(first);
  if (model.exogenous_parent(second) != u)
    throw ModelError("'" + std::string(first) + "' and '" + std::string(second) +
                     "' do not share an exogenous parent");
  if (model.children_of(u).size() != 2)
    throw ModelError("exogenous '" + u + "' must have exactly two children for the chain builder");
  const auto x = model.endogenous_parents(first);
  if (model.endogenous_parents(second) != std::vector<std::string>{std::string(first)})
    throw ModelError("unsupported topology: '" + std::string(second) +
                     "' must have '" + std::string(first) + "' as its only endogenous parent");

  CanonicalDomain d;
  d.exogenous_id = u;
  d.children = {std::string(first), std::string(second)};
  d.child_sizes = {v1.domain_size, v2.domain_size};
  d.parents = {x, {std::string(first)}};
  d.parent_sizes = {sizes_of(model, x), {v1.domain_size}};
  const int p = configurations(model, x);
  const auto n1 = checked_power(v1.domain_size, p);
  const auto n2 = checked_power(v2.domain_size, v1.domain_size);
  if (n1 > kMaxCanonicalSize / n2) throw ModelError("canonical domain too large");
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    auto f1 = decode_base(i1, v1.domain_size, p);
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      d.functions.push_back({f1, decode_base(i2, v2.domain_size, v1.domain_size)});
      d.labels.push_back(static_cast<int>(d.labels.size()));
    }
  }
  return d;
}

CanonicalDomain extract_domain(const PartialScm& model, std::string_view exogenous) {
  const auto& u = model.variable(exogenous);
  if (!u.is_exogenous()) throw ModelError("'" + std::string(exogenous) + "' is not exogenous");
  CanonicalDomain d;
  d.exogenous_id = u.id;
  d.children = model.children_of(exogenous);
  for (const auto& c : d.children) {
    d.child_sizes.push_back(model.variable(c).domain_size);
    d.parents.push_back(model.endogenous_parents(c));
    d.parent_sizes.push_back(sizes_of(model, d.parents.back()));
  }
  const auto n = static_cast<std::size_t>(u.domain_size);
  d.functions.assign(n, std::vector<Mechanism>(d.children.size()));
  for (std::size_t c = 0; c < d.children.size(); ++c) {
    const auto& table = model.equation(d.children[c]).table;
    const std::size_t configs = table.size() / n;
    for (std::size_t s = 0; s < n; ++s) {
      auto& f = d.functions[s][c];
      f.resize(configs);
      for (std::size_t x = 0; x < configs; ++x) f[x] = table[x * n + s];
    }
  }
  for (std::size_t s = 0; s < n; ++s) d.labels.push_back(u.label(static_cast<int>(s)));
  return d;
}

std::vector<int> equation_table(const CanonicalDomain& domain, std::string_view child) {
  const auto it = std::find(domain.children.begin(), domain.children.end(), child);
  if (it == domain.children.end())
    throw ModelError("'" + std::string(child) + "' is not a child of '" + domain.exogenous_id + "'");
  const auto c = static_cast<std::size_t>(it - domain.children.begin());
  const auto n = domain.size();
  const auto configs = joint_size(domain.parent_sizes[c]);
  std::vector<int> table(configs * n);
  for (std::size_t x = 0; x < configs; ++x)
    for (std::size_t s = 0; s < n; ++s) table[x * n + s] = domain.functions[s][c][x];
  return table;
}

}  // namespace dccc
