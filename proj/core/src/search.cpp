#include "dccc/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "dccc/canonical.hpp"
#include "dccc/error.hpp"

namespace dccc {

namespace {

using Mask = std::vector<std::uint64_t>;

// Per-column row masks and the filters derived from the configuration.
struct Filters {
  std::size_t words = 0;
  std::vector<Mask> column_rows;
  bool use_groups = false;
  std::vector<int> group_of;
  bool use_coverage = false;
  Mask positive_rows;
  bool use_low_probability = false;
  std::vector<std::size_t> low_rows;
  int low_budget = 0;

  [[nodiscard]] bool admits(const std::vector<int>& support, Mask& scratch, std::vector<int>& seen) const {
    if (use_groups) {
      for (int c : support) {
        const int g = group_of[static_cast<std::size_t>(c)];
        if (seen[static_cast<std::size_t>(g)]) {
          for (int d : support) seen[static_cast<std::size_t>(group_of[static_cast<std::size_t>(d)])] = 0;
          return false;
        }
        seen[static_cast<std::size_t>(g)] = 1;
      }
      for (int c : support) seen[static_cast<std::size_t>(group_of[static_cast<std::size_t>(c)])] = 0;
    }
    if (use_coverage) {
      std::fill(scratch.begin(), scratch.end(), 0);
      for (int c : support) {
        const auto& m = column_rows[static_cast<std::size_t>(c)];
        for (std::size_t w = 0; w < words; ++w) scratch[w] |= m[w];
      }
      for (std::size_t w = 0; w < words; ++w)
        if ((scratch[w] & positive_rows[w]) != positive_rows[w]) return false;
    }
    if (use_low_probability) {
      for (std::size_t r : low_rows) {
        int hits = 0;
        for (int c : support)
          if ((column_rows[static_cast<std::size_t>(c)][r / 64] >> (r % 64)) & 1U) ++hits;
        if (hits > low_budget) return false;
      }
    }
    return true;
  }
};

Filters make_filters(const ConstraintSystem& system, const SearchConfig& config, bool pruned) {
  Filters f;
  f.words = (system.rows() + 63) / 64;
  f.column_rows.assign(system.cols(), Mask(f.words, 0));
  for (std::size_t c = 0; c < system.cols(); ++c)
    for (std::size_t r = 0; r < system.rows(); ++r)
      if (system.at(r, c)) f.column_rows[c][r / 64] |= std::uint64_t{1} << (r % 64);
  if (!pruned) return f;

  if (config.group_pruning) {
    f.use_groups = true;
    f.group_of.assign(system.cols(), 0);
    const auto groups = group_indistinguishable(system);
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (int c : groups[g]) f.group_of[static_cast<std::size_t>(c)] = static_cast<int>(g);
  }
  if (config.heuristics.coverage) {
    f.use_coverage = true;
    f.positive_rows.assign(f.words, 0);
    for (std::size_t r = 0; r < system.rows(); ++r)
      if (system.rhs()[r] > kResidualTolerance) f.positive_rows[r / 64] |= std::uint64_t{1} << (r % 64);
  }
  if (config.heuristics.low_probability) {
    f.use_low_probability = true;
    f.low_budget = config.heuristics.low_probability_budget;
    std::vector<std::size_t> order(system.rows());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return system.rhs()[a] < system.rhs()[b]; });
    const auto k = std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(0, config.heuristics.low_probability_rows)));
    f.low_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return f;
}

// Colex successor; returns false after the last combination.
bool next_colex(std::vector<int>& c, int n) {
  const std::size_t r = c.size();
  for (std::size_t i = 0; i < r; ++i) {
    const int limit = i + 1 < r ? c[i + 1] : n;
    if (c[i] + 1 < limit) {
      ++c[i];
      for (std::size_t j = 0; j < i; ++j) c[j] = static_cast<int>(j);
      return true;
    }
  }
  return false;
}

std::vector<int> unrank_colex(std::uint64_t rank, int n, int r) {
  std::vector<int> c(static_cast<std::size_t>(r));
  int hi = n - 1;
  for (int i = r; i-- > 0;) {
    int v = hi;
    while (v > i && binomial(static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(i + 1)) > rank) --v;
    rank -= binomial(static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(i + 1));
    c[static_cast<std::size_t>(i)] = v;
    hi = v - 1;
  }
  return c;
}

bool near(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > kDedupTolerance) return false;
  return true;
}

void add_unique(std::vector<std::vector<double>>& kept, std::vector<double> p) {
  for (const auto& k : kept)
    if (near(k, p)) return;
  kept.push_back(std::move(p));
}

struct ChunkResult {
  std::vector<std::vector<double>> points;
  SearchStats stats;
};

ChunkResult run_chunk(const ConstraintSystem& system, const Filters& filters, int r, std::uint64_t begin,
                      std::uint64_t end) {
  ChunkResult out;
  if (begin >= end) return out;
  const int n = static_cast<int>(system.cols());
  SupportSolver solver(system);
  std::vector<int> support = unrank_colex(begin, n, r);
  std::vector<double> point;
  Mask scratch(filters.words, 0);
  std::vector<int> seen(system.cols(), 0);
  for (std::uint64_t i = begin; i < end; ++i) {
    ++out.stats.supports_examined;
    if (!filters.admits(support, scratch, seen)) {
      ++out.stats.supports_pruned;
    } else {
      switch (solver.solve(support, point)) {
        case SupportStatus::feasible:
          ++out.stats.feasible;
          add_unique(out.points, point);
          break;
        case SupportStatus::rank_deficient: ++out.stats.rank_deficient; break;
        case SupportStatus::inconsistent: ++out.stats.inconsistent; break;
        case SupportStatus::negative: ++out.stats.negative; break;
      }
    }
    if (i + 1 < end) next_colex(support, n);
  }
  return out;
}

SolutionSet run_search(const ConstraintSystem& system, const SearchConfig& config, bool pruned) {
  const int n = static_cast<int>(system.cols());
  const int r = config.support_size.value_or(system.rank());
  if (r < 0 || r > n)
    throw Error("support size " + std::to_string(r) + " exceeds the " + std::to_string(n) + " columns");
  const Filters filters = make_filters(system, config, pruned);

  SolutionSet result;
  result.exogenous_id = system.exogenous_id();
  result.col_labels = system.col_labels();
  result.stats.supports_total = binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
  const std::uint64_t total = std::min(result.stats.supports_total, config.max_supports);

  const auto threads = static_cast<std::uint64_t>(std::max(1, config.threads));
  const std::uint64_t chunks = std::max<std::uint64_t>(1, std::min(threads, total));
  std::vector<ChunkResult> parts(chunks);
  auto bounds = [&](std::uint64_t k) { return total / chunks * k + std::min(k, total % chunks); };
  if (chunks == 1) {
    parts[0] = run_chunk(system, filters, r, 0, total);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t k = 0; k < chunks; ++k)
      pool.emplace_back([&, k] { parts[k] = run_chunk(system, filters, r, bounds(k), bounds(k + 1)); });
    for (auto& t : pool) t.join();
  }

  std::vector<std::vector<double>> merged;
  for (auto& part : parts) {
    for (auto& p : part.points) add_unique(merged, std::move(p));
    result.stats.supports_examined += part.stats.supports_examined;
    result.stats.supports_pruned += part.stats.supports_pruned;
    result.stats.rank_deficient += part.stats.rank_deficient;
    result.stats.inconsistent += part.stats.inconsistent;
    result.stats.negative += part.stats.negative;
    result.stats.feasible += part.stats.feasible;
  }
  bool truncated = total < result.stats.supports_total;
  if (config.max_solutions && merged.size() > *config.max_solutions) {
    merged.resize(*config.max_solutions);
    truncated = true;
  }
  std::sort(merged.begin(), merged.end());
  for (auto& p : merged) {
    ExtremePoint e;
    e.exogenous_id = system.exogenous_id();
    for (std::size_t c = 0; c < p.size(); ++c)
      if (p[c] > kNegativityTolerance) e.support.push_back(static_cast<int>(c));
    e.probabilities = std::move(p);
    result.points.push_back(std::move(e));
  }
  result.complete = !truncated && !(pruned && filters.use_low_probability);
  return result;
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n-k+i) is divisible by i; cancel the common factor first.
    const std::uint64_t g = std::gcd(result, i);
    const std::uint64_t factor = (n - k + i) / (i / g);
    if (__builtin_mul_overflow(result / g, factor, &result)) return std::numeric_limits<std::uint64_t>::max();
  }
  return result;
}

SolutionSet exhaustive_search(const ConstraintSystem& system, const SearchConfig& config) {
  return run_search(system, config, false);
}

std::vector<std::vector<int>> group_indistinguishable(const ConstraintSystem& system) {
  std::vector<std::vector<int>> groups;
  std::vector<std::vector<std::uint8_t>> keys;
  for (std::size_t c = 0; c < system.cols(); ++c) {
    auto col = system.column(c);
    const auto it = std::find(keys.begin(), keys.end(), col);
    if (it == keys.end()) {
      keys.push_back(std::move(col));
      groups.push_back({static_cast<int>(c)});
    } else {
      groups[static_cast<std::size_t>(it - keys.begin())].push_back(static_cast<int>(c));
    }
  }
  return groups;
}

SolutionSet pruned_search(const ConstraintSystem& system, const SearchConfig& config) {
  return run_search(system, config, true);
}

SolutionSet search(const ConstraintSystem& system, const SearchConfig& config) {
  return config.mode == SearchMode::exhaustive ? exhaustive_search(system, config) : pruned_search(system, config);
}

Regime parse_regime(const std::string& text) {
  if (text == "markov" || text == "markovian") return Regime::markovian;
  if (text == "s-o") return Regime::s_o;
  if (text == "s-oe") return Regime::s_oe;
  if (text == "s-e") return Regime::s_e;
  throw Error("unknown regime '" + text + "'");
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::markovian: return "markov";
    case Regime::s_o: return "s-o";
    case Regime::s_oe: return "s-oe";
    case Regime::s_e: return "s-e";
  }
  return "unknown";
}

ConstraintSystem build_system(const PartialScm& model, const Evidence& evidence, const std::string& exogenous_id,
                              Regime regime) {
  const auto domain = extract_domain(model, exogenous_id);
  if (domain.children.empty()) throw ModelError("exogenous '" + exogenous_id + "' has no children");
  const bool confounding = domain.children.size() > 1;
  switch (regime) {
    case Regime::markovian:
      if (confounding)
        throw ModelError("markovian regime requested but '" + exogenous_id + "' confounds several children");
      return build_markovian_system(domain, evidence);
    case Regime::s_o:
      return build_semimarkovian_observational(domain, evidence);
    case Regime::s_oe:
      return confounding ? build_semimarkovian_combined(domain, evidence)
                         : build_semimarkovian_observational(domain, evidence);
    case Regime::s_e:
      return build_semimarkovian_experimental(domain, evidence);
  }
  throw Error("unknown regime");
}

std::map<std::string, SolutionSet> solve_credal(const PartialScm& model, const Evidence& evidence, Regime regime,
                                                const SearchConfig& config) {
  evidence.check_against(model);
  std::map<std::string, SolutionSet> out;
  for (const auto& u : model.exogenous_ids()) out.emplace(u, search(build_system(model, evidence, u, regime), config));
  return out;
}

std::vector<double> expand_point(const ExtremePoint& point, const std::vector<int>& col_labels,
                                 std::size_t full_size) {
  std::vector<double> out(full_size, 0.0);
  for (std::size_t c = 0; c < point.probabilities.size(); ++c)
    out.at(static_cast<std::size_t>(col_labels.at(c))) = point.probabilities[c];
  return out;
}

}  // namespace dccc
