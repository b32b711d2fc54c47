#include "mdskit/mdsverify.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "mdskit/rng.hpp"

namespace mdskit {

namespace {

std::string subset_label(const std::vector<int>& users) {
  std::string s = "{";
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(users[i]);
  }
  return s + "}";
}

void validate_subset(const MdsVariables& vars, const std::vector<int>& users) {
  if (users.empty()) {
    throw std::invalid_argument("user subset must be nonempty");
  }
  std::set<int> seen;
  for (int k : users) {
    if (k < 1 || k > vars.K) {
      throw std::invalid_argument("user " + std::to_string(k) +
                                  " outside [1.." + std::to_string(vars.K) +
                                  "]");
    }
    if (!seen.insert(k).second) {
      throw std::invalid_argument("duplicate user " + std::to_string(k) +
                                  " in subset");
    }
  }
}

void require_level(const MdsVariables& vars, int n) {
  if (std::find(vars.levels.begin(), vars.levels.end(), n) ==
      vars.levels.end()) {
    throw std::invalid_argument("level " + std::to_string(n) +
                                " not present in variable set");
  }
}

}  // namespace

std::vector<std::vector<int>> sweep_subsets(int K, const SweepOptions& opts) {
  std::vector<std::vector<int>> out;
  if (K <= kExhaustiveUserLimit) {
    for (std::uint64_t mask = 1; mask < (1ull << K); ++mask) {
      std::vector<int> users;
      for (int k = 1; k <= K; ++k) {
        if (mask & (1ull << (k - 1))) users.push_back(k);
      }
      out.push_back(std::move(users));
    }
    std::sort(out.begin(), out.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                if (a.size() != b.size()) return a.size() < b.size();
                return a < b;
              });
    return out;
  }

  // Sampled sweep: keep all sizes represented, cap the count per size.
  Xoshiro256 rng(opts.seed);
  for (int size = 1; size <= K; ++size) {
    std::set<std::vector<int>> chosen;
    const std::int64_t available = binomial(K, size);
    const std::int64_t want =
        std::min<std::int64_t>(available, std::max(1, opts.subset_cap));
    while (static_cast<std::int64_t>(chosen.size()) < want) {
      std::vector<int> pool(K);
      for (int k = 0; k < K; ++k) pool[k] = k + 1;
      // Partial Fisher-Yates.
      for (int i = 0; i < size; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
      }
      std::vector<int> users(pool.begin(), pool.begin() + size);
      std::sort(users.begin(), users.end());
      chosen.insert(std::move(users));
    }
    out.insert(out.end(), chosen.begin(), chosen.end());
  }
  return out;
}

VerifyReport verify_mds(const MdsVariables& vars, int n,
                        const SweepOptions& opts) {
  require_level(vars, n);
  VerifyReport report;
  for (const auto& users : sweep_subsets(vars.K, opts)) {
    std::vector<LinearRV> set;
    for (int k : users) set.push_back(vars.z(k, n));
    const Rational lhs = entropy(set).symbols;
    const Rational rhs =
        Rational(std::min<std::int64_t>(users.size(), n)) * Rational(vars.block);
    report.add_equal(
        "mds[n=" + std::to_string(n) + "|U=" + subset_label(users) + "]", lhs,
        rhs);
  }
  return report;
}

VerifyReport verify_mds_all_levels(const MdsVariables& vars,
                                   const SweepOptions& opts) {
  VerifyReport report;
  for (int n : vars.levels) {
    report.merge(verify_mds(vars, n, opts));
  }
  return report;
}

VerifyReport verify_derivability(const MdsVariables& vars) {
  VerifyReport report;
  for (const auto& [k, source] : vars.source) {
    std::vector<LinearRV> all = {source};
    for (int n : vars.levels) all.push_back(vars.z(k, n));
    const Rational lhs = entropy(all).symbols;
    const Rational rhs = entropy({source}).symbols;
    report.add_equal("derivable[k=" + std::to_string(k) + "]", lhs, rhs);
  }
  return report;
}

VerifyReport check_absorption(const MdsVariables& vars, int n, int k,
                              const std::vector<int>& users) {
  require_level(vars, n);
  validate_subset(vars, users);
  if (static_cast<int>(users.size()) != n) {
    throw std::invalid_argument("absorption: |U| = " +
                                std::to_string(users.size()) + ", expected " +
                                std::to_string(n));
  }
  if (std::find(users.begin(), users.end(), k) != users.end()) {
    throw std::invalid_argument("absorption: user " + std::to_string(k) +
                                " must not be in U");
  }

  std::vector<LinearRV> own = vars.level_prefix(k, n);
  std::vector<LinearRV> others;
  for (int u : users) {
    for (auto& rv : vars.level_prefix(u, n)) others.push_back(rv);
  }
  const Rational lhs = conditional_mutual_information(own, others, {}).symbols;
  const Rational rhs = entropy(own).symbols;
  VerifyReport report;
  report.add_equal("absorption[n=" + std::to_string(n) +
                       ",k=" + std::to_string(k) +
                       "|U=" + subset_label(users) + "]",
                   lhs, rhs);
  return report;
}

VerifyReport absorption_battery(const MdsVariables& vars,
                                const SweepOptions& opts) {
  VerifyReport report;
  for (int n : vars.levels) {
    if (n > vars.K - 1) break;
    for (const auto& users : sweep_subsets(vars.K, opts)) {
      if (static_cast<int>(users.size()) != n) continue;
      for (int k = 1; k <= vars.K; ++k) {
        if (std::find(users.begin(), users.end(), k) != users.end()) continue;
        report.merge(check_absorption(vars, n, k, users));
      }
    }
  }
  return report;
}

VerifyReport check_harmonic_bound(const MdsVariables& vars, int n,
                                  const std::vector<int>& users) {
  require_level(vars, n);
  validate_subset(vars, users);
  if (static_cast<int>(users.size()) != n) {
    throw std::invalid_argument("harmonic bound: |U| = " +
                                std::to_string(users.size()) + ", expected " +
                                std::to_string(n));
  }
  Rational sum(0);
  for (int k : users) {
    sum += entropy(vars.level_prefix(k, n)).symbols;
  }
  const Rational lhs = sum / Rational(n);
  const Rational rhs = harmonic_number(n) * Rational(vars.block);
  VerifyReport report;
  report.add_at_least("harmonic[n=" + std::to_string(n) +
                          "|U=" + subset_label(users) + "]",
                      lhs, rhs);
  return report;
}

VerifyReport harmonic_battery(const MdsVariables& vars,
                              const SweepOptions& opts) {
  VerifyReport report;
  for (int n : vars.levels) {
    for (const auto& users : sweep_subsets(vars.K, opts)) {
      if (static_cast<int>(users.size()) != n) continue;
      report.merge(check_harmonic_bound(vars, n, users));
    }
  }
  return report;
}

}  // namespace mdskit
