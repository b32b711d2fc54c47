#pragma once

#include <cstdint>
#include <vector>

#include "mdskit/mdsgen.hpp"
#include "mdskit/report.hpp"

namespace mdskit {

/// Subset-sweep policy: exhaustive up to kExhaustiveUserLimit users, sampled
/// (per-size cap, seed-deterministic) beyond that.
struct SweepOptions {
  int subset_cap = 24;
  std::uint64_t seed = 1;
};

inline constexpr int kExhaustiveUserLimit = 6;

/// All nonempty subsets of [1..K] under the sweep policy.
std::vector<std::vector<int>> sweep_subsets(int K, const SweepOptions& opts);

/// Checks H((Z_k^n)_{k in U}) = min(|U|, n) * L for every swept subset U.
VerifyReport verify_mds(const MdsVariables& vars, int n,
                        const SweepOptions& opts = {});

/// verify_mds across every level of the variable set.
VerifyReport verify_mds_all_levels(const MdsVariables& vars,
                                   const SweepOptions& opts = {});

/// Checks that each user's generated variables carry no information beyond
/// the stored randomness: rank([Z_k; Z_k^1..]) = rank(Z_k).
VerifyReport verify_derivability(const MdsVariables& vars);

/// Absorption equality: I(Z_k^{<=n}; (Z_u^{<=n})_{u in U}) = H(Z_k^{<=n}) for
/// |U| = n, k not in U.
VerifyReport check_absorption(const MdsVariables& vars, int n, int k,
                              const std::vector<int>& users);

/// Every absorption instance for n in [1..min(n_max, K-1)].
VerifyReport absorption_battery(const MdsVariables& vars,
                                const SweepOptions& opts = {});

/// Harmonic lower bound: (1/n) sum_{k in U} H(Z_k^{<=n}) >= H_n * L for
/// |U| = n. Holds with equality on the sampled construction.
VerifyReport check_harmonic_bound(const MdsVariables& vars, int n,
                                  const std::vector<int>& users);

/// Every harmonic-bound instance across levels and subsets.
VerifyReport harmonic_battery(const MdsVariables& vars,
                              const SweepOptions& opts = {});

}  // namespace mdskit
