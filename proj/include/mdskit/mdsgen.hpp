#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mdskit/linrv.hpp"
#include "mdskit/matrix.hpp"
#include "mdskit/rational.hpp"

namespace mdskit {

std::int64_t factorial(int n);
std::int64_t binomial(int n, int k);

/// Parameters of a correlated variable-generation scheme: K users, one
/// generated variable per level n, `block` field symbols per variable.
/// Levels must form a contiguous prefix {1..n_max}; each level-n generator
/// uses block/n fresh seed symbols, so block must be divisible by every
/// level.
struct MdsParams {
  int K = 0;
  std::vector<int> levels;
  std::uint64_t q = 0;
  std::int64_t block = 0;

  /// Full configuration: levels [1..K], block K!.
  static MdsParams standard(int K, std::uint64_t q);

  int max_level() const { return levels.empty() ? 0 : levels.back(); }
  std::int64_t condition_count() const;
  /// q must exceed block * (number of condition matrices); the retry loop
  /// keeps minimal-q runs honest, larger q makes first-draw success
  /// overwhelming.
  std::uint64_t field_size_bound() const;

  void validate() const;  // throws std::invalid_argument
  bool operator==(const MdsParams&) const = default;
};

/// Sampled generator matrices. H[(k,n)] is (block/n) x block and feeds on
/// seed segment S^n; V[(k,n,m)] is (block/n) x (block/m) and re-encodes user
/// k's level-m output into its level-n variable.
struct MdsScheme {
  MdsParams params;
  std::uint64_t rng_seed = 0;
  std::map<std::pair<int, int>, FieldMatrix> H;
  std::map<std::tuple<int, int, int>, FieldMatrix> V;
  SeedSpacePtr seed_space;

  const FieldMatrix& h(int k, int n) const;
  const FieldMatrix& v(int k, int n, int m) const;
};

struct ConditionMatrix {
  std::string label;
  FieldMatrix matrix;
};

/// The square stacks whose invertibility certifies the scheme: for every
/// level n and every user subset U of size n, the stack of H_k^n over U, and
/// for every lower level m the stack of V_k^{n<-m} H_k^m over U. All are
/// block x block.
std::vector<ConditionMatrix> condition_matrices(const MdsScheme& scheme);

/// Label of the first singular condition matrix, or nullopt when the scheme
/// is fully certified.
std::optional<std::string> first_singular_condition(const MdsScheme& scheme);

/// Rejection-samples generator matrices until every condition matrix is full
/// rank. Deterministic given (params, seed). Throws std::runtime_error after
/// max_attempts, naming the first failing condition of the last attempt.
MdsScheme sample_scheme(const MdsParams& params, std::uint64_t seed,
                        int max_attempts = 64);

/// The random variables of a scheme: Z_k (stored randomness) and Z_k^n (the
/// generated level-n variables), as linear maps of the shared seed.
struct MdsVariables {
  int K = 0;
  std::vector<int> levels;
  std::int64_t block = 0;  // symbols per generated variable (L)
  SeedSpacePtr space;
  std::map<int, LinearRV> source;
  std::map<std::pair<int, int>, LinearRV> mds;

  const LinearRV& z(int k) const;
  const LinearRV& z(int k, int n) const;
  /// The set {Z_k^m : m in levels, m <= n}.
  std::vector<LinearRV> level_prefix(int k, int n) const;
};

MdsVariables derive_variables(const MdsScheme& scheme);

/// Harmonic number H_K, the optimal stored-randomness rate.
Rational optimal_rate(int K);

/// Achieved rate L_Z / L from the actual matrix dimensions.
Rational scheme_rate(const MdsScheme& scheme);
Rational variables_rate(const MdsVariables& vars);

/// The uncorrelated per-level reference construction (rate K): user k's
/// level-n variable is one symbol, the generalized Reed-Solomon row with
/// evaluation point k-1, so any n users' rows form a Vandermonde system.
/// Requires prime q > K.
MdsVariables vandermonde_baseline(int K, std::uint64_t q);

nlohmann::ordered_json scheme_to_json(const MdsScheme& scheme);
/// Parses and structurally validates; certification is never trusted from
/// disk, call first_singular_condition afterwards.
MdsScheme scheme_from_json(const nlohmann::ordered_json& doc);

}  // namespace mdskit
