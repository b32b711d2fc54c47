#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdskit/mdsgen.hpp"
#include "mdskit/report.hpp"

namespace mdskit {

/// K-user secure summation with arbitrary user selection. Inputs are
/// (K-1)!-symbol vectors; keys are built from a (K, levels [1..K-1],
/// block (K-1)!) variable-generation scheme, one level per selectable
/// coalition size.
struct SummationParams {
  int K = 0;
  std::uint64_t q = 0;

  MdsParams mds_params() const;
  std::int64_t input_len() const { return factorial(K - 1); }
  void validate() const;
};

/// Per-user keys plus the symbolic model used by the exact security checks:
/// a joint seed space holding one segment per input W_k followed by the key
/// seed segments S^n.
struct KeyMaterial {
  SummationParams params;
  MdsScheme scheme;    // over the key-only seed space
  MdsVariables vars;   // ditto
  SeedSpacePtr space;  // extended space: W_1..W_K then S^1..S^{K-1}
  std::map<int, LinearRV> input_rv;
  std::map<int, LinearRV> key_rv;
  std::map<std::pair<int, int>, LinearRV> key_mds_rv;
  std::vector<std::uint64_t> sampled_seed;  // concrete key seeds
  std::map<int, std::vector<std::uint64_t>> z_concrete;

  std::int64_t input_len() const { return params.input_len(); }
  Rational key_rate() const { return scheme_rate(scheme); }
  /// Linear map of sum_{u in U} W_u on the extended space.
  LinearRV sum_rv(const std::vector<int>& users) const;
};

KeyMaterial setup(const SummationParams& params, std::uint64_t seed,
                  int max_attempts = 64);

/// Same scheme, freshly drawn concrete key seeds. The modeled problem reuses
/// one key across selections; this exists for experiments.
KeyMaterial resample_keys(const KeyMaterial& keys, std::uint64_t seed);

/// Full-rank per-user coefficient matrices that cancel the selected users'
/// level-(|U|-1) keys: sum_u F_u (Z_u^n)^T = 0.
struct MaskSet {
  int level = 0;
  std::map<int, FieldMatrix> F;
};

/// Deterministic construction: the highest-indexed user takes -I, the rest
/// come from one linear solve against the stacked (invertible, by the MDS
/// property) key maps. Throws when the key set is not MDS.
MaskSet mask_coefficients(const KeyMaterial& keys,
                          const std::vector<int>& users);

/// X_u = W_u + F_u (Z_u^n)^T, evaluated on concrete key seeds.
std::vector<std::uint64_t> encode(const KeyMaterial& keys, const MaskSet& masks,
                                  const std::vector<int>& users, int u,
                                  const std::vector<std::uint64_t>& input);

/// Component-wise sum of the received messages; equals sum of inputs by the
/// mask-cancellation identity.
std::vector<std::uint64_t> decode(
    const PrimeField& field, const std::vector<int>& users,
    const std::map<int, std::vector<std::uint64_t>>& messages);

/// |U| = 1: the lone selected user sends its input in the clear; the sum it
/// reveals is exactly that input, so the security constraint is vacuous.
std::vector<std::uint64_t> single_user(const KeyMaterial& keys,
                                       const std::vector<std::uint64_t>& input);

/// Symbolic message maps X_u on the extended seed space.
std::map<int, LinearRV> message_maps(const KeyMaterial& keys,
                                     const std::vector<int>& users,
                                     const MaskSet& masks);

/// Exact zero-leakage check I((W_u)_U; (X_u)_U | sum W) = 0, plus the two
/// entropy identities behind it: H((X_u)_U | sum W) = n L and
/// H((F_u Z_u^n)_U) = n L with n = |U| - 1.
VerifyReport security_check(const KeyMaterial& keys,
                            const std::vector<int>& users,
                            const MaskSet& masks);
VerifyReport security_check(const KeyMaterial& keys,
                            const std::vector<int>& users);

struct ConverseOptions {
  int partition_cap = 64;    // identity instances per subset beyond |U| = 4
  int permutation_cap = 24;  // sampled permutations beyond |U| = 4
  std::uint64_t seed = 1;
};

/// Key-correlation lower bounds evaluated exactly on the key variables:
///  - augmentation identity: conditional MI among keys is unchanged when each
///    Z_i is replaced by the pair (W_i, Z_i), for disjoint index groups;
///  - sequential-MI chain: sum_i I(Z_{k_i}; earlier | later) >= (|U|-1) L;
///  - averaged correlation: mean over orderings of I(Z_first; rest)
///    >= H_{|U|-1} * L.
VerifyReport check_converse_bounds(const KeyMaterial& keys,
                                   const std::vector<std::vector<int>>& family,
                                   const ConverseOptions& opts = {});

nlohmann::ordered_json keys_to_json(const KeyMaterial& keys);
/// Parses, re-certifies the embedded scheme, and rebuilds all derived state.
KeyMaterial keys_from_json(const nlohmann::ordered_json& doc);

/// The hardcoded 3-user reference scheme with uncoded keys over GF(q),
/// q >= 5: key rate 3/2 (L = 2, L_Z = 3), per-subset mask table. Shares the
/// decode routine and security checker with the MDS-based protocol.
class Table2Baseline {
 public:
  Table2Baseline(std::uint64_t q, std::uint64_t seed);

  static const std::vector<std::vector<int>>& selectable_subsets();

  const PrimeField& field() const { return field_; }
  std::int64_t input_len() const { return 2; }
  Rational key_rate() const { return Rational(3, 2); }
  const SeedSpacePtr& space() const { return space_; }
  const LinearRV& key(int k) const;
  const std::vector<std::uint64_t>& key_seed() const { return key_seed_; }

  /// Mask coefficients over the key seeds (A, B, C, D), exactly the message
  /// table of the reference scheme.
  const FieldMatrix& mask(const std::vector<int>& users, int u) const;

  std::vector<std::uint64_t> encode(const std::vector<int>& users, int u,
                                    const std::vector<std::uint64_t>& input) const;
  VerifyReport security_check(const std::vector<int>& users) const;

 private:
  PrimeField field_;
  SeedSpacePtr space_;
  std::map<int, LinearRV> input_rv_;
  std::map<int, LinearRV> keys_;
  std::vector<std::uint64_t> key_seed_;
  std::map<std::vector<int>, std::map<int, FieldMatrix>> masks_;
};

}  // namespace mdskit
