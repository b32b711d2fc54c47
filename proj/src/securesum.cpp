#include "mdskit/securesum.hpp"

#include <algorithm>
#include <array>
#include <cassert>
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

std::vector<int> normalized_subset(const std::vector<int>& users, int K,
                                   std::size_t min_size) {
  std::vector<int> u = users;
  std::sort(u.begin(), u.end());
  if (std::adjacent_find(u.begin(), u.end()) != u.end()) {
    throw std::invalid_argument("selection: duplicate user in " +
                                subset_label(users));
  }
  if (u.size() < min_size) {
    throw std::invalid_argument("selection: need at least " +
                                std::to_string(min_size) + " users");
  }
  if (!u.empty() && (u.front() < 1 || u.back() > K)) {
    throw std::invalid_argument("selection: user outside [1.." +
                                std::to_string(K) + "]");
  }
  return u;
}

/// The shared exact security checker. n = |U| - 1; L = per-user message
/// length. `masks` are the additive pads X_u - W_u as linear maps.
VerifyReport selection_security_report(const std::vector<int>& users,
                                       const std::vector<LinearRV>& inputs,
                                       const std::vector<LinearRV>& messages,
                                       const std::vector<LinearRV>& masks,
                                       const LinearRV& sum, std::int64_t L) {
  const std::int64_t n = static_cast<std::int64_t>(users.size()) - 1;
  const Rational target(n * L);
  const std::string tag = "[U=" + subset_label(users) + "]";

  VerifyReport report;
  report.add_equal("security-leakage" + tag,
                   conditional_mutual_information(inputs, messages, {sum}).symbols,
                   Rational(0));
  report.add_equal("masked-message-entropy" + tag,
                   conditional_entropy(messages, {sum}).symbols, target);
  report.add_equal("mask-joint-entropy" + tag, entropy(masks).symbols, target);
  return report;
}

}  // namespace

MdsParams SummationParams::mds_params() const {
  MdsParams p;
  p.K = K;
  for (int n = 1; n <= K - 1; ++n) p.levels.push_back(n);
  p.q = q;
  p.block = factorial(K - 1);
  return p;
}

void SummationParams::validate() const {
  if (K < 2) {
    throw std::invalid_argument("SummationParams: K must be >= 2");
  }
  mds_params().validate();
}

LinearRV KeyMaterial::sum_rv(const std::vector<int>& users) const {
  const auto u = normalized_subset(users, params.K, 1);
  const std::int64_t L = input_len();
  FieldMatrix map(L, space->dim(), PrimeField(params.q));
  for (int k : u) {
    const auto& seg = space->segment("W_" + std::to_string(k));
    map.paste(0, seg.offset, FieldMatrix::identity(L, PrimeField(params.q)));
  }
  return make_rv("sum" + subset_label(u), map, space);
}

namespace {

/// Builds the extended seed space, the symbolic variables over it, and the
/// concrete per-user keys from a certified scheme plus sampled key seeds.
KeyMaterial assemble_keys(const SummationParams& params, MdsScheme scheme,
                          std::vector<std::uint64_t> sampled_seed) {
  const PrimeField field(params.q);
  const std::int64_t L = params.input_len();

  KeyMaterial keys;
  keys.params = params;
  keys.scheme = std::move(scheme);
  keys.vars = derive_variables(keys.scheme);

  // Joint seed space: the independent inputs first, then the key seeds.
  std::vector<std::pair<std::string, std::size_t>> segments;
  for (int k = 1; k <= params.K; ++k) {
    segments.emplace_back("W_" + std::to_string(k), static_cast<std::size_t>(L));
  }
  for (const auto& seg : keys.scheme.seed_space->segments()) {
    segments.emplace_back(seg.label, seg.size);
  }
  keys.space = std::make_shared<SeedSpace>(field, segments);
  const std::size_t key_offset = static_cast<std::size_t>(params.K) * L;

  const auto embed = [&](const LinearRV& rv) {
    FieldMatrix map(rv.map.rows(), keys.space->dim(), field);
    map.paste(0, key_offset, rv.map);
    return make_rv(rv.label, map, keys.space);
  };

  for (int k = 1; k <= params.K; ++k) {
    FieldMatrix sel(L, keys.space->dim(), field);
    sel.paste(0, keys.space->segment("W_" + std::to_string(k)).offset,
              FieldMatrix::identity(L, field));
    keys.input_rv.emplace(k, make_rv("W_" + std::to_string(k), sel, keys.space));
    keys.key_rv.emplace(k, embed(keys.vars.z(k)));
    for (int n : keys.vars.levels) {
      keys.key_mds_rv.emplace(std::make_pair(k, n), embed(keys.vars.z(k, n)));
    }
  }

  if (sampled_seed.size() != keys.scheme.seed_space->dim()) {
    throw std::invalid_argument("assemble_keys: sampled seed has " +
                                std::to_string(sampled_seed.size()) +
                                " symbols, expected " +
                                std::to_string(keys.scheme.seed_space->dim()));
  }
  keys.sampled_seed = std::move(sampled_seed);
  for (int k = 1; k <= params.K; ++k) {
    keys.z_concrete.emplace(k, matvec(keys.vars.z(k).map, keys.sampled_seed));
  }
  return keys;
}

}  // namespace

KeyMaterial setup(const SummationParams& params, std::uint64_t seed,
                  int max_attempts) {
  params.validate();
  Xoshiro256 rng(seed);
  const std::uint64_t scheme_seed = rng.next();
  MdsScheme scheme = sample_scheme(params.mds_params(), scheme_seed, max_attempts);

  std::vector<std::uint64_t> sampled_seed(scheme.seed_space->dim());
  for (auto& v : sampled_seed) v = rng.below(params.q);
  return assemble_keys(params, std::move(scheme), std::move(sampled_seed));
}

KeyMaterial resample_keys(const KeyMaterial& keys, std::uint64_t seed) {
  KeyMaterial fresh = keys;
  Xoshiro256 rng(seed);
  for (auto& v : fresh.sampled_seed) v = rng.below(keys.params.q);
  fresh.z_concrete.clear();
  for (int k = 1; k <= keys.params.K; ++k) {
    fresh.z_concrete.emplace(k, matvec(fresh.vars.z(k).map, fresh.sampled_seed));
  }
  return fresh;
}

MaskSet mask_coefficients(const KeyMaterial& keys,
                          const std::vector<int>& users) {
  const auto u = normalized_subset(users, keys.params.K, 2);
  const int n = static_cast<int>(u.size()) - 1;
  const std::size_t block = static_cast<std::size_t>(keys.input_len());
  const PrimeField field(keys.params.q);

  // The level-n maps live entirely on seed segments S^1..S^n, the first
  // n*block columns of the key seed space; restricted there, the stack of any
  // n of them is square and invertible by the MDS property.
  const std::size_t prefix_cols = static_cast<std::size_t>(n) * block;
  const auto restricted = [&](int user) {
    return keys.vars.z(user, n).map.block(0, 0, block, prefix_cols);
  };

  std::vector<FieldMatrix> stack_parts;
  for (int i = 0; i < n; ++i) stack_parts.push_back(restricted(u[i]));
  const FieldMatrix stacked = vstack(stack_parts);
  const FieldMatrix target = restricted(u[n]);

  FieldMatrix solution(block, prefix_cols, field);
  try {
    solution = target * inverse(stacked);
  } catch (const std::domain_error& e) {
    throw std::runtime_error(
        "mask_coefficients: stacked level-" + std::to_string(n) +
        " key maps are singular, key set is not MDS (" + e.what() + ")");
  }

  MaskSet masks;
  masks.level = n;
  for (int i = 0; i < n; ++i) {
    FieldMatrix f =
        solution.block(0, static_cast<std::size_t>(i) * block, block, block);
    if (rank(f) < block) {
      throw std::runtime_error("mask_coefficients: solved coefficient for user " +
                               std::to_string(u[i]) +
                               " is singular, key set is not MDS");
    }
    masks.F.emplace(u[i], std::move(f));
  }
  masks.F.emplace(u[n], negated(FieldMatrix::identity(block, field)));

  // The cancellation identity must hold on the full maps.
  FieldMatrix residue(block, keys.vars.space->dim(), field);
  for (int k : u) {
    residue = residue + masks.F.at(k) * keys.vars.z(k, n).map;
  }
  if (!residue.is_zero()) {
    throw std::runtime_error(
        "mask_coefficients: cancellation identity failed, key set is not MDS");
  }
  return masks;
}

std::vector<std::uint64_t> encode(const KeyMaterial& keys, const MaskSet& masks,
                                  const std::vector<int>& users, int u,
                                  const std::vector<std::uint64_t>& input) {
  const auto sel = normalized_subset(users, keys.params.K, 2);
  if (std::find(sel.begin(), sel.end(), u) == sel.end()) {
    throw std::invalid_argument("encode: user " + std::to_string(u) +
                                " not selected");
  }
  const std::size_t L = static_cast<std::size_t>(keys.input_len());
  if (input.size() != L) {
    throw std::invalid_argument("encode: input has " +
                                std::to_string(input.size()) +
                                " symbols, expected " + std::to_string(L));
  }
  const PrimeField field(keys.params.q);
  const auto key_part = matvec(keys.vars.z(u, masks.level).map, keys.sampled_seed);
  return vec_add(input, matvec(masks.F.at(u), key_part), field);
}

std::vector<std::uint64_t> decode(
    const PrimeField& field, const std::vector<int>& users,
    const std::map<int, std::vector<std::uint64_t>>& messages) {
  if (users.empty()) {
    throw std::invalid_argument("decode: empty selection");
  }
  std::vector<std::uint64_t> sum;
  for (int u : users) {
    auto it = messages.find(u);
    if (it == messages.end()) {
      throw std::invalid_argument("decode: missing message from user " +
                                  std::to_string(u));
    }
    if (sum.empty()) {
      sum.assign(it->second.size(), 0);
    }
    sum = vec_add(sum, it->second, field);
  }
  return sum;
}

std::vector<std::uint64_t> single_user(const KeyMaterial& keys,
                                       const std::vector<std::uint64_t>& input) {
  if (input.size() != static_cast<std::size_t>(keys.input_len())) {
    throw std::invalid_argument("single_user: input has " +
                                std::to_string(input.size()) +
                                " symbols, expected " +
                                std::to_string(keys.input_len()));
  }
  return input;
}

std::map<int, LinearRV> message_maps(const KeyMaterial& keys,
                                     const std::vector<int>& users,
                                     const MaskSet& masks) {
  const auto u = normalized_subset(users, keys.params.K, 2);
  std::map<int, LinearRV> out;
  for (int k : u) {
    const FieldMatrix map = keys.input_rv.at(k).map +
                            masks.F.at(k) * keys.key_mds_rv.at({k, masks.level}).map;
    out.emplace(k, make_rv("X_" + std::to_string(k) + subset_label(u), map,
                           keys.space));
  }
  return out;
}

VerifyReport security_check(const KeyMaterial& keys,
                            const std::vector<int>& users,
                            const MaskSet& masks) {
  const auto u = normalized_subset(users, keys.params.K, 2);
  const auto msgs = message_maps(keys, u, masks);

  std::vector<LinearRV> inputs, messages, mask_rvs;
  for (int k : u) {
    inputs.push_back(keys.input_rv.at(k));
    messages.push_back(msgs.at(k));
    mask_rvs.push_back(make_rv("mask_" + std::to_string(k),
                               msgs.at(k).map - keys.input_rv.at(k).map,
                               keys.space));
  }
  return selection_security_report(u, inputs, messages, mask_rvs,
                                   keys.sum_rv(u), keys.input_len());
}

VerifyReport security_check(const KeyMaterial& keys,
                            const std::vector<int>& users) {
  return security_check(keys, users, mask_coefficients(keys, users));
}

namespace {

/// Ordered partitions of `users` into (U1, U2, U3) with U1, U2 nonempty; U3
/// may be empty. Exhaustive for |U| <= 4, otherwise `cap` seed-deterministic
/// samples.
std::vector<std::array<std::vector<int>, 3>> identity_partitions(
    const std::vector<int>& users, int cap, std::uint64_t seed) {
  std::vector<std::array<std::vector<int>, 3>> out;
  const std::size_t m = users.size();
  const auto from_assignment = [&](const std::vector<int>& assign) {
    std::array<std::vector<int>, 3> groups;
    for (std::size_t i = 0; i < m; ++i) {
      groups[assign[i]].push_back(users[i]);
    }
    return groups;
  };

  if (m <= 4) {
    std::vector<int> assign(m, 0);
    for (;;) {
      const auto groups = from_assignment(assign);
      if (!groups[0].empty() && !groups[1].empty()) out.push_back(groups);
      std::size_t i = 0;
      while (i < m && assign[i] == 2) assign[i++] = 0;
      if (i == m) break;
      ++assign[i];
    }
    return out;
  }

  Xoshiro256 rng(seed);
  while (static_cast<int>(out.size()) < cap) {
    std::vector<int> assign(m);
    for (auto& a : assign) a = static_cast<int>(rng.below(3));
    const auto groups = from_assignment(assign);
    if (!groups[0].empty() && !groups[1].empty()) out.push_back(groups);
  }
  return out;
}

}  // namespace

VerifyReport check_converse_bounds(const KeyMaterial& keys,
                                   const std::vector<std::vector<int>>& family,
                                   const ConverseOptions& opts) {
  const std::int64_t L = keys.input_len();
  VerifyReport report;

  for (const auto& users : family) {
    const auto u = normalized_subset(users, keys.params.K, 2);
    const int m = static_cast<int>(u.size());
    const std::string tag = "[U=" + subset_label(u) + "]";

    const auto key_set = [&](const std::vector<int>& group) {
      std::vector<LinearRV> set;
      for (int k : group) set.push_back(keys.key_rv.at(k));
      return set;
    };
    const auto pair_set = [&](const std::vector<int>& group) {
      std::vector<LinearRV> set;
      for (int k : group) {
        set.push_back(keys.input_rv.at(k));
        set.push_back(keys.key_rv.at(k));
      }
      return set;
    };

    // Keys-only conditional MI equals the same expression on (input, key)
    // pairs; the inputs are independent of everything else, so they add
    // nothing for disjoint groups.
    for (const auto& groups :
         identity_partitions(u, opts.partition_cap, opts.seed)) {
      const Rational lhs =
          conditional_mutual_information(key_set(groups[0]), key_set(groups[1]),
                                         key_set(groups[2]))
              .symbols;
      const Rational rhs =
          conditional_mutual_information(pair_set(groups[0]), pair_set(groups[1]),
                                         pair_set(groups[2]))
              .symbols;
      report.add_equal("augmentation-identity[U1=" + subset_label(groups[0]) +
                           ",U2=" + subset_label(groups[1]) +
                           ",U3=" + subset_label(groups[2]) + "]",
                       lhs, rhs);
    }

    // sum_{i in [2:m]} I(Z_{k_i}; earlier | later) >= (m-1) L.
    Rational chain(0);
    for (int i = 2; i <= m; ++i) {
      std::vector<LinearRV> earlier, later;
      for (int j = 1; j <= i - 1; ++j) earlier.push_back(keys.key_rv.at(u[j - 1]));
      for (int j = i + 1; j <= m; ++j) later.push_back(keys.key_rv.at(u[j - 1]));
      chain += conditional_mutual_information({keys.key_rv.at(u[i - 1])},
                                              earlier, later)
                   .symbols;
    }
    report.add_at_least("sequential-mi" + tag, chain, Rational((m - 1) * L));

    // Averaged over orderings: I(Z_first; rest) >= H_{m-1} L. The term only
    // depends on which user comes first, but we follow the permutation
    // average literally for small sets.
    Rational total(0);
    std::int64_t count = 0;
    if (m <= 4) {
      std::vector<int> perm = u;
      std::sort(perm.begin(), perm.end());
      do {
        std::vector<LinearRV> rest;
        for (int j = 1; j < m; ++j) rest.push_back(keys.key_rv.at(perm[j]));
        total += conditional_mutual_information({keys.key_rv.at(perm[0])},
                                                rest, {})
                     .symbols;
        ++count;
      } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
      Xoshiro256 rng(opts.seed);
      std::vector<int> perm = u;
      for (int t = 0; t < opts.permutation_cap; ++t) {
        for (std::size_t i = 0; i + 1 < perm.size(); ++i) {
          const std::size_t j =
              i + static_cast<std::size_t>(rng.below(perm.size() - i));
          std::swap(perm[i], perm[j]);
        }
        std::vector<LinearRV> rest;
        for (int j = 1; j < m; ++j) rest.push_back(keys.key_rv.at(perm[j]));
        total += conditional_mutual_information({keys.key_rv.at(perm[0])},
                                                rest, {})
                     .symbols;
        ++count;
      }
    }
    report.add_at_least("averaged-mi" + tag, total / Rational(count),
                        harmonic_number(m - 1) * Rational(L));
  }
  return report;
}

nlohmann::ordered_json keys_to_json(const KeyMaterial& keys) {
  nlohmann::ordered_json doc = scheme_to_json(keys.scheme);
  doc["format"] = "sum-keys";
  doc["sampled_seed"] = keys.sampled_seed;
  return doc;
}

KeyMaterial keys_from_json(const nlohmann::ordered_json& doc) {
  if (doc.value("format", "") != "sum-keys" || doc.value("version", 0) != 1) {
    throw std::runtime_error("keys_from_json: not a version-1 sum-keys document");
  }
  nlohmann::ordered_json scheme_doc = doc;
  scheme_doc["format"] = "mds-scheme";
  MdsScheme scheme = scheme_from_json(scheme_doc);

  SummationParams params;
  params.K = scheme.params.K;
  params.q = scheme.params.q;
  if (scheme.params != params.mds_params()) {
    throw std::runtime_error(
        "keys_from_json: scheme parameters do not match a summation "
        "configuration (levels [1..K-1], block (K-1)!)");
  }
  // Certification is never trusted from disk.
  if (auto failure = first_singular_condition(scheme)) {
    throw std::runtime_error("keys_from_json: scheme failed certification at " +
                             *failure);
  }

  auto seed = doc.at("sampled_seed").get<std::vector<std::uint64_t>>();
  for (std::uint64_t v : seed) {
    if (v >= params.q) {
      throw std::runtime_error("keys_from_json: seed symbol out of range");
    }
  }
  if (seed.size() != scheme.seed_space->dim()) {
    throw std::runtime_error("keys_from_json: sampled_seed has " +
                             std::to_string(seed.size()) + " symbols, expected " +
                             std::to_string(scheme.seed_space->dim()));
  }
  return assemble_keys(params, std::move(scheme), std::move(seed));
}

const std::vector<std::vector<int>>& Table2Baseline::selectable_subsets() {
  static const std::vector<std::vector<int>> subsets = {
      {1, 2}, {1, 3}, {2, 3}, {1, 2, 3}};
  return subsets;
}

Table2Baseline::Table2Baseline(std::uint64_t q, std::uint64_t seed)
    : field_(q) {
  if (q < 5) {
    throw std::invalid_argument("Table2Baseline: need prime q >= 5");
  }
  // Seed layout: three 2-symbol inputs, then the four key symbols A,B,C,D.
  space_ = std::make_shared<SeedSpace>(
      field_, std::vector<std::pair<std::string, std::size_t>>{
                  {"W_1", 2}, {"W_2", 2}, {"W_3", 2}, {"ABCD", 4}});
  const std::size_t key_off = space_->segment("ABCD").offset;

  for (int k = 1; k <= 3; ++k) {
    FieldMatrix sel(2, space_->dim(), field_);
    sel.paste(0, space_->segment("W_" + std::to_string(k)).offset,
              FieldMatrix::identity(2, field_));
    input_rv_.emplace(k, make_rv("W_" + std::to_string(k), sel, space_));
  }

  // Keys: Z_1 = (A,B,C), Z_2 = (A,B,D), Z_3 = (A,C,D).
  const std::vector<std::vector<int>> key_rows = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}};
  for (int k = 1; k <= 3; ++k) {
    FieldMatrix map(3, space_->dim(), field_);
    for (int r = 0; r < 3; ++r) {
      map.set(r, key_off + key_rows[k - 1][r], 1);
    }
    keys_.emplace(k, make_rv("Z_" + std::to_string(k), map, space_));
  }

  // Mask table over (A, B, C, D); rows are message symbols.
  const auto coeff = [&](std::vector<std::vector<std::int64_t>> rows) {
    return FieldMatrix::from_rows(rows, field_);
  };
  masks_[{1, 2}].emplace(1, coeff({{1, 0, 0, 0}, {0, 1, 0, 0}}));    // +(A; B)
  masks_[{1, 2}].emplace(2, coeff({{-1, 0, 0, 0}, {0, -1, 0, 0}}));  // -(A; B)
  masks_[{1, 3}].emplace(1, coeff({{1, 0, 0, 0}, {0, 0, 1, 0}}));    // +(A; C)
  masks_[{1, 3}].emplace(3, coeff({{-1, 0, 0, 0}, {0, 0, -1, 0}}));  // -(A; C)
  masks_[{2, 3}].emplace(2, coeff({{1, 0, 0, 0}, {0, 0, 0, 1}}));    // +(A; D)
  masks_[{2, 3}].emplace(3, coeff({{-1, 0, 0, 0}, {0, 0, 0, -1}}));  // -(A; D)
  masks_[{1, 2, 3}].emplace(1, coeff({{1, 1, 0, 0}, {0, 0, 1, 0}}));    // +(A+B; C)
  masks_[{1, 2, 3}].emplace(2, coeff({{0, -1, 0, 0}, {0, 0, 0, 1}}));   // +(-B; D)
  masks_[{1, 2, 3}].emplace(3, coeff({{-1, 0, 0, 0}, {0, 0, -1, -1}})); // -(A; C+D)

  Xoshiro256 rng(seed);
  key_seed_.resize(4);
  for (auto& v : key_seed_) v = rng.below(q);
}

const LinearRV& Table2Baseline::key(int k) const {
  auto it = keys_.find(k);
  if (it == keys_.end()) {
    throw std::invalid_argument("Table2Baseline: no key for user " +
                                std::to_string(k));
  }
  return it->second;
}

const FieldMatrix& Table2Baseline::mask(const std::vector<int>& users,
                                        int u) const {
  const auto sel = normalized_subset(users, 3, 2);
  auto it = masks_.find(sel);
  if (it == masks_.end()) {
    throw std::invalid_argument("Table2Baseline: no mask table for " +
                                subset_label(users));
  }
  auto jt = it->second.find(u);
  if (jt == it->second.end()) {
    throw std::invalid_argument("Table2Baseline: user " + std::to_string(u) +
                                " not in " + subset_label(sel));
  }
  return jt->second;
}

std::vector<std::uint64_t> Table2Baseline::encode(
    const std::vector<int>& users, int u,
    const std::vector<std::uint64_t>& input) const {
  if (input.size() != 2) {
    throw std::invalid_argument("Table2Baseline: inputs are 2 symbols");
  }
  return vec_add(input, matvec(mask(users, u), key_seed_), field_);
}

VerifyReport Table2Baseline::security_check(const std::vector<int>& users) const {
  const auto sel = normalized_subset(users, 3, 2);
  const std::size_t key_off = space_->segment("ABCD").offset;

  std::vector<LinearRV> inputs, messages, mask_rvs;
  FieldMatrix sum_map(2, space_->dim(), field_);
  for (int k : sel) {
    const FieldMatrix& coeffs = mask(sel, k);
    FieldMatrix mask_map(2, space_->dim(), field_);
    mask_map.paste(0, key_off, coeffs);
    inputs.push_back(input_rv_.at(k));
    messages.push_back(make_rv("X_" + std::to_string(k) + subset_label(sel),
                               input_rv_.at(k).map + mask_map, space_));
    mask_rvs.push_back(make_rv("mask_" + std::to_string(k), mask_map, space_));
    sum_map = sum_map + input_rv_.at(k).map;
  }
  return selection_security_report(sel, inputs, messages, mask_rvs,
                                   make_rv("sum" + subset_label(sel), sum_map,
                                           space_),
                                   input_len());
}

}  // namespace mdskit
