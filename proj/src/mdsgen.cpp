#include "mdskit/mdsgen.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "mdskit/rng.hpp"

namespace mdskit {

std::int64_t factorial(int n) {
  if (n < 0 || n > 20) {
    throw std::invalid_argument("factorial: out of range");
  }
  std::int64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t b = 1;
  for (int i = 1; i <= k; ++i) {
    b = b * (n - k + i) / i;
  }
  return b;
}

MdsParams MdsParams::standard(int K, std::uint64_t q) {
  MdsParams p;
  p.K = K;
  for (int n = 1; n <= K; ++n) p.levels.push_back(n);
  p.q = q;
  p.block = factorial(K);
  return p;
}

std::int64_t MdsParams::condition_count() const {
  std::int64_t count = 0;
  for (int n : levels) {
    count += static_cast<std::int64_t>(n) * binomial(K, n);
  }
  return count;
}

std::uint64_t MdsParams::field_size_bound() const {
  // Saturating product: for huge K the bound exceeds the modulus cap anyway,
  // and a wrapped value must not let an illegal q through.
  const unsigned __int128 bound =
      static_cast<unsigned __int128>(block) *
      static_cast<unsigned __int128>(condition_count());
  constexpr std::uint64_t cap = ~0ull;
  return bound > cap ? cap : static_cast<std::uint64_t>(bound);
}

void MdsParams::validate() const {
  if (K < 1) {
    throw std::invalid_argument("MdsParams: K must be >= 1");
  }
  if (levels.empty() || levels.size() > static_cast<std::size_t>(K)) {
    throw std::invalid_argument("MdsParams: levels must be a nonempty prefix of [1..K]");
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] != static_cast<int>(i) + 1) {
      throw std::invalid_argument(
          "MdsParams: levels must form the contiguous prefix {1..n_max}");
    }
  }
  if (block <= 0) {
    throw std::invalid_argument("MdsParams: block must be positive");
  }
  for (int n : levels) {
    if (block % n != 0) {
      throw std::invalid_argument("MdsParams: block " + std::to_string(block) +
                                  " not divisible by level " +
                                  std::to_string(n));
    }
  }
  PrimeField field(q);  // validates primality and the 2^31 cap
  if (q <= field_size_bound()) {
    throw std::invalid_argument(
        "MdsParams: q = " + std::to_string(q) +
        " is not above the field-size bound " +
        std::to_string(field_size_bound()) + " (block * condition count)");
  }
}

const FieldMatrix& MdsScheme::h(int k, int n) const {
  auto it = H.find({k, n});
  if (it == H.end()) {
    throw std::invalid_argument("MdsScheme: no H for user " +
                                std::to_string(k) + " level " +
                                std::to_string(n));
  }
  return it->second;
}

const FieldMatrix& MdsScheme::v(int k, int n, int m) const {
  auto it = V.find({k, n, m});
  if (it == V.end()) {
    throw std::invalid_argument("MdsScheme: no V for user " +
                                std::to_string(k) + " levels " +
                                std::to_string(n) + "<-" + std::to_string(m));
  }
  return it->second;
}

namespace {

std::string subset_label(const std::vector<int>& users) {
  std::string s = "{";
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(users[i]);
  }
  return s + "}";
}

void subsets_of_size(int K, int n, std::vector<std::vector<int>>& out) {
  std::vector<int> current;
  // Lexicographic enumeration of n-subsets of [1..K].
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i + 1;
  for (;;) {
    out.push_back(idx);
    int i = n - 1;
    while (i >= 0 && idx[i] == K - (n - 1 - i)) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
}

SeedSpacePtr make_seed_space(const MdsParams& params) {
  std::vector<std::pair<std::string, std::size_t>> segments;
  for (int n : params.levels) {
    segments.emplace_back("S^" + std::to_string(n),
                          static_cast<std::size_t>(params.block));
  }
  return std::make_shared<SeedSpace>(PrimeField(params.q), segments);
}

}  // namespace

std::vector<ConditionMatrix> condition_matrices(const MdsScheme& scheme) {
  const MdsParams& p = scheme.params;
  std::vector<ConditionMatrix> out;
  for (int n : p.levels) {
    std::vector<std::vector<int>> subsets;
    subsets_of_size(p.K, n, subsets);
    for (const auto& users : subsets) {
      std::vector<FieldMatrix> h_parts;
      for (int k : users) h_parts.push_back(scheme.h(k, n));
      out.push_back({"H[n=" + std::to_string(n) + "|U=" + subset_label(users) + "]",
                     vstack(h_parts)});
      for (int m : p.levels) {
        if (m >= n) break;
        std::vector<FieldMatrix> vh_parts;
        for (int k : users) {
          vh_parts.push_back(scheme.v(k, n, m) * scheme.h(k, m));
        }
        out.push_back({"VH[n=" + std::to_string(n) + ",m=" + std::to_string(m) +
                           "|U=" + subset_label(users) + "]",
                       vstack(vh_parts)});
      }
    }
  }
  return out;
}

std::optional<std::string> first_singular_condition(const MdsScheme& scheme) {
  for (const auto& cond : condition_matrices(scheme)) {
    assert(cond.matrix.rows() == cond.matrix.cols());
    if (rank(cond.matrix) < cond.matrix.rows()) {
      return cond.label;
    }
  }
  return std::nullopt;
}

MdsScheme sample_scheme(const MdsParams& params, std::uint64_t seed,
                        int max_attempts) {
  params.validate();
  if (max_attempts < 1) {
    throw std::invalid_argument("sample_scheme: max_attempts must be >= 1");
  }
  const PrimeField field(params.q);
  Xoshiro256 rng(seed);

  std::string last_failure;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    MdsScheme scheme;
    scheme.params = params;
    scheme.rng_seed = seed;
    scheme.seed_space = make_seed_space(params);
    // Fixed draw order keeps (params, seed) -> scheme bit-reproducible.
    for (int k = 1; k <= params.K; ++k) {
      for (int n : params.levels) {
        scheme.H.emplace(
            std::make_pair(k, n),
            random_matrix(rng, params.block / n, params.block, field));
      }
    }
    for (int k = 1; k <= params.K; ++k) {
      for (int n : params.levels) {
        for (int m : params.levels) {
          if (m >= n) break;
          scheme.V.emplace(
              std::make_tuple(k, n, m),
              random_matrix(rng, params.block / n, params.block / m, field));
        }
      }
    }
    auto failure = first_singular_condition(scheme);
    if (!failure) {
      return scheme;
    }
    last_failure = *failure;
  }
  throw std::runtime_error(
      "sample_scheme: no certified scheme after " +
      std::to_string(max_attempts) + " attempts; last failing condition: " +
      last_failure);
}

const LinearRV& MdsVariables::z(int k) const {
  auto it = source.find(k);
  if (it == source.end()) {
    throw std::invalid_argument("MdsVariables: no source variable for user " +
                                std::to_string(k));
  }
  return it->second;
}

const LinearRV& MdsVariables::z(int k, int n) const {
  auto it = mds.find({k, n});
  if (it == mds.end()) {
    throw std::invalid_argument("MdsVariables: no variable for user " +
                                std::to_string(k) + " level " +
                                std::to_string(n));
  }
  return it->second;
}

std::vector<LinearRV> MdsVariables::level_prefix(int k, int n) const {
  std::vector<LinearRV> out;
  for (int m : levels) {
    if (m > n) break;
    out.push_back(z(k, m));
  }
  return out;
}

MdsVariables derive_variables(const MdsScheme& scheme) {
  const MdsParams& p = scheme.params;
  const PrimeField field(p.q);
  const std::size_t block = static_cast<std::size_t>(p.block);

  MdsVariables vars;
  vars.K = p.K;
  vars.levels = p.levels;
  vars.block = p.block;
  vars.space = scheme.seed_space;

  const auto seg_offset = [&](int n) {
    return scheme.seed_space->segment("S^" + std::to_string(n)).offset;
  };

  for (int k = 1; k <= p.K; ++k) {
    // Z_k = (H_k^n S^n)_n: one fresh generator block per level.
    std::size_t src_rows = 0;
    for (int n : p.levels) src_rows += block / n;
    FieldMatrix src(src_rows, scheme.seed_space->dim(), field);
    std::size_t cursor = 0;
    for (int n : p.levels) {
      src.paste(cursor, seg_offset(n), scheme.h(k, n));
      cursor += block / n;
    }
    vars.source.emplace(
        k, make_rv("Z_" + std::to_string(k), src, scheme.seed_space));

    // Z_k^n = ((V_k^{n<-m} H_k^m S^m)_{m<n}, H_k^n S^n).
    for (int n : p.levels) {
      const std::size_t part = block / n;
      std::size_t var_rows = 0;
      for (int m : p.levels) {
        if (m > n) break;
        var_rows += part;
      }
      FieldMatrix map(var_rows, scheme.seed_space->dim(), field);
      cursor = 0;
      for (int m : p.levels) {
        if (m >= n) break;
        map.paste(cursor, seg_offset(m), scheme.v(k, n, m) * scheme.h(k, m));
        cursor += part;
      }
      map.paste(cursor, seg_offset(n), scheme.h(k, n));
      vars.mds.emplace(
          std::make_pair(k, n),
          make_rv("Z_" + std::to_string(k) + "^" + std::to_string(n), map,
                  scheme.seed_space));
    }
  }
  return vars;
}

Rational optimal_rate(int K) {
  if (K < 1) {
    throw std::invalid_argument("optimal_rate: K must be >= 1");
  }
  return harmonic_number(K);
}

Rational scheme_rate(const MdsScheme& scheme) {
  std::int64_t source_symbols = 0;
  for (int n : scheme.params.levels) {
    source_symbols += scheme.params.block / n;
  }
  return Rational(source_symbols, scheme.params.block);
}

Rational variables_rate(const MdsVariables& vars) {
  const auto it = vars.source.begin();
  if (it == vars.source.end()) {
    throw std::invalid_argument("variables_rate: empty variable set");
  }
  return Rational(static_cast<std::int64_t>(it->second.map.rows()),
                  vars.block);
}

MdsVariables vandermonde_baseline(int K, std::uint64_t q) {
  if (K < 1) {
    throw std::invalid_argument("vandermonde_baseline: K must be >= 1");
  }
  const PrimeField field(q);  // primality enforced here
  if (q <= static_cast<std::uint64_t>(K)) {
    throw std::invalid_argument(
        "vandermonde_baseline: need q > K for distinct evaluation points, got "
        "q=" + std::to_string(q) + ", K=" + std::to_string(K));
  }

  std::vector<std::pair<std::string, std::size_t>> segments;
  for (int n = 1; n <= K; ++n) {
    segments.emplace_back("S^" + std::to_string(n), static_cast<std::size_t>(n));
  }
  auto space = std::make_shared<SeedSpace>(field, segments);

  MdsVariables vars;
  vars.K = K;
  for (int n = 1; n <= K; ++n) vars.levels.push_back(n);
  vars.block = 1;
  vars.space = space;

  for (int k = 1; k <= K; ++k) {
    FieldMatrix src(K, space->dim(), field);
    for (int n = 1; n <= K; ++n) {
      const std::size_t off = space->segment("S^" + std::to_string(n)).offset;
      FieldMatrix row(1, space->dim(), field);
      const std::uint64_t x = field.reduce(k - 1);
      for (int i = 0; i < n; ++i) {
        row.set(0, off + i, static_cast<std::int64_t>(field.pow(x, i)));
      }
      src.paste(n - 1, 0, row);
      vars.mds.emplace(
          std::make_pair(k, n),
          make_rv("Z_" + std::to_string(k) + "^" + std::to_string(n), row,
                  space));
    }
    vars.source.emplace(k, make_rv("Z_" + std::to_string(k), src, space));
  }
  return vars;
}

nlohmann::ordered_json scheme_to_json(const MdsScheme& scheme) {
  nlohmann::ordered_json doc;
  doc["format"] = "mds-scheme";
  doc["version"] = 1;
  doc["K"] = scheme.params.K;
  doc["q"] = scheme.params.q;
  doc["block"] = scheme.params.block;
  doc["levels"] = scheme.params.levels;
  doc["rng"] = Xoshiro256::kAlgorithm;
  doc["rng_seed"] = scheme.rng_seed;
  doc["H"] = nlohmann::ordered_json::array();
  for (const auto& [key, m] : scheme.H) {
    nlohmann::ordered_json jm;
    jm["k"] = key.first;
    jm["n"] = key.second;
    jm["rows"] = m.rows();
    jm["cols"] = m.cols();
    jm["data"] = m.data();
    doc["H"].push_back(jm);
  }
  doc["V"] = nlohmann::ordered_json::array();
  for (const auto& [key, m] : scheme.V) {
    nlohmann::ordered_json jm;
    jm["k"] = std::get<0>(key);
    jm["n"] = std::get<1>(key);
    jm["m"] = std::get<2>(key);
    jm["rows"] = m.rows();
    jm["cols"] = m.cols();
    jm["data"] = m.data();
    doc["V"].push_back(jm);
  }
  return doc;
}

namespace {

FieldMatrix matrix_from_json(const nlohmann::ordered_json& jm,
                             const PrimeField& field, std::size_t want_rows,
                             std::size_t want_cols) {
  const std::size_t rows = jm.at("rows").get<std::size_t>();
  const std::size_t cols = jm.at("cols").get<std::size_t>();
  if (rows != want_rows || cols != want_cols) {
    throw std::runtime_error("scheme_from_json: matrix is " +
                             std::to_string(rows) + "x" + std::to_string(cols) +
                             ", expected " + std::to_string(want_rows) + "x" +
                             std::to_string(want_cols));
  }
  const auto& data = jm.at("data");
  if (data.size() != rows * cols) {
    throw std::runtime_error("scheme_from_json: matrix data length mismatch");
  }
  FieldMatrix m(rows, cols, field);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::uint64_t v = data[i * cols + j].get<std::uint64_t>();
      if (v >= field.modulus()) {
        throw std::runtime_error("scheme_from_json: entry " +
                                 std::to_string(v) + " out of range mod " +
                                 std::to_string(field.modulus()));
      }
      m.set(i, j, static_cast<std::int64_t>(v));
    }
  }
  return m;
}

}  // namespace

MdsScheme scheme_from_json(const nlohmann::ordered_json& doc) {
  if (doc.value("format", "") != "mds-scheme" || doc.value("version", 0) != 1) {
    throw std::runtime_error("scheme_from_json: not a version-1 mds-scheme document");
  }
  MdsParams params;
  params.K = doc.at("K").get<int>();
  params.q = doc.at("q").get<std::uint64_t>();
  params.block = doc.at("block").get<std::int64_t>();
  params.levels = doc.at("levels").get<std::vector<int>>();
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("scheme_from_json: ") + e.what());
  }

  MdsScheme scheme;
  scheme.params = params;
  scheme.rng_seed = doc.value("rng_seed", 0ull);
  scheme.seed_space = make_seed_space(params);
  const PrimeField field(params.q);

  for (const auto& jm : doc.at("H")) {
    const int k = jm.at("k").get<int>();
    const int n = jm.at("n").get<int>();
    scheme.H.emplace(std::make_pair(k, n),
                     matrix_from_json(jm, field, params.block / n, params.block));
  }
  for (const auto& jm : doc.at("V")) {
    const int k = jm.at("k").get<int>();
    const int n = jm.at("n").get<int>();
    const int m = jm.at("m").get<int>();
    scheme.V.emplace(std::make_tuple(k, n, m),
                     matrix_from_json(jm, field, params.block / n, params.block / m));
  }

  // Every (k, n) and (k, n, m) slot must be present with the right shape.
  for (int k = 1; k <= params.K; ++k) {
    for (int n : params.levels) {
      scheme.h(k, n);
      for (int m : params.levels) {
        if (m >= n) break;
        scheme.v(k, n, m);
      }
    }
  }
  if (scheme.H.size() !=
      params.levels.size() * static_cast<std::size_t>(params.K)) {
    throw std::runtime_error("scheme_from_json: unexpected extra H entries");
  }
  return scheme;
}

}  // namespace mdskit
