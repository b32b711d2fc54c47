#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mdskit/matrix.hpp"
#include "mdskit/rational.hpp"

namespace mdskit {

struct SeedSegment {
  std::string label;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// A vector of i.i.d. uniform symbols over GF(p), partitioned into named,
/// disjoint segments that cover [0, dim). All random variables in one
/// analysis refer to the same SeedSpace instance.
class SeedSpace {
 public:
  SeedSpace(PrimeField field,
            const std::vector<std::pair<std::string, std::size_t>>& segments)
      : field_(field) {
    std::size_t off = 0;
    for (const auto& [label, size] : segments) {
      for (const auto& existing : segments_) {
        if (existing.label == label) {
          throw std::invalid_argument("SeedSpace: duplicate segment label " +
                                      label);
        }
      }
      segments_.push_back({label, off, size});
      off += size;
    }
    dim_ = off;
  }

  const PrimeField& field() const { return field_; }
  std::size_t dim() const { return dim_; }
  const std::vector<SeedSegment>& segments() const { return segments_; }

  const SeedSegment& segment(const std::string& label) const {
    for (const auto& s : segments_) {
      if (s.label == label) return s;
    }
    throw std::invalid_argument("SeedSpace: unknown segment " + label);
  }

 private:
  PrimeField field_;
  std::size_t dim_ = 0;
  std::vector<SeedSegment> segments_;
};

using SeedSpacePtr = std::shared_ptr<const SeedSpace>;

/// A named random variable defined as map * seed for the shared uniform seed
/// vector. Its entropy is rank(map) seed symbols.
struct LinearRV {
  std::string label;
  FieldMatrix map;
  SeedSpacePtr space;
};

LinearRV make_rv(std::string label, FieldMatrix map, SeedSpacePtr space);

/// Entropy in units of log2(q) symbols; exact. Bits only at display time.
struct EntropyValue {
  Rational symbols;

  double bits(std::uint64_t q) const {
    return symbols.to_double() * std::log2(static_cast<double>(q));
  }
};

/// Joint entropy H(vars) = rank of the vertically stacked maps, in symbols.
EntropyValue entropy(const std::vector<LinearRV>& vars);

/// I(A; B | C), exact, via rank([A,C]) + rank([B,C]) - rank([A,B,C]) -
/// rank([C]). Sets may overlap; empty C gives plain mutual information.
EntropyValue conditional_mutual_information(const std::vector<LinearRV>& a,
                                            const std::vector<LinearRV>& b,
                                            const std::vector<LinearRV>& c);

/// H(A | C) = H(A, C) - H(C).
EntropyValue conditional_entropy(const std::vector<LinearRV>& a,
                                 const std::vector<LinearRV>& c);

inline constexpr std::uint64_t kBruteForceBudget = 1'000'000;

/// Exact Shannon entropy (in bits) of the joint output distribution obtained
/// by enumerating every seed assignment. Independent of the rank calculus;
/// used only to validate it. Throws when q^dim exceeds the enumeration
/// budget, reporting the required count.
double brute_force_entropy(const std::vector<LinearRV>& vars);

struct ChainIdentityReport {
  Rational lhs;  // sum of individual entropies
  Rational rhs;  // joint entropy plus prefix mutual-information terms
  bool pass = false;
};

/// Checks sum_i H(Z_i) = H(Z_1..Z_n) + sum_{i>=2} I(Z_i; Z_1..Z_{i-1}).
/// This is an identity, so pass is expected on every input.
ChainIdentityReport check_chain_identity(const std::vector<LinearRV>& vars);

}  // namespace mdskit
