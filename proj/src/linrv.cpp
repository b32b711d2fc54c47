#include "mdskit/linrv.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace mdskit {

LinearRV make_rv(std::string label, FieldMatrix map, SeedSpacePtr space) {
  if (!space) {
    throw std::invalid_argument("make_rv: null seed space");
  }
  if (map.cols() != space->dim()) {
    throw std::invalid_argument("make_rv: map has " +
                                std::to_string(map.cols()) +
                                " columns, seed space has dim " +
                                std::to_string(space->dim()));
  }
  if (map.field() != space->field()) {
    throw std::invalid_argument("make_rv: field mismatch with seed space");
  }
  return LinearRV{std::move(label), std::move(map), std::move(space)};
}

namespace {

const SeedSpace* common_space(
    std::initializer_list<const std::vector<LinearRV>*> sets) {
  const SeedSpace* space = nullptr;
  for (const auto* set : sets) {
    for (const auto& rv : *set) {
      if (space == nullptr) {
        space = rv.space.get();
      } else if (rv.space.get() != space) {
        throw std::invalid_argument(
            "entropy calculus: variables from different seed spaces (" +
            rv.label + ")");
      }
    }
  }
  return space;
}

std::size_t stacked_rank(const std::vector<const std::vector<LinearRV>*>& sets) {
  std::vector<FieldMatrix> maps;
  for (const auto* set : sets) {
    for (const auto& rv : *set) maps.push_back(rv.map);
  }
  if (maps.empty()) return 0;
  return rank(vstack(maps));
}

}  // namespace

EntropyValue entropy(const std::vector<LinearRV>& vars) {
  common_space({&vars});
  if (vars.empty()) return {Rational(0)};
  return {Rational(static_cast<std::int64_t>(stacked_rank({&vars})))};
}

EntropyValue conditional_mutual_information(const std::vector<LinearRV>& a,
                                            const std::vector<LinearRV>& b,
                                            const std::vector<LinearRV>& c) {
  common_space({&a, &b, &c});
  const std::int64_t ac = static_cast<std::int64_t>(stacked_rank({&a, &c}));
  const std::int64_t bc = static_cast<std::int64_t>(stacked_rank({&b, &c}));
  const std::int64_t abc =
      static_cast<std::int64_t>(stacked_rank({&a, &b, &c}));
  const std::int64_t cc = static_cast<std::int64_t>(stacked_rank({&c}));
  return {Rational(ac + bc - abc - cc)};
}

EntropyValue conditional_entropy(const std::vector<LinearRV>& a,
                                 const std::vector<LinearRV>& c) {
  common_space({&a, &c});
  const std::int64_t ac = static_cast<std::int64_t>(stacked_rank({&a, &c}));
  const std::int64_t cc = static_cast<std::int64_t>(stacked_rank({&c}));
  return {Rational(ac - cc)};
}

double brute_force_entropy(const std::vector<LinearRV>& vars) {
  const SeedSpace* space = common_space({&vars});
  if (space == nullptr) return 0.0;

  const std::uint64_t q = space->field().modulus();
  const std::size_t dim = space->dim();
  std::uint64_t states = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (states > kBruteForceBudget / q) {
      // Overflow-safe: report the requirement without computing q^dim.
      throw std::invalid_argument(
          "brute_force_entropy: requires q^dim = " + std::to_string(q) + "^" +
          std::to_string(dim) + " states, budget is " +
          std::to_string(kBruteForceBudget));
    }
    states *= q;
  }
  if (states > kBruteForceBudget) {
    throw std::invalid_argument(
        "brute_force_entropy: requires " + std::to_string(states) +
        " states, budget is " + std::to_string(kBruteForceBudget));
  }

  std::vector<FieldMatrix> maps;
  for (const auto& rv : vars) maps.push_back(rv.map);
  const FieldMatrix stacked = vstack(maps);

  std::map<std::vector<std::uint64_t>, std::uint64_t> counts;
  std::vector<std::uint64_t> seed(dim, 0);
  for (std::uint64_t n = 0; n < states; ++n) {
    ++counts[matvec(stacked, seed)];
    // Odometer increment over [0,q)^dim.
    for (std::size_t i = 0; i < dim; ++i) {
      if (++seed[i] < q) break;
      seed[i] = 0;
    }
  }

  double h = 0.0;
  const double total = static_cast<double>(states);
  for (const auto& kv : counts) {
    const double p = static_cast<double>(kv.second) / total;
    h -= p * std::log2(p);
  }
  return h;
}

ChainIdentityReport check_chain_identity(const std::vector<LinearRV>& vars) {
  if (vars.size() < 2) {
    throw std::invalid_argument("check_chain_identity: need at least 2 vars");
  }
  common_space({&vars});

  Rational lhs(0);
  for (const auto& rv : vars) {
    lhs += entropy({rv}).symbols;
  }

  Rational rhs = entropy(vars).symbols;
  std::vector<LinearRV> prefix = {vars.front()};
  for (std::size_t i = 1; i < vars.size(); ++i) {
    rhs += conditional_mutual_information({vars[i]}, prefix, {}).symbols;
    prefix.push_back(vars[i]);
  }
  return {lhs, rhs, lhs == rhs};
}

}  // namespace mdskit
