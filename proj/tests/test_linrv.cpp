#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "mdskit/linrv.hpp"
#include "mdskit/rng.hpp"

using namespace mdskit;

namespace {

SeedSpacePtr make_space(std::uint64_t q,
                        std::vector<std::pair<std::string, std::size_t>> segs) {
  return std::make_shared<SeedSpace>(PrimeField(q), segs);
}

// The five level-2 variables of the uncoded reference table over GF(5),
// seed = (A, B).
std::vector<LinearRV> table_level2_rvs(const SeedSpacePtr& space) {
  const std::vector<std::vector<std::int64_t>> rows = {
      {1, 0}, {0, 1}, {1, 1}, {1, 2}, {1, 3}};
  std::vector<LinearRV> rvs;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rvs.push_back(make_rv("Z_" + std::to_string(k + 1) + "^2",
                          FieldMatrix::from_rows({rows[k]}, space->field()),
                          space));
  }
  return rvs;
}

}  // namespace

TEST_CASE("seed space segments") {
  auto space = make_space(5, {{"S^1", 2}, {"S^2", 3}});
  CHECK(space->dim() == 5);
  CHECK(space->segment("S^2").offset == 2);
  CHECK_THROWS_AS(space->segment("S^3"), std::invalid_argument);
  CHECK_THROWS_AS(make_space(5, {{"A", 1}, {"A", 2}}), std::invalid_argument);
}

TEST_CASE("entropy equals stacked rank") {
  auto space = make_space(5, {{"S", 2}});
  const auto id = make_rv("Z", FieldMatrix::identity(2, space->field()), space);
  CHECK(entropy({id}).symbols == Rational(2));
  CHECK(entropy({id}).bits(5) == doctest::Approx(2.0 * std::log2(5.0)));
  CHECK(entropy({}).symbols == Rational(0));

  auto table_space = make_space(5, {{"A", 1}, {"B", 1}});
  const auto rvs = table_level2_rvs(table_space);
  for (std::size_t i = 0; i < rvs.size(); ++i) {
    for (std::size_t j = i + 1; j < rvs.size(); ++j) {
      CHECK(entropy({rvs[i], rvs[j]}).symbols == Rational(2));
      for (std::size_t l = j + 1; l < rvs.size(); ++l) {
        CHECK(entropy({rvs[i], rvs[j], rvs[l]}).symbols == Rational(2));
      }
    }
  }
}

TEST_CASE("mixing seed spaces is rejected") {
  auto s1 = make_space(5, {{"S", 2}});
  auto s2 = make_space(5, {{"S", 2}});
  const auto a = make_rv("A", FieldMatrix::identity(2, s1->field()), s1);
  const auto b = make_rv("B", FieldMatrix::identity(2, s2->field()), s2);
  CHECK_THROWS_AS(entropy({a, b}), std::invalid_argument);
}

TEST_CASE("conditional mutual information") {
  auto space = make_space(5, {{"S^1", 2}, {"S^2", 2}});
  const PrimeField& f = space->field();

  FieldMatrix first(1, 4, f);
  first.set(0, 0, 1);
  FieldMatrix second(1, 4, f);
  second.set(0, 2, 1);
  const auto a = make_rv("A", first, space);
  const auto b = make_rv("B", second, space);

  // Self-information and independence of disjoint segments.
  CHECK(conditional_mutual_information({a}, {a}, {}).symbols ==
        entropy({a}).symbols);
  CHECK(conditional_mutual_information({a}, {b}, {}).symbols == Rational(0));

  // All users of the level-1 table row hold the same symbol.
  auto one = make_space(5, {{"A1", 1}});
  const auto z1 = make_rv("Z_1^1", FieldMatrix::from_rows({{1}}, one->field()),
                          one);
  const auto z2 = make_rv("Z_2^1", FieldMatrix::from_rows({{1}}, one->field()),
                          one);
  CHECK(conditional_mutual_information({z1}, {z2}, {}).symbols == Rational(1));
}

TEST_CASE("conditional mutual information is nonnegative") {
  auto space = make_space(73, {{"S", 8}});
  Xoshiro256 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto draw = [&] {
      return make_rv("R", random_matrix(rng, 1 + rng.below(4), 8,
                                        space->field()),
                     space);
    };
    const auto a = draw();
    const auto b = draw();
    const auto c = draw();
    CHECK(conditional_mutual_information({a}, {b}, {c}).symbols >= Rational(0));
  }
}

TEST_CASE("entropy is monotone and submodular") {
  auto space = make_space(73, {{"S", 10}});
  Xoshiro256 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const auto draw = [&] {
      return make_rv("R", random_matrix(rng, 1 + rng.below(3), 10,
                                        space->field()),
                     space);
    };
    const auto a = draw();
    const auto b = draw();
    const auto c = draw();

    CHECK(entropy({a, c}).symbols <= entropy({a, b, c}).symbols);
    // Submodularity: H(A,C) + H(B,C) >= H(A,B,C) + H(C).
    CHECK(entropy({a, c}).symbols + entropy({b, c}).symbols >=
          entropy({a, b, c}).symbols + entropy({c}).symbols);
  }
}

TEST_CASE("brute force entropy oracle") {
  auto space = make_space(3, {{"S", 2}});
  const auto id = make_rv("Z", FieldMatrix::identity(2, space->field()), space);
  CHECK(brute_force_entropy({id}) ==
        doctest::Approx(2.0 * std::log2(3.0)).epsilon(1e-12));

  const auto zero = make_rv("0", FieldMatrix(2, 2, space->field()), space);
  CHECK(brute_force_entropy({zero}) == doctest::Approx(0.0));

  auto space4 = make_space(3, {{"S", 4}});
  Xoshiro256 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rv = make_rv("R", random_matrix(rng, 3, 4, space4->field()),
                            space4);
    const double via_rank = entropy({rv}).symbols.to_double() * std::log2(3.0);
    CHECK(std::abs(brute_force_entropy({rv}) - via_rank) < 1e-9);
  }

  auto big = make_space(2, {{"S", 21}});
  const auto rv = make_rv("R", FieldMatrix(1, 21, big->field()), big);
  CHECK_THROWS_AS(brute_force_entropy({rv}), std::invalid_argument);
}

TEST_CASE("chain identity") {
  auto space = make_space(5, {{"S^1", 1}, {"S^2", 1}});
  FieldMatrix ma(1, 2, space->field());
  ma.set(0, 0, 1);
  FieldMatrix mb(1, 2, space->field());
  mb.set(0, 1, 1);
  const auto a = make_rv("A", ma, space);
  const auto b = make_rv("B", mb, space);
  const auto two = check_chain_identity({a, b});
  CHECK(two.pass);
  CHECK(two.lhs == Rational(2));

  auto table_space = make_space(5, {{"A", 1}, {"B", 1}});
  const auto table = check_chain_identity(table_level2_rvs(table_space));
  CHECK(table.pass);

  auto rnd_space = make_space(73, {{"S", 12}});
  Xoshiro256 rng(47);
  std::vector<LinearRV> rvs;
  for (int i = 0; i < 20; ++i) {
    rvs.push_back(make_rv("R" + std::to_string(i),
                          random_matrix(rng, 1 + rng.below(4), 12,
                                        rnd_space->field()),
                          rnd_space));
  }
  const auto many = check_chain_identity(rvs);
  CHECK(many.pass);
  CHECK(many.lhs == many.rhs);

  CHECK_THROWS_AS(check_chain_identity({a}), std::invalid_argument);
}
