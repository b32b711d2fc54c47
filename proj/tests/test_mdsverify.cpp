#include <doctest.h>

#include <stdexcept>

#include "mdskit/mdsverify.hpp"
#include "mdskit/rng.hpp"

using namespace mdskit;

namespace {

MdsVariables generated_k3() {
  static const MdsScheme scheme = sample_scheme(MdsParams::standard(3, 10007), 5);
  return derive_variables(scheme);
}

}  // namespace

TEST_CASE("sweep subsets") {
  const auto small = sweep_subsets(3, {});
  CHECK(small.size() == 7);

  SweepOptions opts;
  opts.subset_cap = 3;
  const auto big = sweep_subsets(8, opts);
  // All sizes represented, each capped at 3.
  int per_size[9] = {0};
  for (const auto& u : big) ++per_size[u.size()];
  for (int s = 1; s <= 8; ++s) {
    CHECK(per_size[s] == std::min<std::int64_t>(3, binomial(8, s)));
  }
  const auto big2 = sweep_subsets(8, opts);
  CHECK(big == big2);  // seed-deterministic
}

TEST_CASE("verify_mds on the generated scheme") {
  const MdsVariables vars = generated_k3();
  for (int n = 1; n <= 3; ++n) {
    const auto report = verify_mds(vars, n);
    CHECK(report.checks.size() == 7);
    CHECK(report.overall());
  }
  const auto all = verify_mds_all_levels(vars);
  CHECK(all.checks.size() == 21);
  CHECK(all.overall());

  CHECK_THROWS_AS(verify_mds(vars, 4), std::invalid_argument);
}

TEST_CASE("verify_mds on the vandermonde baseline") {
  const MdsVariables vars = vandermonde_baseline(5, 11);
  const auto report = verify_mds_all_levels(vars);
  CHECK(report.checks.size() == 5 * 31);
  CHECK(report.overall());

  // Level 1: every subset carries exactly one symbol.
  const auto level1 = verify_mds(vars, 1);
  for (const auto& check : level1.checks) {
    CHECK(check.lhs == Rational(1));
  }

  // The smallest legal field for K=5 works too: the evaluation points
  // 0..K-1 stay distinct whenever q > K.
  CHECK(verify_mds_all_levels(vandermonde_baseline(5, 7)).overall());
  CHECK(verify_mds_all_levels(vandermonde_baseline(1, 2)).overall());
}

TEST_CASE("verify_mds flags a broken scheme") {
  MdsVariables vars = generated_k3();
  // Zero one row of user 2's level-2 generator output.
  FieldMatrix map = vars.z(2, 2).map;
  for (std::size_t j = 0; j < map.cols(); ++j) map.set(2, j, 0);
  vars.mds.at({2, 2}) = make_rv("Z_2^2", map, vars.space);

  const auto report = verify_mds(vars, 2);
  CHECK_FALSE(report.overall());
  const auto* failure = report.first_failure();
  REQUIRE(failure != nullptr);
  CHECK(failure->label.find("n=2") != std::string::npos);
  // Other levels stay intact.
  CHECK(verify_mds(vars, 1).overall());
  CHECK(verify_mds(vars, 3).overall());
}

TEST_CASE("derivability") {
  const MdsVariables vars = generated_k3();
  CHECK(verify_derivability(vars).overall());

  // Mutant: one generated row replaced by a bare seed coordinate, which the
  // user's stored randomness does not span.
  MdsVariables broken = generated_k3();
  FieldMatrix map = broken.z(1, 3).map;
  for (std::size_t j = 0; j < map.cols(); ++j) map.set(0, j, 0);
  map.set(0, broken.space->segment("S^3").offset, 1);
  broken.mds.at({1, 3}) = make_rv("Z_1^3", map, broken.space);
  CHECK_FALSE(verify_derivability(broken).overall());

  const MdsVariables trivial =
      derive_variables(sample_scheme(MdsParams::standard(1, 5), 2));
  CHECK(verify_derivability(trivial).overall());
}

TEST_CASE("absorption equalities") {
  const MdsVariables vars = generated_k3();

  // Level 1: any other user's variable pins down this one entirely.
  auto r1 = check_absorption(vars, 1, 1, {2});
  CHECK(r1.overall());
  CHECK(r1.checks.front().rhs == Rational(6));

  auto r2 = check_absorption(vars, 2, 3, {1, 2});
  CHECK(r2.overall());
  CHECK(r2.checks.front().rhs == Rational(9));  // H(Z_3^{<=2}) = 6 + 3

  CHECK(absorption_battery(vars).overall());

  CHECK_THROWS_AS(check_absorption(vars, 2, 1, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(check_absorption(vars, 2, 3, {1}), std::invalid_argument);
  CHECK_THROWS_AS(check_absorption(vars, 2, 3, {1, 1}), std::invalid_argument);

  // The identical level-1 table variables absorb trivially.
  const MdsVariables baseline = vandermonde_baseline(4, 11);
  auto rb = check_absorption(baseline, 1, 1, {2});
  CHECK(rb.overall());
  CHECK(rb.checks.front().rhs == Rational(1));
}

TEST_CASE("harmonic bounds hold with equality on the construction") {
  const MdsVariables vars = generated_k3();

  auto r12 = check_harmonic_bound(vars, 2, {1, 2});
  CHECK(r12.overall());
  CHECK(r12.checks.front().lhs == Rational(9));
  CHECK(r12.checks.front().rhs == Rational(9));

  for (int k = 1; k <= 3; ++k) {
    auto r = check_harmonic_bound(vars, 1, {k});
    CHECK(r.checks.front().lhs == Rational(6));
    CHECK(r.checks.front().rhs == Rational(6));
  }

  auto r123 = check_harmonic_bound(vars, 3, {1, 2, 3});
  CHECK(r123.overall());
  CHECK(r123.checks.front().lhs == Rational(11));
  CHECK(r123.checks.front().rhs == Rational(11));  // (11/6) * 6

  const auto battery = harmonic_battery(vars);
  CHECK(battery.overall());
  for (const auto& check : battery.checks) {
    CHECK(check.lhs == check.rhs);  // tight at every level
  }
}

TEST_CASE("report serialization is stable") {
  VerifyReport report;
  report.add_equal("alpha", Rational(11, 6), Rational(11, 6));
  report.add_at_least("beta", Rational(3), Rational(2));
  const std::string expected =
      "{\n"
      "  \"format\": \"verify-report\",\n"
      "  \"version\": 1,\n"
      "  \"overall\": true,\n"
      "  \"checks\": [\n"
      "    {\n"
      "      \"label\": \"alpha\",\n"
      "      \"relation\": \"eq\",\n"
      "      \"lhs\": \"11/6\",\n"
      "      \"rhs\": \"11/6\",\n"
      "      \"pass\": true\n"
      "    },\n"
      "    {\n"
      "      \"label\": \"beta\",\n"
      "      \"relation\": \"ge\",\n"
      "      \"lhs\": \"3\",\n"
      "      \"rhs\": \"2\",\n"
      "      \"pass\": true\n"
      "    }\n"
      "  ]\n"
      "}";
  CHECK(report.to_json().dump(2) == expected);
}
