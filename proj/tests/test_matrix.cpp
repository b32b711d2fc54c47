#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "mdskit/matrix.hpp"
#include "mdskit/rng.hpp"

using namespace mdskit;

namespace {

// Independent oracle: plain triple loop, no shortcuts shared with the
// library implementation.
FieldMatrix naive_mul(const FieldMatrix& a, const FieldMatrix& b) {
  const std::uint64_t p = a.field().modulus();
  FieldMatrix c(a.rows(), b.cols(), a.field());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        acc = (acc + a.at(i, k) * b.at(k, j)) % p;
      }
      c.set(i, j, static_cast<std::int64_t>(acc));
    }
  }
  return c;
}

// Independent oracle: cofactor expansion along the first row, for n <= 5.
std::uint64_t cofactor_det(const FieldMatrix& a) {
  const std::uint64_t p = a.field().modulus();
  const std::size_t n = a.rows();
  REQUIRE(n <= 5);
  if (n == 0) return 1;
  if (n == 1) return a.at(0, 0);
  std::uint64_t det = 0;
  for (std::size_t j = 0; j < n; ++j) {
    FieldMatrix minor(n - 1, n - 1, a.field());
    for (std::size_t r = 1; r < n; ++r) {
      std::size_t cc = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == j) continue;
        minor.set(r - 1, cc++, static_cast<std::int64_t>(a.at(r, c)));
      }
    }
    const std::uint64_t term = (a.at(0, j) * cofactor_det(minor)) % p;
    det = (j % 2 == 0) ? (det + term) % p : (det + p - term) % p;
  }
  return det;
}

}  // namespace

TEST_CASE("field element arithmetic") {
  const PrimeField f5(5);
  const PrimeField f73(73);

  CHECK((FieldElement(2, f5) / FieldElement(3, f5)).value() == 4);
  CHECK((FieldElement(4, f5) + FieldElement(3, f5)).value() == 2);
  CHECK((FieldElement(72, f73) * FieldElement(72, f73)).value() == 1);
  CHECK((FieldElement(1, f5) - FieldElement(3, f5)).value() == 3);

  CHECK_THROWS_AS(FieldElement(1, f5) / FieldElement(0, f5), std::domain_error);
  CHECK_THROWS_AS(FieldElement(1, f5) + FieldElement(1, f73),
                  std::invalid_argument);
}

TEST_CASE("prime field construction") {
  CHECK_THROWS_AS(PrimeField(1), std::invalid_argument);
  CHECK_THROWS_AS(PrimeField(6), std::invalid_argument);
  CHECK_THROWS_AS(PrimeField(1ull << 32), std::invalid_argument);
  CHECK(PrimeField(2147483647).modulus() == 2147483647);  // 2^31 - 1 is prime
  CHECK(PrimeField::is_prime(10007));
  CHECK_FALSE(PrimeField::is_prime(10005));
}

TEST_CASE("matrix product") {
  const PrimeField f5(5);
  const PrimeField f73(73);

  Xoshiro256 rng(42);
  const FieldMatrix m = random_matrix(rng, 2, 7, f5);
  CHECK(FieldMatrix::identity(2, f5) * m == m);

  const FieldMatrix a = FieldMatrix::from_rows({{1, 1}, {1, 2}}, f5);
  const FieldMatrix b = FieldMatrix::from_rows({{1}, {3}}, f5);
  CHECK(a * b == FieldMatrix::from_rows({{4}, {2}}, f5));

  for (int trial = 0; trial < 10; ++trial) {
    const FieldMatrix x = random_matrix(rng, 6, 6, f73);
    const FieldMatrix y = random_matrix(rng, 6, 6, f73);
    CHECK(x * y == naive_mul(x, y));
  }

  CHECK_THROWS_AS(m * m, std::invalid_argument);
  const FieldMatrix other(7, 2, f73);
  CHECK_THROWS_AS(m * other, std::invalid_argument);
}

TEST_CASE("rank") {
  const PrimeField f5(5);
  const PrimeField f73(73);

  CHECK(rank(FieldMatrix::identity(6, f73)) == 6);
  // Level-2 coefficient rows of the uncoded reference table.
  const FieldMatrix table =
      FieldMatrix::from_rows({{1, 0}, {0, 1}, {1, 1}, {1, 2}, {1, 3}}, f5);
  CHECK(rank(table) == 2);
  CHECK(rank(FieldMatrix(3, 4, f5)) == 0);
  CHECK(rank(FieldMatrix(0, 4, f5)) == 0);
  CHECK(rank(FieldMatrix(4, 0, f5)) == 0);
}

TEST_CASE("determinant") {
  const PrimeField f5(5);
  const PrimeField f73(73);

  CHECK(determinant(FieldMatrix::identity(3, f5)).value() == 1);
  CHECK(determinant(FieldMatrix::from_rows({{1, 1}, {1, 2}}, f5)).value() == 1);

  Xoshiro256 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const FieldMatrix a = random_matrix(rng, 4, 4, f73);
    CHECK(determinant(a).value() == cofactor_det(a));
  }

  CHECK_THROWS_AS(determinant(FieldMatrix(2, 3, f5)), std::invalid_argument);
}

TEST_CASE("null space basis") {
  const PrimeField f5(5);
  const PrimeField f73(73);

  CHECK(null_space_basis(FieldMatrix::from_rows({{1, 1}, {1, 2}}, f5)).cols() ==
        0);

  const FieldMatrix a = FieldMatrix::from_rows({{1, 1}}, f5);
  const FieldMatrix basis = null_space_basis(a);
  REQUIRE(basis.cols() == 1);
  CHECK((a * basis).is_zero());
  // Solution space is the scalar multiples of (1, 4).
  const std::uint64_t x0 = basis.at(0, 0);
  const std::uint64_t x1 = basis.at(1, 0);
  CHECK(f5.mul(4, x0) == x1);

  Xoshiro256 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const FieldMatrix m = random_matrix(rng, 3, 6, f73);
    const FieldMatrix ns = null_space_basis(m);
    CHECK(ns.cols() == 6 - rank(m));
    CHECK((m * ns).is_zero());
    CHECK(rank(ns) == ns.cols());
  }
}

TEST_CASE("solve_linear") {
  const PrimeField f5(5);
  const PrimeField f769(769);

  Xoshiro256 rng(11);
  const FieldMatrix b0 = random_matrix(rng, 4, 2, f5);
  CHECK(solve_linear(FieldMatrix::identity(4, f5), b0) == b0);

  const FieldMatrix a = FieldMatrix::from_rows({{1, 1}, {1, 2}}, f5);
  const FieldMatrix b = FieldMatrix::from_rows({{4}, {2}}, f5);
  CHECK(solve_linear(a, b) == FieldMatrix::from_rows({{1}, {3}}, f5));

  for (int trial = 0; trial < 5; ++trial) {
    FieldMatrix m = random_matrix(rng, 8, 8, f769);
    while (rank(m) < 8) m = random_matrix(rng, 8, 8, f769);
    const FieldMatrix rhs = random_matrix(rng, 8, 3, f769);
    CHECK(m * solve_linear(m, rhs) == rhs);
  }

  const FieldMatrix singular = FieldMatrix::from_rows({{1, 2}, {2, 4}}, f5);
  try {
    solve_linear(singular, b);
    FAIL("expected std::domain_error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("rank 1") != std::string::npos);
  }
}

TEST_CASE("random matrix sampling") {
  const PrimeField f5(5);

  Xoshiro256 rng_a(99);
  Xoshiro256 rng_b(99);
  CHECK(random_matrix(rng_a, 2, 2, f5) == random_matrix(rng_b, 2, 2, f5));
  CHECK(random_matrix(rng_a, 2, 2, f5) != random_matrix(rng_a, 2, 2, f5));

  // 10^4 draws over GF(5): each residue within 5 sigma of the mean 2000,
  // sigma = sqrt(10^4 * 0.2 * 0.8) = 40.
  Xoshiro256 rng(2024);
  const FieldMatrix big = random_matrix(rng, 100, 100, f5);
  std::vector<int> freq(5, 0);
  for (std::uint64_t v : big.data()) ++freq[v];
  for (int r = 0; r < 5; ++r) {
    CHECK(freq[r] >= 1800);
    CHECK(freq[r] <= 2200);
  }

  CHECK(random_matrix(rng, 0, 4, f5).rows() == 0);
  CHECK(random_matrix(rng, 0, 4, f5).cols() == 4);
}

TEST_CASE("rank and determinant properties on random matrices") {
  Xoshiro256 rng(555);
  const PrimeField f73(73);

  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t rows = 1 + rng.below(6);
    const std::size_t cols = 1 + rng.below(6);
    const FieldMatrix a = random_matrix(rng, rows, cols, f73);
    const FieldMatrix b = random_matrix(rng, rng.below(5), cols, f73);

    const std::size_t ra = rank(a);
    CHECK(ra <= std::min(rows, cols));
    const std::size_t stacked = rank(vstack({a, b}));
    CHECK(stacked >= ra);
    CHECK(stacked >= rank(b));
    CHECK(stacked <= ra + rank(b));

    // Row permutation keeps rank.
    std::vector<FieldMatrix> shuffled;
    std::vector<std::size_t> order(rows);
    for (std::size_t i = 0; i < rows; ++i) order[i] = i;
    for (std::size_t i = 0; i + 1 < rows; ++i) {
      std::swap(order[i], order[i + rng.below(rows - i)]);
    }
    for (std::size_t i : order) shuffled.push_back(a.block(i, 0, 1, cols));
    CHECK(rank(vstack(shuffled)) == ra);
  }

  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    const FieldMatrix a = random_matrix(rng, n, n, f73);
    CHECK((determinant(a).value() != 0) == (rank(a) == n));
    CHECK(rank(a.transposed()) == rank(a));
  }
}
