#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mdskit/field.hpp"
#include "mdskit/rng.hpp"

namespace mdskit {

/// Dense row-major matrix over a prime field. Entries are stored as reduced
/// residues; every mutation path reduces, so the in-range invariant holds by
/// construction. 0-row and 0-column matrices are legal.
class FieldMatrix {
 public:
  FieldMatrix(std::size_t rows, std::size_t cols, PrimeField field)
      : rows_(rows), cols_(cols), field_(field), a_(rows * cols, 0) {}

  static FieldMatrix identity(std::size_t n, PrimeField field);
  /// Builds from signed integer rows (reduced mod p, negatives allowed).
  static FieldMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows,
                               PrimeField field);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const PrimeField& field() const { return field_; }
  const std::vector<std::uint64_t>& data() const { return a_; }

  std::uint64_t at(std::size_t r, std::size_t c) const {
    return a_[r * cols_ + c];
  }
  void set(std::size_t r, std::size_t c, std::int64_t v) {
    a_[r * cols_ + c] = field_.reduce(v);
  }
  FieldElement elem(std::size_t r, std::size_t c) const {
    return FieldElement(static_cast<std::int64_t>(at(r, c)), field_);
  }

  bool operator==(const FieldMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && field_ == o.field_ &&
           a_ == o.a_;
  }
  bool operator!=(const FieldMatrix& o) const { return !(*this == o); }

  bool is_zero() const;

  /// Copy of the rectangular block starting at (r0, c0).
  FieldMatrix block(std::size_t r0, std::size_t c0, std::size_t nrows,
                    std::size_t ncols) const;
  /// Writes `m` into this matrix with its top-left corner at (r0, c0).
  void paste(std::size_t r0, std::size_t c0, const FieldMatrix& m);

  FieldMatrix transposed() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  PrimeField field_;
  std::vector<std::uint64_t> a_;
};

FieldMatrix operator*(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix operator+(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix operator-(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix negated(const FieldMatrix& a);

/// Row rank by Gaussian elimination (first nonzero pivot; exact field, so no
/// pivot-size concerns). Empty matrices have rank 0.
std::size_t rank(const FieldMatrix& a);

/// Determinant of a square matrix; throws std::invalid_argument otherwise.
FieldElement determinant(const FieldMatrix& a);

/// Columns form a basis of the right null space {x : Ax = 0}; the result has
/// cols - rank(A) columns.
FieldMatrix null_space_basis(const FieldMatrix& a);

/// Solves AX = B for square full-rank A. Throws std::domain_error naming the
/// rank found when A is singular.
FieldMatrix solve_linear(const FieldMatrix& a, const FieldMatrix& b);

FieldMatrix inverse(const FieldMatrix& a);

FieldMatrix vstack(const std::vector<FieldMatrix>& parts);
FieldMatrix hstack(const std::vector<FieldMatrix>& parts);

/// Every entry i.i.d. uniform over [0, p); identical rng state gives an
/// identical matrix.
FieldMatrix random_matrix(Xoshiro256& rng, std::size_t rows, std::size_t cols,
                          PrimeField field);

/// Matrix-vector product A*v.
std::vector<std::uint64_t> matvec(const FieldMatrix& a,
                                 const std::vector<std::uint64_t>& v);

std::vector<std::uint64_t> vec_add(const std::vector<std::uint64_t>& a,
                                   const std::vector<std::uint64_t>& b,
                                   const PrimeField& field);

}  // namespace mdskit
