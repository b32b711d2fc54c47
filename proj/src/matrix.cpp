#include "mdskit/matrix.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

namespace mdskit {

namespace {

void check_same_field(const FieldMatrix& a, const FieldMatrix& b,
                      const char* op) {
  if (a.field() != b.field()) {
    throw std::invalid_argument(std::string(op) + ": modulus mismatch (" +
                                std::to_string(a.field().modulus()) + " vs " +
                                std::to_string(b.field().modulus()) + ")");
  }
}

// Row echelon form in place. Returns pivot columns (rank = their count).
// When `reduced` is set, pivots are normalized to 1 and cleared above as well,
// i.e. full RREF.
std::vector<std::size_t> echelon(std::vector<std::uint64_t>& a,
                                 std::size_t rows, std::size_t cols,
                                 const PrimeField& f, bool reduced,
                                 std::uint64_t* det_accum = nullptr) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  if (det_accum) *det_accum = 1;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = rows;
    for (std::size_t i = r; i < rows; ++i) {
      if (a[i * cols + c] != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot == rows) continue;
    if (pivot != r) {
      for (std::size_t j = 0; j < cols; ++j) {
        std::swap(a[pivot * cols + j], a[r * cols + j]);
      }
      if (det_accum) *det_accum = f.neg(*det_accum);
    }
    const std::uint64_t pv = a[r * cols + c];
    if (det_accum) *det_accum = f.mul(*det_accum, pv);
    if (reduced) {
      const std::uint64_t pinv = f.inv(pv);
      for (std::size_t j = c; j < cols; ++j) {
        a[r * cols + j] = f.mul(a[r * cols + j], pinv);
      }
    }
    const std::uint64_t lead = a[r * cols + c];
    for (std::size_t i = reduced ? 0 : r + 1; i < rows; ++i) {
      if (i == r) continue;
      const std::uint64_t factor = f.div(a[i * cols + c], lead);
      if (factor == 0) continue;
      for (std::size_t j = c; j < cols; ++j) {
        a[i * cols + j] =
            f.sub(a[i * cols + j], f.mul(factor, a[r * cols + j]));
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

FieldMatrix FieldMatrix::identity(std::size_t n, PrimeField field) {
  FieldMatrix m(n, n, field);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

FieldMatrix FieldMatrix::from_rows(
    const std::vector<std::vector<std::int64_t>>& rows, PrimeField field) {
  const std::size_t nr = rows.size();
  const std::size_t nc = nr == 0 ? 0 : rows.front().size();
  FieldMatrix m(nr, nc, field);
  for (std::size_t i = 0; i < nr; ++i) {
    if (rows[i].size() != nc) {
      throw std::invalid_argument("from_rows: ragged rows");
    }
    for (std::size_t j = 0; j < nc; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

bool FieldMatrix::is_zero() const {
  for (std::uint64_t v : a_) {
    if (v != 0) return false;
  }
  return true;
}

FieldMatrix FieldMatrix::block(std::size_t r0, std::size_t c0,
                               std::size_t nrows, std::size_t ncols) const {
  if (r0 + nrows > rows_ || c0 + ncols > cols_) {
    throw std::invalid_argument("block: out of range");
  }
  FieldMatrix m(nrows, ncols, field_);
  for (std::size_t i = 0; i < nrows; ++i) {
    for (std::size_t j = 0; j < ncols; ++j) {
      m.a_[i * ncols + j] = at(r0 + i, c0 + j);
    }
  }
  return m;
}

void FieldMatrix::paste(std::size_t r0, std::size_t c0, const FieldMatrix& m) {
  check_same_field(*this, m, "paste");
  if (r0 + m.rows() > rows_ || c0 + m.cols() > cols_) {
    throw std::invalid_argument("paste: out of range");
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      a_[(r0 + i) * cols_ + (c0 + j)] = m.at(i, j);
    }
  }
}

FieldMatrix FieldMatrix::transposed() const {
  FieldMatrix m(cols_, rows_, field_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      m.a_[j * rows_ + i] = at(i, j);
    }
  }
  return m;
}

FieldMatrix operator*(const FieldMatrix& a, const FieldMatrix& b) {
  check_same_field(a, b, "mat_mul");
  if (a.cols() != b.rows()) {
    throw std::invalid_argument(
        "mat_mul: dimension mismatch, " + std::to_string(a.rows()) + "x" +
        std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
        std::to_string(b.cols()));
  }
  const PrimeField& f = a.field();
  FieldMatrix c(a.rows(), b.cols(), f);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const std::uint64_t aik = a.at(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        c.set(i, j,
              static_cast<std::int64_t>(f.add(c.at(i, j), f.mul(aik, b.at(k, j)))));
      }
    }
  }
  return c;
}

FieldMatrix operator+(const FieldMatrix& a, const FieldMatrix& b) {
  check_same_field(a, b, "mat_add");
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("mat_add: dimension mismatch");
  }
  FieldMatrix c(a.rows(), a.cols(), a.field());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      c.set(i, j, static_cast<std::int64_t>(a.field().add(a.at(i, j), b.at(i, j))));
    }
  }
  return c;
}

FieldMatrix operator-(const FieldMatrix& a, const FieldMatrix& b) {
  return a + negated(b);
}

FieldMatrix negated(const FieldMatrix& a) {
  FieldMatrix c(a.rows(), a.cols(), a.field());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      c.set(i, j, static_cast<std::int64_t>(a.field().neg(a.at(i, j))));
    }
  }
  return c;
}

std::size_t rank(const FieldMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  std::vector<std::uint64_t> work = a.data();
  return echelon(work, a.rows(), a.cols(), a.field(), /*reduced=*/false).size();
}

FieldElement determinant(const FieldMatrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("determinant: matrix is " +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", not square");
  }
  if (a.rows() == 0) return FieldElement(1, a.field());
  std::vector<std::uint64_t> work = a.data();
  std::uint64_t det = 1;
  const auto pivots =
      echelon(work, a.rows(), a.cols(), a.field(), /*reduced=*/false, &det);
  if (pivots.size() < a.rows()) return FieldElement(0, a.field());
  return FieldElement(static_cast<std::int64_t>(det), a.field());
}

FieldMatrix null_space_basis(const FieldMatrix& a) {
  const PrimeField& f = a.field();
  const std::size_t n = a.cols();
  if (a.rows() == 0) return FieldMatrix::identity(n, f);
  std::vector<std::uint64_t> work = a.data();
  const auto pivots = echelon(work, a.rows(), n, f, /*reduced=*/true);

  std::vector<bool> is_pivot(n, false);
  for (std::size_t c : pivots) is_pivot[c] = true;

  FieldMatrix basis(n, n - pivots.size(), f);
  std::size_t out = 0;
  for (std::size_t free_col = 0; free_col < n; ++free_col) {
    if (is_pivot[free_col]) continue;
    basis.set(free_col, out, 1);
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      // RREF row i has a unit pivot at pivots[i]; the free column's
      // coefficient there fixes the pivot variable.
      basis.set(pivots[i], out,
                static_cast<std::int64_t>(f.neg(work[i * n + free_col])));
    }
    ++out;
  }
  return basis;
}

FieldMatrix solve_linear(const FieldMatrix& a, const FieldMatrix& b) {
  check_same_field(a, b, "solve_linear");
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("solve_linear: coefficient matrix is " +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", not square");
  }
  if (a.rows() != b.rows()) {
    throw std::invalid_argument("solve_linear: rhs has " +
                                std::to_string(b.rows()) + " rows, expected " +
                                std::to_string(a.rows()));
  }
  const std::size_t n = a.rows();
  const std::size_t w = b.cols();
  const PrimeField& f = a.field();

  // Eliminate on [A | B].
  std::vector<std::uint64_t> aug((n) * (n + w), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i * (n + w) + j] = a.at(i, j);
    for (std::size_t j = 0; j < w; ++j) aug[i * (n + w) + n + j] = b.at(i, j);
  }
  const auto pivots = echelon(aug, n, n + w, f, /*reduced=*/true);
  std::size_t rank_a = 0;
  for (std::size_t c : pivots) {
    if (c < n) ++rank_a;
  }
  if (rank_a < n) {
    throw std::domain_error("solve_linear: singular system, rank " +
                            std::to_string(rank_a) + " < " +
                            std::to_string(n));
  }
  FieldMatrix x(n, w, f);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      x.set(i, j, static_cast<std::int64_t>(aug[i * (n + w) + n + j]));
    }
  }
  return x;
}

FieldMatrix inverse(const FieldMatrix& a) {
  return solve_linear(a, FieldMatrix::identity(a.rows(), a.field()));
}

FieldMatrix vstack(const std::vector<FieldMatrix>& parts) {
  if (parts.empty()) {
    throw std::invalid_argument("vstack: no parts");
  }
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  for (const auto& p : parts) {
    check_same_field(parts.front(), p, "vstack");
    if (p.cols() != cols) {
      throw std::invalid_argument("vstack: column count mismatch");
    }
    rows += p.rows();
  }
  FieldMatrix m(rows, cols, parts.front().field());
  std::size_t r = 0;
  for (const auto& p : parts) {
    m.paste(r, 0, p);
    r += p.rows();
  }
  return m;
}

FieldMatrix hstack(const std::vector<FieldMatrix>& parts) {
  if (parts.empty()) {
    throw std::invalid_argument("hstack: no parts");
  }
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    check_same_field(parts.front(), p, "hstack");
    if (p.rows() != rows) {
      throw std::invalid_argument("hstack: row count mismatch");
    }
    cols += p.cols();
  }
  FieldMatrix m(rows, cols, parts.front().field());
  std::size_t c = 0;
  for (const auto& p : parts) {
    m.paste(0, c, p);
    c += p.cols();
  }
  return m;
}

FieldMatrix random_matrix(Xoshiro256& rng, std::size_t rows, std::size_t cols,
                          PrimeField field) {
  FieldMatrix m(rows, cols, field);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m.set(i, j, static_cast<std::int64_t>(rng.below(field.modulus())));
    }
  }
  return m;
}

std::vector<std::uint64_t> matvec(const FieldMatrix& a,
                                 const std::vector<std::uint64_t>& v) {
  if (v.size() != a.cols()) {
    throw std::invalid_argument("matvec: vector length " +
                                std::to_string(v.size()) + ", expected " +
                                std::to_string(a.cols()));
  }
  const PrimeField& f = a.field();
  std::vector<std::uint64_t> out(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      acc = f.add(acc, f.mul(a.at(i, j), v[j] % f.modulus()));
    }
    out[i] = acc;
  }
  return out;
}

std::vector<std::uint64_t> vec_add(const std::vector<std::uint64_t>& a,
                                   const std::vector<std::uint64_t>& b,
                                   const PrimeField& field) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("vec_add: length mismatch");
  }
  std::vector<std::uint64_t> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = field.add(a[i] % field.modulus(), b[i] % field.modulus());
  }
  return out;
}

}  // namespace mdskit
