#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mdskit {

/// Prime field GF(p). The modulus is capped below 2^31 so that a product of
/// two reduced residues fits in a uint64_t without overflow.
class PrimeField {
 public:
  static constexpr std::uint64_t kMaxModulus = (1ull << 31) - 1;

  explicit PrimeField(std::uint64_t p) : p_(p), barrett_(~0ull / p) {
    if (p < 2 || p > kMaxModulus) {
      throw std::invalid_argument("PrimeField: modulus " + std::to_string(p) +
                                  " out of range [2, 2^31)");
    }
    if (!is_prime(p)) {
      throw std::invalid_argument("PrimeField: modulus " + std::to_string(p) +
                                  " is not prime");
    }
  }

  std::uint64_t modulus() const { return p_; }
  bool operator==(const PrimeField& o) const { return p_ == o.p_; }
  bool operator!=(const PrimeField& o) const { return p_ != o.p_; }

  std::uint64_t reduce(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    if (r < 0) r += static_cast<std::int64_t>(p_);
    return static_cast<std::uint64_t>(r);
  }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + p_ - b;
  }
  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    // Barrett reduction: with m = floor(2^64/p) the quotient estimate is off
    // by at most 2 for x < 2^62, so two conditional subtractions finish the
    // job. Much faster than hardware division in the elimination loops.
    const std::uint64_t x = a * b;
    const std::uint64_t q = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(x) * barrett_) >> 64);
    std::uint64_t r = x - q * p_;
    if (r >= p_) r -= p_;
    if (r >= p_) r -= p_;
    return r;
  }
  std::uint64_t pow(std::uint64_t base, std::uint64_t exp) const {
    std::uint64_t acc = 1;
    base %= p_;
    while (exp > 0) {
      if (exp & 1) acc = mul(acc, base);
      base = mul(base, base);
      exp >>= 1;
    }
    return acc;
  }
  std::uint64_t inv(std::uint64_t a) const {
    if (a == 0) {
      throw std::domain_error("PrimeField: inverse of zero");
    }
    return pow(a, p_ - 2);
  }
  std::uint64_t div(std::uint64_t a, std::uint64_t b) const {
    return mul(a, inv(b));
  }

  /// Deterministic Miller-Rabin; bases {2,3,5,7} decide primality for all
  /// n < 3'215'031'751, which covers the 2^31 modulus cap.
  static bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull}) {
      if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
      d >>= 1;
      ++s;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull}) {
      std::uint64_t x = 1, base = a % n, e = d;
      while (e > 0) {
        if (e & 1) x = (x * base) % n;
        base = (base * base) % n;
        e >>= 1;
      }
      if (x == 1 || x == n - 1) continue;
      bool composite = true;
      for (int i = 1; i < s; ++i) {
        x = (x * x) % n;
        if (x == n - 1) {
          composite = false;
          break;
        }
      }
      if (composite) return false;
    }
    return true;
  }

 private:
  std::uint64_t p_;
  std::uint64_t barrett_;
};

/// A single residue paired with its field. Arithmetic across mismatched
/// moduli throws.
class FieldElement {
 public:
  FieldElement(std::int64_t value, PrimeField field)
      : v_(field.reduce(value)), f_(field) {}

  std::uint64_t value() const { return v_; }
  const PrimeField& field() const { return f_; }

  FieldElement operator+(const FieldElement& o) const {
    check_same(o);
    return FieldElement(f_.add(v_, o.v_), f_);
  }
  FieldElement operator-(const FieldElement& o) const {
    check_same(o);
    return FieldElement(f_.sub(v_, o.v_), f_);
  }
  FieldElement operator*(const FieldElement& o) const {
    check_same(o);
    return FieldElement(f_.mul(v_, o.v_), f_);
  }
  FieldElement operator/(const FieldElement& o) const {
    check_same(o);
    if (o.v_ == 0) {
      throw std::domain_error("FieldElement: division by zero");
    }
    return FieldElement(f_.div(v_, o.v_), f_);
  }
  FieldElement operator-() const { return FieldElement(f_.neg(v_), f_); }

  bool operator==(const FieldElement& o) const {
    return v_ == o.v_ && f_ == o.f_;
  }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

 private:
  void check_same(const FieldElement& o) const {
    if (f_ != o.f_) {
      throw std::invalid_argument(
          "FieldElement: modulus mismatch (" + std::to_string(f_.modulus()) +
          " vs " + std::to_string(o.f_.modulus()) + ")");
    }
  }

  std::uint64_t v_;
  PrimeField f_;
};

}  // namespace mdskit
