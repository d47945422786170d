#pragma once

// Truncated p-adic integers Z/p^N, polynomials and matrices over them,
// Hensel lifting and Smith normal form over the discrete valuation ring.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "twistnorm/errors.hpp"

namespace twistnorm {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

/// p^k, failing if the result does not fit below 2^62.
u64 checked_pow(u64 p, unsigned k);

/// Largest N with p^N < 2^62.
unsigned max_precision(unsigned p);

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) * b) % m); }
inline u64 addmod(u64 a, u64 b, u64 m) {
  u64 s = a + b;
  return s >= m ? s - m : s;
}
inline u64 submod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + m - b; }
inline u64 reduce_signed(i64 v, u64 m) {
  i64 r = v % static_cast<i64>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}
/// Inverse of a modulo m; a must be coprime to m.
u64 invmod(u64 a, u64 m);

/// Number of times p divides r, capped at N (r is a residue mod p^N).
unsigned valuation_of(u64 r, unsigned p, unsigned N);

/// Element of Z_p known modulo p^N.
class Zp {
 public:
  Zp(unsigned p, unsigned N, i64 value);
  static Zp from_residue(unsigned p, unsigned N, u64 residue);

  unsigned prime() const { return p_; }
  unsigned precision() const { return N_; }
  u64 residue() const { return r_; }
  u64 modulus() const { return mod_; }

  /// In {0,...,N}; equals N exactly when the residue is zero.
  unsigned valuation() const { return valuation_of(r_, p_, N_); }
  bool is_unit() const { return r_ % p_ != 0; }
  bool is_zero() const { return r_ == 0; }
  /// Signed representative in (-p^N/2, p^N/2].
  i64 centered() const;

  Zp operator+(const Zp& o) const;
  Zp operator-(const Zp& o) const;
  Zp operator*(const Zp& o) const;
  Zp operator-() const;
  Zp& operator+=(const Zp& o) { return *this = *this + o; }
  Zp& operator-=(const Zp& o) { return *this = *this - o; }
  Zp& operator*=(const Zp& o) { return *this = *this * o; }
  bool operator==(const Zp& o) const { return p_ == o.p_ && N_ == o.N_ && r_ == o.r_; }
  bool operator!=(const Zp& o) const { return !(*this == o); }

  Zp inverse() const;
  Zp pow(u64 e) const;
  /// Reduce to a lower precision.
  Zp truncated(unsigned N) const;
  /// Reinterpret the residue at a higher precision (the missing digits are zero).
  Zp extended(unsigned N) const;

  std::string str() const;

 private:
  Zp(unsigned p, unsigned N, u64 mod, u64 r) : p_(p), N_(N), mod_(mod), r_(r) {}
  void check_compatible(const Zp& o) const;

  unsigned p_;
  unsigned N_;
  u64 mod_;
  u64 r_;
};

/// Polynomial over Z/p^N, coefficients from low to high degree.
class ZpPoly {
 public:
  ZpPoly(unsigned p, unsigned N, std::vector<Zp> coeffs);
  static ZpPoly from_ints(unsigned p, unsigned N, const std::vector<i64>& coeffs);

  unsigned prime() const { return p_; }
  unsigned precision() const { return N_; }
  /// -1 for the zero polynomial.
  int degree() const;
  bool is_monic() const;
  const std::vector<Zp>& coeffs() const { return coeffs_; }
  Zp coeff(std::size_t i) const;

  Zp operator()(const Zp& x) const;
  ZpPoly derivative() const;

 private:
  unsigned p_;
  unsigned N_;
  std::vector<Zp> coeffs_;
};

/// Root x of f with x = seed mod p, lifted to the precision of f by Newton iteration.
Zp hensel_root(const ZpPoly& f, u64 seed);

/// Teichmuller representative of a nonzero residue a mod p.
Zp teichmuller(unsigned p, u64 a, unsigned N);

/// Dense rectangular matrix over Z/p^N. Entries are stored as residues.
class ZpMatrix {
 public:
  ZpMatrix(unsigned p, unsigned N, std::size_t rows, std::size_t cols);
  static ZpMatrix identity(unsigned p, unsigned N, std::size_t n);
  static ZpMatrix from_ints(unsigned p, unsigned N, const std::vector<std::vector<i64>>& rows);

  unsigned prime() const { return p_; }
  unsigned precision() const { return N_; }
  u64 modulus() const { return mod_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Zp at(std::size_t i, std::size_t j) const { return Zp::from_residue(p_, N_, raw(i, j)); }
  void set(std::size_t i, std::size_t j, const Zp& v);
  u64 raw(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  u64& raw(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  ZpMatrix operator*(const ZpMatrix& o) const;
  ZpMatrix operator+(const ZpMatrix& o) const;
  ZpMatrix operator-(const ZpMatrix& o) const;
  bool operator==(const ZpMatrix& o) const;

  Zp determinant() const;
  /// Requires a unit determinant.
  ZpMatrix inverse() const;
  ZpMatrix truncated(unsigned N) const;
  /// Matrix with the columns of *this followed by the columns of o.
  ZpMatrix hconcat(const ZpMatrix& o) const;
  ZpMatrix column_range(std::size_t begin, std::size_t end) const;
  ZpMatrix row_range(std::size_t begin, std::size_t end) const;

 private:
  void check_compatible(const ZpMatrix& o) const;

  unsigned p_;
  unsigned N_;
  u64 mod_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<u64> data_;
};

inline constexpr unsigned kInfiniteValuation = std::numeric_limits<unsigned>::max();

struct SnfResult {
  /// Nondecreasing; kInfiniteValuation marks a divisor that is zero at working precision.
  std::vector<unsigned> divisor_valuations;
  ZpMatrix left;
  ZpMatrix right;
};

/// L * M * R = diag(p^v_i) mod p^N with unimodular L, R. Pivots are chosen by
/// minimal valuation, ties by lowest row then lowest column.
SnfResult smith_normal_form(const ZpMatrix& m);

/// Divisor valuations only; skips accumulating the transforms.
std::vector<unsigned> smith_valuations(const ZpMatrix& m);

/// Columns generating {y : M y = 0} over Z/p^N.
ZpMatrix kernel_generators(const ZpMatrix& m);

/// log_p of |(Z/p^N)^rows / (column span of m)|.
unsigned colength(const ZpMatrix& m);

}  // namespace twistnorm
