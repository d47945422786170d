#pragma once

// Finite fields F_{p^m} given by fixed Conway moduli, the Frobenius, linear
// algebra over F_p, and exhaustive oracles used to check the residue solver.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twistnorm/errors.hpp"

namespace twistnorm {

/// Largest field the exhaustive routines will touch (3^9 elements).
inline constexpr std::uint64_t kDeskFieldBound = 19683;

/// Dense matrix over F_p.
class FpMatrix {
 public:
  FpMatrix(unsigned p, std::size_t rows, std::size_t cols);
  static FpMatrix identity(unsigned p, std::size_t n);
  static FpMatrix from_ints(unsigned p, const std::vector<std::vector<long>>& rows);

  unsigned prime() const { return p_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  unsigned at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  unsigned& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  FpMatrix operator*(const FpMatrix& o) const;
  FpMatrix operator+(const FpMatrix& o) const;
  FpMatrix operator-(const FpMatrix& o) const;
  bool operator==(const FpMatrix& o) const = default;
  std::vector<unsigned> apply(const std::vector<unsigned>& v) const;

  FpMatrix pow(std::uint64_t e) const;
  std::size_t rank() const;
  bool invertible() const { return rows_ == cols_ && rank() == rows_; }
  FpMatrix inverse() const;
  /// Basis of the null space as columns, in reduced form.
  FpMatrix kernel() const;
  /// Basis of the column space (a subset of the columns).
  FpMatrix column_space() const;
  /// Solution of M x = b minimising x lexicographically when coordinate
  /// cols-1 is the most significant; nullopt when inconsistent.
  std::optional<std::vector<unsigned>> solve_lexmin(const std::vector<unsigned>& b) const;
  /// Least element of x + ker(M) in the same order.
  std::vector<unsigned> lexmin_in_coset(std::vector<unsigned> x) const;

 private:
  unsigned p_;
  std::size_t rows_, cols_;
  std::vector<unsigned> data_;
};

class GFElem;

/// F_p[x]/(modulus) with a monic irreducible modulus of degree m.
class GFField {
 public:
  /// modulus: coefficients low to high, monic of degree m >= 1. Irreducibility is checked.
  GFField(unsigned p, std::vector<unsigned> modulus);

  unsigned prime() const { return p_; }
  unsigned degree() const { return m_; }
  std::uint64_t size() const { return size_; }
  const std::vector<unsigned>& modulus() const { return modulus_; }
  /// Matrix of x -> x^p on the power basis.
  const FpMatrix& frobenius_matrix() const { return frob_; }
  bool operator==(const GFField& o) const { return p_ == o.p_ && modulus_ == o.modulus_; }

 private:
  unsigned p_;
  unsigned m_;
  std::uint64_t size_;
  std::vector<unsigned> modulus_;
  FpMatrix frob_;
};

using GFFieldPtr = std::shared_ptr<const GFField>;

/// The Conway polynomial shipped for (p, m); nullopt when not tabulated.
std::optional<std::vector<unsigned>> conway_modulus(unsigned p, unsigned m);

/// Residue field of the unramified level of degree p^s. Degrees that are
/// not p-powers are not part of the tower and are rejected.
GFFieldPtr tower_field(unsigned p, unsigned s);
GFFieldPtr make_field(unsigned p, unsigned m);

class GFElem {
 public:
  GFElem(GFFieldPtr field, std::vector<unsigned> coeffs);
  static GFElem zero(GFFieldPtr field);
  static GFElem one(GFFieldPtr field);
  static GFElem scalar(GFFieldPtr field, long c);
  /// The residue generator theta (x mod modulus).
  static GFElem generator(GFFieldPtr field);
  /// Inverse of index(): coefficient i is digit i of idx in base p.
  static GFElem from_index(GFFieldPtr field, std::uint64_t idx);

  const GFFieldPtr& field() const { return field_; }
  const std::vector<unsigned>& coeffs() const { return c_; }
  unsigned prime() const { return field_->prime(); }
  std::uint64_t index() const;
  bool is_zero() const;
  bool in_prime_field() const;

  GFElem operator+(const GFElem& o) const;
  GFElem operator-(const GFElem& o) const;
  GFElem operator*(const GFElem& o) const;
  GFElem operator-() const;
  GFElem scaled(unsigned c) const;
  GFElem pow(std::uint64_t e) const;
  GFElem inverse() const;
  bool operator==(const GFElem& o) const { return *field_ == *o.field_ && c_ == o.c_; }
  bool operator!=(const GFElem& o) const { return !(*this == o); }

  /// Trace to F_p.
  unsigned trace() const;
  std::string str() const;

 private:
  void check(const GFElem& o) const;
  GFFieldPtr field_;
  std::vector<unsigned> c_;
};

/// a^(p^iterations).
GFElem gf_frobenius(const GFElem& a, unsigned iterations = 1);

/// Every element once, ordered by index() (coefficient 0 least significant).
std::vector<GFElem> gf_enumerate(const GFFieldPtr& field);
void gf_for_each(const GFFieldPtr& field, const std::function<void(const GFElem&)>& fn);

/// Field embedding between Conway levels sending theta_small to theta_big^((q_big-1)/(q_small-1)).
class GFEmbedding {
 public:
  GFEmbedding(GFFieldPtr from, GFFieldPtr to);
  GFElem operator()(const GFElem& a) const;
  const GFFieldPtr& source() const { return from_; }
  const GFFieldPtr& target() const { return to_; }
  const GFElem& image_of_generator() const { return image_; }

 private:
  GFFieldPtr from_, to_;
  GFElem image_;
};

using GFVector = std::vector<GFElem>;

/// (phi - u_bar) applied to a vector: phi componentwise, u_bar acting on the vector index.
GFVector apply_twisted_frobenius(const GFVector& beta, const FpMatrix& u_bar);

/// (phi - u_bar) as an F_p-matrix on flattened coordinates.
FpMatrix twisted_frobenius_matrix(const GFFieldPtr& field, const FpMatrix& u_bar);

struct BruteSolveResult {
  bool solvable = false;
  GFVector beta;                        ///< least solution in enumeration order, when solvable
  std::uint64_t candidates_checked = 0; ///< exhaustive certificate when unsolvable
  bool exhaustive = false;              ///< false when the system was too large and solved linearly
};

/// Solve (phi - u_bar) beta = alpha inside the field of alpha.
BruteSolveResult gf_brute_twist_solve(const GFVector& alpha, const FpMatrix& u_bar);

/// Coordinates of a vector over F_{p^m} as an (m*d)-vector over F_p, block a = component a.
std::vector<unsigned> flatten(const GFVector& v);
GFVector unflatten(const GFFieldPtr& field, const std::vector<unsigned>& flat, std::size_t d);

}  // namespace twistnorm
