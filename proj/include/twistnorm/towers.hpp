#pragma once

// Unramified levels O(T_s) with the lifted Frobenius, totally ramified
// Eisenstein layers over them, Galois conjugation by root substitution,
// norms and the principal unit filtration.

#include <memory>
#include <vector>

#include "twistnorm/gf.hpp"
#include "twistnorm/padic.hpp"

namespace twistnorm {

class UnramLevel;
class UnramElem;
using UnramLevelPtr = std::shared_ptr<const UnramLevel>;

/// Z_p[x]/(h) mod p^N, h the integer lift of the shipped residue modulus of degree p^s.
class UnramLevel : public std::enable_shared_from_this<UnramLevel> {
 public:
  unsigned prime() const { return p_; }
  unsigned exponent() const { return s_; }
  unsigned degree() const { return m_; }
  unsigned precision() const { return N_; }
  u64 modulus_value() const { return mod_; }
  const std::vector<u64>& modulus() const { return h_; }
  const GFFieldPtr& residue_field() const { return field_; }
  /// xi: the image of x under the lifted Frobenius.
  UnramElem frobenius_image() const;

  // Raw kernels on coefficient arrays of length degree().
  void mul_raw(const u64* a, const u64* b, u64* out) const;
  void frobenius_raw(const u64* a, u64* out) const;
  /// Reduce a polynomial of degree < 2m-1 modulo h.
  void reduce_raw(const u64* t, u64* out) const;

  /// Level (p, s) at another precision (cached).
  UnramLevelPtr at_precision(unsigned N) const;

 private:
  friend UnramLevelPtr build_unram(unsigned p, unsigned s, unsigned N);
  UnramLevel() = default;
  void init(unsigned p, unsigned s, unsigned N);

  unsigned p_ = 0, s_ = 0, m_ = 1, N_ = 1;
  u64 mod_ = 1;
  std::vector<u64> h_;
  GFFieldPtr field_;
  std::vector<std::vector<u64>> high_powers_;  // x^{m+k} mod h, k < m-1
  std::vector<u64> frob_;                      // column-major m x m, column j = xi^j
};

/// Cached per (p, s, N); s = 0 is Z_p itself with trivial Frobenius.
UnramLevelPtr build_unram(unsigned p, unsigned s, unsigned N);

class UnramElem {
 public:
  UnramElem(UnramLevelPtr level, std::vector<u64> coeffs);
  static UnramElem zero(const UnramLevelPtr& level);
  static UnramElem one(const UnramLevelPtr& level);
  static UnramElem scalar(const UnramLevelPtr& level, i64 c);
  static UnramElem generator(const UnramLevelPtr& level);
  /// Lift with digits in [0, p).
  static UnramElem lift(const UnramLevelPtr& level, const GFElem& residue);

  const UnramLevelPtr& level() const { return level_; }
  const std::vector<u64>& coeffs() const { return c_; }
  unsigned prime() const { return level_->prime(); }

  UnramElem operator+(const UnramElem& o) const;
  UnramElem operator-(const UnramElem& o) const;
  UnramElem operator*(const UnramElem& o) const;
  UnramElem operator-() const;
  bool operator==(const UnramElem& o) const { return level_ == o.level_ && c_ == o.c_; }
  bool operator!=(const UnramElem& o) const { return !(*this == o); }

  UnramElem pow(u64 e) const;
  UnramElem inverse() const;
  UnramElem frobenius(unsigned iterations = 1) const;
  GFElem residue() const;
  /// Minimal p-adic valuation of the coefficients; precision() for zero.
  unsigned valuation() const;
  bool is_zero() const;
  UnramElem truncated(unsigned N) const;

 private:
  void check(const UnramElem& o) const;
  UnramLevelPtr level_;
  std::vector<u64> c_;
};

/// Embedding T_s -> T_s' (s <= s', equal precision) compatible with the residue embedding.
class UnramEmbedding {
 public:
  UnramEmbedding(UnramLevelPtr from, UnramLevelPtr to);
  UnramElem operator()(const UnramElem& a) const;

 private:
  UnramLevelPtr from_, to_;
  std::vector<UnramElem> powers_;
};

class RamLayer;
class RamElem;
using RamLayerPtr = std::shared_ptr<const RamLayer>;

/// O(T_s)[y]/(f) mod p^N for a monic Eisenstein f with integer coefficients.
/// The unramified level itself is the layer e = 1, f = y - p.
class RamLayer : public std::enable_shared_from_this<RamLayer> {
 public:
  const UnramLevelPtr& base() const { return base_; }
  unsigned ramification() const { return e_; }
  unsigned degree() const { return base_->degree(); }
  unsigned prime() const { return base_->prime(); }
  unsigned precision() const { return base_->precision(); }
  u64 modulus_value() const { return base_->modulus_value(); }
  const std::vector<i64>& eisenstein() const { return f_; }
  bool is_trivial() const { return e_ == 1; }
  /// Flat coefficient count e * m.
  std::size_t dimension() const { return static_cast<std::size_t>(e_) * degree(); }
  /// Largest meaningful pi-adic valuation, e * N.
  unsigned valuation_cap() const { return e_ * precision(); }
  /// Residue of p / pi^e, an element of F_p.
  unsigned p_over_pi_e() const { return p_over_pi_e_; }

  bool is_galois() const { return roots_.size() == e_; }
  std::vector<RamElem> galois_roots() const;
  /// pi-adic precision to which the stored roots are known.
  unsigned root_precision() const { return root_precision_; }
  /// v_pi(f'(pi)).
  unsigned different_exponent() const { return different_; }
  /// p-adic precision of norms into the base.
  unsigned norm_precision() const { return root_precision_ / e_; }

  RamElem uniformizer() const;
  /// sigma_i(x): substitute root i for the uniformizer.
  RamElem conjugate(const RamElem& x, std::size_t i) const;

  /// Same Eisenstein polynomial read over another unramified level.
  RamLayerPtr over(const UnramLevelPtr& base) const;

  void mul_raw(const u64* a, const u64* b, u64* out) const;

 private:
  friend RamLayerPtr trivial_layer(const UnramLevelPtr& base);
  friend RamLayerPtr eisenstein_layer(const UnramLevelPtr& base, const std::vector<i64>& f, bool galois);
  RamLayer() = default;

  UnramLevelPtr base_;
  unsigned e_ = 1;
  std::vector<i64> f_;
  std::vector<u64> f_mod_;
  unsigned p_over_pi_e_ = 1;
  // Flat coefficient arrays; kept raw so the layer does not own handles to itself.
  std::vector<std::vector<u64>> roots_;
  std::vector<std::vector<std::vector<u64>>> root_powers_;
  unsigned root_precision_ = 0;
  unsigned different_ = 0;
};

RamLayerPtr trivial_layer(const UnramLevelPtr& base);
/// Arbitrary Eisenstein layer; when galois is set the roots are searched in
/// the Z_p-level layer and a layer with fewer than e roots is returned non-Galois.
RamLayerPtr eisenstein_layer(const UnramLevelPtr& base, const std::vector<i64>& f, bool galois = true);

/// Pinned Eisenstein polynomial of the degree p^n subfield of Q_p(zeta_{p^{n+1}}),
/// coefficients low to high; empty when not shipped.
std::vector<i64> cyclotomic_eisenstein(unsigned p, unsigned n);
RamLayerPtr build_cyclotomic_layer(unsigned p, unsigned n, const UnramLevelPtr& base);

class RamElem {
 public:
  RamElem(RamLayerPtr layer, std::vector<u64> flat);
  static RamElem zero(const RamLayerPtr& layer);
  static RamElem one(const RamLayerPtr& layer);
  static RamElem from_base(const RamLayerPtr& layer, const UnramElem& a);
  /// 1 + pi^i * lift(residue).
  static RamElem elementary(const RamLayerPtr& layer, unsigned i, const GFElem& residue);

  const RamLayerPtr& layer() const { return layer_; }
  const std::vector<u64>& flat() const { return c_; }
  /// Coefficient of pi^k, k < e.
  UnramElem coefficient(unsigned k) const;

  RamElem operator+(const RamElem& o) const;
  RamElem operator-(const RamElem& o) const;
  RamElem operator*(const RamElem& o) const;
  RamElem operator-() const;
  bool operator==(const RamElem& o) const { return layer_ == o.layer_ && c_ == o.c_; }
  bool operator!=(const RamElem& o) const { return !(*this == o); }

  RamElem pow(u64 e) const;
  /// Requires a unit.
  RamElem inverse() const;
  RamElem frobenius(unsigned iterations = 1) const;
  /// pi-adic valuation, capped at the layer's valuation_cap().
  unsigned valuation() const;
  bool is_zero() const { return valuation() >= layer_->valuation_cap(); }
  /// Residue of x / pi^i for x in m^i.
  GFElem residue_at(unsigned i) const;
  /// Substitute r for the uniformizer (r in the same layer).
  RamElem substitute(const RamElem& r) const;

 private:
  void check(const RamElem& o) const;
  RamLayerPtr layer_;
  std::vector<u64> c_;
};

/// Image under a base change T_s -> T_s' of the same Eisenstein polynomial.
RamElem change_base(const RamElem& x, const RamLayerPtr& target);

/// Product of the Galois conjugates, descended to the base at norm_precision().
UnramElem norm(const RamElem& x);

/// Principal unit in a layer (the unramified case uses the trivial layer).
class PrincipalUnit {
 public:
  explicit PrincipalUnit(RamElem value);
  static PrincipalUnit from_unram(const UnramElem& value);
  const RamElem& value() const { return value_; }
  /// Largest i with value = 1 mod m^i (capped).
  unsigned filtration_level() const { return level_; }

 private:
  RamElem value_;
  unsigned level_;
};

struct FiltrationDigits {
  std::vector<GFElem> components;  ///< components[i-1] for levels i = 1 .. M-1
  RamElem remainder;               ///< lies in U^{(M)}
};

/// u = prod_i (1 + pi^i lift(components[i-1])) * remainder.
FiltrationDigits filtration_decompose(const PrincipalUnit& u, unsigned depth);
RamElem filtration_recompose(const RamLayerPtr& layer, const std::vector<GFElem>& components);

}  // namespace twistnorm
