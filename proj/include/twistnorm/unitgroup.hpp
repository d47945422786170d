#pragma once

// U^1/U^(M) of a layer as a finitely presented Z/p^X-module on the
// generators e_{i,k} = 1 + theta^k pi^i, 1 <= i < M, 0 <= k < m.

#include <vector>

#include "twistnorm/towers.hpp"
#include "twistnorm/twist.hpp"

namespace twistnorm {

class UnitGroup {
 public:
  UnitGroup(RamLayerPtr layer, unsigned depth);

  const RamLayerPtr& layer() const { return layer_; }
  unsigned depth() const { return depth_; }
  unsigned prime() const { return layer_->prime(); }
  std::size_t generator_count() const { return gens_.size(); }
  /// Exponent vectors live in (Z/p^X)^g with p^X killing the group.
  unsigned exponent_precision() const { return X_; }

  const RamElem& generator(std::size_t j) const { return gens_[j]; }
  /// Index of e_{i,k}.
  std::size_t index(unsigned i, unsigned k) const { return static_cast<std::size_t>(i - 1) * layer_->degree() + k; }

  /// Digits a_j in [0, p) with x = prod e_j^{a_j} mod U^(M).
  std::vector<u64> digits(const RamElem& x) const;
  /// prod e_j^{a_j} for exponents in Z/p^X.
  RamElem element(const std::vector<u64>& exponents) const;

  /// Columns p e_j - digits(e_j^p): the relation module.
  const ZpMatrix& relations() const { return rel_; }
  /// Columns digits(phi(e_j)).
  ZpMatrix frobenius_matrix() const;

  /// Column vector of digits, as a g x 1 matrix over Z/p^X.
  ZpMatrix column(const RamElem& x) const;

 private:
  RamLayerPtr layer_;
  unsigned depth_;
  unsigned X_;
  std::vector<RamElem> gens_;
  std::vector<std::vector<RamElem>> inv_pow_;  // inv_pow_[j][c-1] = e_j^{-c}
  ZpMatrix rel_;
};

/// Smallest X with p^X killing U^1/U^(M) in a layer of ramification e.
unsigned unit_group_exponent(unsigned p, unsigned e, unsigned depth);

/// Finite abelian group (Z/p^X)^n / span(rel); subgroups given by generator columns.
class PresentedGroup {
 public:
  explicit PresentedGroup(ZpMatrix relations);
  std::size_t rank() const { return rel_.rows(); }
  const ZpMatrix& relations() const { return rel_; }

  unsigned log_order() const;
  /// log_p |<gens>|.
  unsigned log_order_of(const ZpMatrix& gens) const;
  bool contains(const ZpMatrix& gens, const ZpMatrix& x) const;
  /// Structure of <H> / <K>; K must lie in <H>.
  AbGroupStructure quotient(const ZpMatrix& H, const ZpMatrix& K) const;
  /// Structure of <H>.
  AbGroupStructure subgroup(const ZpMatrix& H) const;
  /// Smallest k with p^k x in <gens>.
  unsigned class_log_order(const ZpMatrix& gens, const ZpMatrix& x) const;
  /// Greedy subset of the columns generating the same subgroup; stops early at target_log_order.
  ZpMatrix minimal_generators(const ZpMatrix& gens, unsigned target_log_order) const;

 private:
  ZpMatrix rel_;
  unsigned log_order_;
};

/// a (x) I_d: entry ((j, s), (k, t)) = a(j, k) when s == t, index j*d + s.
ZpMatrix kron_identity(const ZpMatrix& a, std::size_t d);

}  // namespace twistnorm
