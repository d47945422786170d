#pragma once

// Twist families, finite abelian p-group structures, Frobenius unit roots and
// the cokernels of I - u.

#include <string>
#include <vector>

#include "twistnorm/padic.hpp"

namespace twistnorm {

/// Finite abelian p-group (times Z_p^free_rank) as a nonincreasing list of cyclic orders.
class AbGroupStructure {
 public:
  AbGroupStructure() = default;
  AbGroupStructure(unsigned p, std::vector<u64> cyclic_orders, unsigned free_rank = 0);
  static AbGroupStructure trivial(unsigned p) { return AbGroupStructure(p, {}); }
  /// Cyclic factors p^v for each v >= 1.
  static AbGroupStructure from_exponents(unsigned p, const std::vector<unsigned>& exponents, unsigned free_rank = 0);

  unsigned prime() const { return p_; }
  const std::vector<u64>& cyclic_orders() const { return orders_; }
  unsigned free_rank() const { return free_rank_; }
  bool is_trivial() const { return orders_.empty() && free_rank_ == 0; }
  /// log_p of the order of the torsion part.
  unsigned log_order() const;
  /// Order when finite.
  u64 order() const;
  /// Smallest p^k killing the torsion part.
  u64 exponent() const;

  AbGroupStructure operator+(const AbGroupStructure& o) const;
  bool operator==(const AbGroupStructure& o) const = default;

  /// Canonical text, e.g. "Z/9 x Z/3", "Z_3^1", "0".
  std::string str() const;

 private:
  unsigned p_ = 0;
  std::vector<u64> orders_;
  unsigned free_rank_ = 0;
};

/// One invertible d x d matrix over Z_p per label.
class TwistFamily {
 public:
  TwistFamily(std::size_t d, std::vector<std::string> labels, std::vector<ZpMatrix> matrices);
  static TwistFamily singleton(const std::string& label, ZpMatrix u);
  /// d = 1, one scalar per label.
  static TwistFamily scalars(unsigned p, unsigned N, const std::vector<std::string>& labels, const std::vector<i64>& values);

  std::size_t dimension() const { return d_; }
  std::size_t size() const { return labels_.size(); }
  unsigned prime() const { return matrices_.front().prime(); }
  unsigned precision() const { return matrices_.front().precision(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<ZpMatrix>& matrices() const { return matrices_; }
  TwistFamily member(std::size_t j) const;
  /// max_j v_p(det(I - u_j)), capped at the precision.
  unsigned max_defect_valuation() const;

 private:
  std::size_t d_;
  std::vector<std::string> labels_;
  std::vector<ZpMatrix> matrices_;
};

/// The unit root of x^2 - a x + q (q = p^s) by Hensel from a mod p.
Zp unit_root(i64 a_q, u64 q, unsigned p, unsigned N);

/// Z_p^d / (I - u) summed over labels.
AbGroupStructure coker(const TwistFamily& family);
/// (Z/p^n)^d / (I - u) summed over labels.
AbGroupStructure coker_mod(const TwistFamily& family, unsigned n);

}  // namespace twistnorm
