#pragma once

// Elliptic curves in general Weierstrass form over small tower fields:
// enumeration, the group law, structure, Frobenius trace and p-parts.

#include <array>
#include <string>
#include <vector>

#include "twistnorm/gf.hpp"
#include "twistnorm/twist.hpp"

namespace twistnorm {

struct Point {
  bool infinity = true;
  GFElem x, y;
};

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
class Curve {
 public:
  Curve(GFFieldPtr field, std::array<GFElem, 5> a);
  /// Coefficients (a1, a2, a3, a4, a6) as integers reduced into the prime field.
  static Curve from_ints(GFFieldPtr field, const std::array<long, 5>& a);

  const GFFieldPtr& field() const { return field_; }
  const std::array<GFElem, 5>& coefficients() const { return a_; }
  GFElem discriminant() const;

  bool contains(const Point& P) const;
  Point neg(const Point& P) const;
  Point add(const Point& P, const Point& Q) const;
  Point mul(const Point& P, u64 k) const;
  Point infinity() const;

  /// Every rational point, infinity first.
  std::vector<Point> points() const;
  std::string str() const;

 private:
  GFFieldPtr field_;
  std::array<GFElem, 5> a_;
};

/// Z/n1 x Z/n2 with n2 | n1.
struct CurveGroup {
  u64 order = 1;
  u64 n1 = 1, n2 = 1;
  std::string str() const;
};

CurveGroup count_and_structure(const Curve& c);

struct FrobeniusTrace {
  i64 a = 0;
  bool ordinary = false;
};
FrobeniusTrace trace_and_ordinary(const Curve& c);
FrobeniusTrace trace_and_ordinary(const Curve& c, const CurveGroup& g);

/// Sylow p-subgroup of the point group.
AbGroupStructure p_primary(const Curve& c);
AbGroupStructure p_primary(unsigned p, const CurveGroup& g);
/// Cokernel of multiplication by p^n.
AbGroupStructure quotient_mod_pn(const Curve& c, unsigned n);
AbGroupStructure quotient_mod_pn(unsigned p, const CurveGroup& g, unsigned n);

/// Every smooth curve over the field with coefficients drawn from the prime field.
std::vector<Curve> all_prime_field_curves(const GFFieldPtr& field);

}  // namespace twistnorm
