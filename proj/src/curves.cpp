#include "twistnorm/curves.hpp"

#include <numeric>
#include <unordered_map>

namespace twistnorm {

Curve::Curve(GFFieldPtr field, std::array<GFElem, 5> a) : field_(std::move(field)), a_(std::move(a)) {
  for (const auto& c : a_) require(*c.field() == *field_, ErrorCode::invalid_argument, "coefficient from another field");
  require(!discriminant().is_zero(), ErrorCode::singular_curve, "singular Weierstrass equation: " + str());
}

Curve Curve::from_ints(GFFieldPtr field, const std::array<long, 5>& a) {
  std::array<GFElem, 5> c{GFElem::scalar(field, a[0]), GFElem::scalar(field, a[1]), GFElem::scalar(field, a[2]),
                          GFElem::scalar(field, a[3]), GFElem::scalar(field, a[4])};
  return Curve(field, c);
}

GFElem Curve::discriminant() const {
  const auto& [a1, a2, a3, a4, a6] = a_;
  const auto k = [&](long c) { return GFElem::scalar(field_, c); };
  const GFElem b2 = a1 * a1 + k(4) * a2;
  const GFElem b4 = k(2) * a4 + a1 * a3;
  const GFElem b6 = a3 * a3 + k(4) * a6;
  const GFElem b8 = a1 * a1 * a6 + k(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  return -(b2 * b2 * b8) - k(8) * b4 * b4 * b4 - k(27) * b6 * b6 + k(9) * b2 * b4 * b6;
}

Point Curve::infinity() const { return {true, GFElem::zero(field_), GFElem::zero(field_)}; }

bool Curve::contains(const Point& P) const {
  if (P.infinity) return true;
  const auto& [a1, a2, a3, a4, a6] = a_;
  const GFElem& x = P.x;
  const GFElem& y = P.y;
  return y * y + a1 * x * y + a3 * y == x * x * x + a2 * x * x + a4 * x + a6;
}

Point Curve::neg(const Point& P) const {
  if (P.infinity) return P;
  return {false, P.x, -P.y - a_[0] * P.x - a_[2]};
}

Point Curve::add(const Point& P, const Point& Q) const {
  if (P.infinity) return Q;
  if (Q.infinity) return P;
  const auto& [a1, a2, a3, a4, a6] = a_;
  GFElem lambda = GFElem::zero(field_), nu = GFElem::zero(field_);
  if (P.x == Q.x) {
    const GFElem den = P.y + P.y + a1 * P.x + a3;
    if (P.y != Q.y || den.is_zero()) return infinity();
    const GFElem num = GFElem::scalar(field_, 3) * P.x * P.x + (a2 + a2) * P.x + a4 - a1 * P.y;
    lambda = num * den.inverse();
  } else {
    lambda = (Q.y - P.y) * (Q.x - P.x).inverse();
  }
  nu = P.y - lambda * P.x;
  const GFElem x3 = lambda * lambda + a1 * lambda - a2 - P.x - Q.x;
  const GFElem y3 = -(lambda + a1) * x3 - nu - a3;
  return {false, x3, y3};
}

Point Curve::mul(const Point& P, u64 k) const {
  Point acc = infinity(), base = P;
  while (k) {
    if (k & 1) acc = add(acc, base);
    base = add(base, base);
    k >>= 1;
  }
  return acc;
}

std::vector<Point> Curve::points() const {
  require(field_->size() <= kDeskFieldBound, ErrorCode::desk_bound_exceeded, "field exceeds the desk bound");
  const auto& [a1, a2, a3, a4, a6] = a_;
  std::vector<Point> out{infinity()};
  const auto all = gf_enumerate(field_);
  if (field_->prime() == 2) {
    for (const auto& x : all)
      for (const auto& y : all)
        if (contains({false, x, y})) out.push_back({false, x, y});
    return out;
  }
  // Odd characteristic: (2y + a1 x + a3)^2 = 4 (x^3 + a2 x^2 + a4 x + a6) + (a1 x + a3)^2.
  std::unordered_map<std::uint64_t, std::vector<GFElem>> roots;
  for (const auto& z : all) roots[(z * z).index()].push_back(z);
  const GFElem half = GFElem::scalar(field_, 2).inverse();
  for (const auto& x : all) {
    const GFElem h = a1 * x + a3;
    const GFElem rhs = GFElem::scalar(field_, 4) * (x * x * x + a2 * x * x + a4 * x + a6) + h * h;
    auto it = roots.find(rhs.index());
    if (it == roots.end()) continue;
    for (const auto& w : it->second) out.push_back({false, x, (w - h) * half});
  }
  return out;
}

std::string Curve::str() const {
  return "[" + a_[0].str() + ", " + a_[1].str() + ", " + a_[2].str() + ", " + a_[3].str() + ", " + a_[4].str() + "]";
}

std::string CurveGroup::str() const {
  if (order == 1) return "0";
  return n2 == 1 ? "Z/" + std::to_string(n1) : "Z/" + std::to_string(n1) + " x Z/" + std::to_string(n2);
}

namespace {

std::vector<u64> prime_factors(u64 n) {
  std::vector<u64> out;
  for (u64 l = 2; l * l <= n; ++l)
    if (n % l == 0) {
      out.push_back(l);
      while (n % l == 0) n /= l;
    }
  if (n > 1) out.push_back(n);
  return out;
}

u64 point_order(const Curve& c, const Point& P, u64 group_order, const std::vector<u64>& primes) {
  u64 ord = group_order;
  for (u64 l : primes)
    while (ord % l == 0 && c.mul(P, ord / l).infinity) ord /= l;
  return ord;
}

unsigned vp(u64 x, unsigned p) {
  unsigned v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

}  // namespace

CurveGroup count_and_structure(const Curve& c) {
  const auto pts = c.points();
  CurveGroup g;
  g.order = pts.size();
  const auto primes = prime_factors(g.order);
  u64 exponent = 1;
  for (const auto& P : pts) {
    if (exponent == g.order) break;
    exponent = std::lcm(exponent, point_order(c, P, g.order, primes));
  }
  g.n1 = exponent;
  g.n2 = g.order / exponent;
  require(g.n1 % g.n2 == 0, ErrorCode::internal, "point group is not of rank at most two");
  return g;
}

FrobeniusTrace trace_and_ordinary(const Curve& c, const CurveGroup& g) {
  const i64 q = static_cast<i64>(c.field()->size());
  FrobeniusTrace t;
  t.a = q + 1 - static_cast<i64>(g.order);
  const i64 p = c.field()->prime();
  t.ordinary = ((t.a % p) + p) % p != 0;
  return t;
}

FrobeniusTrace trace_and_ordinary(const Curve& c) { return trace_and_ordinary(c, count_and_structure(c)); }

AbGroupStructure p_primary(unsigned p, const CurveGroup& g) {
  return AbGroupStructure::from_exponents(p, {vp(g.n1, p), vp(g.n2, p)});
}

AbGroupStructure p_primary(const Curve& c) { return p_primary(c.field()->prime(), count_and_structure(c)); }

AbGroupStructure quotient_mod_pn(unsigned p, const CurveGroup& g, unsigned n) {
  return AbGroupStructure::from_exponents(p, {std::min(vp(g.n1, p), n), std::min(vp(g.n2, p), n)});
}

AbGroupStructure quotient_mod_pn(const Curve& c, unsigned n) {
  return quotient_mod_pn(c.field()->prime(), count_and_structure(c), n);
}

std::vector<Curve> all_prime_field_curves(const GFFieldPtr& field) {
  const long p = field->prime();
  std::vector<Curve> out;
  for (long i = 0; i < p * p * p * p * p; ++i) {
    std::array<long, 5> a{};
    long r = i;
    for (auto& c : a) {
      c = r % p;
      r /= p;
    }
    try {
      out.push_back(Curve::from_ints(field, a));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::singular_curve) throw;
    }
  }
  return out;
}

}  // namespace twistnorm
