#include "twistnorm/twist.hpp"

#include <algorithm>
#include <sstream>

namespace twistnorm {

AbGroupStructure::AbGroupStructure(unsigned p, std::vector<u64> cyclic_orders, unsigned free_rank)
    : p_(p), orders_(std::move(cyclic_orders)), free_rank_(free_rank) {
  orders_.erase(std::remove(orders_.begin(), orders_.end(), u64{1}), orders_.end());
  for (u64 o : orders_) {
    u64 x = o;
    while (x % p == 0) x /= p;
    require(x == 1 && o > 1, ErrorCode::invalid_argument, "cyclic orders must be powers of p");
  }
  std::sort(orders_.rbegin(), orders_.rend());
}

AbGroupStructure AbGroupStructure::from_exponents(unsigned p, const std::vector<unsigned>& exponents, unsigned free_rank) {
  std::vector<u64> orders;
  for (unsigned v : exponents)
    if (v >= 1) orders.push_back(checked_pow(p, v));
  return AbGroupStructure(p, std::move(orders), free_rank);
}

unsigned AbGroupStructure::log_order() const {
  unsigned total = 0;
  for (u64 o : orders_)
    for (u64 x = o; x > 1; x /= p_) ++total;
  return total;
}

u64 AbGroupStructure::order() const {
  require(free_rank_ == 0, ErrorCode::invalid_argument, "infinite group has no finite order");
  return p_ == 0 ? 1 : checked_pow(p_, log_order());
}

u64 AbGroupStructure::exponent() const { return orders_.empty() ? 1 : orders_.front(); }

AbGroupStructure AbGroupStructure::operator+(const AbGroupStructure& o) const {
  if (p_ == 0) return o;
  if (o.p_ == 0) return *this;
  require(p_ == o.p_, ErrorCode::invalid_argument, "direct sum of groups for different primes");
  std::vector<u64> all = orders_;
  all.insert(all.end(), o.orders_.begin(), o.orders_.end());
  return AbGroupStructure(p_, std::move(all), free_rank_ + o.free_rank_);
}

std::string AbGroupStructure::str() const {
  if (is_trivial()) return "0";
  std::ostringstream os;
  bool first = true;
  for (u64 o : orders_) {
    if (!first) os << " x ";
    first = false;
    os << "Z/" << o;
  }
  if (free_rank_) {
    if (!first) os << " x ";
    os << "Z_" << p_ << "^" << free_rank_;
  }
  return os.str();
}

TwistFamily::TwistFamily(std::size_t d, std::vector<std::string> labels, std::vector<ZpMatrix> matrices)
    : d_(d), labels_(std::move(labels)), matrices_(std::move(matrices)) {
  require(d >= 1, ErrorCode::invalid_argument, "twist dimension must be at least 1");
  require(!labels_.empty() && labels_.size() == matrices_.size(), ErrorCode::invalid_argument,
          "a twist family needs one matrix per label and at least one label");
  for (const auto& m : matrices_) {
    require(m.rows() == d && m.cols() == d, ErrorCode::invalid_argument, "twist matrix has the wrong dimension");
    require(m.prime() == matrices_.front().prime() && m.precision() == matrices_.front().precision(),
            ErrorCode::precision_mismatch, "twist matrices must share prime and precision");
    require(m.determinant().is_unit(), ErrorCode::not_a_unit, "twist matrix is not invertible over Z_p");
  }
}

TwistFamily TwistFamily::singleton(const std::string& label, ZpMatrix u) {
  const std::size_t d = u.rows();
  return TwistFamily(d, {label}, {std::move(u)});
}

TwistFamily TwistFamily::scalars(unsigned p, unsigned N, const std::vector<std::string>& labels,
                                 const std::vector<i64>& values) {
  std::vector<ZpMatrix> ms;
  for (i64 v : values) ms.push_back(ZpMatrix::from_ints(p, N, {{v}}));
  return TwistFamily(1, labels, std::move(ms));
}

TwistFamily TwistFamily::member(std::size_t j) const { return TwistFamily(d_, {labels_.at(j)}, {matrices_.at(j)}); }

unsigned TwistFamily::max_defect_valuation() const {
  unsigned best = 0;
  for (const auto& u : matrices_) {
    ZpMatrix a = ZpMatrix::identity(u.prime(), u.precision(), d_) - u;
    best = std::max(best, a.determinant().valuation());
  }
  return best;
}

Zp unit_root(i64 a_q, u64 q, unsigned p, unsigned N) {
  require(q >= p, ErrorCode::invalid_argument, "q must be a power of p");
  for (u64 x = q; x > 1; x /= p) require(x % p == 0, ErrorCode::invalid_argument, "q must be a power of p");
  const i64 ap = a_q % static_cast<i64>(p);
  require(ap != 0, ErrorCode::supersingular, "a_q = 0 mod p: no unit root (supersingular reduction)");
  // x^2 - a x + q
  const u64 mod = checked_pow(p, N);
  auto f = ZpPoly(p, N,
                  {Zp::from_residue(p, N, q % mod), Zp(p, N, -a_q), Zp(p, N, 1)});
  return hensel_root(f, reduce_signed(a_q, p));
}

namespace {

AbGroupStructure coker_block(const ZpMatrix& u, unsigned N) {
  ZpMatrix m = u.truncated(N);
  ZpMatrix a = ZpMatrix::identity(m.prime(), N, m.rows()) - m;
  std::vector<unsigned> exps;
  unsigned free = 0;
  for (unsigned v : smith_valuations(a)) {
    if (v == kInfiniteValuation)
      ++free;
    else
      exps.push_back(v);
  }
  return AbGroupStructure::from_exponents(m.prime(), exps, free);
}

}  // namespace

AbGroupStructure coker(const TwistFamily& family) {
  AbGroupStructure out = AbGroupStructure::trivial(family.prime());
  for (const auto& u : family.matrices()) out = out + coker_block(u, u.precision());
  return out;
}

AbGroupStructure coker_mod(const TwistFamily& family, unsigned n) {
  require(n >= 1, ErrorCode::invalid_argument, "exponent must be at least 1");
  require(n <= family.precision(), ErrorCode::precision_exhausted, "twist precision is below the requested exponent");
  AbGroupStructure out = AbGroupStructure::trivial(family.prime());
  for (const auto& u : family.matrices()) {
    // Over Z/p^n an undetectable divisor is a full Z/p^n summand.
    auto b = coker_block(u, n);
    std::vector<u64> orders = b.cyclic_orders();
    for (unsigned i = 0; i < b.free_rank(); ++i) orders.push_back(checked_pow(family.prime(), n));
    out = out + AbGroupStructure(family.prime(), orders);
  }
  return out;
}

}  // namespace twistnorm
