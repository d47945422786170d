#include "twistnorm/unitgroup.hpp"

#include <algorithm>

namespace twistnorm {

unsigned unit_group_exponent(unsigned p, unsigned e, unsigned depth) {
  // x in U^(i) has x^p in U^(min(p i, i + e)).
  unsigned level = 1, k = 0;
  while (level < depth) {
    level = std::min(p * level, level + e);
    ++k;
  }
  return k;
}

UnitGroup::UnitGroup(RamLayerPtr layer, unsigned depth)
    : layer_(std::move(layer)), depth_(depth), X_(0), rel_(layer_->prime(), 1, 0, 0) {
  require(depth >= 1, ErrorCode::invalid_argument, "depth must be at least 1");
  require(depth <= layer_->valuation_cap(), ErrorCode::precision_exhausted, "depth exceeds the layer precision");
  const unsigned p = layer_->prime(), m = layer_->degree();
  X_ = unit_group_exponent(p, layer_->ramification(), depth) + 1;
  const GFFieldPtr& F = layer_->base()->residue_field();
  for (unsigned i = 1; i < depth; ++i)
    for (unsigned k = 0; k < m; ++k) {
      std::vector<unsigned> basis(m, 0);
      basis[k] = 1;
      gens_.push_back(RamElem::elementary(layer_, i, GFElem(F, basis)));
      RamElem inv = gens_.back().inverse();
      std::vector<RamElem> pw{inv};
      for (unsigned c = 2; c < p; ++c) pw.push_back(pw.back() * inv);
      inv_pow_.push_back(std::move(pw));
    }
  const std::size_t g = gens_.size();
  rel_ = ZpMatrix(p, X_, g, g);
  const u64 mod = rel_.modulus();
  for (std::size_t j = 0; j < g; ++j) {
    auto d = digits(gens_[j].pow(p));
    for (std::size_t i = 0; i < g; ++i) rel_.raw(i, j) = submod(i == j ? p % mod : 0, d[i] % mod, mod);
  }
}

std::vector<u64> UnitGroup::digits(const RamElem& x) const {
  require(x.layer() == layer_, ErrorCode::invalid_argument, "unit from another layer");
  const RamElem one = RamElem::one(layer_);
  require((x - one).valuation() >= 1, ErrorCode::invalid_argument, "not a principal unit");
  const unsigned m = layer_->degree();
  std::vector<u64> out(gens_.size(), 0);
  RamElem cur = x;
  for (unsigned i = 1; i < depth_; ++i) {
    GFElem c = (cur - one).residue_at(i);
    for (unsigned k = 0; k < m; ++k) {
      const unsigned a = c.coeffs()[k];
      if (!a) continue;
      out[index(i, k)] = a;
      cur = cur * inv_pow_[index(i, k)][a - 1];
    }
  }
  require((cur - one).valuation() >= depth_, ErrorCode::internal, "digit expansion left a remainder outside U^(M)");
  return out;
}

RamElem UnitGroup::element(const std::vector<u64>& exponents) const {
  require(exponents.size() == gens_.size(), ErrorCode::invalid_argument, "exponent vector length mismatch");
  RamElem acc = RamElem::one(layer_);
  for (std::size_t j = 0; j < gens_.size(); ++j)
    if (exponents[j]) acc = acc * gens_[j].pow(exponents[j]);
  return acc;
}

ZpMatrix UnitGroup::frobenius_matrix() const {
  const std::size_t g = gens_.size();
  ZpMatrix phi(prime(), X_, g, g);
  for (std::size_t j = 0; j < g; ++j) {
    auto d = digits(gens_[j].frobenius());
    for (std::size_t i = 0; i < g; ++i) phi.raw(i, j) = d[i];
  }
  return phi;
}

ZpMatrix UnitGroup::column(const RamElem& x) const {
  auto d = digits(x);
  ZpMatrix c(prime(), X_, d.size(), 1);
  for (std::size_t i = 0; i < d.size(); ++i) c.raw(i, 0) = d[i];
  return c;
}

ZpMatrix kron_identity(const ZpMatrix& a, std::size_t d) {
  ZpMatrix out(a.prime(), a.precision(), a.rows() * d, a.cols() * d);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t s = 0; s < d; ++s) out.raw(i * d + s, j * d + s) = a.raw(i, j);
  return out;
}

// ---------------------------------------------------------------- presented groups

PresentedGroup::PresentedGroup(ZpMatrix relations) : rel_(std::move(relations)), log_order_(colength(rel_)) {}

unsigned PresentedGroup::log_order() const { return log_order_; }

unsigned PresentedGroup::log_order_of(const ZpMatrix& gens) const {
  if (gens.cols() == 0) return 0;
  return log_order_ - colength(rel_.hconcat(gens));
}

bool PresentedGroup::contains(const ZpMatrix& gens, const ZpMatrix& x) const {
  return log_order_of(gens.hconcat(x)) == log_order_of(gens);
}

namespace {

ZpMatrix scaled(const ZpMatrix& a, unsigned k) {
  ZpMatrix out = a;
  const u64 f = k >= a.precision() ? 0 : checked_pow(a.prime(), k);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.raw(i, j) = mulmod(a.raw(i, j), f, a.modulus());
  return out;
}

}  // namespace

AbGroupStructure PresentedGroup::quotient(const ZpMatrix& H, const ZpMatrix& K) const {
  const ZpMatrix base = rel_.hconcat(K);
  const unsigned cb = colength(base);
  // s_k = log |p^k <H> + <K>| - log |<K>|
  std::vector<unsigned> s;
  for (unsigned k = 0;; ++k) {
    const unsigned v = cb - colength(base.hconcat(scaled(H, k)));
    s.push_back(v);
    if (v == 0) break;
    require(k <= rel_.precision(), ErrorCode::internal, "quotient filtration did not terminate");
  }
  // Factors of order at least p^{k+1}: s_k - s_{k+1}.
  std::vector<unsigned> exps;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const unsigned at_least = s[k] - s[k + 1];
    const unsigned at_least_next = k + 2 < s.size() ? s[k + 1] - s[k + 2] : 0;
    for (unsigned c = 0; c < at_least - at_least_next; ++c) exps.push_back(static_cast<unsigned>(k + 1));
  }
  return AbGroupStructure::from_exponents(rel_.prime(), exps);
}

AbGroupStructure PresentedGroup::subgroup(const ZpMatrix& H) const {
  return quotient(H, ZpMatrix(rel_.prime(), rel_.precision(), rel_.rows(), 0));
}

unsigned PresentedGroup::class_log_order(const ZpMatrix& gens, const ZpMatrix& x) const {
  for (unsigned k = 0; k <= rel_.precision(); ++k)
    if (contains(gens, scaled(x, k))) return k;
  fail(ErrorCode::internal, "element order exceeds the group exponent");
}

ZpMatrix PresentedGroup::minimal_generators(const ZpMatrix& gens, unsigned target_log_order) const {
  ZpMatrix chosen(rel_.prime(), rel_.precision(), rel_.rows(), 0);
  unsigned have = 0;
  for (std::size_t j = 0; j < gens.cols() && have < target_log_order; ++j) {
    ZpMatrix trial = chosen.hconcat(gens.column_range(j, j + 1));
    const unsigned got = log_order_of(trial);
    if (got > have) {
      chosen = trial;
      have = got;
    }
  }
  return chosen;
}

}  // namespace twistnorm
