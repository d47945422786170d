#include "twistnorm/towers.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

namespace twistnorm {

namespace {

// Residues below 2^32 multiply without 128-bit division.
inline u64 mm(u64 a, u64 b, u64 mod) {
  if (mod <= 0xFFFFFFFFull) return a * b % mod;
  return mulmod(a, b, mod);
}

unsigned coeff_valuation(const u64* c, std::size_t n, unsigned p, unsigned N) {
  unsigned v = N;
  for (std::size_t i = 0; i < n; ++i) v = std::min(v, valuation_of(c[i], p, N));
  return v;
}

}  // namespace

// ---------------------------------------------------------------- unramified levels

UnramLevelPtr build_unram(unsigned p, unsigned s, unsigned N) {
  static std::mutex mu;
  static std::map<std::tuple<unsigned, unsigned, unsigned>, UnramLevelPtr> cache;
  const auto key = std::make_tuple(p, s, N);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::shared_ptr<UnramLevel> lvl(new UnramLevel());
  lvl->init(p, s, N);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, lvl).first->second;
}

void UnramLevel::init(unsigned p, unsigned s, unsigned N) {
  require(N >= 1, ErrorCode::invalid_argument, "precision must be at least 1");
  p_ = p;
  s_ = s;
  N_ = N;
  mod_ = checked_pow(p, N);
  field_ = tower_field(p, s);
  m_ = field_->degree();
  h_.assign(field_->modulus().begin(), field_->modulus().end());

  // x^m = -sum h_i x^i, then keep multiplying by x.
  std::vector<u64> cur(m_);
  for (unsigned i = 0; i < m_; ++i) cur[i] = submod(0, h_[i] % mod_, mod_);
  for (unsigned k = 0; k + 1 < m_; ++k) {
    high_powers_.push_back(cur);
    const u64 top = cur[m_ - 1];
    std::vector<u64> next(m_, 0);
    for (unsigned i = m_ - 1; i > 0; --i) next[i] = cur[i - 1];
    for (unsigned i = 0; i < m_; ++i) next[i] = submod(next[i], mm(top, h_[i] % mod_, mod_), mod_);
    cur = std::move(next);
  }

  frob_.assign(static_cast<std::size_t>(m_) * m_, 0);
  if (m_ == 1) {
    frob_[0] = 1 % mod_;
    return;
  }
  // Newton on h from the residue root x^p.
  const auto& F = field_->frobenius_matrix();
  std::vector<u64> seed(m_);
  for (unsigned i = 0; i < m_; ++i) seed[i] = F.at(i, 1);
  auto self = shared_from_this();
  UnramElem xi(self, seed);
  auto eval = [&](const UnramElem& x, bool derivative) {
    UnramElem acc = UnramElem::zero(self);
    for (unsigned i = m_ + 1; i-- > (derivative ? 1u : 0u);) {
      const u64 c = derivative ? h_[i] * i : h_[i];
      acc = acc * x + UnramElem::scalar(self, static_cast<i64>(c % mod_));
    }
    return acc;
  };
  for (unsigned prec = 1; prec < N_; prec *= 2) xi = xi - eval(xi, false) * eval(xi, true).inverse();
  require(eval(xi, false).is_zero(), ErrorCode::internal, "Frobenius lift did not converge");
  UnramElem pw = UnramElem::one(self);
  for (unsigned j = 0; j < m_; ++j) {
    for (unsigned i = 0; i < m_; ++i) frob_[static_cast<std::size_t>(j) * m_ + i] = pw.coeffs()[i];
    pw = pw * xi;
  }
}

UnramElem UnramLevel::frobenius_image() const {
  std::vector<u64> c(m_);
  if (m_ == 1) return UnramElem::generator(shared_from_this());
  for (unsigned i = 0; i < m_; ++i) c[i] = frob_[m_ + i];
  return UnramElem(shared_from_this(), std::move(c));
}

void UnramLevel::reduce_raw(const u64* t, u64* out) const {
  for (unsigned i = 0; i < m_; ++i) out[i] = t[i];
  for (unsigned k = 0; k + 1 < m_; ++k) {
    const u64 c = t[m_ + k];
    if (!c) continue;
    const auto& row = high_powers_[k];
    for (unsigned i = 0; i < m_; ++i) out[i] = addmod(out[i], mm(c, row[i], mod_), mod_);
  }
}

void UnramLevel::mul_raw(const u64* a, const u64* b, u64* out) const {
  if (m_ == 1) {
    out[0] = mm(a[0], b[0], mod_);
    return;
  }
  u64 t[2 * 27];
  std::fill(t, t + 2 * m_ - 1, 0);
  for (unsigned i = 0; i < m_; ++i) {
    if (!a[i]) continue;
    for (unsigned j = 0; j < m_; ++j) t[i + j] = addmod(t[i + j], mm(a[i], b[j], mod_), mod_);
  }
  reduce_raw(t, out);
}

void UnramLevel::frobenius_raw(const u64* a, u64* out) const {
  for (unsigned i = 0; i < m_; ++i) out[i] = 0;
  for (unsigned j = 0; j < m_; ++j) {
    if (!a[j]) continue;
    const u64* col = frob_.data() + static_cast<std::size_t>(j) * m_;
    for (unsigned i = 0; i < m_; ++i) out[i] = addmod(out[i], mm(a[j], col[i], mod_), mod_);
  }
}

UnramLevelPtr UnramLevel::at_precision(unsigned N) const { return build_unram(p_, s_, N); }

// ---------------------------------------------------------------- unramified elements

UnramElem::UnramElem(UnramLevelPtr level, std::vector<u64> coeffs) : level_(std::move(level)), c_(std::move(coeffs)) {
  require(level_ != nullptr, ErrorCode::invalid_argument, "null level");
  require(c_.size() == level_->degree(), ErrorCode::invalid_argument, "coefficient length must equal level degree");
  for (auto& x : c_) x %= level_->modulus_value();
}

UnramElem UnramElem::zero(const UnramLevelPtr& level) { return UnramElem(level, std::vector<u64>(level->degree(), 0)); }
UnramElem UnramElem::one(const UnramLevelPtr& level) { return scalar(level, 1); }

UnramElem UnramElem::scalar(const UnramLevelPtr& level, i64 c) {
  std::vector<u64> v(level->degree(), 0);
  v[0] = reduce_signed(c, level->modulus_value());
  return UnramElem(level, std::move(v));
}

UnramElem UnramElem::generator(const UnramLevelPtr& level) {
  if (level->degree() == 1) return scalar(level, -static_cast<i64>(level->modulus()[0]));
  std::vector<u64> v(level->degree(), 0);
  v[1] = 1;
  return UnramElem(level, std::move(v));
}

UnramElem UnramElem::lift(const UnramLevelPtr& level, const GFElem& residue) {
  require(*residue.field() == *level->residue_field(), ErrorCode::invalid_argument, "residue from another field");
  const auto& rc = residue.coeffs();
  return UnramElem(level, std::vector<u64>(rc.begin(), rc.end()));
}

void UnramElem::check(const UnramElem& o) const {
  require(level_ == o.level_, ErrorCode::precision_mismatch, "elements of different unramified levels");
}

UnramElem UnramElem::operator+(const UnramElem& o) const {
  check(o);
  std::vector<u64> r(c_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = addmod(c_[i], o.c_[i], level_->modulus_value());
  return UnramElem(level_, std::move(r));
}

UnramElem UnramElem::operator-(const UnramElem& o) const {
  check(o);
  std::vector<u64> r(c_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = submod(c_[i], o.c_[i], level_->modulus_value());
  return UnramElem(level_, std::move(r));
}

UnramElem UnramElem::operator-() const { return zero(level_) - *this; }

UnramElem UnramElem::operator*(const UnramElem& o) const {
  check(o);
  std::vector<u64> r(c_.size());
  level_->mul_raw(c_.data(), o.c_.data(), r.data());
  return UnramElem(level_, std::move(r));
}

UnramElem UnramElem::pow(u64 e) const {
  UnramElem acc = one(level_), base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

UnramElem UnramElem::inverse() const {
  GFElem r = residue();
  require(!r.is_zero(), ErrorCode::not_a_unit, "inverse of a non-unit in an unramified level");
  UnramElem b = lift(level_, r.inverse());
  const UnramElem two = scalar(level_, 2);
  for (unsigned prec = 1; prec < level_->precision(); prec *= 2) b = b * (two - *this * b);
  return b;
}

UnramElem UnramElem::frobenius(unsigned iterations) const {
  std::vector<u64> cur = c_, next(c_.size());
  for (unsigned k = 0; k < iterations % level_->degree(); ++k) {
    level_->frobenius_raw(cur.data(), next.data());
    std::swap(cur, next);
  }
  return UnramElem(level_, std::move(cur));
}

GFElem UnramElem::residue() const {
  std::vector<unsigned> r(c_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<unsigned>(c_[i] % level_->prime());
  return GFElem(level_->residue_field(), std::move(r));
}

unsigned UnramElem::valuation() const {
  return coeff_valuation(c_.data(), c_.size(), level_->prime(), level_->precision());
}

bool UnramElem::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](u64 x) { return x == 0; });
}

UnramElem UnramElem::truncated(unsigned N) const {
  require(N <= level_->precision(), ErrorCode::precision_mismatch, "cannot truncate to a higher precision");
  return UnramElem(level_->at_precision(N), c_);
}

UnramEmbedding::UnramEmbedding(UnramLevelPtr from, UnramLevelPtr to) : from_(std::move(from)), to_(std::move(to)) {
  require(from_->prime() == to_->prime() && from_->precision() == to_->precision() &&
              to_->degree() % from_->degree() == 0,
          ErrorCode::invalid_argument, "no embedding between these unramified levels");
  const unsigned m = from_->degree();
  if (m == 1) {
    powers_.push_back(UnramElem::one(to_));
    return;
  }
  GFEmbedding res(from_->residue_field(), to_->residue_field());
  UnramElem x = UnramElem::lift(to_, res.image_of_generator());
  const auto& h = from_->modulus();
  auto eval = [&](const UnramElem& y, bool derivative) {
    UnramElem acc = UnramElem::zero(to_);
    for (unsigned i = m + 1; i-- > (derivative ? 1u : 0u);)
      acc = acc * y + UnramElem::scalar(to_, static_cast<i64>(derivative ? h[i] * i : h[i]));
    return acc;
  };
  for (unsigned prec = 1; prec < to_->precision(); prec *= 2) x = x - eval(x, false) * eval(x, true).inverse();
  require(eval(x, false).is_zero(), ErrorCode::internal, "level embedding did not converge");
  UnramElem pw = UnramElem::one(to_);
  for (unsigned j = 0; j < m; ++j) {
    powers_.push_back(pw);
    pw = pw * x;
  }
}

UnramElem UnramEmbedding::operator()(const UnramElem& a) const {
  require(a.level() == from_, ErrorCode::invalid_argument, "element not in the embedding source");
  UnramElem acc = UnramElem::zero(to_);
  for (std::size_t j = 0; j < powers_.size(); ++j)
    if (a.coeffs()[j]) acc = acc + UnramElem::scalar(to_, static_cast<i64>(a.coeffs()[j])) * powers_[j];
  return acc;
}

namespace {

const UnramEmbedding& cached_embedding(const UnramLevelPtr& from, const UnramLevelPtr& to) {
  static std::mutex mu;
  static std::map<std::pair<const UnramLevel*, const UnramLevel*>, std::unique_ptr<UnramEmbedding>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{from.get(), to.get()}];
  if (!slot) slot = std::make_unique<UnramEmbedding>(from, to);
  return *slot;
}

}  // namespace

// ---------------------------------------------------------------- layers

RamLayerPtr trivial_layer(const UnramLevelPtr& base) {
  static std::mutex mu;
  static std::map<const UnramLevel*, RamLayerPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(base.get()); it != cache.end()) return it->second;
  std::shared_ptr<RamLayer> L(new RamLayer());
  L->base_ = base;
  L->e_ = 1;
  L->f_ = {-static_cast<i64>(base->prime()), 1};
  L->f_mod_ = {reduce_signed(L->f_[0], base->modulus_value()), 1};
  L->p_over_pi_e_ = 1;
  std::vector<u64> pi(base->degree(), 0);
  pi[0] = base->prime() % base->modulus_value();
  L->roots_ = {pi};
  L->root_powers_ = {{std::vector<u64>(base->degree(), 0)}};
  L->root_powers_[0][0][0] = 1 % base->modulus_value();
  L->root_precision_ = base->precision();
  L->different_ = 0;
  cache.emplace(base.get(), L);
  return L;
}

namespace {

struct LayerKey {
  unsigned p, s, N;
  std::vector<i64> f;
  bool galois;
  bool operator<(const LayerKey& o) const {
    return std::tie(p, s, N, f, galois) < std::tie(o.p, o.s, o.N, o.f, o.galois);
  }
};

// Roots of f inside a layer over Z_p, known modulo pi^depth.
std::vector<std::vector<u64>> search_roots(const RamLayerPtr& L, unsigned depth) {
  const unsigned e = L->ramification();
  const unsigned cap = L->valuation_cap();
  const u64 mod = L->modulus_value();
  const auto& f = L->eisenstein();
  std::vector<RamElem> pi_pow{RamElem::one(L)};
  for (unsigned k = 1; k <= depth; ++k) pi_pow.push_back(pi_pow.back() * L->uniformizer());
  auto constant = [&](i64 c) {
    std::vector<u64> v(L->dimension(), 0);
    v[0] = reduce_signed(c, mod);
    return RamElem(L, std::move(v));
  };
  // Does a root congruent to x modulo pi^k exist?
  auto viable = [&](const RamElem& x, unsigned k) {
    std::vector<RamElem> a;
    for (i64 c : f) a.push_back(constant(c));
    for (unsigned i = 0; i <= e; ++i)
      for (unsigned j = e; j-- > i;) a[j] = a[j] + x * a[j + 1];
    const unsigned v0 = a[0].valuation();
    if (v0 >= cap) return true;
    for (unsigned i = 1; i <= e; ++i) {
      const unsigned vi = a[i].valuation();
      if (vi < cap && vi + k * i <= v0) return true;
    }
    return false;
  };
  std::vector<RamElem> cands{RamElem::zero(L)};
  for (unsigned k = 1; k < depth; ++k) {
    std::vector<RamElem> next;
    for (const auto& x : cands)
      for (unsigned t = 0; t < L->prime(); ++t) {
        RamElem y = t ? x + pi_pow[k] * constant(t) : x;
        if (viable(y, k + 1)) next.push_back(y);
      }
    cands = std::move(next);
    if (cands.size() > e) fail(ErrorCode::non_galois, "root search produced more candidates than the degree");
    if (cands.empty()) break;
  }
  std::vector<std::vector<u64>> out;
  for (const auto& c : cands) out.push_back(c.flat());
  return out;
}

}  // namespace

RamLayerPtr eisenstein_layer(const UnramLevelPtr& base, const std::vector<i64>& f, bool galois) {
  const unsigned p = base->prime();
  require(f.size() >= 2 && f.back() == 1, ErrorCode::invalid_argument, "Eisenstein polynomial must be monic");
  for (std::size_t i = 0; i + 1 < f.size(); ++i)
    require(f[i] % static_cast<i64>(p) == 0, ErrorCode::invalid_argument, "lower coefficients must be divisible by p");
  require(f[0] % (static_cast<i64>(p) * p) != 0, ErrorCode::invalid_argument, "constant term must have valuation 1");
  if (f.size() == 2 && f[0] == -static_cast<i64>(p)) return trivial_layer(base);

  static std::mutex mu;
  static std::map<LayerKey, RamLayerPtr> cache;
  const LayerKey key{p, base->exponent(), base->precision(), f, galois};
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  std::shared_ptr<RamLayer> L(new RamLayer());
  L->base_ = base;
  L->e_ = static_cast<unsigned>(f.size() - 1);
  L->f_ = f;
  const u64 mod = base->modulus_value();
  for (i64 c : f) L->f_mod_.push_back(reduce_signed(c, mod));
  {
    const i64 a0 = f[0] / static_cast<i64>(p);
    const u64 a0r = reduce_signed(a0, p);
    L->p_over_pi_e_ = static_cast<unsigned>((p - invmod(a0r, p)) % p);
  }
  // Different exponent v(f'(pi)).
  {
    RamElem acc = RamElem::zero(L);
    const RamElem pi = L->uniformizer();
    for (unsigned i = L->e_; i >= 1; --i) {
      std::vector<u64> c(L->dimension(), 0);
      c[0] = reduce_signed(f[i] * static_cast<i64>(i), mod);
      acc = acc * pi + RamElem(L, std::move(c));
    }
    L->different_ = acc.valuation();
  }
  if (galois) {
    require(L->different_ + L->e_ < L->valuation_cap(), ErrorCode::precision_exhausted,
            "precision too low to separate the conjugate uniformizers");
    const unsigned depth = L->valuation_cap() - L->different_;
    std::vector<std::vector<u64>> roots;
    if (base->exponent() == 0) {
      roots = search_roots(L, depth);
    } else {
      const RamLayerPtr L0 = eisenstein_layer(build_unram(p, 0, base->precision()), f, true);
      if (L0->is_galois())
        for (const auto& r : L0->galois_roots()) roots.push_back(change_base(r, L).flat());
    }
    bool ok = roots.size() == L->e_;
    for (const auto& r : roots) {
      RamElem x(L, r), acc = RamElem::zero(L);
      for (unsigned i = L->e_ + 1; i-- > 0;) {
        std::vector<u64> c(L->dimension(), 0);
        c[0] = L->f_mod_[i];
        acc = acc * x + RamElem(L, std::move(c));
      }
      ok = ok && acc.is_zero();
    }
    if (ok) {
      // Identity first, then by flat coefficients.
      const auto pi = L->uniformizer().flat();
      std::sort(roots.begin(), roots.end(), [&](const auto& a, const auto& b) {
        if ((a == pi) != (b == pi)) return a == pi;
        return a < b;
      });
      require(roots.front() == pi, ErrorCode::internal, "uniformizer missing from its own conjugates");
      L->roots_ = roots;
      L->root_precision_ = depth;
      for (const auto& r : roots) {
        std::vector<std::vector<u64>> pw;
        RamElem x(L, r), cur = RamElem::one(L);
        for (unsigned k = 0; k < L->e_; ++k) {
          pw.push_back(cur.flat());
          cur = cur * x;
        }
        L->root_powers_.push_back(std::move(pw));
      }
    }
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, L).first->second;
}

std::vector<i64> cyclotomic_eisenstein(unsigned p, unsigned n) {
  // Minimal polynomial of the Gaussian period over mu_{p-1} in (Z/p^{n+1})^x,
  // shifted by p - 1 so the root is a uniformizer.
  if (p == 3 && n == 1) return {3, 9, 6, 1};
  if (p == 3 && n == 2) return {3, 81, 540, 1386, 1782, 1287, 546, 135, 18, 1};
  if (p == 5 && n == 1) return {505, 850, 525, 150, 20, 1};
  return {};
}

RamLayerPtr build_cyclotomic_layer(unsigned p, unsigned n, const UnramLevelPtr& base) {
  require(p % 2 == 1, ErrorCode::invalid_argument, "cyclotomic layers need an odd prime");
  require(n >= 1, ErrorCode::invalid_argument, "layer exponent must be at least 1");
  require(p == base->prime(), ErrorCode::invalid_argument, "base level has another prime");
  auto f = cyclotomic_eisenstein(p, n);
  require(!f.empty(), ErrorCode::desk_bound_exceeded,
          "no pinned cyclotomic layer for p=" + std::to_string(p) + ", n=" + std::to_string(n));
  auto L = eisenstein_layer(base, f, true);
  require(L->is_galois(), ErrorCode::non_galois, "cyclotomic layer failed its Galois verification");
  return L;
}

std::vector<RamElem> RamLayer::galois_roots() const {
  std::vector<RamElem> out;
  for (const auto& r : roots_) out.emplace_back(shared_from_this(), r);
  return out;
}

RamElem RamLayer::uniformizer() const {
  std::vector<u64> v(dimension(), 0);
  if (e_ == 1)
    v[0] = prime() % modulus_value();
  else
    v[degree()] = 1;
  return RamElem(shared_from_this(), std::move(v));
}

RamElem RamLayer::conjugate(const RamElem& x, std::size_t i) const {
  require(x.layer().get() == this, ErrorCode::invalid_argument, "element of another layer");
  require(i < roots_.size(), ErrorCode::non_galois, "conjugate index outside the stored Galois roots");
  const unsigned m = degree();
  const u64 mod = modulus_value();
  if (e_ == 1) return x;
  // Roots have Z_p coefficients, so each term is a scalar multiple of a base coefficient.
  std::vector<u64> out(dimension(), 0);
  const auto& c = x.flat();
  for (unsigned k = 0; k < e_; ++k) {
    const auto& rp = root_powers_[i][k];
    for (unsigned k2 = 0; k2 < e_; ++k2) {
      const u64 sc = rp[static_cast<std::size_t>(k2) * m];
      if (!sc) continue;
      for (unsigned t = 0; t < m; ++t) {
        const u64 a = c[static_cast<std::size_t>(k) * m + t];
        if (a) out[k2 * m + t] = addmod(out[k2 * m + t], mm(a, sc, mod), mod);
      }
    }
  }
  return RamElem(shared_from_this(), std::move(out));
}

RamLayerPtr RamLayer::over(const UnramLevelPtr& base) const {
  if (e_ == 1) return trivial_layer(base);
  return eisenstein_layer(base, f_, !roots_.empty());
}

void RamLayer::mul_raw(const u64* a, const u64* b, u64* out) const {
  const unsigned m = degree();
  if (e_ == 1) {
    base_->mul_raw(a, b, out);
    return;
  }
  const u64 mod = modulus_value();
  const std::size_t rows = 2 * e_ - 1, cols = 2 * m - 1;
  std::vector<u64> t(rows * cols, 0);
  for (unsigned k1 = 0; k1 < e_; ++k1)
    for (unsigned i = 0; i < m; ++i) {
      const u64 x = a[k1 * m + i];
      if (!x) continue;
      for (unsigned k2 = 0; k2 < e_; ++k2) {
        u64* row = t.data() + (k1 + k2) * cols + i;
        const u64* bb = b + k2 * m;
        for (unsigned j = 0; j < m; ++j)
          if (bb[j]) row[j] = addmod(row[j], mm(x, bb[j], mod), mod);
      }
    }
  // Reduce the theta-degree of each row, then the pi-degree against f.
  std::vector<u64> red(rows * m, 0);
  for (std::size_t r = 0; r < rows; ++r) base_->reduce_raw(t.data() + r * cols, red.data() + r * m);
  for (std::size_t r = rows; r-- > e_;) {
    const u64* c = red.data() + r * m;
    for (unsigned i = 0; i < e_; ++i) {
      const u64 fi = f_mod_[i];
      if (!fi) continue;
      u64* dst = red.data() + (r - e_ + i) * m;
      for (unsigned j = 0; j < m; ++j)
        if (c[j]) dst[j] = submod(dst[j], mm(fi, c[j], mod), mod);
    }
  }
  std::copy(red.begin(), red.begin() + dimension(), out);
}

// ---------------------------------------------------------------- ramified elements

RamElem::RamElem(RamLayerPtr layer, std::vector<u64> flat) : layer_(std::move(layer)), c_(std::move(flat)) {
  require(layer_ != nullptr, ErrorCode::invalid_argument, "null layer");
  require(c_.size() == layer_->dimension(), ErrorCode::invalid_argument, "coefficient length must equal e * m");
  for (auto& x : c_) x %= layer_->modulus_value();
}

RamElem RamElem::zero(const RamLayerPtr& layer) { return RamElem(layer, std::vector<u64>(layer->dimension(), 0)); }

RamElem RamElem::one(const RamLayerPtr& layer) {
  std::vector<u64> v(layer->dimension(), 0);
  v[0] = 1 % layer->modulus_value();
  return RamElem(layer, std::move(v));
}

RamElem RamElem::from_base(const RamLayerPtr& layer, const UnramElem& a) {
  require(a.level() == layer->base(), ErrorCode::invalid_argument, "element of another unramified level");
  std::vector<u64> v(layer->dimension(), 0);
  std::copy(a.coeffs().begin(), a.coeffs().end(), v.begin());
  return RamElem(layer, std::move(v));
}

RamElem RamElem::elementary(const RamLayerPtr& layer, unsigned i, const GFElem& residue) {
  return one(layer) + layer->uniformizer().pow(i) * from_base(layer, UnramElem::lift(layer->base(), residue));
}

UnramElem RamElem::coefficient(unsigned k) const {
  const unsigned m = layer_->degree();
  require(k < layer_->ramification(), ErrorCode::invalid_argument, "coefficient index beyond the ramification degree");
  return UnramElem(layer_->base(), std::vector<u64>(c_.begin() + k * m, c_.begin() + (k + 1) * m));
}

void RamElem::check(const RamElem& o) const {
  require(layer_ == o.layer_, ErrorCode::precision_mismatch, "elements of different layers");
}

RamElem RamElem::operator+(const RamElem& o) const {
  check(o);
  std::vector<u64> r(c_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = addmod(c_[i], o.c_[i], layer_->modulus_value());
  return RamElem(layer_, std::move(r));
}

RamElem RamElem::operator-(const RamElem& o) const {
  check(o);
  std::vector<u64> r(c_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = submod(c_[i], o.c_[i], layer_->modulus_value());
  return RamElem(layer_, std::move(r));
}

RamElem RamElem::operator-() const { return zero(layer_) - *this; }

RamElem RamElem::operator*(const RamElem& o) const {
  check(o);
  std::vector<u64> r(c_.size());
  layer_->mul_raw(c_.data(), o.c_.data(), r.data());
  return RamElem(layer_, std::move(r));
}

RamElem RamElem::pow(u64 e) const {
  RamElem acc = one(layer_), base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return acc;
}

RamElem RamElem::inverse() const {
  GFElem r = coefficient(0).residue();
  require(!r.is_zero(), ErrorCode::not_a_unit, "inverse of a non-unit in a ramified layer");
  RamElem b = from_base(layer_, UnramElem::lift(layer_->base(), r.inverse()));
  std::vector<u64> two(layer_->dimension(), 0);
  two[0] = 2 % layer_->modulus_value();
  const RamElem t(layer_, two);
  for (unsigned prec = 1; prec < layer_->valuation_cap(); prec *= 2) b = b * (t - *this * b);
  return b;
}

RamElem RamElem::frobenius(unsigned iterations) const {
  const unsigned m = layer_->degree();
  std::vector<u64> cur = c_, next(c_.size());
  for (unsigned it = 0; it < iterations % m; ++it) {
    for (unsigned k = 0; k < layer_->ramification(); ++k)
      layer_->base()->frobenius_raw(cur.data() + k * m, next.data() + k * m);
    std::swap(cur, next);
  }
  return RamElem(layer_, std::move(cur));
}

unsigned RamElem::valuation() const {
  const unsigned e = layer_->ramification(), m = layer_->degree();
  unsigned v = layer_->valuation_cap();
  for (unsigned k = 0; k < e; ++k) {
    const unsigned vk = coeff_valuation(c_.data() + k * m, m, layer_->prime(), layer_->precision());
    if (vk < layer_->precision()) v = std::min(v, e * vk + k);
  }
  return v;
}

GFElem RamElem::residue_at(unsigned i) const {
  require(valuation() >= i, ErrorCode::invalid_argument, "element is not in m^i");
  const unsigned e = layer_->ramification(), m = layer_->degree(), p = layer_->prime();
  const unsigned k0 = i % e, j = i / e;
  const GFFieldPtr& F = layer_->base()->residue_field();
  if (j >= layer_->precision()) return GFElem::zero(F);
  const u64 pj = checked_pow(p, j);
  unsigned scale = 1;
  for (unsigned t = 0; t < j; ++t) scale = scale * layer_->p_over_pi_e() % p;
  std::vector<unsigned> r(m);
  for (unsigned t = 0; t < m; ++t) r[t] = static_cast<unsigned>((c_[k0 * m + t] / pj) % p * scale % p);
  return GFElem(F, std::move(r));
}

RamElem RamElem::substitute(const RamElem& r) const {
  check(r);
  const unsigned e = layer_->ramification();
  RamElem acc = from_base(layer_, coefficient(e - 1));
  for (unsigned k = e - 1; k-- > 0;) acc = acc * r + from_base(layer_, coefficient(k));
  return acc;
}

RamElem change_base(const RamElem& x, const RamLayerPtr& target) {
  const RamLayerPtr& src = x.layer();
  require(src->eisenstein() == target->eisenstein(), ErrorCode::invalid_argument, "base change needs the same polynomial");
  const UnramEmbedding& emb = cached_embedding(src->base(), target->base());
  std::vector<u64> out;
  out.reserve(target->dimension());
  for (unsigned k = 0; k < src->ramification(); ++k) {
    UnramElem c = emb(x.coefficient(k));
    out.insert(out.end(), c.coeffs().begin(), c.coeffs().end());
  }
  return RamElem(target, std::move(out));
}

UnramElem norm(const RamElem& x) {
  const RamLayerPtr& L = x.layer();
  require(L->is_galois(), ErrorCode::non_galois, "norm needs the full set of Galois conjugates");
  if (L->is_trivial()) return x.coefficient(0);
  RamElem acc = x;
  for (std::size_t i = 1; i < L->ramification(); ++i) acc = acc * L->conjugate(x, i);
  const unsigned Nout = L->norm_precision();
  const u64 modout = checked_pow(L->prime(), Nout);
  const auto& c = acc.flat();
  for (std::size_t i = L->degree(); i < c.size(); ++i)
    require(c[i] % modout == 0, ErrorCode::precision_exhausted, "norm failed to descend to the base");
  std::vector<u64> base(c.begin(), c.begin() + L->degree());
  return UnramElem(L->base()->at_precision(Nout), std::move(base));
}

// ---------------------------------------------------------------- filtration

PrincipalUnit::PrincipalUnit(RamElem value) : value_(std::move(value)), level_(0) {
  level_ = (value_ - RamElem::one(value_.layer())).valuation();
  require(level_ >= 1, ErrorCode::invalid_argument, "not a principal unit");
}

PrincipalUnit PrincipalUnit::from_unram(const UnramElem& value) {
  return PrincipalUnit(RamElem::from_base(trivial_layer(value.level()), value));
}

FiltrationDigits filtration_decompose(const PrincipalUnit& u, unsigned depth) {
  const RamLayerPtr& L = u.value().layer();
  require(depth >= 1 && depth <= L->valuation_cap(), ErrorCode::precision_exhausted, "depth exceeds the working precision");
  FiltrationDigits out{{}, u.value()};
  const RamElem one = RamElem::one(L);
  for (unsigned i = 1; i < depth; ++i) {
    GFElem c = (out.remainder - one).residue_at(i);
    out.components.push_back(c);
    if (!c.is_zero()) out.remainder = out.remainder * RamElem::elementary(L, i, c).inverse();
  }
  require((out.remainder - one).valuation() >= depth, ErrorCode::internal, "filtration remainder left U^(M)");
  return out;
}

RamElem filtration_recompose(const RamLayerPtr& layer, const std::vector<GFElem>& components) {
  RamElem acc = RamElem::one(layer);
  for (std::size_t i = 0; i < components.size(); ++i)
    if (!components[i].is_zero()) acc = acc * RamElem::elementary(layer, static_cast<unsigned>(i + 1), components[i]);
  return acc;
}

}  // namespace twistnorm
