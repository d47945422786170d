#include "twistnorm/gf.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace twistnorm {

namespace {

using Poly = std::vector<unsigned>;  // low to high over F_p

unsigned inv_p(unsigned a, unsigned p) {
  require(a % p != 0, ErrorCode::not_a_unit, "inverse of zero in F_p");
  unsigned r = 1;
  for (unsigned e = p - 2, b = a % p; e; e >>= 1, b = b * b % p)
    if (e & 1) r = r * b % p;
  return r;
}

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mod(Poly a, const Poly& f, unsigned p) {
  trim(a);
  Poly g = f;
  trim(g);
  const unsigned lead_inv = inv_p(g.back(), p);
  while (a.size() >= g.size()) {
    const unsigned c = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - g.size();
    for (std::size_t i = 0; i < g.size(); ++i) a[shift + i] = (a[shift + i] + p - c * g[i] % p) % p;
    trim(a);
  }
  return a;
}

Poly poly_mul(const Poly& a, const Poly& b, unsigned p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  return r;
}

Poly poly_gcd(Poly a, Poly b, unsigned p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& f, unsigned p) {
  Poly acc{1};
  base = poly_mod(base, f, p);
  while (e) {
    if (e & 1) acc = poly_mod(poly_mul(acc, base, p), f, p);
    base = poly_mod(poly_mul(base, base, p), f, p);
    e >>= 1;
  }
  return acc;
}

bool is_irreducible(const Poly& f, unsigned p) {
  const unsigned m = static_cast<unsigned>(f.size() - 1);
  Poly xpow{0, 1};
  for (unsigned i = 1; i <= m / 2; ++i) {
    xpow = poly_powmod(xpow, p, f, p);
    Poly t = xpow;
    t.resize(std::max<std::size_t>(t.size(), 2), 0);
    t[1] = (t[1] + p - 1) % p;
    trim(t);
    Poly g = poly_gcd(f, t, p);
    if (g.size() > 1) return false;
  }
  return true;
}

// Reduce rows (each a vector of length n) to reduced echelon form, choosing
// pivots from the most significant coordinate (n-1) downwards. Returns the
// pivot coordinate of each surviving row.
std::vector<std::size_t> rref_high_first(std::vector<std::vector<unsigned>>& rows, std::size_t n, unsigned p) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t cc = n; cc-- > 0;) {
    std::size_t sel = rows.size();
    for (std::size_t i = r; i < rows.size(); ++i)
      if (rows[i][cc] != 0) {
        sel = i;
        break;
      }
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    const unsigned s = inv_p(rows[r][cc], p);
    for (auto& x : rows[r]) x = x * s % p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][cc] == 0) continue;
      const unsigned q = rows[i][cc];
      for (std::size_t j = 0; j < n; ++j) rows[i][j] = (rows[i][j] + p - q * rows[r][j] % p) % p;
    }
    pivots.push_back(cc);
    ++r;
  }
  rows.resize(r);
  return pivots;
}

}  // namespace

// ---------------------------------------------------------------- FpMatrix

FpMatrix::FpMatrix(unsigned p, std::size_t rows, std::size_t cols)
    : p_(p), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

FpMatrix FpMatrix::identity(unsigned p, std::size_t n) {
  FpMatrix m(p, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1 % p;
  return m;
}

FpMatrix FpMatrix::from_ints(unsigned p, const std::vector<std::vector<long>>& rows) {
  FpMatrix m(p, rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < m.rows_; ++i)
    for (std::size_t j = 0; j < m.cols_; ++j) {
      long v = rows[i][j] % static_cast<long>(p);
      m.at(i, j) = static_cast<unsigned>(v < 0 ? v + p : v);
    }
  return m;
}

FpMatrix FpMatrix::operator*(const FpMatrix& o) const {
  require(cols_ == o.rows_ && p_ == o.p_, ErrorCode::invalid_argument, "F_p matrix shape mismatch");
  FpMatrix r(p_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const unsigned a = at(i, k);
      if (!a) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, j) = (r.at(i, j) + a * o.at(k, j)) % p_;
    }
  return r;
}

FpMatrix FpMatrix::operator+(const FpMatrix& o) const {
  FpMatrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = (data_[i] + o.data_[i]) % p_;
  return r;
}

FpMatrix FpMatrix::operator-(const FpMatrix& o) const {
  FpMatrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = (data_[i] + p_ - o.data_[i]) % p_;
  return r;
}

std::vector<unsigned> FpMatrix::apply(const std::vector<unsigned>& v) const {
  std::vector<unsigned> r(rows_, 0);
  for (std::size_t i = 0; i < rows_; ++i) {
    unsigned s = 0;
    for (std::size_t j = 0; j < cols_; ++j) s = (s + at(i, j) * v[j]) % p_;
    r[i] = s;
  }
  return r;
}

FpMatrix FpMatrix::pow(std::uint64_t e) const {
  FpMatrix acc = identity(p_, rows_), base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

std::size_t FpMatrix::rank() const {
  std::vector<std::vector<unsigned>> rows(rows_);
  for (std::size_t i = 0; i < rows_; ++i) rows[i].assign(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  return rref_high_first(rows, cols_, p_).size();
}

FpMatrix FpMatrix::inverse() const {
  require(rows_ == cols_, ErrorCode::invalid_argument, "inverse of non-square matrix");
  const std::size_t n = rows_;
  std::vector<std::vector<unsigned>> aug(n, std::vector<unsigned>(2 * n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = at(i, j);
    aug[i][n + i] = 1 % p_;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t sel = n;
    for (std::size_t r = c; r < n; ++r)
      if (aug[r][c]) {
        sel = r;
        break;
      }
    require(sel < n, ErrorCode::not_a_unit, "singular matrix over F_p");
    std::swap(aug[c], aug[sel]);
    const unsigned s = inv_p(aug[c][c], p_);
    for (auto& x : aug[c]) x = x * s % p_;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || !aug[r][c]) continue;
      const unsigned q = aug[r][c];
      for (std::size_t j = 0; j < 2 * n; ++j) aug[r][j] = (aug[r][j] + p_ - q * aug[c][j] % p_) % p_;
    }
  }
  FpMatrix inv(p_, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv.at(i, j) = aug[i][n + j];
  return inv;
}

FpMatrix FpMatrix::kernel() const {
  // Row reduce in natural column order and read off one vector per free column.
  std::vector<std::vector<unsigned>> rows(rows_);
  for (std::size_t i = 0; i < rows_; ++i) rows[i].assign(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols_ && r < rows.size(); ++c) {
    std::size_t sel = rows.size();
    for (std::size_t i = r; i < rows.size(); ++i)
      if (rows[i][c]) {
        sel = i;
        break;
      }
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    const unsigned s = inv_p(rows[r][c], p_);
    for (auto& x : rows[r]) x = x * s % p_;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || !rows[i][c]) continue;
      const unsigned q = rows[i][c];
      for (std::size_t j = 0; j < cols_; ++j) rows[i][j] = (rows[i][j] + p_ - q * rows[r][j] % p_) % p_;
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols_, false);
  for (auto c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<unsigned>> basis;
  for (std::size_t f = 0; f < cols_; ++f) {
    if (is_pivot[f]) continue;
    std::vector<unsigned> v(cols_, 0);
    v[f] = 1 % p_;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = (p_ - rows[i][f]) % p_;
    basis.push_back(std::move(v));
  }
  FpMatrix k(p_, cols_, basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (std::size_t i = 0; i < cols_; ++i) k.at(i, j) = basis[j][i];
  return k;
}

FpMatrix FpMatrix::column_space() const {
  std::vector<std::size_t> chosen;
  std::vector<std::vector<unsigned>> acc;
  for (std::size_t j = 0; j < cols_; ++j) {
    std::vector<std::vector<unsigned>> trial = acc;
    std::vector<unsigned> col(rows_);
    for (std::size_t i = 0; i < rows_; ++i) col[i] = at(i, j);
    trial.push_back(col);
    if (rref_high_first(trial, rows_, p_).size() > acc.size()) {
      acc.push_back(col);
      chosen.push_back(j);
    }
  }
  FpMatrix b(p_, rows_, chosen.size());
  for (std::size_t k = 0; k < chosen.size(); ++k)
    for (std::size_t i = 0; i < rows_; ++i) b.at(i, k) = at(i, chosen[k]);
  return b;
}

std::optional<std::vector<unsigned>> FpMatrix::solve_lexmin(const std::vector<unsigned>& b) const {
  require(b.size() == rows_, ErrorCode::invalid_argument, "right-hand side length mismatch");
  // Gauss-Jordan on the augmented matrix for a particular solution.
  std::vector<std::vector<unsigned>> rows(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    rows[i].assign(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
    rows[i].push_back(b[i] % p_);
  }
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols_ && r < rows.size(); ++c) {
    std::size_t sel = rows.size();
    for (std::size_t i = r; i < rows.size(); ++i)
      if (rows[i][c]) {
        sel = i;
        break;
      }
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    const unsigned s = inv_p(rows[r][c], p_);
    for (auto& x : rows[r]) x = x * s % p_;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || !rows[i][c]) continue;
      const unsigned q = rows[i][c];
      for (std::size_t j = 0; j <= cols_; ++j) rows[i][j] = (rows[i][j] + p_ - q * rows[r][j] % p_) % p_;
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows.size(); ++i)
    if (rows[i][cols_]) return std::nullopt;
  std::vector<unsigned> x(cols_, 0);
  for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = rows[i][cols_];
  return lexmin_in_coset(std::move(x));
}

std::vector<unsigned> FpMatrix::lexmin_in_coset(std::vector<unsigned> x) const {
  require(x.size() == cols_, ErrorCode::invalid_argument, "vector length mismatch");
  // Clear x at the leading coordinates of an echelon kernel basis.
  FpMatrix k = kernel();
  std::vector<std::vector<unsigned>> kb(k.cols(), std::vector<unsigned>(cols_));
  for (std::size_t j = 0; j < k.cols(); ++j)
    for (std::size_t i = 0; i < cols_; ++i) kb[j][i] = k.at(i, j);
  auto lead = rref_high_first(kb, cols_, p_);
  for (std::size_t t = 0; t < kb.size(); ++t) {
    const unsigned q = x[lead[t]];
    if (!q) continue;
    for (std::size_t i = 0; i < cols_; ++i) x[i] = (x[i] + p_ - q * kb[t][i] % p_) % p_;
  }
  return x;
}

// ---------------------------------------------------------------- fields

GFField::GFField(unsigned p, std::vector<unsigned> modulus)
    : p_(p), m_(0), size_(1), modulus_(std::move(modulus)), frob_(p, 0, 0) {
  require(p >= 2, ErrorCode::invalid_argument, "characteristic must be prime");
  for (auto& c : modulus_) c %= p;
  trim(modulus_);
  require(modulus_.size() >= 2 && modulus_.back() == 1, ErrorCode::invalid_argument, "modulus must be monic of degree >= 1");
  m_ = static_cast<unsigned>(modulus_.size() - 1);
  require(is_irreducible(modulus_, p), ErrorCode::invalid_argument, "modulus is reducible over F_p");
  for (unsigned i = 0; i < m_; ++i) {
    require(size_ <= (std::uint64_t{1} << 58) / p, ErrorCode::desk_bound_exceeded, "field too large");
    size_ *= p;
  }
  frob_ = FpMatrix(p, m_, m_);
  for (unsigned j = 0; j < m_; ++j) {
    Poly xj(j + 1, 0);
    xj[j] = 1;
    Poly img = poly_powmod(xj, p, modulus_, p);
    for (std::size_t i = 0; i < img.size(); ++i) frob_.at(i, j) = img[i];
  }
}

std::optional<std::vector<unsigned>> conway_modulus(unsigned p, unsigned m) {
  static const std::map<std::pair<unsigned, unsigned>, std::vector<unsigned>> table = {
      {{2, 1}, {1, 1}},
      {{2, 2}, {1, 1, 1}},
      {{2, 4}, {1, 1, 0, 0, 1}},
      {{2, 8}, {1, 0, 1, 1, 1, 0, 0, 0, 1}},
      {{3, 1}, {1, 1}},
      {{3, 3}, {1, 2, 0, 1}},
      {{3, 9}, {1, 1, 2, 2, 0, 0, 0, 0, 0, 1}},
      {{5, 1}, {3, 1}},
      {{5, 5}, {3, 4, 0, 0, 0, 1}},
      {{7, 1}, {4, 1}},
  };
  auto it = table.find({p, m});
  if (it == table.end()) return std::nullopt;
  return it->second;
}

GFFieldPtr make_field(unsigned p, unsigned m) {
  static std::mutex mu;
  static std::map<std::pair<unsigned, unsigned>, GFFieldPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, m);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto mod = conway_modulus(p, m);
  require(mod.has_value(), ErrorCode::desk_bound_exceeded,
          "no shipped modulus for F_" + std::to_string(p) + "^" + std::to_string(m));
  auto f = std::make_shared<const GFField>(p, *mod);
  cache.emplace(key, f);
  return f;
}

GFFieldPtr tower_field(unsigned p, unsigned s) {
  unsigned m = 1;
  for (unsigned i = 0; i < s; ++i) m *= p;
  return make_field(p, m);
}

// ---------------------------------------------------------------- elements

GFElem::GFElem(GFFieldPtr field, std::vector<unsigned> coeffs) : field_(std::move(field)), c_(std::move(coeffs)) {
  require(field_ != nullptr, ErrorCode::invalid_argument, "null field");
  require(c_.size() == field_->degree(), ErrorCode::invalid_argument, "coefficient length must equal field degree");
  for (auto& x : c_) x %= field_->prime();
}

GFElem GFElem::zero(GFFieldPtr field) {
  const unsigned m = field->degree();
  return GFElem(std::move(field), std::vector<unsigned>(m, 0));
}

GFElem GFElem::one(GFFieldPtr field) { return scalar(std::move(field), 1); }

GFElem GFElem::scalar(GFFieldPtr field, long c) {
  std::vector<unsigned> v(field->degree(), 0);
  const long p = field->prime();
  v[0] = static_cast<unsigned>(((c % p) + p) % p);
  return GFElem(std::move(field), std::move(v));
}

GFElem GFElem::generator(GFFieldPtr field) {
  std::vector<unsigned> v(field->degree(), 0);
  if (field->degree() == 1) {
    // theta = -modulus[0]
    v[0] = (field->prime() - field->modulus()[0]) % field->prime();
  } else {
    v[1] = 1;
  }
  return GFElem(std::move(field), std::move(v));
}

GFElem GFElem::from_index(GFFieldPtr field, std::uint64_t idx) {
  std::vector<unsigned> v(field->degree(), 0);
  for (auto& x : v) {
    x = static_cast<unsigned>(idx % field->prime());
    idx /= field->prime();
  }
  return GFElem(std::move(field), std::move(v));
}

std::uint64_t GFElem::index() const {
  std::uint64_t idx = 0;
  for (std::size_t i = c_.size(); i-- > 0;) idx = idx * field_->prime() + c_[i];
  return idx;
}

bool GFElem::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](unsigned x) { return x == 0; });
}

bool GFElem::in_prime_field() const {
  return std::all_of(c_.begin() + 1, c_.end(), [](unsigned x) { return x == 0; });
}

void GFElem::check(const GFElem& o) const {
  require(field_ == o.field_ || *field_ == *o.field_, ErrorCode::precision_mismatch, "elements of different fields");
}

GFElem GFElem::operator+(const GFElem& o) const {
  check(o);
  std::vector<unsigned> r(c_.size());
  const unsigned p = prime();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (c_[i] + o.c_[i]) % p;
  return GFElem(field_, std::move(r));
}

GFElem GFElem::operator-(const GFElem& o) const {
  check(o);
  std::vector<unsigned> r(c_.size());
  const unsigned p = prime();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (c_[i] + p - o.c_[i]) % p;
  return GFElem(field_, std::move(r));
}

GFElem GFElem::operator-() const { return GFElem::zero(field_) - *this; }

GFElem GFElem::scaled(unsigned c) const {
  std::vector<unsigned> r(c_.size());
  const unsigned p = prime();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = c_[i] * (c % p) % p;
  return GFElem(field_, std::move(r));
}

GFElem GFElem::operator*(const GFElem& o) const {
  check(o);
  const unsigned p = prime();
  const unsigned m = field_->degree();
  if (m == 1) return GFElem(field_, {c_[0] * o.c_[0] % p});
  std::vector<unsigned> prod(2 * m - 1, 0);
  for (unsigned i = 0; i < m; ++i) {
    if (!c_[i]) continue;
    for (unsigned j = 0; j < m; ++j) prod[i + j] += c_[i] * o.c_[j];
  }
  for (auto& x : prod) x %= p;
  const auto& f = field_->modulus();
  for (unsigned k = 2 * m - 2; k >= m; --k) {
    const unsigned c = prod[k];
    if (!c) continue;
    prod[k] = 0;
    for (unsigned i = 0; i < m; ++i) prod[k - m + i] = (prod[k - m + i] + p - c * f[i] % p) % p;
  }
  prod.resize(m);
  return GFElem(field_, std::move(prod));
}

GFElem GFElem::pow(std::uint64_t e) const {
  GFElem acc = one(field_), base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

GFElem GFElem::inverse() const {
  require(!is_zero(), ErrorCode::not_a_unit, "inverse of zero in a finite field");
  return pow(field_->size() - 2);
}

unsigned GFElem::trace() const {
  GFElem acc = zero(field_), cur = *this;
  for (unsigned i = 0; i < field_->degree(); ++i) {
    acc = acc + cur;
    cur = gf_frobenius(cur, 1);
  }
  return acc.c_[0];
}

std::string GFElem::str() const {
  std::ostringstream os;
  bool any = false;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (!c_[i]) continue;
    if (any) os << " + ";
    any = true;
    if (i == 0) {
      os << c_[i];
    } else {
      if (c_[i] != 1) os << c_[i];
      os << "t";
      if (i > 1) os << "^" << i;
    }
  }
  if (!any) os << "0";
  return os.str();
}

GFElem gf_frobenius(const GFElem& a, unsigned iterations) {
  const auto& F = a.field()->frobenius_matrix();
  std::vector<unsigned> v = a.coeffs();
  const unsigned steps = iterations % a.field()->degree();
  for (unsigned i = 0; i < steps; ++i) v = F.apply(v);
  return GFElem(a.field(), std::move(v));
}

std::vector<GFElem> gf_enumerate(const GFFieldPtr& field) {
  require(field->size() <= kDeskFieldBound, ErrorCode::desk_bound_exceeded, "field exceeds the desk bound");
  std::vector<GFElem> out;
  out.reserve(field->size());
  for (std::uint64_t i = 0; i < field->size(); ++i) out.push_back(GFElem::from_index(field, i));
  return out;
}

void gf_for_each(const GFFieldPtr& field, const std::function<void(const GFElem&)>& fn) {
  require(field->size() <= kDeskFieldBound, ErrorCode::desk_bound_exceeded, "field exceeds the desk bound");
  for (std::uint64_t i = 0; i < field->size(); ++i) fn(GFElem::from_index(field, i));
}

// ---------------------------------------------------------------- embeddings

namespace {

GFElem eval_poly(const std::vector<unsigned>& f, const GFElem& x) {
  GFElem acc = GFElem::zero(x.field());
  for (std::size_t i = f.size(); i-- > 0;) acc = acc * x + GFElem::scalar(x.field(), f[i]);
  return acc;
}

}  // namespace

GFEmbedding::GFEmbedding(GFFieldPtr from, GFFieldPtr to)
    : from_(std::move(from)), to_(std::move(to)), image_(GFElem::zero(to_)) {
  require(from_->prime() == to_->prime() && to_->degree() % from_->degree() == 0, ErrorCode::invalid_argument,
          "no embedding between these fields");
  if (from_->degree() == 1) {
    image_ = GFElem::scalar(to_, GFElem::generator(from_).coeffs()[0]);
    return;
  }
  GFElem cand = GFElem::generator(to_).pow((to_->size() - 1) / (from_->size() - 1));
  if (eval_poly(from_->modulus(), cand).is_zero()) {
    image_ = cand;
    return;
  }
  // Moduli that are not Conway-compatible: fall back to the least root.
  for (std::uint64_t i = 0; i < to_->size(); ++i) {
    GFElem x = GFElem::from_index(to_, i);
    if (eval_poly(from_->modulus(), x).is_zero()) {
      image_ = x;
      return;
    }
  }
  fail(ErrorCode::internal, "modulus has no root in the target field");
}

GFElem GFEmbedding::operator()(const GFElem& a) const {
  require(*a.field() == *from_, ErrorCode::invalid_argument, "element not in the embedding source");
  GFElem acc = GFElem::zero(to_), pw = GFElem::one(to_);
  for (unsigned c : a.coeffs()) {
    if (c) acc = acc + pw.scaled(c);
    pw = pw * image_;
  }
  return acc;
}

// ---------------------------------------------------------------- twisted Frobenius

GFVector apply_twisted_frobenius(const GFVector& beta, const FpMatrix& u_bar) {
  const std::size_t d = beta.size();
  require(u_bar.rows() == d && u_bar.cols() == d, ErrorCode::invalid_argument, "twist matrix dimension mismatch");
  GFVector out;
  out.reserve(d);
  for (std::size_t a = 0; a < d; ++a) {
    GFElem acc = gf_frobenius(beta[a], 1);
    for (std::size_t b = 0; b < d; ++b)
      if (u_bar.at(a, b)) acc = acc - beta[b].scaled(u_bar.at(a, b));
    out.push_back(std::move(acc));
  }
  return out;
}

std::vector<unsigned> flatten(const GFVector& v) {
  std::vector<unsigned> flat;
  for (const auto& x : v) flat.insert(flat.end(), x.coeffs().begin(), x.coeffs().end());
  return flat;
}

GFVector unflatten(const GFFieldPtr& field, const std::vector<unsigned>& flat, std::size_t d) {
  const unsigned m = field->degree();
  GFVector v;
  for (std::size_t a = 0; a < d; ++a)
    v.emplace_back(field, std::vector<unsigned>(flat.begin() + a * m, flat.begin() + (a + 1) * m));
  return v;
}

FpMatrix twisted_frobenius_matrix(const GFFieldPtr& field, const FpMatrix& u_bar) {
  const std::size_t n = static_cast<std::size_t>(field->degree()) * u_bar.rows();
  FpMatrix A(field->prime(), n, n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<unsigned> e(n, 0);
    e[k] = 1;
    auto img = flatten(apply_twisted_frobenius(unflatten(field, e, u_bar.rows()), u_bar));
    for (std::size_t i = 0; i < n; ++i) A.at(i, k) = img[i];
  }
  return A;
}

BruteSolveResult gf_brute_twist_solve(const GFVector& alpha, const FpMatrix& u_bar) {
  require(!alpha.empty(), ErrorCode::invalid_argument, "empty right-hand side");
  const GFFieldPtr field = alpha.front().field();
  require(field->size() <= kDeskFieldBound, ErrorCode::desk_bound_exceeded, "field exceeds the desk bound");
  const std::size_t d = alpha.size();
  BruteSolveResult res;
  std::uint64_t total = 1;
  bool small = true;
  for (std::size_t a = 0; a < d; ++a) {
    if (total > kDeskFieldBound / field->size()) {
      small = false;
      break;
    }
    total *= field->size();
  }
  if (small) {
    res.exhaustive = true;
    // Enumerate beta by flat index, component d-1 most significant, evaluating
    // phi(beta_a) - sum_b u_ab beta_b on raw coefficients.
    const unsigned p = field->prime();
    const std::size_t m = field->degree();
    const FpMatrix& F = field->frobenius_matrix();
    const std::vector<unsigned> target = flatten(alpha);
    std::vector<unsigned> beta(d * m, 0), image(d * m);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      if (idx) {
        for (std::size_t i = 0; i < beta.size(); ++i) {  // increment in base p
          if (++beta[i] < p) break;
          beta[i] = 0;
        }
      }
      ++res.candidates_checked;
      bool hit = true;
      for (std::size_t a = 0; a < d && hit; ++a)
        for (std::size_t r = 0; r < m; ++r) {
          unsigned long acc = 0;
          for (std::size_t c = 0; c < m; ++c) acc += F.at(r, c) * beta[a * m + c];
          for (std::size_t b = 0; b < d; ++b) acc += (p - u_bar.at(a, b) % p) * beta[b * m + r];
          if (acc % p != target[a * m + r]) {
            hit = false;
            break;
          }
        }
      if (hit) {
        res.solvable = true;
        res.beta = unflatten(field, beta, d);
        return res;
      }
    }
    return res;
  }
  auto sol = twisted_frobenius_matrix(field, u_bar).solve_lexmin(flatten(alpha));
  if (sol) {
    res.solvable = true;
    res.beta = unflatten(field, *sol, d);
  }
  return res;
}

}  // namespace twistnorm
