#include "twistnorm/padic.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace twistnorm {

u64 checked_pow(u64 p, unsigned k) {
  u64 r = 1;
  for (unsigned i = 0; i < k; ++i) {
    require(r <= (u64{1} << 62) / p, ErrorCode::invalid_argument,
            "p^N exceeds the 62-bit residue range");
    r *= p;
  }
  require(r < (u64{1} << 62), ErrorCode::invalid_argument, "p^N exceeds the 62-bit residue range");
  return r;
}

unsigned max_precision(unsigned p) {
  unsigned n = 0;
  u128 r = 1;
  while (r * p < (u128{1} << 62)) {
    r *= p;
    ++n;
  }
  return n;
}

u64 invmod(u64 a, u64 m) {
  // Extended Euclid on signed 128-bit intermediates.
  __int128 t = 0, nt = 1;
  __int128 r = m, nr = a % m;
  while (nr != 0) {
    __int128 q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  require(r == 1, ErrorCode::not_a_unit, "element is not invertible");
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

unsigned valuation_of(u64 r, unsigned p, unsigned N) {
  if (r == 0) return N;
  unsigned v = 0;
  while (r % p == 0) {
    r /= p;
    ++v;
  }
  return std::min(v, N);
}

// ---------------------------------------------------------------- Zp

Zp::Zp(unsigned p, unsigned N, i64 value) : p_(p), N_(N) {
  require(p >= 2, ErrorCode::invalid_argument, "prime must be >= 2");
  require(N >= 1, ErrorCode::invalid_argument, "precision must be >= 1");
  mod_ = checked_pow(p, N);
  r_ = reduce_signed(value, mod_);
}

Zp Zp::from_residue(unsigned p, unsigned N, u64 residue) {
  Zp z(p, N, 0);
  z.r_ = residue % z.mod_;
  return z;
}

i64 Zp::centered() const {
  return r_ > mod_ / 2 ? static_cast<i64>(r_) - static_cast<i64>(mod_) : static_cast<i64>(r_);
}

void Zp::check_compatible(const Zp& o) const {
  if (p_ != o.p_ || N_ != o.N_) {
    std::ostringstream os;
    os << "operands over Z/" << p_ << "^" << N_ << " and Z/" << o.p_ << "^" << o.N_;
    fail(ErrorCode::precision_mismatch, os.str());
  }
}

Zp Zp::operator+(const Zp& o) const {
  check_compatible(o);
  return Zp(p_, N_, mod_, addmod(r_, o.r_, mod_));
}

Zp Zp::operator-(const Zp& o) const {
  check_compatible(o);
  return Zp(p_, N_, mod_, submod(r_, o.r_, mod_));
}

Zp Zp::operator*(const Zp& o) const {
  check_compatible(o);
  return Zp(p_, N_, mod_, mulmod(r_, o.r_, mod_));
}

Zp Zp::operator-() const { return Zp(p_, N_, mod_, r_ == 0 ? 0 : mod_ - r_); }

Zp Zp::inverse() const {
  require(is_unit(), ErrorCode::not_a_unit, "inverse of a non-unit " + str());
  return Zp(p_, N_, mod_, invmod(r_, mod_));
}

Zp Zp::pow(u64 e) const {
  u64 base = r_, acc = 1 % mod_;
  while (e) {
    if (e & 1) acc = mulmod(acc, base, mod_);
    base = mulmod(base, base, mod_);
    e >>= 1;
  }
  return Zp(p_, N_, mod_, acc);
}

Zp Zp::truncated(unsigned N) const {
  require(N >= 1 && N <= N_, ErrorCode::precision_mismatch, "truncation must lower precision");
  return from_residue(p_, N, r_);
}

Zp Zp::extended(unsigned N) const {
  require(N >= N_, ErrorCode::precision_mismatch, "extension must raise precision");
  return from_residue(p_, N, r_);
}

std::string Zp::str() const {
  std::ostringstream os;
  os << r_ << " (mod " << p_ << "^" << N_ << ")";
  return os.str();
}

// ---------------------------------------------------------------- ZpPoly

ZpPoly::ZpPoly(unsigned p, unsigned N, std::vector<Zp> coeffs) : p_(p), N_(N), coeffs_(std::move(coeffs)) {
  for (const auto& c : coeffs_)
    require(c.prime() == p && c.precision() == N, ErrorCode::precision_mismatch,
            "polynomial coefficient over a different ring");
}

ZpPoly ZpPoly::from_ints(unsigned p, unsigned N, const std::vector<i64>& coeffs) {
  std::vector<Zp> cs;
  cs.reserve(coeffs.size());
  for (i64 c : coeffs) cs.emplace_back(p, N, c);
  return ZpPoly(p, N, std::move(cs));
}

int ZpPoly::degree() const {
  for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 0; --i)
    if (!coeffs_[i].is_zero()) return i;
  return -1;
}

bool ZpPoly::is_monic() const {
  int d = degree();
  return d >= 0 && coeffs_[d].residue() == 1;
}

Zp ZpPoly::coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Zp(p_, N_, 0); }

Zp ZpPoly::operator()(const Zp& x) const {
  Zp acc(p_, N_, 0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

ZpPoly ZpPoly::derivative() const {
  std::vector<Zp> d;
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d.push_back(coeffs_[i] * Zp(p_, N_, static_cast<i64>(i)));
  return ZpPoly(p_, N_, std::move(d));
}

Zp hensel_root(const ZpPoly& f, u64 seed) {
  const unsigned p = f.prime(), N = f.precision();
  Zp x = Zp::from_residue(p, N, seed % p);
  const ZpPoly df = f.derivative();
  require(f(x).residue() % p == 0, ErrorCode::not_a_simple_root, "seed is not a root mod p");
  require(df(x).is_unit(), ErrorCode::not_a_simple_root, "seed is a multiple root mod p");
  // Quadratic convergence: the number of correct digits doubles each step.
  for (unsigned correct = 1; correct < N; correct *= 2) x = x - f(x) * df(x).inverse();
  if (!f(x).is_zero()) x = x - f(x) * df(x).inverse();
  return x;
}

Zp teichmuller(unsigned p, u64 a, unsigned N) {
  require(a % p != 0, ErrorCode::not_a_unit, "Teichmuller lift of zero");
  std::vector<i64> c(p, 0);
  c[0] = -1;
  c[p - 1] = 1;
  return hensel_root(ZpPoly::from_ints(p, N, c), a % p);
}

// ---------------------------------------------------------------- ZpMatrix

ZpMatrix::ZpMatrix(unsigned p, unsigned N, std::size_t rows, std::size_t cols)
    : p_(p), N_(N), mod_(checked_pow(p, N)), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

ZpMatrix ZpMatrix::identity(unsigned p, unsigned N, std::size_t n) {
  ZpMatrix m(p, N, n, n);
  for (std::size_t i = 0; i < n; ++i) m.raw(i, i) = 1 % m.mod_;
  return m;
}

ZpMatrix ZpMatrix::from_ints(unsigned p, unsigned N, const std::vector<std::vector<i64>>& rows) {
  const std::size_t r = rows.size(), c = rows.empty() ? 0 : rows.front().size();
  ZpMatrix m(p, N, r, c);
  for (std::size_t i = 0; i < r; ++i) {
    require(rows[i].size() == c, ErrorCode::invalid_argument, "ragged matrix");
    for (std::size_t j = 0; j < c; ++j) m.raw(i, j) = reduce_signed(rows[i][j], m.mod_);
  }
  return m;
}

void ZpMatrix::set(std::size_t i, std::size_t j, const Zp& v) {
  require(v.prime() == p_ && v.precision() == N_, ErrorCode::precision_mismatch, "entry over a different ring");
  raw(i, j) = v.residue();
}

void ZpMatrix::check_compatible(const ZpMatrix& o) const {
  require(p_ == o.p_ && N_ == o.N_, ErrorCode::precision_mismatch, "matrices over different rings");
}

ZpMatrix ZpMatrix::operator*(const ZpMatrix& o) const {
  check_compatible(o);
  require(cols_ == o.rows_, ErrorCode::invalid_argument, "matrix shape mismatch");
  ZpMatrix r(p_, N_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const u64 a = raw(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r.raw(i, j) = addmod(r.raw(i, j), mulmod(a, o.raw(k, j), mod_), mod_);
    }
  return r;
}

ZpMatrix ZpMatrix::operator+(const ZpMatrix& o) const {
  check_compatible(o);
  require(rows_ == o.rows_ && cols_ == o.cols_, ErrorCode::invalid_argument, "matrix shape mismatch");
  ZpMatrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = addmod(data_[i], o.data_[i], mod_);
  return r;
}

ZpMatrix ZpMatrix::operator-(const ZpMatrix& o) const {
  check_compatible(o);
  require(rows_ == o.rows_ && cols_ == o.cols_, ErrorCode::invalid_argument, "matrix shape mismatch");
  ZpMatrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = submod(data_[i], o.data_[i], mod_);
  return r;
}

bool ZpMatrix::operator==(const ZpMatrix& o) const {
  return p_ == o.p_ && N_ == o.N_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

Zp ZpMatrix::determinant() const {
  require(rows_ == cols_, ErrorCode::invalid_argument, "determinant of a non-square matrix");
  ZpMatrix a = *this;
  const std::size_t n = rows_;
  u64 det = 1 % mod_;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t best = c;
    unsigned bv = valuation_of(a.raw(c, c), p_, N_);
    for (std::size_t r = c + 1; r < n; ++r) {
      unsigned v = valuation_of(a.raw(r, c), p_, N_);
      if (v < bv) bv = v, best = r;
    }
    if (bv >= N_) return Zp(p_, N_, 0);
    if (best != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a.raw(c, j), a.raw(best, j));
      det = det == 0 ? 0 : mod_ - det;
    }
    const u64 piv = a.raw(c, c);
    det = mulmod(det, piv, mod_);
    const u64 pv = checked_pow(p_, bv);
    const u64 unit_inv = invmod((piv / pv) % mod_, mod_);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a.raw(r, c) == 0) continue;
      // a[r][c] = p^bv * q exactly, so subtracting q * unit_inv * row c clears it.
      const u64 q = mulmod(a.raw(r, c) / pv, unit_inv, mod_);
      for (std::size_t j = c; j < n; ++j) a.raw(r, j) = submod(a.raw(r, j), mulmod(q, a.raw(c, j), mod_), mod_);
    }
  }
  return Zp::from_residue(p_, N_, det);
}

ZpMatrix ZpMatrix::inverse() const {
  require(rows_ == cols_, ErrorCode::invalid_argument, "inverse of a non-square matrix");
  const std::size_t n = rows_;
  ZpMatrix a = *this, inv = identity(p_, N_, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = n;
    for (std::size_t r = c; r < n; ++r)
      if (a.raw(r, c) % p_ != 0) {
        piv = r;
        break;
      }
    require(piv < n, ErrorCode::not_a_unit, "matrix is not invertible mod p");
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a.raw(c, j), a.raw(piv, j));
      std::swap(inv.raw(c, j), inv.raw(piv, j));
    }
    const u64 s = invmod(a.raw(c, c), mod_);
    for (std::size_t j = 0; j < n; ++j) {
      a.raw(c, j) = mulmod(a.raw(c, j), s, mod_);
      inv.raw(c, j) = mulmod(inv.raw(c, j), s, mod_);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a.raw(r, c) == 0) continue;
      const u64 q = a.raw(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        a.raw(r, j) = submod(a.raw(r, j), mulmod(q, a.raw(c, j), mod_), mod_);
        inv.raw(r, j) = submod(inv.raw(r, j), mulmod(q, inv.raw(c, j), mod_), mod_);
      }
    }
  }
  return inv;
}

ZpMatrix ZpMatrix::truncated(unsigned N) const {
  require(N >= 1 && N <= N_, ErrorCode::precision_mismatch, "truncation must lower precision");
  ZpMatrix r(p_, N, rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] % r.mod_;
  return r;
}

ZpMatrix ZpMatrix::hconcat(const ZpMatrix& o) const {
  check_compatible(o);
  require(rows_ == o.rows_, ErrorCode::invalid_argument, "row count mismatch");
  ZpMatrix r(p_, N_, rows_, cols_ + o.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) r.raw(i, j) = raw(i, j);
    for (std::size_t j = 0; j < o.cols_; ++j) r.raw(i, cols_ + j) = o.raw(i, j);
  }
  return r;
}

ZpMatrix ZpMatrix::column_range(std::size_t begin, std::size_t end) const {
  ZpMatrix r(p_, N_, rows_, end - begin);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = begin; j < end; ++j) r.raw(i, j - begin) = raw(i, j);
  return r;
}

ZpMatrix ZpMatrix::row_range(std::size_t begin, std::size_t end) const {
  ZpMatrix r(p_, N_, end - begin, cols_);
  for (std::size_t i = begin; i < end; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.raw(i - begin, j) = raw(i, j);
  return r;
}

// ---------------------------------------------------------------- Smith normal form

namespace {

struct SnfEngine {
  unsigned p, N;
  u64 mod;
  std::size_t rows, cols;
  std::vector<u64> d;  // row-major working copy
  bool track;
  std::vector<u64> left;   // rows x rows
  std::vector<u64> right;  // cols x cols
  std::vector<unsigned> vals;

  u64& at(std::size_t i, std::size_t j) { return d[i * cols + j]; }

  void run() {
    const std::size_t k = std::min(rows, cols);
    if (track) {
      left.assign(rows * rows, 0);
      right.assign(cols * cols, 0);
      for (std::size_t i = 0; i < rows; ++i) left[i * rows + i] = 1 % mod;
      for (std::size_t i = 0; i < cols; ++i) right[i * cols + i] = 1 % mod;
    }
    // Cache valuations so each pivot search is a scan over small integers.
    std::vector<unsigned> val(rows * cols);
    for (std::size_t i = 0; i < rows * cols; ++i) val[i] = valuation_of(d[i], p, N);
    auto v_at = [&](std::size_t i, std::size_t j) -> unsigned& { return val[i * cols + j]; };

    for (std::size_t t = 0; t < k; ++t) {
      std::size_t pi = t, pj = t;
      unsigned best = N;
      for (std::size_t i = t; i < rows && best > 0; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (v_at(i, j) < best) {
            best = v_at(i, j);
            pi = i;
            pj = j;
            if (best == 0) break;
          }
      if (best >= N) {
        for (std::size_t r = t; r < k; ++r) vals.push_back(kInfiniteValuation);
        return;
      }
      if (pi != t) {
        for (std::size_t j = 0; j < cols; ++j) {
          std::swap(at(t, j), at(pi, j));
          std::swap(v_at(t, j), v_at(pi, j));
        }
        if (track)
          for (std::size_t j = 0; j < rows; ++j) std::swap(left[t * rows + j], left[pi * rows + j]);
      }
      if (pj != t) {
        for (std::size_t i = 0; i < rows; ++i) {
          std::swap(at(i, t), at(i, pj));
          std::swap(v_at(i, t), v_at(i, pj));
        }
        if (track)
          for (std::size_t i = 0; i < cols; ++i) std::swap(right[i * cols + t], right[i * cols + pj]);
      }
      const u64 pv = checked_pow(p, best);
      const u64 unit_inv = invmod((at(t, t) / pv) % mod, mod);
      // Normalise the pivot row so the pivot is exactly p^best.
      for (std::size_t j = t; j < cols; ++j) at(t, j) = mulmod(at(t, j), unit_inv, mod);
      if (track)
        for (std::size_t j = 0; j < rows; ++j) left[t * rows + j] = mulmod(left[t * rows + j], unit_inv, mod);
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (at(i, t) == 0) continue;
        const u64 q = at(i, t) / pv;
        for (std::size_t j = t; j < cols; ++j) {
          if (at(t, j) == 0) continue;
          at(i, j) = submod(at(i, j), mulmod(q, at(t, j), mod), mod);
          v_at(i, j) = valuation_of(at(i, j), p, N);
        }
        if (track)
          for (std::size_t j = 0; j < rows; ++j)
            left[i * rows + j] = submod(left[i * rows + j], mulmod(q, left[t * rows + j], mod), mod);
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (at(t, j) == 0) continue;
        const u64 q = at(t, j) / pv;
        at(t, j) = 0;
        v_at(t, j) = N;
        if (track)
          for (std::size_t i = 0; i < cols; ++i)
            right[i * cols + j] = submod(right[i * cols + j], mulmod(q, right[i * cols + t], mod), mod);
      }
      vals.push_back(best);
    }
  }
};

SnfEngine make_engine(const ZpMatrix& m, bool track) {
  SnfEngine e{m.prime(), m.precision(), m.modulus(), m.rows(), m.cols(), {}, track, {}, {}, {}};
  e.d.resize(m.rows() * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e.d[i * m.cols() + j] = m.raw(i, j);
  return e;
}

}  // namespace

SnfResult smith_normal_form(const ZpMatrix& m) {
  SnfEngine e = make_engine(m, true);
  e.run();
  ZpMatrix L(m.prime(), m.precision(), m.rows(), m.rows());
  ZpMatrix R(m.prime(), m.precision(), m.cols(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.rows(); ++j) L.raw(i, j) = e.left[i * m.rows() + j];
  for (std::size_t i = 0; i < m.cols(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) R.raw(i, j) = e.right[i * m.cols() + j];
  return SnfResult{std::move(e.vals), std::move(L), std::move(R)};
}

std::vector<unsigned> smith_valuations(const ZpMatrix& m) {
  SnfEngine e = make_engine(m, false);
  e.run();
  return std::move(e.vals);
}

ZpMatrix kernel_generators(const ZpMatrix& m) {
  const unsigned p = m.prime(), N = m.precision();
  SnfResult s = smith_normal_form(m);
  const std::size_t c = m.cols();
  std::vector<std::vector<u64>> gens;
  for (std::size_t t = 0; t < c; ++t) {
    u64 scale = 1;
    if (t < s.divisor_valuations.size() && s.divisor_valuations[t] != kInfiniteValuation) {
      const unsigned v = s.divisor_valuations[t];
      if (v == 0) continue;
      scale = checked_pow(p, N - v);
    }
    std::vector<u64> col(c);
    for (std::size_t i = 0; i < c; ++i) col[i] = mulmod(s.right.raw(i, t), scale, m.modulus());
    gens.push_back(std::move(col));
  }
  ZpMatrix k(p, N, c, gens.size());
  for (std::size_t j = 0; j < gens.size(); ++j)
    for (std::size_t i = 0; i < c; ++i) k.raw(i, j) = gens[j][i];
  return k;
}

unsigned colength(const ZpMatrix& m) {
  const unsigned N = m.precision();
  unsigned total = 0;
  auto vals = smith_valuations(m);
  for (unsigned v : vals) total += (v == kInfiniteValuation ? N : v);
  if (m.rows() > vals.size()) total += N * static_cast<unsigned>(m.rows() - vals.size());
  return total;
}

}  // namespace twistnorm
