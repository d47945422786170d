#include "twistnorm/solver.hpp"

#include <algorithm>

namespace twistnorm {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive_precision: return "inconclusive-precision";
  }
  return "?";
}

unsigned max_desk_level(unsigned p) {
  if (!conway_modulus(p, 1)) return 0;
  unsigned s = 0;
  for (;;) {
    const u64 m = checked_pow(p, s + 1);
    u64 size = 1;
    for (u64 k = 0; k < m && size <= kDeskFieldBound; ++k) size *= p;
    if (size > kDeskFieldBound || !conway_modulus(p, static_cast<unsigned>(m))) return s;
    ++s;
  }
}

namespace {

unsigned level_of_field(const GFFieldPtr& F) {
  const unsigned p = F->prime();
  unsigned m = F->degree(), s = 0;
  while (m % p == 0) {
    m /= p;
    ++s;
  }
  require(m == 1 && *F == *tower_field(p, s), ErrorCode::invalid_argument, "residue field is not a tower level");
  return s;
}

// F_p-matrix acting on the vector index.
GFVector act(const FpMatrix& a, const GFVector& v) {
  GFVector out(a.rows(), GFElem::zero(v.front().field()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a.at(i, j)) out[i] = out[i] + v[j].scaled(a.at(i, j));
  return out;
}

FpMatrix block(const FpMatrix& a, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
  FpMatrix out(a.prime(), r1 - r0, c1 - c0);
  for (std::size_t i = r0; i < r1; ++i)
    for (std::size_t j = c0; j < c1; ++j) out.at(i - r0, j - c0) = a.at(i, j);
  return out;
}

FpMatrix negated(const FpMatrix& a) { return FpMatrix(a.prime(), a.rows(), a.cols()) - a; }

// Fitting decomposition of u_bar: P = [ker (u-1)^d | im (u-1)^d], P^-1 u P = u1 (+) u2.
struct FittingSplit {
  FpMatrix P, Pinv, u1, u2;
  std::size_t d1;
};

FittingSplit fitting_split(const FpMatrix& u) {
  const std::size_t d = u.rows();
  const FpMatrix Ad = (u - FpMatrix::identity(u.prime(), d)).pow(d);
  const FpMatrix W1 = Ad.kernel(), W2 = Ad.column_space();
  const std::size_t d1 = W1.cols();
  require(d1 + W2.cols() == d, ErrorCode::internal, "Fitting decomposition has the wrong dimension");
  FpMatrix P(u.prime(), d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d1; ++j) P.at(i, j) = W1.at(i, j);
    for (std::size_t j = d1; j < d; ++j) P.at(i, j) = W2.at(i, j - d1);
  }
  FpMatrix Pinv = P.inverse();
  FpMatrix ub = Pinv * u * P;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      require((i < d1) == (j < d1) || ub.at(i, j) == 0, ErrorCode::internal, "Fitting blocks do not decouple");
  return {P, Pinv, block(ub, 0, d1, 0, d1), block(ub, d1, d, d1, d), d1};
}

// The block without eigenvalue 1: beta = -u^-1 (1 - u^-m)^-1 sum_{k<m} u^-k phi^k(alpha).
GFVector telescope(const GFVector& alpha, const FpMatrix& u) {
  const unsigned m = alpha.front().field()->degree();
  const FpMatrix uinv = u.inverse();
  GFVector term = alpha, gamma = alpha;
  for (unsigned k = 1; k < m; ++k) {
    for (auto& t : term) t = gf_frobenius(t);
    term = act(uinv, term);
    for (std::size_t a = 0; a < gamma.size(); ++a) gamma[a] = gamma[a] + term[a];
  }
  const FpMatrix denom = FpMatrix::identity(u.prime(), u.rows()) - uinv.pow(m);
  return act(negated(uinv * denom.inverse()), gamma);
}

GFVector slice(const GFVector& v, std::size_t b, std::size_t e) { return GFVector(v.begin() + b, v.begin() + e); }

}  // namespace

std::size_t unipotent_dimension(const FpMatrix& u_bar) {
  const std::size_t d = u_bar.rows();
  return (u_bar - FpMatrix::identity(u_bar.prime(), d)).pow(d).kernel().cols();
}

ResidueSolution residue_solve(const GFVector& alpha_in, const FpMatrix& u_bar, std::optional<unsigned> max_level) {
  require(!alpha_in.empty(), ErrorCode::invalid_argument, "empty right-hand side");
  const std::size_t d = alpha_in.size();
  require(u_bar.rows() == d && u_bar.cols() == d, ErrorCode::invalid_argument, "u_bar must be d x d");
  require(u_bar.invertible(), ErrorCode::not_a_unit, "u_bar must be invertible");
  const unsigned p = u_bar.prime();
  require(alpha_in.front().prime() == p, ErrorCode::invalid_argument, "characteristic mismatch");
  const unsigned top = max_level.value_or(max_desk_level(p));
  unsigned s = level_of_field(alpha_in.front().field());
  require(s <= top, ErrorCode::desk_bound_exceeded, "residue field above the desk bound");

  const FittingSplit sp = fitting_split(u_bar);
  ResidueSolution out;
  GFVector alpha = alpha_in;
  GFVector beta1;
  for (;;) {
    if (sp.d1 == 0) break;
    const GFVector a1 = slice(act(sp.Pinv, alpha), 0, sp.d1);
    const GFFieldPtr& F = alpha.front().field();
    auto sol = twisted_frobenius_matrix(F, sp.u1).solve_lexmin(flatten(a1));
    if (sol) {
      beta1 = unflatten(F, *sol, sp.d1);
      break;
    }
    // Obstructed on the unipotent block: the trace does not vanish until one level up.
    require(s + 1 <= top, ErrorCode::desk_bound_exceeded, "residue solve needs a level beyond the desk bound");
    GFEmbedding up(tower_field(p, s), tower_field(p, s + 1));
    for (auto& a : alpha) a = up(a);
    ++s;
    out.enlarged = true;
  }
  const GFFieldPtr F = alpha.front().field();
  GFVector bprime = beta1;
  if (sp.d1 < d) {
    GFVector b2 = telescope(slice(act(sp.Pinv, alpha), sp.d1, d), sp.u2);
    bprime.insert(bprime.end(), b2.begin(), b2.end());
  }
  // Canonical representative of the solution coset.
  const FpMatrix A = twisted_frobenius_matrix(F, u_bar);
  GFVector beta = unflatten(F, A.lexmin_in_coset(flatten(act(sp.P, bprime))), d);
  require(apply_twisted_frobenius(beta, u_bar) == alpha, ErrorCode::internal, "residue solution failed verification");
  out.beta = std::move(beta);
  out.level_exponent = s;
  return out;
}

// ---------------------------------------------------------------- twisted unit vectors

unsigned TwistedUnitVector::level() const {
  unsigned lv = kInfiniteValuation;
  for (const auto& x : entries) lv = std::min(lv, (x - RamElem::one(x.layer())).valuation());
  return lv;
}

TwistedUnitVector TwistedUnitVector::ones(const RamLayerPtr& layer, std::size_t d, std::string label) {
  return {std::vector<RamElem>(d, RamElem::one(layer)), std::move(label)};
}

TwistedUnitVector operator*(const TwistedUnitVector& a, const TwistedUnitVector& b) {
  require(a.dimension() == b.dimension(), ErrorCode::invalid_argument, "dimension mismatch");
  TwistedUnitVector out{{}, a.label};
  for (std::size_t i = 0; i < a.dimension(); ++i) out.entries.push_back(a.entries[i] * b.entries[i]);
  return out;
}

TwistedUnitVector inverse(const TwistedUnitVector& a) {
  TwistedUnitVector out{{}, a.label};
  for (const auto& x : a.entries) out.entries.push_back(x.inverse());
  return out;
}

FpMatrix reduce_mod_p(const ZpMatrix& u) {
  FpMatrix out(u.prime(), u.rows(), u.cols());
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < u.cols(); ++j) out.at(i, j) = static_cast<unsigned>(u.raw(i, j) % u.prime());
  return out;
}

TwistedUnitVector apply_twist(const TwistedUnitVector& x, const ZpMatrix& u) {
  const std::size_t d = x.dimension();
  require(d >= 1 && u.rows() == d && u.cols() == d, ErrorCode::invalid_argument, "twist matrix must be d x d");
  require(u.prime() == x.layer()->prime(), ErrorCode::invalid_argument, "prime mismatch");
  const u64 mod = u.modulus();
  TwistedUnitVector out{{}, x.label};
  for (std::size_t a = 0; a < d; ++a) {
    RamElem acc = x.entries[a].frobenius();
    for (std::size_t b = 0; b < d; ++b) {
      const u64 e = (mod - u.raw(a, b)) % mod;
      if (e) acc = acc * x.entries[b].pow(e);
    }
    out.entries.push_back(std::move(acc));
  }
  return out;
}

namespace {

void require_twist_precision(const ZpMatrix& u, const RamLayerPtr& layer, unsigned depth) {
  require(u.precision() >= unit_group_exponent(layer->prime(), layer->ramification(), depth) + 1,
          ErrorCode::precision_exhausted, "twist precision too small for this depth");
}

}  // namespace

LiftSolution lift_solve(const TwistedUnitVector& y, const ZpMatrix& u, unsigned depth, std::optional<unsigned> max_level) {
  require(y.dimension() >= 1, ErrorCode::invalid_argument, "empty unit vector");
  const RamLayerPtr layer = y.layer();
  for (const auto& v : y.entries) require(v.layer() == layer, ErrorCode::invalid_argument, "entries from different layers");
  require(depth >= 1 && depth <= layer->valuation_cap(), ErrorCode::precision_exhausted, "depth exceeds the layer precision");
  require(y.level() >= 1, ErrorCode::invalid_argument, "entries must be principal units");
  require_twist_precision(u, layer, depth);
  const FpMatrix ubar = reduce_mod_p(u);
  const std::size_t d = y.dimension();

  LiftSolution out{TwistedUnitVector::ones(layer, d, y.label), {}, layer->base()->exponent()};
  TwistedUnitVector defect = y;
  unsigned lv = defect.level();
  out.defect_levels.push_back(std::min(lv, depth));
  while (lv < depth) {
    GFVector r;
    for (const auto& v : defect.entries) r.push_back((v - RamElem::one(layer)).residue_at(lv));
    ResidueSolution sol = residue_solve(r, ubar, max_level);
    if (sol.enlarged) {
      // Restart over the level the residue solver moved to.
      const RamLayerPtr up = layer->over(build_unram(layer->prime(), sol.level_exponent, layer->precision()));
      TwistedUnitVector ly{{}, y.label};
      for (const auto& v : y.entries) ly.entries.push_back(change_base(v, up));
      return lift_solve(ly, u, depth, max_level);
    }
    TwistedUnitVector c{{}, y.label};
    for (const auto& b : sol.beta) c.entries.push_back(RamElem::elementary(layer, lv, b));
    out.x = out.x * c;
    defect = defect * inverse(apply_twist(c, u));
    const unsigned next = defect.level();
    require(next > lv, ErrorCode::internal, "defect level failed to increase");
    lv = next;
    out.defect_levels.push_back(std::min(lv, depth));
  }
  return out;
}

// ---------------------------------------------------------------- V_u

VGroupPresentation v_kernel(const ZpMatrix& u, const UnitGroup& G, const std::string& label) {
  const std::size_t d = u.rows();
  require(d >= 1 && u.cols() == d, ErrorCode::invalid_argument, "twist matrix must be square");
  require(u.prime() == G.prime(), ErrorCode::invalid_argument, "prime mismatch");
  const unsigned p = G.prime(), X = G.exponent_precision();
  require(u.precision() >= X, ErrorCode::precision_exhausted, "twist precision too small for this depth");
  const ZpMatrix uX = u.truncated(X);
  const ZpMatrix Phi = G.frobenius_matrix();
  const std::size_t g = G.generator_count(), n = g * d;
  const u64 mod = uX.modulus();

  // psi = Phi (x) I_d - I_g (x) u on exponent vectors, index j*d + a.
  ZpMatrix Psi = kron_identity(Phi, d);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        u64& e = Psi.raw(i * d + a, i * d + b);
        e = submod(e, uX.raw(a, b), mod);
      }
  const ZpMatrix R = kron_identity(G.relations(), d);
  const ZpMatrix ker = kernel_generators(Psi.hconcat(ZpMatrix(p, X, n, n) - R)).row_range(0, n);
  const PresentedGroup PG(R);

  VGroupPresentation out;
  out.depth = G.depth();
  out.log_order = PG.log_order_of(ker);
  out.columns = PG.minimal_generators(ker, out.log_order);
  out.structure = PG.subgroup(out.columns);
  out.expected_log_order = (G.depth() - 1) * static_cast<unsigned>(unipotent_dimension(reduce_mod_p(u)));
  out.complete = out.log_order == out.expected_log_order;
  for (std::size_t c = 0; c < out.columns.cols(); ++c) {
    TwistedUnitVector v{{}, label};
    for (std::size_t a = 0; a < d; ++a) {
      std::vector<u64> exps(g);
      for (std::size_t j = 0; j < g; ++j) exps[j] = out.columns.raw(j * d + a, c);
      v.entries.push_back(G.element(exps));
    }
    out.generators.push_back(std::move(v));
  }
  return out;
}

VGroupPresentation v_kernel(const ZpMatrix& u, const RamLayerPtr& layer, unsigned depth, const std::string& label) {
  return v_kernel(u, UnitGroup(layer, depth), label);
}

// ---------------------------------------------------------------- norms

unsigned layer_log_degree(const RamLayerPtr& layer) {
  unsigned e = layer->ramification(), n = 0;
  while (e % layer->prime() == 0) {
    e /= layer->prime();
    ++n;
  }
  require(e == 1, ErrorCode::invalid_argument, "layer degree is not a power of p");
  return n;
}

unsigned norm_depth(const RamLayerPtr& E, unsigned depth) {
  if (E->is_trivial()) return depth;
  const unsigned e = E->ramification(), m = E->degree();
  require(e * depth <= E->valuation_cap(), ErrorCode::precision_exhausted, "layer precision below the norm depth");
  require(E->norm_precision() >= depth, ErrorCode::precision_exhausted, "norm precision below the depth");
  const GFFieldPtr& F = E->base()->residue_field();
  // U^(eM) always norms into U^(M); scan down for the largest level that does not.
  for (unsigned i = e * depth - 1; i >= 1; --i)
    for (unsigned k = 0; k < m; ++k) {
      std::vector<unsigned> basis(m, 0);
      basis[k] = 1;
      const UnramElem nx = norm(RamElem::elementary(E, i, GFElem(F, basis)));
      if ((nx - UnramElem::one(nx.level())).valuation() < depth) return i + 1;
    }
  return 1;
}

namespace {

unsigned ceil_div(unsigned a, unsigned b) { return (a + b - 1) / b; }

struct NormedGroups {
  RamLayerPtr T, E;
  unsigned N_T, N_E;
};

NormedGroups levels_for(const RamLayerPtr& layer, unsigned s, unsigned depth, unsigned precision) {
  const unsigned p = layer->prime();
  NormedGroups g;
  g.N_T = std::max(precision, depth);
  g.N_E = g.N_T + ceil_div(layer->different_exponent(), layer->ramification());
  g.T = trivial_layer(build_unram(p, s, g.N_T));
  g.E = layer->over(build_unram(p, s, g.N_E));
  require(g.E->is_galois(), ErrorCode::non_galois, "layer is not Galois over the base");
  require(g.E->norm_precision() >= g.N_T, ErrorCode::precision_exhausted, "norm precision below the base precision");
  return g;
}

// Digits over T of N(x), x in E.
ZpMatrix norm_column(const UnitGroup& GT, const RamElem& x) {
  const RamLayerPtr& T = GT.layer();
  return GT.column(RamElem::from_base(T, norm(x).truncated(T->precision())));
}

ZpMatrix stack_columns(unsigned p, unsigned X, std::size_t rows, const std::vector<ZpMatrix>& cols) {
  ZpMatrix out(p, X, rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t i = 0; i < rows; ++i) out.raw(i, c) = cols[c].raw(i, 0);
  return out;
}

}  // namespace

AbGroupStructure classical_norm_quotient(const RamLayerPtr& layer, unsigned depth, unsigned precision,
                                         unsigned level) {
  require(depth >= 1, ErrorCode::invalid_argument, "depth must be at least 1");
  require(level <= max_desk_level(layer->prime()), ErrorCode::desk_bound_exceeded, "level beyond the desk bound");
  const NormedGroups L = levels_for(layer, level, depth, precision);
  const UnitGroup GT(L.T, depth);
  const UnitGroup GE(L.E, norm_depth(L.E, depth));
  std::vector<ZpMatrix> cols;
  for (std::size_t j = 0; j < GE.generator_count(); ++j) cols.push_back(norm_column(GT, GE.generator(j)));
  const std::size_t g = GT.generator_count();
  const PresentedGroup PG(GT.relations());
  return PG.quotient(ZpMatrix::identity(GT.prime(), GT.exponent_precision(), g),
                     stack_columns(GT.prime(), GT.exponent_precision(), g, cols));
}

namespace {

Theorem1Cell theorem1_cell(const std::string& label, const ZpMatrix& u, const RamLayerPtr& layer, unsigned n,
                           const Theorem1Options& opts) {
  const unsigned p = layer->prime();
  const std::size_t d = u.rows();
  const unsigned M = opts.depth ? opts.depth : n + 1;
  require(M >= n + 1, ErrorCode::invalid_argument, "depth must exceed the log degree of the layer");
  const unsigned top = opts.max_level.value_or(max_desk_level(p));

  Theorem1Cell cell;
  cell.label = label;
  cell.rhs = coker_mod(TwistFamily::singleton(label, u), n);
  cell.depth_T = M;
  for (unsigned s = opts.level; s <= top; ++s) {
    const NormedGroups L = levels_for(layer, s, M, opts.precision);
    cell.level = s;
    cell.precision_T = L.N_T;
    cell.precision_E = L.N_E;
    const UnitGroup GT(L.T, M);
    const VGroupPresentation VK = v_kernel(u, GT, label);
    cell.vk_log_order = VK.log_order;
    cell.vk_expected = VK.expected_log_order;
    if (!VK.complete) {
      cell.note = "V(K) incomplete at level " + std::to_string(s);
      continue;
    }
    const unsigned Mp = norm_depth(L.E, M);
    cell.depth_E = Mp;
    require_twist_precision(u, L.E, Mp);
    const VGroupPresentation VL = v_kernel(u, UnitGroup(L.E, Mp), label);
    cell.vl_log_order = VL.log_order;
    cell.vl_expected = VL.expected_log_order;
    if (!VL.complete) {
      cell.note = "V(L) incomplete at level " + std::to_string(s);
      continue;
    }
    const std::size_t g = GT.generator_count();
    std::vector<ZpMatrix> cols;
    for (const auto& gen : VL.generators) {
      ZpMatrix c(p, GT.exponent_precision(), g * d, 1);
      for (std::size_t a = 0; a < d; ++a) {
        const ZpMatrix ca = norm_column(GT, gen.entries[a]);
        for (std::size_t j = 0; j < g; ++j) c.raw(j * d + a, 0) = ca.raw(j, 0);
      }
      cols.push_back(std::move(c));
    }
    const ZpMatrix K = stack_columns(p, GT.exponent_precision(), g * d, cols);
    const PresentedGroup PG(kron_identity(GT.relations(), d));
    cell.note.clear();
    if (PG.log_order_of(VK.columns.hconcat(K)) != PG.log_order_of(VK.columns)) {
      cell.verdict = Verdict::fail;
      cell.note = "norm image not contained in V(K)";
      return cell;
    }
    cell.lhs = PG.quotient(VK.columns, K);
    cell.verdict = cell.lhs == cell.rhs ? Verdict::pass : Verdict::fail;
    return cell;
  }
  cell.lhs = AbGroupStructure::trivial(p);
  cell.verdict = Verdict::inconclusive_precision;
  cell.note += "; levels exhausted at s = " + std::to_string(top);
  return cell;
}

}  // namespace

Theorem1Result theorem1_check(const TwistFamily& family, const RamLayerPtr& layer, const Theorem1Options& opts) {
  require(family.prime() == layer->prime(), ErrorCode::invalid_argument, "family and layer have different primes");
  require(layer->is_galois(), ErrorCode::non_galois, "layer is not Galois");
  Theorem1Result res;
  res.n = layer_log_degree(layer);
  require(res.n >= 1, ErrorCode::invalid_argument, "layer must be ramified");
  res.lhs = res.rhs = AbGroupStructure::trivial(family.prime());
  bool any_fail = false, any_open = false;
  for (std::size_t j = 0; j < family.size(); ++j) {
    Theorem1Cell c = theorem1_cell(family.labels()[j], family.matrices()[j], layer, res.n, opts);
    res.lhs = res.lhs + c.lhs;
    res.rhs = res.rhs + c.rhs;
    any_fail |= c.verdict == Verdict::fail;
    any_open |= c.verdict == Verdict::inconclusive_precision;
    res.cells.push_back(std::move(c));
  }
  res.verdict = any_fail ? Verdict::fail : any_open ? Verdict::inconclusive_precision : Verdict::pass;
  return res;
}

}  // namespace twistnorm
