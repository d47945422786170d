#pragma once

// Solving (phi - u) x = y on principal units: the residue-level solver, the
// filtration lift, the groups V_u and both sides of the norm-quotient identity.

#include <optional>
#include <string>
#include <vector>

#include "twistnorm/gf.hpp"
#include "twistnorm/towers.hpp"
#include "twistnorm/twist.hpp"
#include "twistnorm/unitgroup.hpp"

namespace twistnorm {

enum class Verdict { pass, fail, inconclusive_precision };
const char* verdict_name(Verdict v);

/// Highest unramified level s whose residue field fits the desk bound.
unsigned max_desk_level(unsigned p);

/// dim ker((u_bar - 1)^d) over F_p.
std::size_t unipotent_dimension(const FpMatrix& u_bar);

struct ResidueSolution {
  GFVector beta;
  unsigned level_exponent = 0;  ///< level s of the field beta lives in
  bool enlarged = false;
};

/// beta with (phi - u_bar) beta = alpha, least in flat-index order among all
/// solutions. When the eigenvalue-1 block is obstructed the right-hand side is
/// moved up one level at a time, failing past max_level.
ResidueSolution residue_solve(const GFVector& alpha, const FpMatrix& u_bar,
                              std::optional<unsigned> max_level = std::nullopt);

struct TwistedUnitVector {
  std::vector<RamElem> entries;
  std::string label;

  std::size_t dimension() const { return entries.size(); }
  const RamLayerPtr& layer() const { return entries.front().layer(); }
  /// Smallest filtration level of entry - 1 over all entries.
  unsigned level() const;
  static TwistedUnitVector ones(const RamLayerPtr& layer, std::size_t d, std::string label = {});
};

/// Componentwise product.
TwistedUnitVector operator*(const TwistedUnitVector& a, const TwistedUnitVector& b);
TwistedUnitVector inverse(const TwistedUnitVector& a);

/// psi(x)_a = phi(x_a) * prod_b x_b^(-u_ab). Exact modulo U^(M) once p^precision(u) kills U^1/U^(M).
TwistedUnitVector apply_twist(const TwistedUnitVector& x, const ZpMatrix& u);

/// u mod p.
FpMatrix reduce_mod_p(const ZpMatrix& u);

struct LiftSolution {
  TwistedUnitVector x;
  std::vector<unsigned> defect_levels;  ///< filtration level of the defect before each step and at the end
  unsigned level_exponent = 0;
};

/// x with psi(x) = y mod U^(M). The layer is raised when the residue solver needs it.
LiftSolution lift_solve(const TwistedUnitVector& y, const ZpMatrix& u, unsigned depth,
                        std::optional<unsigned> max_level = std::nullopt);

struct VGroupPresentation {
  std::vector<TwistedUnitVector> generators;
  unsigned depth = 0;
  AbGroupStructure structure;
  unsigned log_order = 0;
  /// (M - 1) * dim ker((u_bar - 1)^d): the size V_u has modulo U^(M) over the full unramified tower.
  unsigned expected_log_order = 0;
  bool complete = false;
  /// Generators as columns over the unit-group presentation of the layer, index j*d + a.
  ZpMatrix columns{3, 1, 0, 0};
};

/// {alpha in U^1(layer)^d : phi(alpha) = alpha^u} modulo U^(M).
VGroupPresentation v_kernel(const ZpMatrix& u, const RamLayerPtr& layer, unsigned depth,
                            const std::string& label = {});
/// Same, reusing a unit-group presentation.
VGroupPresentation v_kernel(const ZpMatrix& u, const UnitGroup& group, const std::string& label = {});

/// Least M' with N(U^(M')) inside U^(M) of the base.
unsigned norm_depth(const RamLayerPtr& layer, unsigned depth);

/// U^1(K) / N(U^1(L)) computed modulo U^(M), K the unramified level s (Q_p itself by default).
AbGroupStructure classical_norm_quotient(const RamLayerPtr& layer, unsigned depth, unsigned precision = 20,
                                         unsigned level = 0);

struct Theorem1Options {
  unsigned precision = 20;
  unsigned depth = 0;  ///< 0 selects n + 1
  unsigned level = 0;  ///< starting unramified level
  std::optional<unsigned> max_level;
};

struct Theorem1Cell {
  std::string label;
  AbGroupStructure lhs, rhs;
  Verdict verdict = Verdict::inconclusive_precision;
  unsigned level = 0;
  unsigned depth_T = 0, depth_E = 0;
  unsigned precision_T = 0, precision_E = 0;
  unsigned vk_log_order = 0, vk_expected = 0;
  unsigned vl_log_order = 0, vl_expected = 0;
  std::string note;
};

struct Theorem1Result {
  std::vector<Theorem1Cell> cells;
  AbGroupStructure lhs, rhs;
  Verdict verdict = Verdict::inconclusive_precision;
  unsigned n = 0;
};

/// Both sides of V(K)/N(V(L)) = coker of (I - u) on (G^ab)^d, per label and summed.
Theorem1Result theorem1_check(const TwistFamily& family, const RamLayerPtr& layer, const Theorem1Options& opts = {});

/// Degree [L : K] = p^n of a cyclic layer.
unsigned layer_log_degree(const RamLayerPtr& layer);

}  // namespace twistnorm
