#pragma once

// Decreasing, periodic lattice functions r -> Lambda(r) in split form: a basis
// b_1..b_n together with offsets l_1..l_n so that
//
//   Lambda(r) = sum_k  p_L^{ceil(e (r + l_k))} b_k.
//
// The associated additive norm is alpha(sum c_k b_k) = min_k (v(c_k) - l_k),
// so alpha(b_k) = -l_k and Lambda(r) = {x : alpha(x) >= r}.  All operations
// (duality, translation, group action, barycenters) stay in this split form;
// the common_splitting routine produces a single basis splitting two given
// functions at once, which is what makes barycenters and filtration
// comparisons exact.

#include "btlf/forms.hpp"

namespace btlf {

struct LatticeFunction {
  const FieldLayer* L = nullptr;
  Matrix basis;               // n x n, invertible columns b_k
  std::vector<Rat> offsets;   // l_k, one per column

  int dim() const { return basis.rows(); }
};

// Validates shape and invertibility.
LatticeFunction make_lattice_function(const Matrix& basis, std::vector<Rat> offsets);

// Identity basis, all offsets zero (the standard self-dual point).
LatticeFunction standard_function(const FieldLayer* L, int n);

// Lambda(r), and the strictly-deeper lattice Lambda(r+) = {alpha > r}.
DvrLattice eval(const LatticeFunction& lf, const Rat& r);
DvrLattice eval_plus(const LatticeFunction& lf, const Rat& r);

// Distinct jump radii of r -> Lambda(r) within one period, sorted, in
// [0, 1/e).  Lambda jumps at r iff r = -l_k mod 1/e for some k.
std::vector<Rat> jump_reps(const LatticeFunction& lf);

// Pointwise equality of the two step functions (compared at every jump of
// either one inside a period; periodicity Lambda(r + 1/e) = pi Lambda(r)
// covers the rest).
bool function_equal(const LatticeFunction& a, const LatticeFunction& b);

// (Lambda + s)(r) = Lambda(r + s): adds s to every offset.
LatticeFunction translate(const LatticeFunction& lf, const Rat& s);

// g . Lambda for invertible g: transforms the splitting basis.
LatticeFunction act(const Matrix& g, const LatticeFunction& lf);

// alpha(x); infinity for x = 0.
Val norm_value(const LatticeFunction& lf, const std::vector<FElem>& x);

// Dual norm of alpha with respect to h:
//   alpha#(x) = min_k (v(h(x, b_k)) + l_k).
Val dual_norm_value(const HermForm& h, const LatticeFunction& lf,
                    const std::vector<FElem>& x);

// The dual function Lambda#: split by the h-dual basis sigma((G B)^{-T}) with
// negated offsets.  Satisfies (Lambda#)# = Lambda and
// (Lambda + s)# = Lambda# - s.
LatticeFunction dual_function(const HermForm& h, const LatticeFunction& lf);

bool is_self_dual(const HermForm& h, const LatticeFunction& lf);

// Offsets reduced into [0, 1/e) by pi-rescaling the basis columns, then
// sorted (deterministic tie-break on the column entries).  Used for
// serialization; equality of functions is semantic, not representational.
LatticeFunction canonicalize(const LatticeFunction& lf);

// One basis splitting both functions: lf1 = (basis, off1), lf2 = (basis, off2).
struct CommonSplit {
  Matrix basis;
  std::vector<Rat> off1, off2;
};

// Exact common splitting basis (peeling off maximizers of alpha - mu).  The
// result is verified against both inputs before it is returned.
CommonSplit common_splitting(const LatticeFunction& lf1, const LatticeFunction& lf2);

// Affine combination along a common splitting frame: offsets t a + (1-t) b on
// the common basis, t in [0, 1].  Independent of the frame produced by
// common_splitting (the segment between two points is unique).
LatticeFunction barycenter(const Rat& t, const LatticeFunction& lf1,
                           const LatticeFunction& lf2);

// Coordinates of x over the subfield F: each entry of x is expanded along the
// adapted monomials of L over F (contiguous coordinate chunks of size
// deg(F)), slot-major.
std::vector<FElem> flatten_vec(const std::vector<FElem>& x, const FieldLayer* F);

// An o_L-lattice function on L^n viewed as an o_F-lattice function on
// F^{gn}, g = [L : F]: basis vectors m_c b_k for the adapted monomials m_c of
// L over F, offsets l_k - v(m_c).
LatticeFunction restrict_scalars(const LatticeFunction& lf, const FieldLayer* F);

}  // namespace btlf
