#pragma once

// Endomorphism filtrations attached to lattice functions.  Matrix lattices
// are compared after flattening End_F(V) over the rationals (entry by entry
// along the adapted monomial basis of F), where canonical Hermite form makes
// every comparison exact.  Filtration profiles store one period of a
// decreasing, p-periodically rescaling family of lattices; two filtrations
// agree iff their profiles agree at the union of their jump radii.

#include "btlf/latt_fun.hpp"

#include <functional>

namespace btlf {

// Flat coordinates of a square matrix over F: row-major entries, each
// expanded along the monomials of F; length n^2 [F:Q].
std::vector<FElem> flatten_endo(const Matrix& a);
Matrix unflatten_endo(const FieldLayer* F, int n, const std::vector<FElem>& v);

// {a : a L1 contained in L2} as a lattice in flat coordinates.
DvrLattice hom_lattice_flat(const DvrLattice& L1, const DvrLattice& L2);

// End filtration of a split function, flat:
//   {a : a Lambda(s) contained in Lambda(s + r) for all s},
// whose (k,l) entry in the splitting frame has valuation at least
// ceil(e (r + l_k - l_l)) / e.  The _plus variant is the strict step
// (radius r+, i.e. the intersection over all r' > r).
DvrLattice end_lattice_flat(const LatticeFunction& lf, const Rat& r);
DvrLattice end_lattice_flat_plus(const LatticeFunction& lf, const Rat& r);

// The pairing <a, b> = Tr_{F/Q} tr(a b) on flat coordinates, as an
// orthogonal form; its dual_lattice realizes the trace dual of a matrix
// lattice.
HermForm trace_pairing_form(const FieldLayer* F, int n);

// Frame (flat columns) of the Lie algebra {a : a + a^sigma_h = 0} inside
// End_F(V), where a^sigma_h is the h-adjoint.
Matrix lie_subspace_frame(const HermForm& h);

// One period of a decreasing filtration with F(r + 1) = p F(r): jump radii
// in (0, 1], strictly increasing, with the value on (previous jump, jump].
struct FiltrationProfile {
  std::vector<Rat> jumps;
  std::vector<DvrLattice> values;
};

// Evaluates `ev` at the candidate radii (subset of (0, 1], need not all be
// genuine jumps) and keeps the actual jumps.
FiltrationProfile make_profile(std::vector<Rat> candidates,
                               const std::function<DvrLattice(const Rat&)>& ev);

// Value at any rational radius (periodicity fills in the rest of the line).
DvrLattice profile_value(const FiltrationProfile& pr, const Rat& r);

bool profile_equal(const FiltrationProfile& a, const FiltrationProfile& b);
// a(r) contains b(r) for every r.
bool profile_contains(const FiltrationProfile& a, const FiltrationProfile& b);

// All radii in (0, 1] lying in one of the given classes modulo 1/e.
std::vector<Rat> period_candidates(const std::vector<Rat>& classes, int e);

// Profile of r -> end_lattice_flat(lf, r); jumps happen in the classes of
// offset differences modulo 1/e.
FiltrationProfile end_profile(const LatticeFunction& lf);

// The unique self-dual member of the translation class of lf0: requires the
// End filtration to be adjoint-stable (NotSigmaFixed otherwise), computes the
// shift c with lf0# = lf0 + c (NotShiftRelated when there is none) and
// returns lf0 + c/2.
LatticeFunction recover_self_dual(const HermForm& h, const LatticeFunction& lf0);

}  // namespace btlf
