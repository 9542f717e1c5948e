#pragma once

// Full-rank o_L-lattices in L^n, kept in a canonical column Hermite form:
// lower-triangular basis, diagonal entries exact powers of the uniformizer,
// off-diagonal entries canonically reduced modulo the pivot power.  Two
// lattices are equal iff their canonical bases coincide entrywise.

#include "btlf/linalg.hpp"

namespace btlf {

struct DvrLattice {
  const FieldLayer* L = nullptr;
  Matrix basis;  // n x n, columns generate; always in canonical form

  int dim() const { return basis.rows(); }
};

// Canonical column Hermite form of a generating set (n x m, m >= n);
// RankDeficient when the columns do not span a full lattice.
Matrix dvr_hnf(const Matrix& gens);

DvrLattice make_lattice(const Matrix& gens);
DvrLattice standard_lattice(const FieldLayer* L, int n);

bool operator==(const DvrLattice& A, const DvrLattice& B);
inline bool operator!=(const DvrLattice& A, const DvrLattice& B) { return !(A == B); }

bool member(const DvrLattice& lat, const std::vector<FElem>& x);
bool contains(const DvrLattice& outer, const DvrLattice& inner);

DvrLattice lattice_sum(const DvrLattice& A, const DvrLattice& B);
DvrLattice lattice_intersect(const DvrLattice& A, const DvrLattice& B);
DvrLattice scale(const FElem& c, const DvrLattice& A);
DvrLattice scale_pi(const DvrLattice& A, long k);  // pi^k * A

// Minimal valuation attained on the lattice.
Val min_val(const DvrLattice& A);

// Basis (ambient coordinates, n x k) of the intersection of A with the
// subspace spanned by the columns of W (n x k, full column rank).
Matrix intersect_subspace(const DvrLattice& A, const Matrix& W);

// Same intersection, but expressed in the frame of W: returns U (k x k) with
// ambient basis W * U.
Matrix intersect_subspace_coords(const DvrLattice& A, const Matrix& W);

}  // namespace btlf
