#include "btlf/lattice.hpp"

namespace btlf {

namespace {

// v(x) * e as a long, for finite x
long eval_int(const FieldLayer* L, const FElem& x) {
  Rat t = val(x).get() * L->e();
  return to_long(numerator(t));
}

}  // namespace

Matrix dvr_hnf(const Matrix& gens) {
  const FieldLayer* L = gens.layer();
  const int n = gens.rows(), m = gens.cols();
  if (m < n) fail(Err::RankDeficient, "fewer generators than the ambient dimension");
  Matrix B = gens;
  for (int i = 0; i < n; ++i) {
    // pivot: minimal valuation in row i among columns >= i, leftmost wins
    int pc = -1;
    Val best;
    for (int j = i; j < m; ++j) {
      Val v = val(B.at(i, j));
      if (!v.is_finite()) continue;
      if (pc < 0 || v < best) { pc = j; best = v; }
    }
    if (pc < 0) fail(Err::RankDeficient, "generators do not span a full lattice");
    if (pc != i)
      for (int r = 0; r < n; ++r) std::swap(B.at(r, pc), B.at(r, i));
    // scale the pivot column by a unit so the pivot is exactly pi^k
    long k = eval_int(L, B.at(i, i));
    FElem u = unif_pow(L, k) * inv(B.at(i, i));
    for (int r = 0; r < n; ++r) B.at(r, i) = u * B.at(r, i);
    FElem piv_inv = inv(B.at(i, i));
    // clear row i to the right (integral multiples of the pivot column)
    for (int j = i + 1; j < m; ++j) {
      if (B.at(i, j).is_zero()) continue;
      FElem f = B.at(i, j) * piv_inv;
      for (int r = 0; r < n; ++r) B.at(r, j) = B.at(r, j) - f * B.at(r, i);
    }
    // reduce row i to the left to the canonical representative mod pi^k
    for (int j = 0; j < i; ++j) {
      FElem rem = elem_mod(B.at(i, j), k);
      if (rem == B.at(i, j)) continue;
      FElem f = (B.at(i, j) - rem) * piv_inv;
      for (int r = 0; r < n; ++r) B.at(r, j) = B.at(r, j) - f * B.at(r, i);
    }
  }
  // drop the spent columns
  Matrix H(L, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H.at(i, j) = B.at(i, j);
  return H;
}

DvrLattice make_lattice(const Matrix& gens) {
  return DvrLattice{gens.layer(), dvr_hnf(gens)};
}

DvrLattice standard_lattice(const FieldLayer* L, int n) {
  return DvrLattice{L, Matrix::identity(L, n)};
}

bool operator==(const DvrLattice& A, const DvrLattice& B) {
  return A.L == B.L && A.basis == B.basis;
}

bool member(const DvrLattice& lat, const std::vector<FElem>& x) {
  Matrix rhs(lat.L, lat.dim(), 1);
  for (int i = 0; i < lat.dim(); ++i) rhs.at(i, 0) = x[i];
  Matrix c = solve(lat.basis, rhs);
  for (int i = 0; i < lat.dim(); ++i)
    if (!is_integral(c.at(i, 0))) return false;
  return true;
}

bool contains(const DvrLattice& outer, const DvrLattice& inner) {
  if (outer.L != inner.L || outer.dim() != inner.dim())
    fail(Err::BadInput, "lattices are not comparable");
  Matrix c = solve(outer.basis, inner.basis);
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j)
      if (!is_integral(c.at(i, j))) return false;
  return true;
}

DvrLattice lattice_sum(const DvrLattice& A, const DvrLattice& B) {
  if (A.L != B.L || A.dim() != B.dim()) fail(Err::BadInput, "lattices are not comparable");
  return make_lattice(hstack(A.basis, B.basis));
}

DvrLattice lattice_intersect(const DvrLattice& A, const DvrLattice& B) {
  if (A.L != B.L || A.dim() != B.dim()) fail(Err::BadInput, "lattices are not comparable");
  // intersection = dual of the sum of the duals (standard pairing)
  Matrix da = inverse(A.basis).transpose();
  Matrix db = inverse(B.basis).transpose();
  Matrix s = dvr_hnf(hstack(da, db));
  return make_lattice(inverse(s).transpose());
}

DvrLattice scale(const FElem& c, const DvrLattice& A) {
  return make_lattice(c * A.basis);
}

DvrLattice scale_pi(const DvrLattice& A, long k) {
  return scale(unif_pow(A.L, k), A);
}

Val min_val(const DvrLattice& A) {
  Val m;
  for (int i = 0; i < A.dim(); ++i)
    for (int j = 0; j < A.dim(); ++j) m = vmin(m, val(A.basis.at(i, j)));
  return m;
}

Matrix intersect_subspace_coords(const DvrLattice& A, const Matrix& W) {
  if (W.layer() != A.L || W.rows() != A.dim())
    fail(Err::BadInput, "subspace basis does not match the ambient space");
  // x = W u lies in A iff M u is integral for M = basis^{-1} W; the set of
  // such u is the dual of the lattice spanned by the rows of M.
  Matrix M = solve(A.basis, W);
  Matrix U = dvr_hnf(M.transpose());
  return inverse(U).transpose();
}

Matrix intersect_subspace(const DvrLattice& A, const Matrix& W) {
  return W * intersect_subspace_coords(A, W);
}

}  // namespace btlf
