#include "btlf/latt_fun.hpp"

#include <algorithm>

namespace btlf {

namespace {

Matrix col_matrix(const FieldLayer* L, const std::vector<FElem>& x) {
  Matrix m(L, static_cast<int>(x.size()), 1);
  for (int i = 0; i < m.rows(); ++i) m.at(i, 0) = x[i];
  return m;
}

Matrix from_cols(const FieldLayer* L, int rows, const std::vector<std::vector<FElem>>& cols) {
  Matrix m(L, rows, static_cast<int>(cols.size()));
  for (int j = 0; j < m.cols(); ++j) m.set_col(j, cols[j]);
  return m;
}

void check_same_space(const LatticeFunction& a, const LatticeFunction& b) {
  if (a.L != b.L) fail(Err::BadInput, "lattice functions live over different layers");
  if (a.dim() != b.dim()) fail(Err::DimensionMismatch, "lattice functions have different rank");
}

}  // namespace

LatticeFunction make_lattice_function(const Matrix& basis, std::vector<Rat> offsets) {
  if (basis.rows() != basis.cols() || basis.rows() == 0)
    fail(Err::BadInput, "splitting basis must be square and nonempty");
  if (static_cast<int>(offsets.size()) != basis.cols())
    fail(Err::DimensionMismatch, "one offset per basis column required");
  if (rank(basis) != basis.rows()) fail(Err::BadInput, "splitting basis is singular");
  return LatticeFunction{basis.layer(), basis, std::move(offsets)};
}

LatticeFunction standard_function(const FieldLayer* L, int n) {
  return LatticeFunction{L, Matrix::identity(L, n), std::vector<Rat>(n, Rat(0))};
}

DvrLattice eval(const LatticeFunction& lf, const Rat& r) {
  Matrix gens = lf.basis;
  for (int k = 0; k < gens.cols(); ++k) {
    long m = to_long(rat_ceil(Rat(lf.L->e()) * (r + lf.offsets[k])));
    FElem s = unif_pow(lf.L, m);
    std::vector<FElem> c = gens.col(k);
    for (auto& entry : c) entry = entry * s;
    gens.set_col(k, c);
  }
  return make_lattice(gens);
}

DvrLattice eval_plus(const LatticeFunction& lf, const Rat& r) {
  Matrix gens = lf.basis;
  for (int k = 0; k < gens.cols(); ++k) {
    long m = to_long(rat_floor(Rat(lf.L->e()) * (r + lf.offsets[k]))) + 1;
    FElem s = unif_pow(lf.L, m);
    std::vector<FElem> c = gens.col(k);
    for (auto& entry : c) entry = entry * s;
    gens.set_col(k, c);
  }
  return make_lattice(gens);
}

std::vector<Rat> jump_reps(const LatticeFunction& lf) {
  Rat period(1, lf.L->e());
  std::vector<Rat> out;
  for (const Rat& l : lf.offsets) out.push_back(rep_mod(-l, period));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool function_equal(const LatticeFunction& a, const LatticeFunction& b) {
  if (a.L != b.L || a.dim() != b.dim()) return false;
  std::vector<Rat> js = jump_reps(a);
  for (const Rat& r : jump_reps(b)) js.push_back(r);
  std::sort(js.begin(), js.end());
  js.erase(std::unique(js.begin(), js.end()), js.end());
  for (const Rat& r : js)
    if (!(eval(a, r) == eval(b, r))) return false;
  return true;
}

LatticeFunction translate(const LatticeFunction& lf, const Rat& s) {
  LatticeFunction out = lf;
  for (Rat& l : out.offsets) l += s;
  return out;
}

LatticeFunction act(const Matrix& g, const LatticeFunction& lf) {
  if (g.layer() != lf.L || g.rows() != lf.dim() || g.cols() != lf.dim())
    fail(Err::DimensionMismatch, "group element does not act on this space");
  return make_lattice_function(g * lf.basis, lf.offsets);
}

Val norm_value(const LatticeFunction& lf, const std::vector<FElem>& x) {
  if (static_cast<int>(x.size()) != lf.dim())
    fail(Err::DimensionMismatch, "vector does not live in the ambient space");
  Matrix c = solve(lf.basis, col_matrix(lf.L, x));
  Val m = Val::infinity();
  for (int k = 0; k < lf.dim(); ++k) m = vmin(m, val(c.at(k, 0)) - lf.offsets[k]);
  return m;
}

Val dual_norm_value(const HermForm& h, const LatticeFunction& lf,
                    const std::vector<FElem>& x) {
  if (h.F != lf.L || h.dim() != lf.dim())
    fail(Err::BadInput, "form and lattice function do not match");
  Val m = Val::infinity();
  for (int k = 0; k < lf.dim(); ++k)
    m = vmin(m, val(h_apply(h, x, lf.basis.col(k))) + lf.offsets[k]);
  return m;
}

LatticeFunction dual_function(const HermForm& h, const LatticeFunction& lf) {
  if (h.F != lf.L || h.dim() != lf.dim())
    fail(Err::BadInput, "form and lattice function do not match");
  Matrix dualbasis = apply(h.sigma, inverse((h.gram * lf.basis).transpose()));
  std::vector<Rat> offs;
  for (const Rat& l : lf.offsets) offs.push_back(-l);
  return make_lattice_function(dualbasis, std::move(offs));
}

bool is_self_dual(const HermForm& h, const LatticeFunction& lf) {
  return function_equal(lf, dual_function(h, lf));
}

LatticeFunction canonicalize(const LatticeFunction& lf) {
  Rat period(1, lf.L->e());
  Matrix basis = lf.basis;
  std::vector<Rat> offs(lf.dim());
  for (int k = 0; k < lf.dim(); ++k) {
    Rat red = rep_mod(lf.offsets[k], period);
    long m = to_long(rat_ceil(Rat((lf.offsets[k] - red) / period)));
    FElem s = unif_pow(lf.L, m);
    std::vector<FElem> c = basis.col(k);
    for (auto& entry : c) entry = entry * s;
    basis.set_col(k, c);
    offs[k] = red;
  }
  std::vector<int> idx(lf.dim());
  for (int k = 0; k < lf.dim(); ++k) idx[k] = k;
  auto col_key = [&](int k) {
    std::string s;
    for (const FElem& entry : basis.col(k)) s += entry.str() + ";";
    return s;
  };
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (offs[a] != offs[b]) return offs[a] < offs[b];
    return col_key(a) < col_key(b);
  });
  std::vector<Rat> offs2;
  for (int k : idx) offs2.push_back(offs[k]);
  return LatticeFunction{lf.L, basis.cols_subset(idx), std::move(offs2)};
}

// ---------------------------------------------------------------------------
// common splitting

namespace {

// Incremental Gauss over the residue field o/pi.  Vectors are o-integral
// columns in a fixed frame; `extend` reports whether c is independent modulo
// pi of everything accepted so far (and if so, absorbs it).
class ResidueSpan {
 public:
  bool extend(std::vector<FElem> c) {
    for (auto& e : c) e = elem_mod(e, 1);
    for (size_t t = 0; t < cols_.size(); ++t) {
      FElem coef = c[pivot_row_[t]];
      if (coef.is_zero()) continue;
      for (size_t i = 0; i < c.size(); ++i)
        c[i] = elem_mod(c[i] - coef * cols_[t][i], 1);
    }
    int piv = -1;
    for (size_t i = 0; i < c.size(); ++i)
      if (!c[i].is_zero() && val(c[i]) == Val(0)) { piv = static_cast<int>(i); break; }
    if (piv < 0) return false;
    FElem s = inv(c[piv]);
    for (auto& e : c) e = elem_mod(e * s, 1);
    cols_.push_back(std::move(c));
    pivot_row_.push_back(piv);
    return true;
  }

 private:
  std::vector<std::vector<FElem>> cols_;
  std::vector<int> pivot_row_;
};

bool all_integral(const Matrix& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!is_integral(m.at(i, j))) return false;
  return true;
}

struct SplitEntry {
  std::vector<FElem> vec;  // ambient coordinates
  Rat off1, off2;
};

// Peels one maximizer of alpha - mu off the subspace spanned by W and
// recurses on a mu-split complement.
void common_split_rec(const LatticeFunction& A, const LatticeFunction& M,
                      const Matrix& W, std::vector<SplitEntry>& out) {
  const int k = W.cols();
  if (k == 0) return;
  const FieldLayer* L = A.L;
  const Rat period(1, L->e());

  // Jump radii of M in one period, with the wrap-around successor.
  std::vector<Rat> js = jump_reps(M);
  const int m = static_cast<int>(js.size());
  auto next_jump = [&](int i) { return i + 1 < m ? js[i + 1] : js[0] + period; };

  // Achieved lower bound for max(alpha - mu) on W: its own columns.
  Rat lb;
  bool have_lb = false;
  for (int j = 0; j < k; ++j) {
    std::vector<FElem> w = W.col(j);
    Rat d = norm_value(A, w).get() - norm_value(M, w).get();
    if (!have_lb || d > lb) { lb = d; have_lb = true; }
  }
  // Upper bound: for x with M-coordinates a, the A-coordinates are
  // solve(B, C) a, so alpha - mu <= -min(v(solve(C,B)_{kj}) + l_j - n_k).
  Matrix Q = solve(M.basis, A.basis);
  Rat ub;
  bool have_ub = false;
  for (int kk = 0; kk < A.dim(); ++kk)
    for (int j = 0; j < A.dim(); ++j) {
      Val v = val(Q.at(kk, j));
      if (!v.is_finite()) continue;
      Rat b = -(v.get() + A.offsets[j] - M.offsets[kk]);
      if (!have_ub || b > ub) { ub = b; have_ub = true; }
    }
  if (!have_ub || ub < lb) fail(Err::BadInput, "internal: slope bounds are inconsistent");

  // Candidate slopes: differences of offset classes, shifted into [lb, ub].
  std::vector<Rat> cands;
  std::vector<Rat> bases;
  for (const Rat& n : M.offsets)
    for (const Rat& l : A.offsets) bases.push_back(rep_mod(n - l, period));
  std::sort(bases.begin(), bases.end());
  bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
  for (const Rat& d : bases) {
    Int t0 = rat_ceil(Rat((lb - d) / period));
    Int t1 = rat_floor(Rat((ub - d) / period));
    for (Int t = t0; t <= t1; ++t) cands.push_back(d + Rat(t) * period);
  }
  std::sort(cands.begin(), cands.end(), std::greater<Rat>());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  // Scan slopes downward; the first t admitting a vector with
  // mu(x) = s, alpha(x) >= s + t is the maximum of alpha - mu on W.
  bool found = false;
  Rat cmax, s0;
  std::vector<FElem> u1;  // witness, W-frame coordinates
  for (const Rat& t : cands) {
    for (int i = 0; i < m && !found; ++i) {
      Matrix U1 = intersect_subspace_coords(eval(A, js[i] + t), W);
      Matrix U2 = intersect_subspace_coords(eval(M, next_jump(i)), W);
      Matrix T = solve(U2, U1);
      for (int j = 0; j < k && !found; ++j) {
        bool integral = true;
        for (int ii = 0; ii < k; ++ii)
          if (!is_integral(T.at(ii, j))) { integral = false; break; }
        if (!integral) {
          found = true;
          cmax = t;
          s0 = js[i];
          u1 = U1.col(j);
        }
      }
    }
    if (found) break;
  }
  if (!found) fail(Err::BadInput, "internal: maximizer scan found no witness");

  // Adapted basis of mu restricted to W: normalize the chain
  // N_1 > N_2 > ... > N_m > pi N_1 into the N_1 frame and pick vectors whose
  // residues extend a flag basis, deepest level first.  A vector accepted at
  // level i has mu = js[i] exactly, and the collection splits mu on W.
  Matrix Ufirst = intersect_subspace_coords(eval(M, js[0]), W);
  std::vector<std::vector<FElem>> sel;
  std::vector<Rat> tag;
  ResidueSpan span;
  for (int i = m - 1; i >= 0; --i) {
    Matrix Ai = solve(Ufirst, intersect_subspace_coords(eval(M, js[i]), W));
    for (int j = 0; j < k; ++j) {
      std::vector<FElem> c = Ai.col(j);
      if (span.extend(c)) {
        sel.push_back(c);
        tag.push_back(js[i]);
      }
    }
  }
  if (static_cast<int>(sel.size()) != k)
    fail(Err::BadInput, "internal: chain adaptation did not fill the space");

  // Exchange the witness into the adapted basis at the slot where its
  // coordinate attains mu(x1) = s0; the swapped family still splits mu.
  Matrix S = from_cols(L, k, sel);
  Matrix z = solve(Ufirst, col_matrix(L, u1));
  Matrix cvec = solve(S, z);
  int jstar = -1;
  Val best = Val::infinity();
  for (int j = 0; j < k; ++j) {
    Val v = val(cvec.at(j, 0)) + tag[j];
    if (v < best) { best = v; jstar = j; }
  }
  if (jstar < 0 || !(best == Val(s0)))
    fail(Err::BadInput, "internal: witness norm disagrees with the adapted basis");

  std::vector<FElem> x1 = mat_vec(W, u1);
  out.push_back(SplitEntry{x1, -(s0 + cmax), -s0});

  // Complement: the remaining adapted vectors, back in ambient coordinates.
  std::vector<int> keep;
  for (int j = 0; j < k; ++j)
    if (j != jstar) keep.push_back(j);
  Matrix Wnext = W * (Ufirst * S.cols_subset(keep));
  common_split_rec(A, M, Wnext, out);
}

}  // namespace

CommonSplit common_splitting(const LatticeFunction& lf1, const LatticeFunction& lf2) {
  check_same_space(lf1, lf2);
  std::vector<SplitEntry> entries;
  common_split_rec(lf1, lf2, Matrix::identity(lf1.L, lf1.dim()), entries);

  CommonSplit cs;
  std::vector<std::vector<FElem>> cols;
  for (const SplitEntry& en : entries) {
    cols.push_back(en.vec);
    cs.off1.push_back(en.off1);
    cs.off2.push_back(en.off2);
  }
  cs.basis = from_cols(lf1.L, lf1.dim(), cols);

  if (!function_equal(make_lattice_function(cs.basis, cs.off1), lf1) ||
      !function_equal(make_lattice_function(cs.basis, cs.off2), lf2))
    fail(Err::BadInput, "internal: common splitting failed verification");
  return cs;
}

LatticeFunction barycenter(const Rat& t, const LatticeFunction& lf1,
                           const LatticeFunction& lf2) {
  if (t < 0 || t > 1) fail(Err::ParameterOutOfRange, "barycenter parameter must lie in [0,1]");
  CommonSplit cs = common_splitting(lf1, lf2);
  std::vector<Rat> offs;
  for (size_t k = 0; k < cs.off1.size(); ++k)
    offs.push_back(Rat(t * cs.off1[k]) + Rat((Rat(1) - t) * cs.off2[k]));
  return make_lattice_function(cs.basis, std::move(offs));
}

std::vector<FElem> flatten_vec(const std::vector<FElem>& x, const FieldLayer* F) {
  if (x.empty()) fail(Err::BadInput, "cannot flatten an empty vector");
  const FieldLayer* L = x[0].L;
  if (!is_ancestor(F, L)) fail(Err::BadInput, "flatten target is not a subfield of the layer");
  const int fd = F->deg();
  const int g = L->deg() / fd;
  std::vector<FElem> out;
  out.reserve(x.size() * g);
  for (const FElem& entry : x)
    for (int c = 0; c < g; ++c) {
      FElem piece = F->zero();
      for (int i = 0; i < fd; ++i) piece.c[i] = entry.c[c * fd + i];
      out.push_back(piece);
    }
  return out;
}

LatticeFunction restrict_scalars(const LatticeFunction& lf, const FieldLayer* F) {
  if (!is_ancestor(F, lf.L))
    fail(Err::BadInput, "restriction target is not a subfield of the layer");
  if (F == lf.L) return lf;
  const int fd = F->deg();
  const int g = lf.L->deg() / fd;
  const int n = lf.dim();
  Matrix basis(F, n * g, n * g);
  std::vector<Rat> offs(n * g);
  for (int k = 0; k < n; ++k) {
    std::vector<FElem> bk = lf.basis.col(k);
    for (int c = 0; c < g; ++c) {
      FElem mc = lf.L->monomial(c * fd);
      std::vector<FElem> scaled = bk;
      for (auto& e : scaled) e = e * mc;
      basis.set_col(k * g + c, flatten_vec(scaled, F));
      offs[k * g + c] = lf.offsets[k] - lf.L->basis_val(c * fd);
    }
  }
  return make_lattice_function(basis, std::move(offs));
}

}  // namespace btlf
