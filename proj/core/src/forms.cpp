#include "btlf/forms.hpp"

namespace btlf {

FormCase HermForm::kind() const {
  if (!sigma.trivial()) return FormCase::unitary;
  return eps == 1 ? FormCase::orthogonal : FormCase::symplectic;
}

HermForm make_form(const FieldLayer* F, const LayerInvolution& sigma, int eps,
                   const Matrix& gram) {
  if (eps != 1 && eps != -1) fail(Err::BadInput, "epsilon must be +1 or -1");
  if (sigma.L != F || gram.layer() != F) fail(Err::BadInput, "form pieces live in different layers");
  if (gram.rows() != gram.cols()) fail(Err::DimensionMismatch, "gram matrix is not square");
  if (!(gram.transpose() == Rat(eps) * apply(sigma, gram)))
    fail(Err::BadInput, "gram matrix does not have the required symmetry");
  if (det(gram).is_zero()) fail(Err::BadInput, "gram matrix is singular");
  return HermForm{F, sigma, eps, gram};
}

FElem h_apply(const HermForm& h, const std::vector<FElem>& x, const std::vector<FElem>& y) {
  if (static_cast<int>(x.size()) != h.dim() || static_cast<int>(y.size()) != h.dim())
    fail(Err::DimensionMismatch, "vector size does not match the form");
  FElem s = h.F->zero();
  for (int i = 0; i < h.dim(); ++i) {
    if (x[i].is_zero()) continue;
    FElem xi = h.sigma(x[i]);
    for (int j = 0; j < h.dim(); ++j) {
      if (h.gram.at(i, j).is_zero() || y[j].is_zero()) continue;
      s = s + xi * h.gram.at(i, j) * y[j];
    }
  }
  return s;
}

Matrix gram_on(const HermForm& h, const Matrix& W) {
  return apply(h.sigma, W).transpose() * h.gram * W;
}

Matrix adjoint(const HermForm& h, const Matrix& a) {
  return solve(h.gram, apply(h.sigma, a).transpose() * h.gram);
}

HermForm scale_form(const FElem& u, const HermForm& h) {
  if (!(h.sigma(u) == u)) fail(Err::BadInput, "form scale must be sigma-fixed");
  if (u.is_zero()) fail(Err::BadInput, "form scale must be invertible");
  return HermForm{h.F, h.sigma, h.eps, u * h.gram};
}

DvrLattice dual_lattice(const HermForm& h, const DvrLattice& M) {
  if (M.L != h.F || M.dim() != h.dim()) fail(Err::BadInput, "lattice does not match the form");
  // h(x, b_j) in p_F for all columns b_j of the basis B says sigma(x) lies in
  // the lattice spanned by pi ((G B)^T)^{-1}.
  Matrix GB = h.gram * M.basis;
  Matrix Y = h.F->uniformizer() * inverse(GB.transpose());
  return make_lattice(apply(h.sigma, Y));
}

Val omega_value(const HermForm& h, const std::vector<FElem>& x) {
  Val v = val(h_apply(h, x, x));
  return v.is_finite() ? Val(v.get() / 2) : v;
}

int hilbert_symbol_layer(const FElem& a, const FElem& b) {
  const FieldLayer* L = a.L;
  if (b.L != L) fail(Err::BadInput, "hilbert symbol needs both entries in one layer");
  if (a.is_zero() || b.is_zero()) fail(Err::BadInput, "hilbert symbol of zero");
  auto split = [&](const FElem& x, long& par, FElem& u) {
    Rat t = val(x).get() * L->e();
    par = to_long(numerator(t)) & 1L;
    u = x * unif_pow(L, -to_long(numerator(t)));
  };
  long alpha, beta;
  FElem u = L->zero(), w = L->zero();
  split(a, alpha, u);
  split(b, beta, w);
  int s = 1;
  if (beta && !is_square_in_completion(u)) s = -s;
  if (alpha && !is_square_in_completion(w)) s = -s;
  if (alpha && beta && !is_square_in_completion(-L->one())) s = -s;
  return s;
}

namespace {

std::vector<FElem> col_of(const Matrix& M, int j) { return M.col(j); }

std::vector<FElem> add_scaled(const std::vector<FElem>& x, const FElem& c,
                              const std::vector<FElem>& y) {
  std::vector<FElem> r = x;
  for (size_t i = 0; i < r.size(); ++i) r[i] = r[i] + c * y[i];
  return r;
}

bool vec_is_zero(const std::vector<FElem>& x) {
  for (const auto& e : x)
    if (!e.is_zero()) return false;
  return true;
}

// Orthogonal basis of the space spanned by the columns of W with respect to
// h; valid for eps-hermitian forms that are not symplectic.
struct DiagBasis {
  Matrix U;                 // ambient x k, pairwise orthogonal columns
  std::vector<FElem> d;     // h(u_i, u_i), all nonzero
};

DiagBasis diagonalize_on(const HermForm& h, Matrix W) {
  const FieldLayer* F = h.F;
  DiagBasis out;
  out.U = Matrix(F, W.rows(), 0);
  while (W.cols() > 0) {
    const int k = W.cols();
    // find a vector with nonzero square norm: columns, then column pairs
    // twisted by a monomial (some monomial always works unless symplectic)
    std::vector<FElem> v;
    for (int j = 0; j < k && v.empty(); ++j) {
      auto c = col_of(W, j);
      if (!h_apply(h, c, c).is_zero()) v = c;
    }
    for (int i = 0; i < k && v.empty(); ++i)
      for (int j = i + 1; j < k && v.empty(); ++j)
        for (int m = 0; m < F->deg() && v.empty(); ++m) {
          auto c = add_scaled(col_of(W, i), F->monomial(m), col_of(W, j));
          if (!h_apply(h, c, c).is_zero()) v = c;
        }
    if (v.empty()) fail(Err::BadInput, "form cannot be diagonalized");
    FElem dv = h_apply(h, v, v);
    // project the remaining columns onto the orthogonal complement of v
    Matrix Wn(F, W.rows(), 0);
    FElem dv_inv = inv(dv);
    for (int j = 0; j < k; ++j) {
      auto c = col_of(W, j);
      auto proj = add_scaled(c, -(h_apply(h, v, c) * dv_inv), v);
      if (vec_is_zero(proj)) continue;
      Matrix one(F, W.rows(), 1);
      for (int i = 0; i < W.rows(); ++i) one.at(i, 0) = proj[i];
      Wn = Wn.cols() ? hstack(Wn, one) : one;
    }
    // keep only an independent subset of the projections
    if (Wn.cols() > 0) {
      Matrix sel(F, W.rows(), 0);
      for (int j = 0; j < Wn.cols(); ++j) {
        Matrix cand = sel.cols() ? hstack(sel, Wn.cols_subset({j})) : Wn.cols_subset({j});
        if (rank(cand) == cand.cols()) sel = cand;
      }
      Wn = sel;
    }
    Matrix vm(F, W.rows(), 1);
    for (int i = 0; i < W.rows(); ++i) vm.at(i, 0) = v[i];
    out.U = out.U.cols() ? hstack(out.U, vm) : vm;
    out.d.push_back(dv);
    W = Wn;
  }
  return out;
}

// --- p-adic isotropy decisions on diagonal forms ---------------------------

int hilbert_rat(const FieldLayer* Q, const Rat& a, const Rat& b) {
  return hilbert_symbol_layer(Q->from_rat(a), Q->from_rat(b));
}

// <a, b, c> isotropic over the completion of Q
bool ternary_isotropic(const FieldLayer* Q, const Rat& a, const Rat& b, const Rat& c) {
  return hilbert_rat(Q, -b / a, -c / a) == 1;
}

// <a, b> represents t over the completion of Q
bool binary_represents(const FieldLayer* Q, const Rat& a, const Rat& b, const Rat& t) {
  return ternary_isotropic(Q, a, b, -t);
}

bool quaternary_isotropic(const FieldLayer* Q, const std::vector<Rat>& d) {
  long p = Q->p();
  long nr = 2;
  while (legendre(Rat(nr), p) == 1) ++nr;  // least nonresidue
  const Rat cls[4] = {Rat(1), Rat(nr), Rat(p), Rat(nr) * p};
  for (const Rat& t : cls)
    if (binary_represents(Q, d[0], d[1], t) && binary_represents(Q, d[2], d[3], -t))
      return true;
  return false;
}

// anti-fixed monomial of a nontrivial involution
FElem anti_monomial(const LayerInvolution& sigma) {
  for (int i = 0; i < sigma.L->deg(); ++i)
    if (sigma.signs[i] < 0) return sigma.L->monomial(i);
  fail(Err::BadInput, "involution is trivial");
}

// whether z (sigma-fixed) is a norm from the layer of sigma down to its fixed
// field, decided in the completion
bool is_local_norm(const LayerInvolution& sigma, const FixedSubfield& fx, const FElem& z) {
  FElem g0 = anti_monomial(sigma);
  FElem q_sub = fx.from_big(g0 * g0);
  FElem z_sub = fx.from_big(z);
  return hilbert_symbol_layer(z_sub, q_sub) == 1;
}

bool diag_padically_isotropic(const HermForm& h, const std::vector<FElem>& d) {
  const int k = static_cast<int>(d.size());
  if (k <= 1) return false;
  if (!h.sigma.trivial()) {
    if (k >= 3) return true;  // hermitian forms of rank 3 are always isotropic locally
    FixedSubfield fx = fixed_subfield(h.sigma);
    return is_local_norm(h.sigma, fx, -(d[0] * inv(d[1])));
  }
  if (k == 2) return is_square_in_completion(-(d[0] * inv(d[1])));
  if (h.F->deg() > 1)
    fail(Err::UnsupportedDimension,
         "quadratic forms of rank >= 3 over a proper extension are not supported");
  std::vector<Rat> r;
  for (const auto& x : d) r.push_back(x.c[0]);
  if (k == 3) return ternary_isotropic(h.F, r[0], r[1], r[2]);
  if (k == 4) return quaternary_isotropic(h.F, r);
  return true;  // rank >= 5 over Q_p
}

// --- rational witness construction -----------------------------------------

// Solve sigma(s) s = m for s in the layer of sigma; m must be sigma-fixed.
std::optional<FElem> solve_norm(const LayerInvolution& sigma, const FixedSubfield& fx,
                                const FElem& m) {
  const FieldLayer* E = sigma.L;
  FElem g0 = anti_monomial(sigma);
  FElem q_big = g0 * g0;
  FElem m_sub = fx.from_big(m);
  FElem q_sub = fx.from_big(q_big);
  // s = x + g0 y with x, y in the fixed field: x^2 - q y^2 = m
  static const Rat grid[] = {Rat(0),     Rat(1),     Rat(-1),    Rat(2),  Rat(-2),
                             Rat(3),     Rat(-3),    Rat(1, 2),  Rat(-1, 2),
                             Rat(3, 2),  Rat(-3, 2), Rat(1, 3),  Rat(-1, 3),
                             Rat(4),     Rat(-4),    Rat(6),     Rat(-6)};
  for (int mono = 0; mono < fx.sub->deg(); ++mono) {
    for (const Rat& r : grid) {
      FElem y = r * fx.sub->monomial(mono);
      FElem target = m_sub + q_sub * (y * y);
      if (auto x = sqrt_in_layer(target)) {
        FElem s = fx.to_big(*x) + g0 * fx.to_big(y);
        if (sigma(s) * s == m) return s;
      }
    }
  }
  return std::nullopt;
}

// Isotropic vector of the diagonalized form, in ambient coordinates.
std::optional<std::vector<FElem>> find_witness(const HermForm& h, const DiagBasis& db) {
  const int k = static_cast<int>(db.d.size());
  const bool unitary = !h.sigma.trivial();
  FixedSubfield fx;
  if (unitary) fx = fixed_subfield(h.sigma);

  // pairs
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      FElem m = -(db.d[i] * inv(db.d[j]));
      if (!unitary) {
        if (auto s = sqrt_in_layer(m)) {
          auto wit = add_scaled(col_of(db.U, i), *s, col_of(db.U, j));
          if (h_apply(h, wit, wit).is_zero()) return wit;
        }
      } else {
        if (auto s = solve_norm(h.sigma, fx, m)) {
          auto wit = add_scaled(col_of(db.U, i), *s, col_of(db.U, j));
          if (h_apply(h, wit, wit).is_zero()) return wit;
        }
      }
    }

  // triples
  std::vector<Rat> grid;
  for (int num = -6; num <= 6; ++num)
    for (int den : {1, 2, 3})
      if (num != 0) grid.push_back(Rat(num, den));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < k; ++l) {
        if (i == j || i == l || j == l) continue;
        if (!unitary) {
          for (const Rat& s : grid)
            for (const Rat& t : grid) {
              FElem vvalue = db.d[i] + s * s * db.d[j] + t * t * db.d[l];
              if (!vvalue.is_zero()) continue;
              auto wit = add_scaled(add_scaled(col_of(db.U, i), h.F->from_rat(s), col_of(db.U, j)),
                                    h.F->from_rat(t), col_of(db.U, l));
              if (h_apply(h, wit, wit).is_zero()) return wit;
            }
        } else {
          std::vector<FElem> svals;
          for (const Rat& s : grid) svals.push_back(h.F->from_rat(s));
          svals.push_back(anti_monomial(h.sigma));
          for (const auto& s : svals) {
            FElem m = -(db.d[i] + h.sigma(s) * s * db.d[j]) * inv(db.d[l]);
            if (m.is_zero()) continue;
            if (auto t = solve_norm(h.sigma, fx, m)) {
              auto wit = add_scaled(add_scaled(col_of(db.U, i), s, col_of(db.U, j)), *t,
                                    col_of(db.U, l));
              if (h_apply(h, wit, wit).is_zero()) return wit;
            }
          }
        }
      }
  return std::nullopt;
}

}  // namespace

bool padically_isotropic(const HermForm& h) {
  if (h.kind() == FormCase::symplectic) return h.dim() >= 2;
  HermForm work = h;
  if (!h.sigma.trivial() && h.eps == -1)
    work = HermForm{h.F, h.sigma, 1, anti_monomial(h.sigma) * h.gram};
  DiagBasis db = diagonalize_on(work, Matrix::identity(h.F, h.dim()));
  return diag_padically_isotropic(work, db.d);
}

WittDecomposition witt_decompose(const HermForm& h) {
  const FieldLayer* F = h.F;
  const int n = h.dim();
  if (n > 8) fail(Err::UnsupportedDimension, "forms beyond dimension 8 are not supported");

  WittDecomposition out;
  out.aniso = Matrix(F, n, 0);

  Matrix W = Matrix::identity(F, n);

  auto complement = [&](const std::vector<FElem>& v, const std::vector<FElem>& f) {
    // basis of {x in span W : h(v, x) = h(f, x) = 0}
    Matrix rows(F, 2, W.cols());
    for (int j = 0; j < W.cols(); ++j) {
      auto c = col_of(W, j);
      rows.at(0, j) = h_apply(h, v, c);
      rows.at(1, j) = h_apply(h, f, c);
    }
    Matrix K = kernel(rows);
    W = W * K;
  };

  if (h.kind() == FormCase::symplectic) {
    while (W.cols() > 0) {
      std::vector<FElem> v = col_of(W, 0);
      int jw = -1;
      for (int j = 1; j < W.cols(); ++j)
        if (!h_apply(h, v, col_of(W, j)).is_zero()) { jw = j; break; }
      if (jw < 0) fail(Err::BadInput, "restriction of the form is degenerate");
      std::vector<FElem> f = col_of(W, jw);
      FElem c = inv(h_apply(h, v, f));
      for (auto& x : f) x = c * x;
      out.e.push_back(v);
      out.f.push_back(f);
      complement(v, f);
    }
  } else {
    // for anti-hermitian unitary forms run the search on a hermitian twist
    HermForm work = h;
    if (!h.sigma.trivial() && h.eps == -1)
      work = HermForm{F, h.sigma, 1, anti_monomial(h.sigma) * h.gram};

    while (W.cols() > 0) {
      HermForm hw = make_form(F, h.sigma, work.eps, gram_on(work, W));
      DiagBasis db = diagonalize_on(hw, Matrix::identity(F, W.cols()));
      if (!diag_padically_isotropic(hw, db.d)) {
        if (W.cols() > 2)
          fail(Err::AnisotropicTooLarge,
               "anisotropic kernel has dimension " + std::to_string(W.cols()));
        // orthogonalize the kernel with respect to the original form
        HermForm hk = make_form(F, h.sigma, h.eps, gram_on(h, W));
        DiagBasis dk = diagonalize_on(hk, Matrix::identity(F, W.cols()));
        out.aniso = W * dk.U;
        for (int j = 0; j < out.aniso.cols(); ++j) {
          auto c = col_of(out.aniso, j);
          out.aniso_diag.push_back(h_apply(h, c, c));
        }
        break;
      }
      auto wit = find_witness(hw, db);
      if (!wit)
        fail(Err::IsotropySearchFailed,
             "form is isotropic in the completion but no witness was found");
      // back to ambient coordinates
      std::vector<FElem> v(n, F->zero());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < W.cols(); ++j) v[i] = v[i] + W.at(i, j) * (*wit)[j];
      int jw = -1;
      for (int j = 0; j < W.cols(); ++j)
        if (!h_apply(h, v, col_of(W, j)).is_zero()) { jw = j; break; }
      if (jw < 0) fail(Err::BadInput, "restriction of the form is degenerate");
      std::vector<FElem> w = col_of(W, jw);
      FElem c = inv(h_apply(h, v, w));
      for (auto& x : w) x = c * x;  // h(v, w) = 1
      FElem hw_val = h_apply(h, w, w);
      FElem cc = h.eps == 1 ? Rat(1, 2) * hw_val : Rat(-1, 2) * hw_val;
      std::vector<FElem> f = add_scaled(w, -cc, v);
      out.e.push_back(v);
      out.f.push_back(f);
      complement(v, f);
    }
  }

  // full verification of the assembled decomposition
  const int r = out.witt_index();
  if (2 * r + out.aniso.cols() != n) fail(Err::BadInput, "decomposition does not span");
  Matrix all(F, n, n);
  for (int i = 0; i < r; ++i)
    for (int row = 0; row < n; ++row) {
      all.at(row, 2 * i) = out.e[i][row];
      all.at(row, 2 * i + 1) = out.f[i][row];
    }
  for (int j = 0; j < out.aniso.cols(); ++j)
    for (int row = 0; row < n; ++row) all.at(row, 2 * r + j) = out.aniso.at(row, j);
  Matrix g = gram_on(h, all);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      FElem expect = F->zero();
      if (i < 2 * r && j < 2 * r) {
        int bi = i / 2, bj = j / 2;
        if (bi == bj) {
          if (i % 2 == 0 && j % 2 == 1) expect = F->one();
          if (i % 2 == 1 && j % 2 == 0) expect = Rat(h.eps) * F->one();
        }
      } else if (i == j) {
        expect = out.aniso_diag[i - 2 * r];
      }
      if (!(g.at(i, j) == expect)) fail(Err::BadInput, "decomposition failed verification");
    }
  return out;
}

}  // namespace btlf
