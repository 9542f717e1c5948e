#include "btlf/endo_filt.hpp"

#include <algorithm>

namespace btlf {

namespace {

const FieldLayer* root_layer(const FieldLayer* L) {
  while (L->parent() != nullptr) L = L->parent();
  return L;
}

Rat rational_trace(FElem a) {
  while (a.L->parent() != nullptr) a = trace_to_parent(a);
  return a.c[0];
}

// column k of B2 times row l of B1inv, the (k,l) matrix unit transported
Matrix frame_unit(const Matrix& B2, const Matrix& B1inv, int k, int l) {
  const int n = B2.rows();
  Matrix M(B2.layer(), n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M.at(i, j) = B2.at(i, k) * B1inv.at(l, j);
  return M;
}

DvrLattice flat_span(const FieldLayer* F, const std::vector<Matrix>& gens) {
  const FieldLayer* Q = root_layer(F);
  const int d = F->deg();
  const int N = static_cast<int>(gens.size()) * d;
  Matrix flat(Q, N, N);
  int col = 0;
  for (const Matrix& g : gens)
    for (int c = 0; c < d; ++c) {
      Matrix scaled = F->monomial(c) * g;
      std::vector<FElem> entries;
      for (int i = 0; i < scaled.rows(); ++i)
        for (int j = 0; j < scaled.cols(); ++j) entries.push_back(scaled.at(i, j));
      flat.set_col(col++, flatten_vec(entries, Q));
    }
  return make_lattice(flat);
}

}  // namespace

std::vector<FElem> flatten_endo(const Matrix& a) {
  if (a.rows() != a.cols()) fail(Err::BadInput, "only square matrices can be flattened");
  std::vector<FElem> entries;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) entries.push_back(a.at(i, j));
  return flatten_vec(entries, root_layer(a.layer()));
}

Matrix unflatten_endo(const FieldLayer* F, int n, const std::vector<FElem>& v) {
  const int d = F->deg();
  if (static_cast<int>(v.size()) != n * n * d)
    fail(Err::DimensionMismatch, "flat vector has the wrong length");
  Matrix out(F, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      FElem e = F->zero();
      for (int c = 0; c < d; ++c) e.c[c] = v[(i * n + j) * d + c].c[0];
      out.at(i, j) = e;
    }
  return out;
}

DvrLattice hom_lattice_flat(const DvrLattice& L1, const DvrLattice& L2) {
  if (L1.L != L2.L || L1.dim() != L2.dim())
    fail(Err::BadInput, "hom lattice needs two lattices in the same space");
  const int n = L1.dim();
  Matrix B1inv = inverse(L1.basis);
  std::vector<Matrix> gens;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) gens.push_back(frame_unit(L2.basis, B1inv, k, l));
  return flat_span(L1.L, gens);
}

namespace {

DvrLattice end_flat_impl(const LatticeFunction& lf, const Rat& r, bool strict) {
  const int n = lf.dim();
  const long e = lf.L->e();
  Matrix Binv = inverse(lf.basis);
  std::vector<Matrix> gens;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      Rat x = Rat(e) * (r + lf.offsets[k] - lf.offsets[l]);
      long m = strict ? to_long(rat_floor(x)) + 1 : to_long(rat_ceil(x));
      gens.push_back(unif_pow(lf.L, m) * frame_unit(lf.basis, Binv, k, l));
    }
  return flat_span(lf.L, gens);
}

}  // namespace

DvrLattice end_lattice_flat(const LatticeFunction& lf, const Rat& r) {
  return end_flat_impl(lf, r, false);
}

DvrLattice end_lattice_flat_plus(const LatticeFunction& lf, const Rat& r) {
  return end_flat_impl(lf, r, true);
}

HermForm trace_pairing_form(const FieldLayer* F, int n) {
  const FieldLayer* Q = root_layer(F);
  const int d = F->deg();
  const int N = n * n * d;
  Matrix P(Q, N, N);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < d; ++c)
        for (int cc = 0; cc < d; ++cc) {
          Rat t = rational_trace(F->monomial(c) * F->monomial(cc));
          P.at((i * n + j) * d + c, (j * n + i) * d + cc) = Q->from_rat(t);
        }
  return make_form(Q, id_involution(Q), 1, P);
}

Matrix lie_subspace_frame(const HermForm& h) {
  const FieldLayer* F = h.F;
  const FieldLayer* Q = root_layer(F);
  const int n = h.dim();
  const int d = F->deg();
  const int N = n * n * d;
  Matrix T(Q, N, N);
  for (int u = 0; u < N; ++u) {
    std::vector<FElem> unit(N, Q->zero());
    unit[u] = Q->one();
    Matrix a = unflatten_endo(F, n, unit);
    T.set_col(u, flatten_endo(a + adjoint(h, a)));
  }
  return kernel(T);
}

FiltrationProfile make_profile(std::vector<Rat> candidates,
                               const std::function<DvrLattice(const Rat&)>& ev) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (candidates.empty()) fail(Err::BadInput, "a profile needs at least one candidate radius");
  if (candidates.front() <= 0 || candidates.back() > 1)
    fail(Err::BadInput, "profile candidates must lie in (0, 1]");

  std::vector<DvrLattice> vals;
  for (const Rat& r : candidates) vals.push_back(ev(r));

  FiltrationProfile pr;
  const int m = static_cast<int>(candidates.size());
  for (int i = 0; i < m; ++i) {
    DvrLattice next = i + 1 < m ? vals[i + 1] : scale_pi(vals[0], vals[0].L->e());
    if (vals[i] != next) {
      pr.jumps.push_back(candidates[i]);
      pr.values.push_back(vals[i]);
    }
  }
  if (pr.jumps.empty())
    fail(Err::BadInput, "internal: filtration has no jumps over a full period");
  return pr;
}

DvrLattice profile_value(const FiltrationProfile& pr, const Rat& r) {
  if (pr.jumps.empty()) fail(Err::BadInput, "empty filtration profile");
  const FieldLayer* L = pr.values[0].L;
  Int m = rat_ceil(r) - 1;
  Rat r0 = r - Rat(m);  // in (0, 1]
  auto it = std::lower_bound(pr.jumps.begin(), pr.jumps.end(), r0);
  DvrLattice base = it == pr.jumps.end()
                        ? scale_pi(pr.values[0], L->e())
                        : pr.values[it - pr.jumps.begin()];
  return scale_pi(base, to_long(m) * L->e());
}

namespace {

std::vector<Rat> joint_jumps(const FiltrationProfile& a, const FiltrationProfile& b) {
  std::vector<Rat> js = a.jumps;
  js.insert(js.end(), b.jumps.begin(), b.jumps.end());
  std::sort(js.begin(), js.end());
  js.erase(std::unique(js.begin(), js.end()), js.end());
  return js;
}

}  // namespace

bool profile_equal(const FiltrationProfile& a, const FiltrationProfile& b) {
  if (a.values.empty() || b.values.empty()) return a.values.empty() == b.values.empty();
  if (a.values[0].L != b.values[0].L || a.values[0].dim() != b.values[0].dim()) return false;
  for (const Rat& r : joint_jumps(a, b))
    if (!(profile_value(a, r) == profile_value(b, r))) return false;
  return true;
}

bool profile_contains(const FiltrationProfile& a, const FiltrationProfile& b) {
  if (a.values.empty() || b.values.empty()) return false;
  if (a.values[0].L != b.values[0].L || a.values[0].dim() != b.values[0].dim()) return false;
  for (const Rat& r : joint_jumps(a, b))
    if (!contains(profile_value(a, r), profile_value(b, r))) return false;
  return true;
}

std::vector<Rat> period_candidates(const std::vector<Rat>& classes, int e) {
  const Rat per(1, e);
  std::vector<Rat> out;
  for (const Rat& q : classes) {
    Rat c = rep_mod(q, per);
    for (int t = 0; t <= e; ++t) {
      Rat r = c + Rat(t) * per;
      if (r > 0 && r <= 1) out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FiltrationProfile end_profile(const LatticeFunction& lf) {
  std::vector<Rat> classes;
  for (const Rat& a : lf.offsets)
    for (const Rat& b : lf.offsets) classes.push_back(a - b);
  return make_profile(period_candidates(classes, lf.L->e()),
                      [&](const Rat& r) { return end_lattice_flat(lf, r); });
}

LatticeFunction recover_self_dual(const HermForm& h, const LatticeFunction& lf0) {
  LatticeFunction dual = dual_function(h, lf0);
  std::vector<FElem> b1 = lf0.basis.col(0);
  Rat c = norm_value(lf0, b1).get() - dual_norm_value(h, lf0, b1).get();
  if (function_equal(dual, translate(lf0, c))) return translate(lf0, Rat(c / 2));

  // Distinguish the two failure modes for the caller.
  if (!profile_equal(end_profile(lf0), end_profile(dual)))
    fail(Err::NotSigmaFixed, "endomorphism filtration is not stable under the adjoint");
  fail(Err::NotShiftRelated, "dual function is not a translate of the original");
}

}  // namespace btlf
