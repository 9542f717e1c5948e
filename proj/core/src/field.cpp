#include "btlf/field.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace btlf {

namespace {

Rat qpow(long p, long k) {
  Int pw = 1;
  for (long i = 0; i < (k >= 0 ? k : -k); ++i) pw *= p;
  return k >= 0 ? Rat(pw) : Rat(1, pw);
}

// Dense rational Gauss-Jordan; returns false when the system is
// inconsistent.  Free variables are set to zero.
bool solve_rat_system(std::vector<std::vector<Rat>> A, std::vector<Rat> b,
                      std::vector<Rat>& out) {
  const size_t rows = A.size(), cols = rows ? A[0].size() : 0;
  out.assign(cols, Rat(0));
  std::vector<long> pivot_col(rows, -1);
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t pr = r;
    while (pr < rows && A[pr][c] == 0) ++pr;
    if (pr == rows) continue;
    std::swap(A[pr], A[r]);
    std::swap(b[pr], b[r]);
    Rat inv_p = Rat(1) / A[r][c];
    for (size_t cc = c; cc < cols; ++cc) A[r][cc] *= inv_p;
    b[r] *= inv_p;
    for (size_t rr = 0; rr < rows; ++rr) {
      if (rr == r || A[rr][c] == 0) continue;
      Rat f = A[rr][c];
      for (size_t cc = c; cc < cols; ++cc) A[rr][cc] -= f * A[r][cc];
      b[rr] -= f * b[r];
    }
    pivot_col[r] = static_cast<long>(c);
    ++r;
  }
  for (size_t rr = r; rr < rows; ++rr)
    if (b[rr] != 0) return false;
  for (size_t rr = 0; rr < r; ++rr) out[pivot_col[rr]] = b[rr];
  return true;
}

void check_same_layer(const FElem& a, const FElem& b) {
  if (a.L != b.L) fail(Err::BadInput, "elements live in different layers");
}

}  // namespace

// ---------------------------------------------------------------------------
// Layer construction and interning.

Int FieldLayer::residue_size() const {
  Int s = 1;
  for (int i = 0; i < f_; ++i) s *= p_;
  return s;
}

FElem FieldLayer::zero() const { return FElem{this, std::vector<Rat>(deg_, Rat(0))}; }

FElem FieldLayer::one() const { return from_rat(Rat(1)); }

FElem FieldLayer::from_rat(const Rat& q) const {
  std::vector<Rat> c(deg_, Rat(0));
  c[0] = q;
  return FElem{this, std::move(c)};
}

FElem FieldLayer::monomial(int i) const {
  if (i < 0 || i >= deg_) fail(Err::BadInput, "monomial index out of range");
  std::vector<Rat> c(deg_, Rat(0));
  c[i] = 1;
  return FElem{this, std::move(c)};
}

FElem FieldLayer::uniformizer() const { return FElem{this, unif_coords_}; }

const FieldLayer* Tower::rationals(long p) {
  if (!is_odd_prime(p))
    fail(Err::UnsupportedResidueChar, "residue characteristic must be an odd prime, got " + std::to_string(p));
  static std::mutex mu;
  static std::map<long, std::unique_ptr<FieldLayer>> base_pool;
  std::lock_guard<std::mutex> lock(mu);
  auto it = base_pool.find(p);
  if (it != base_pool.end()) return it->second.get();
  auto L = std::unique_ptr<FieldLayer>(new FieldLayer());
  L->p_ = p;
  L->deg_ = 1;
  L->e_ = 1;
  L->f_ = 1;
  L->basis_val_ = {Rat(0)};
  L->top_mask_ = {false};
  L->parent_mask_ = {false};
  L->mult_ = {{Rat(1)}};
  L->unif_coords_ = {Rat(p)};
  L->name_ = "Q";
  const FieldLayer* out = L.get();
  base_pool[p] = std::move(L);
  return out;
}

namespace {

// x^((p^f - 1)/2) mod pi, for a unit x; decides squareness of the residue.
bool residue_is_square(const FElem& x) {
  const FieldLayer* L = x.L;
  Int m = (L->residue_size() - 1) / 2;
  FElem acc = elem_mod(L->one(), 1);
  FElem base = elem_mod(x, 1);
  while (m > 0) {
    if (m % 2 == 1) acc = elem_mod(acc * base, 1);
    base = elem_mod(base * base, 1);
    m /= 2;
  }
  if (elem_mod(acc - L->one(), 1).is_zero()) return true;
  if (elem_mod(acc + L->one(), 1).is_zero()) return false;
  fail(Err::BadInput, "residue square test applied to a non-unit");
}

}  // namespace

bool is_square_in_completion(const FElem& x) {
  if (x.is_zero()) fail(Err::BadInput, "square test on zero");
  Rat t = val(x).get() * x.L->e();
  if (denominator(t) != 1) fail(Err::BadInput, "valuation outside the value group");
  Int ti = numerator(t);
  if (ti % 2 != 0) return false;
  long k = to_long(ti);
  FElem u = x * unif_pow(x.L, -k);
  return residue_is_square(u);
}

std::pair<FElem, FElem> reduce_square_class(const FElem& mu) {
  if (mu.is_zero()) fail(Err::BadInput, "square class of zero");
  // v(mu / s^2) in [0, 2/e) with s = pi^m, m = floor(v(mu) e / 2).
  Rat t = val(mu).get() * mu.L->e();
  long m = to_long(rat_floor(t / 2));
  FElem s = unif_pow(mu.L, m);
  return {mu * inv(s * s), s};
}

const FieldLayer* Tower::quadratic(const FieldLayer* base, const Rat& d) {
  if (d == 0) fail(Err::BadInput, "generator square must be nonzero");
  return quadratic(base, base->from_rat(d));
}

const FieldLayer* Tower::quadratic(const FieldLayer* base, const FElem& mu_in) {
  if (mu_in.L != base) fail(Err::BadInput, "generator square must live in the base layer");
  if (mu_in.is_zero()) fail(Err::BadInput, "generator square must be nonzero");
  FElem mu = reduce_square_class(mu_in).first;
  if (base->deg() >= 4)
    fail(Err::UnsupportedTower, "at most two quadratic layers over Q are supported");
  if (is_square_in_completion(mu))
    fail(Err::DegenerateExtension,
         "generator square " + mu.str() + " is a square in the completion");

  static std::mutex pool_mu;
  struct Entry {
    const FieldLayer* parent;
    std::vector<Rat> mu;
    std::unique_ptr<FieldLayer> layer;
  };
  static std::vector<Entry> pool;
  std::lock_guard<std::mutex> lock(pool_mu);
  for (const auto& ent : pool)
    if (ent.parent == base && ent.mu == mu.c) return ent.layer.get();

  const int dp = base->deg();
  auto L = std::unique_ptr<FieldLayer>(new FieldLayer());
  L->p_ = base->p();
  L->parent_ = base;
  L->deg_ = 2 * dp;
  L->mu_coords_ = mu.c;

  Rat gen_val = val(mu).get() / 2;
  Rat t = gen_val * 2 * base->e();  // v(mu) * e_base, an integer
  bool ramified = numerator(t) % 2 != 0;
  L->e_ = ramified ? 2 * base->e() : base->e();
  L->f_ = L->deg_ / L->e_;

  L->basis_val_.resize(L->deg_);
  L->top_mask_.resize(L->deg_);
  L->parent_mask_.resize(L->deg_);
  for (int i = 0; i < dp; ++i) {
    L->basis_val_[i] = base->basis_val(i);
    L->basis_val_[dp + i] = base->basis_val(i) + gen_val;
    L->top_mask_[i] = false;
    L->top_mask_[dp + i] = true;
    L->parent_mask_[i] = base->has_top_gen(i);
    L->parent_mask_[dp + i] = base->has_top_gen(i);
  }

  // b_i b_j via the parent table; a g-power of two folds in mu.
  L->mult_.assign(L->deg_ * L->deg_, {});
  for (int i = 0; i < L->deg_; ++i) {
    for (int j = 0; j < L->deg_; ++j) {
      int il = i % dp, ih = i / dp, jl = j % dp, jh = j / dp;
      FElem prod = FElem{base, base->mult(il, jl)};
      int h = ih + jh;
      if (h == 2) prod = prod * mu;
      std::vector<Rat> flat(L->deg_, Rat(0));
      for (int k = 0; k < dp; ++k) flat[(h == 1 ? dp : 0) + k] = prod.c[k];
      L->mult_[i * L->deg_ + j] = std::move(flat);
    }
  }

  L->unif_coords_.assign(L->deg_, Rat(0));
  bool found = false;
  for (int i = 0; i < L->deg_ && !found; ++i) {
    Rat k = L->basis_val_[i] - Rat(1, L->e_);
    if (denominator(k) == 1) {
      L->unif_coords_[i] = qpow(L->p_, -to_long(numerator(k)));
      found = true;
    }
  }
  if (!found) fail(Err::UnsupportedTower, "no monomial uniformizer; basis is not adapted");

  L->name_ = base->name() + "(sqrt " + mu.str() + ")";
  const FieldLayer* out = L.get();
  pool.push_back(Entry{base, mu.c, std::move(L)});
  return out;
}

bool is_ancestor(const FieldLayer* anc, const FieldLayer* l) {
  for (const FieldLayer* w = l; w; w = w->parent())
    if (w == anc) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Element arithmetic.

bool FElem::is_zero() const {
  for (const auto& q : c)
    if (q != 0) return false;
  return true;
}

std::string FElem::str() const {
  static const char* names4[] = {"", "w1", "w2", "w1*w2"};
  static const char* names2[] = {"", "w1"};
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    if (!first) os << " + ";
    os << rat_str(c[i]);
    const char* nm = L->deg() == 4 ? names4[i] : (L->deg() == 2 ? names2[i] : "");
    if (*nm) os << "*" << nm;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

FElem operator+(const FElem& a, const FElem& b) {
  check_same_layer(a, b);
  FElem r = a;
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
  return r;
}

FElem operator-(const FElem& a, const FElem& b) {
  check_same_layer(a, b);
  FElem r = a;
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i];
  return r;
}

FElem operator-(const FElem& a) {
  FElem r = a;
  for (auto& q : r.c) q = -q;
  return r;
}

FElem operator*(const FElem& a, const FElem& b) {
  check_same_layer(a, b);
  const int d = a.L->deg();
  FElem r = a.L->zero();
  for (int i = 0; i < d; ++i) {
    if (a.c[i] == 0) continue;
    for (int j = 0; j < d; ++j) {
      if (b.c[j] == 0) continue;
      Rat f = a.c[i] * b.c[j];
      const auto& m = a.L->mult(i, j);
      for (int k = 0; k < d; ++k)
        if (m[k] != 0) r.c[k] += f * m[k];
    }
  }
  return r;
}

FElem operator*(const Rat& q, const FElem& a) {
  FElem r = a;
  for (auto& x : r.c) x *= q;
  return r;
}

bool operator==(const FElem& a, const FElem& b) {
  return a.L == b.L && a.c == b.c;
}

namespace {

// Split into a + b*g over the parent layer.
std::pair<FElem, FElem> parent_pair(const FElem& x) {
  const FieldLayer* P = x.L->parent();
  if (!P) fail(Err::BadInput, "base layer has no parent decomposition");
  const int dp = P->deg();
  FElem a{P, std::vector<Rat>(x.c.begin(), x.c.begin() + dp)};
  FElem b{P, std::vector<Rat>(x.c.begin() + dp, x.c.end())};
  return {a, b};
}

FElem from_parent_pair(const FieldLayer* L, const FElem& a, const FElem& b) {
  std::vector<Rat> c(a.c);
  c.insert(c.end(), b.c.begin(), b.c.end());
  return FElem{L, std::move(c)};
}

}  // namespace

FElem inv(const FElem& a) {
  if (a.is_zero()) fail(Err::RankDeficient, "division by zero");
  if (a.L->deg() == 1) return a.L->from_rat(Rat(1) / a.c[0]);
  FElem nrm = norm_to_parent(a);
  FElem n_inv = lift(inv(nrm), a.L);
  return conj_top(a) * n_inv;
}

Val val(const FElem& a) {
  Val m;  // infinity
  for (int i = 0; i < a.L->deg(); ++i) {
    if (a.c[i] == 0) continue;
    m = vmin(m, vp(a.c[i], a.L->p()) + a.L->basis_val(i));
  }
  return m;
}

bool is_integral(const FElem& a) {
  Val v = val(a);
  return !v.is_finite() || v.get() >= 0;
}

FElem conj_top(const FElem& a) {
  FElem r = a;
  for (int i = 0; i < a.L->deg(); ++i)
    if (a.L->has_top_gen(i)) r.c[i] = -r.c[i];
  return r;
}

FElem apply_signs(const FElem& a, const std::vector<int>& signs) {
  if (signs.size() != a.c.size()) fail(Err::BadInput, "sign pattern size mismatch");
  FElem r = a;
  for (size_t i = 0; i < r.c.size(); ++i)
    if (signs[i] < 0) r.c[i] = -r.c[i];
  return r;
}

FElem lift(const FElem& a, const FieldLayer* target) {
  if (a.L == target) return a;
  if (!is_ancestor(a.L, target)) fail(Err::BadInput, "lift target is not an extension of the source");
  FElem cur = a;
  while (cur.L != target) {
    // find the child of cur.L on the chain down from target
    const FieldLayer* child = target;
    while (child->parent() != cur.L) child = child->parent();
    std::vector<Rat> c(child->deg(), Rat(0));
    for (size_t i = 0; i < cur.c.size(); ++i) c[i] = cur.c[i];
    cur = FElem{child, std::move(c)};
  }
  return cur;
}

FElem trace_to_parent(const FElem& a) {
  auto [lo, hi] = parent_pair(a);
  (void)hi;
  return Rat(2) * lo;
}

FElem norm_to_parent(const FElem& a) {
  auto [lo, hi] = parent_pair(a);
  FElem mu{a.L->parent(), a.L->mu_coords()};
  return lo * lo - mu * (hi * hi);
}

FElem elem_mod(const FElem& a, long k) {
  FElem r = a;
  for (int i = 0; i < a.L->deg(); ++i) {
    Rat ki = Rat(k, a.L->e()) - a.L->basis_val(i);
    r.c[i] = reduce_mod_ppow(r.c[i], a.L->p(), to_long(rat_ceil(ki)));
  }
  return r;
}

FElem unif_pow(const FieldLayer* L, long k) {
  FElem pi = k >= 0 ? L->uniformizer() : inv(L->uniformizer());
  FElem r = L->one();
  for (long i = 0; i < (k >= 0 ? k : -k); ++i) r = r * pi;
  return r;
}

std::optional<FElem> sqrt_in_layer(const FElem& x) {
  const FieldLayer* L = x.L;
  if (x.is_zero()) return L->zero();
  if (L->deg() == 1) {
    auto r = rat_sqrt(x.c[0]);
    if (!r) return std::nullopt;
    return L->from_rat(*r);
  }
  auto [a, b] = parent_pair(x);
  FElem mu{L->parent(), L->mu_coords()};
  if (b.is_zero()) {
    if (auto s = sqrt_in_layer(a)) return lift(*s, L);
    if (auto t = sqrt_in_layer(a * inv(mu)))
      return from_parent_pair(L, L->parent()->zero(), *t);
    return std::nullopt;
  }
  // (s + t g)^2 = x: mu T^2 - a T + b^2/4 = 0 for T = t^2.
  FElem disc = a * a - mu * (b * b);
  auto sd = sqrt_in_layer(disc);
  if (!sd) return std::nullopt;
  for (int sign : {1, -1}) {
    FElem T = (a + Rat(sign) * *sd) * inv(Rat(2) * mu);
    if (T.is_zero()) continue;
    auto t = sqrt_in_layer(T);
    if (!t) continue;
    FElem s = b * inv(Rat(2) * *t);
    FElem cand = from_parent_pair(L, s, *t);
    if (cand * cand == x) return cand;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Involutions and fixed subfields.

bool LayerInvolution::trivial() const {
  for (int s : signs)
    if (s < 0) return false;
  return true;
}

LayerInvolution id_involution(const FieldLayer* L) {
  return LayerInvolution{L, std::vector<int>(L->deg(), 1)};
}

LayerInvolution top_conj_involution(const FieldLayer* L) {
  std::vector<int> s(L->deg(), 1);
  for (int i = 0; i < L->deg(); ++i)
    if (L->has_top_gen(i)) s[i] = -1;
  return LayerInvolution{L, std::move(s)};
}

LayerInvolution make_involution(const FieldLayer* L, bool flip_parent_gen, bool flip_top_gen) {
  std::vector<int> s(L->deg(), 1);
  for (int i = 0; i < L->deg(); ++i) {
    int sg = 1;
    if (flip_parent_gen && L->has_parent_gen(i)) sg = -sg;
    if (flip_top_gen && L->has_top_gen(i)) sg = -sg;
    s[i] = sg;
  }
  return LayerInvolution{L, std::move(s)};
}

FElem FixedSubfield::to_big(const FElem& x) const {
  if (x.L != sub) fail(Err::BadInput, "element is not in the fixed subfield layer");
  FElem r = big->zero();
  for (size_t k = 0; k < emb.size(); ++k) r = r + x.c[k] * emb[k];
  return r;
}

FElem FixedSubfield::from_big(const FElem& y) const {
  if (y.L != big) fail(Err::BadInput, "element is not in the big layer");
  if (sub == big) return y;
  // each emb[k] is a single monomial with coefficient 1
  std::vector<Rat> c(sub->deg(), Rat(0));
  std::vector<bool> used(big->deg(), false);
  for (size_t k = 0; k < emb.size(); ++k) {
    int idx = -1;
    for (int i = 0; i < big->deg(); ++i)
      if (emb[k].c[i] != 0) idx = i;
    c[k] = y.c[idx];
    used[idx] = true;
  }
  for (int i = 0; i < big->deg(); ++i)
    if (!used[i] && y.c[i] != 0)
      fail(Err::BadInput, "element is not fixed by the involution");
  return FElem{sub, std::move(c)};
}

FixedSubfield fixed_subfield(const LayerInvolution& sigma) {
  const FieldLayer* L = sigma.L;
  std::vector<int> fixed_idx;
  for (int i = 0; i < L->deg(); ++i)
    if (sigma.signs[i] > 0) fixed_idx.push_back(i);
  if (fixed_idx.empty() || fixed_idx[0] != 0)
    fail(Err::BadInput, "involution does not fix 1");

  FixedSubfield out;
  out.big = L;
  if (static_cast<int>(fixed_idx.size()) == L->deg()) {
    out.sub = L;
    for (int i = 0; i < L->deg(); ++i) out.emb.push_back(L->monomial(i));
    return out;
  }
  if (fixed_idx.size() == 1) {
    out.sub = Tower::rationals(L->p());
    out.emb = {L->one()};
    return out;
  }
  if (fixed_idx.size() == 2) {
    FElem w = L->monomial(fixed_idx[1]);
    FElem sq = w * w;
    for (int i = 1; i < L->deg(); ++i)
      if (sq.c[i] != 0)
        fail(Err::UnsupportedTower, "fixed subfield is not spanned by monomials");
    try {
      out.sub = Tower::quadratic(Tower::rationals(L->p()), sq.c[0]);
    } catch (const Error& err) {
      if (err.code() == Err::DegenerateExtension)
        fail(Err::UnsupportedTower, "fixed subfield has no adapted basis: " + std::string(err.what()));
      throw;
    }
    out.emb = {L->one(), w};
    return out;
  }
  fail(Err::BadInput, "fixed space of the involution is not a subfield");
}

// ---------------------------------------------------------------------------
// Sigma-equivariant linear forms.

FElem SigmaLinearForm::operator()(const FElem& x) const {
  if (x.L != E) fail(Err::BadInput, "form applied outside its layer");
  FElem r = F->zero();
  for (size_t i = 0; i < x.c.size(); ++i)
    if (x.c[i] != 0) r = r + x.c[i] * vals[i];
  return r;
}

Rat SigmaLinearForm::apply0(const FElem& x_sub) const {
  if (x_sub.L != fixed.sub) fail(Err::BadInput, "lambda0 applied outside the fixed subfield");
  Rat r = 0;
  for (size_t k = 0; k < x_sub.c.size(); ++k) r += x_sub.c[k] * lam0[k];
  return r;
}

namespace {

// minimal valuation over a lattice spanned by rational coordinate columns
Val lattice_min_val(const std::vector<std::vector<Rat>>& cols, const FieldLayer* L) {
  Val m;
  for (const auto& col : cols) {
    Val v;
    for (size_t i = 0; i < col.size(); ++i) {
      if (col[i] == 0) continue;
      v = vmin(v, vp(col[i], L->p()) + L->basis_val(static_cast<int>(i)));
    }
    m = vmin(m, v);
  }
  return m;
}

// The fractional ideal {x in E^o : lambda^o(x o) in p Z_(p)}, returned as its
// minimal valuation.  lam0 is given on the monomials of `sub`.
Val conductor_min_val(const FieldLayer* sub, const std::vector<Rat>& lam0) {
  const int d = sub->deg();
  std::vector<std::vector<Rat>> M(d, std::vector<Rat>(d));
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k) {
      const auto& prod = sub->mult(k, l);
      Rat s = 0;
      for (int i = 0; i < d; ++i) s += lam0[i] * prod[i];
      M[l][k] = s;
    }
  // columns of p * M^{-1} span the ideal; get M^{-1} column by column
  std::vector<std::vector<Rat>> cols;
  for (int j = 0; j < d; ++j) {
    std::vector<Rat> rhs(d, Rat(0));
    rhs[j] = sub->p();
    std::vector<Rat> col;
    std::vector<std::vector<Rat>> Mc = M;
    if (!solve_rat_system(Mc, rhs, col))
      fail(Err::BadInput, "equivariant form is degenerate");
    // solve_rat_system leaves free variables at 0; singular M must be caught
    std::vector<Rat> back(d, Rat(0));
    for (int l = 0; l < d; ++l)
      for (int k = 0; k < d; ++k) back[l] += M[l][k] * col[k];
    if (back != rhs) fail(Err::BadInput, "equivariant form is degenerate");
    cols.push_back(col);
  }
  return lattice_min_val(cols, sub);
}

}  // namespace

SigmaLinearForm build_sigma_equivariant_form(const LayerInvolution& sigma,
                                             const FieldLayer* F,
                                             const LayerInvolution& sigma_F) {
  FixedSubfield fx = fixed_subfield(sigma);
  std::vector<Rat> lam0(fx.sub->deg(), Rat(0));
  lam0[0] = 1;
  return build_sigma_equivariant_form(sigma, F, sigma_F, lam0);
}

SigmaLinearForm build_sigma_equivariant_form(const LayerInvolution& sigma,
                                             const FieldLayer* F,
                                             const LayerInvolution& sigma_F,
                                             const std::vector<Rat>& lam0_in) {
  const FieldLayer* E = sigma.L;
  if (!is_ancestor(F, E)) fail(Err::BadInput, "codomain is not a subfield of the domain");
  if (sigma_F.L != F) fail(Err::BadInput, "sigma_F acts on the wrong layer");
  for (int i = 0; i < F->deg(); ++i)
    if (sigma.signs[i] != sigma_F.signs[i])
      fail(Err::BadInput, "involution does not restrict to sigma_F");

  SigmaLinearForm lam;
  lam.E = E;
  lam.F = F;
  lam.sigma = sigma;
  lam.sigma_F = sigma_F;
  lam.fixed = fixed_subfield(sigma);
  lam.lam0 = lam0_in;
  if (lam.lam0.size() != static_cast<size_t>(lam.fixed.sub->deg()))
    fail(Err::BadInput, "lambda0 has the wrong number of coefficients");

  const bool unitary = !sigma_F.trivial();
  lam.vals.assign(E->deg(), F->zero());

  if (!unitary) {
    // lambda = lambda^o after the trace to the fixed field
    if (sigma.trivial()) {
      for (int i = 0; i < E->deg(); ++i)
        lam.vals[i] = F->from_rat(lam.lam0[i] * Rat(1));
    } else {
      for (int i = 0; i < E->deg(); ++i) {
        if (sigma.signs[i] < 0) continue;  // trace kills the odd part
        FElem tr = lam.fixed.from_big(Rat(2) * E->monomial(i));
        lam.vals[i] = F->from_rat(lam.apply0(tr));
      }
    }
  } else {
    // F-linear extension over the F-basis {1, w} of E
    if (E == F) {
      for (int i = 0; i < E->deg(); ++i)
        lam.vals[i] = lam.lam0[0] * F->monomial(i);
    } else {
      FElem w = lam.fixed.emb.size() > 1 ? lam.fixed.emb[1] : E->one();
      FElem w_inv = lam.fixed.emb.size() > 1 ? inv(w) : E->one();
      for (int i = 0; i < E->deg(); ++i) {
        if (!E->has_top_gen(i)) {
          lam.vals[i] = lam.lam0[0] * F->monomial(i % F->deg());
        } else {
          // b_i = (b_i / w) * w with b_i / w in F
          FElem f2 = E->monomial(i) * w_inv;
          for (int k = F->deg(); k < E->deg(); ++k)
            if (f2.c[k] != 0) fail(Err::BadInput, "monomial does not factor through the F-basis");
          FElem f2F{F, std::vector<Rat>(f2.c.begin(), f2.c.begin() + F->deg())};
          lam.vals[i] = lam.lam0[1] * f2F;
        }
      }
    }
  }

  // conductor normalization: {x : lambda^o(x o) in p} should equal p_{E^o}
  const FieldLayer* sub = lam.fixed.sub;
  Val cur = conductor_min_val(sub, lam.lam0);
  Rat want = Rat(1, sub->e());
  if (!cur.is_finite()) fail(Err::BadInput, "equivariant form is degenerate");
  Rat diff = (cur.get() - want) * sub->e();
  if (denominator(diff) != 1)
    fail(Err::UnsupportedTower, "conductor is not an integral power of the uniformizer");
  long k = to_long(numerator(diff));
  if (k != 0) {
    FElem t_sub = unif_pow(sub, k);
    FElem t_big = lam.fixed.to_big(t_sub);
    std::vector<FElem> new_vals(E->deg(), F->zero());
    for (int i = 0; i < E->deg(); ++i) new_vals[i] = lam(t_big * E->monomial(i));
    std::vector<Rat> new_lam0(sub->deg(), Rat(0));
    for (int kk = 0; kk < sub->deg(); ++kk)
      new_lam0[kk] = lam.apply0(t_sub * sub->monomial(kk));
    lam.vals = std::move(new_vals);
    lam.lam0 = std::move(new_lam0);
    Val after = conductor_min_val(sub, lam.lam0);
    if (!after.is_finite() || after.get() != want)
      fail(Err::UnsupportedTower, "conductor normalization failed");
  }

  // rescale by a rational unit so that lambda(1) becomes a p-power (usually 1)
  FElem l1 = lam.vals[0];
  FElem fixed_l1 = sigma_F(l1);
  if (!(fixed_l1 == l1)) fail(Err::BadInput, "lambda(1) is not sigma_F-fixed");
  Rat r1 = l1.c[0];
  for (int i = 1; i < F->deg(); ++i)
    if (l1.c[i] != 0) r1 = 0;  // not rational: skip the rescale
  if (r1 != 0) {
    Rat u = unit_part(r1, F->p());
    Rat s = Rat(1) / u;
    for (auto& v : lam.vals) v = s * v;
    for (auto& q : lam.lam0) q *= s;
  }

  // sigma-equivariance sanity check on the monomial basis
  for (int i = 0; i < E->deg(); ++i) {
    FElem lhs = lam(sigma(E->monomial(i)));
    FElem rhs = sigma_F(lam.vals[i]);
    if (!(lhs == rhs)) fail(Err::BadInput, "constructed form is not sigma-equivariant");
  }
  return lam;
}

FElem compare_linear_forms(const SigmaLinearForm& l1, const SigmaLinearForm& l2) {
  const FieldLayer* E = l1.E;
  if (l2.E != E || l1.F != l2.F || l1.sigma.signs != l2.sigma.signs)
    fail(Err::BadInput, "forms are not comparable");
  const int dE = E->deg(), dF = l1.F->deg();
  std::vector<std::vector<Rat>> A(dE * dF, std::vector<Rat>(dE, Rat(0)));
  std::vector<Rat> rhs(dE * dF, Rat(0));
  for (int i = 0; i < dE; ++i) {
    for (int j = 0; j < dE; ++j) {
      FElem lv = l1(E->monomial(j) * E->monomial(i));
      for (int k = 0; k < dF; ++k) A[i * dF + k][j] = lv.c[k];
    }
    for (int k = 0; k < dF; ++k) rhs[i * dF + k] = l2.vals[i].c[k];
  }
  std::vector<Rat> sol;
  if (!solve_rat_system(A, rhs, sol))
    fail(Err::NotShiftRelated, "forms are not unit-related");
  FElem u{E, sol};
  for (int i = 0; i < dE; ++i)
    if (!(l2.vals[i] == l1(u * E->monomial(i))))
      fail(Err::NotShiftRelated, "forms are not unit-related");
  if (!(l1.sigma(u) == u) || !val(u).is_finite() || val(u).get() != 0)
    fail(Err::NotShiftRelated, "relating factor is not a fixed unit");
  return u;
}

}  // namespace btlf
