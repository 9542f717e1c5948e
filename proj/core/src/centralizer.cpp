#include "btlf/centralizer.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <utility>

namespace btlf {

namespace {

// --------------------------------------------------------------------------
// Small vector helpers (ambient coordinate vectors over a layer).

std::vector<FElem> scaled_vec(const FElem& c, const std::vector<FElem>& v) {
  std::vector<FElem> out;
  out.reserve(v.size());
  for (const FElem& x : v) out.push_back(c * x);
  return out;
}

std::vector<FElem> add_vec(const std::vector<FElem>& a, const std::vector<FElem>& b) {
  std::vector<FElem> out;
  out.reserve(a.size());
  for (size_t i = 0; i < a.size(); ++i) out.push_back(a[i] + b[i]);
  return out;
}

Matrix from_cols(const FieldLayer* L, int rows, const std::vector<std::vector<FElem>>& cols) {
  Matrix M(L, rows, static_cast<int>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) M.set_col(static_cast<int>(j), cols[j]);
  return M;
}

Matrix rows_slice(const Matrix& M, int r0, int cnt) {
  Matrix out(M.layer(), cnt, M.cols());
  for (int i = 0; i < cnt; ++i)
    for (int j = 0; j < M.cols(); ++j) out.at(i, j) = M.at(r0 + i, j);
  return out;
}

bool is_rational(const FElem& x) {
  for (size_t i = 1; i < x.c.size(); ++i)
    if (x.c[i] != 0) return false;
  return true;
}

// E-coordinate vector from its F-chunks (inverse of flatten_vec).
std::vector<FElem> unflatten_chunks(const FieldLayer* E, const FieldLayer* F,
                                    const std::vector<FElem>& flat) {
  const int g = E->deg() / F->deg();
  const int fd = F->deg();
  const int d = static_cast<int>(flat.size()) / g;
  std::vector<FElem> out;
  out.reserve(d);
  for (int t = 0; t < d; ++t) {
    FElem e = E->zero();
    for (int c = 0; c < g; ++c)
      for (int r = 0; r < fd; ++r) e.c[c * fd + r] = flat[t * g + c].c[r];
    out.push_back(e);
  }
  return out;
}

// --------------------------------------------------------------------------
// Polynomials over a field layer: coefficients low-to-high, empty = zero.

using Poly = std::vector<FElem>;

int pdeg(const Poly& f) {
  for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i)
    if (!f[i].is_zero()) return i;
  return -1;
}

Poly ptrim(Poly f) {
  while (!f.empty() && f.back().is_zero()) f.pop_back();
  return f;
}

Poly pmonic(const Poly& f0) {
  Poly f = ptrim(f0);
  if (f.empty()) fail(Err::BadInput, "cannot normalize the zero polynomial");
  FElem li = inv(f.back());
  for (FElem& c : f) c = li * c;
  return f;
}

Poly padd(const FieldLayer* L, const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), L->zero());
  for (size_t i = 0; i < a.size(); ++i) out[i] = out[i] + a[i];
  for (size_t i = 0; i < b.size(); ++i) out[i] = out[i] + b[i];
  return ptrim(out);
}

Poly psub(const FieldLayer* L, const Poly& a, const Poly& b) {
  Poly nb = b;
  for (FElem& c : nb) c = -c;
  return padd(L, a, nb);
}

Poly pmul(const FieldLayer* L, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, L->zero());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
  return ptrim(out);
}

std::pair<Poly, Poly> pdivmod(const FieldLayer* L, const Poly& a0, const Poly& b0) {
  Poly b = ptrim(b0);
  if (b.empty()) fail(Err::BadInput, "polynomial division by zero");
  Poly r = ptrim(a0);
  int db = pdeg(b);
  Poly q(std::max<size_t>(1, r.size()), L->zero());
  FElem bi = inv(b.back());
  while (pdeg(r) >= db) {
    int k = pdeg(r) - db;
    FElem c = r.back() * bi;
    q[k] = q[k] + c;
    for (int i = 0; i <= db; ++i) r[k + i] = r[k + i] - c * b[i];
    r = ptrim(r);
  }
  return {ptrim(q), r};
}

Poly pgcd(const FieldLayer* L, Poly a, Poly b) {
  a = ptrim(a);
  b = ptrim(b);
  while (!b.empty()) {
    Poly r = pdivmod(L, a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return pmonic(a);
}

Poly pderiv(const FieldLayer* L, const Poly& f) {
  Poly out;
  for (size_t i = 1; i < f.size(); ++i) out.push_back(Rat(static_cast<long>(i)) * f[i]);
  (void)L;
  return ptrim(out);
}

// u a + v b = gcd (monic); used for the block idempotents.
struct ExtGcd {
  Poly g, u, v;
};

ExtGcd pextgcd(const FieldLayer* L, const Poly& a, const Poly& b) {
  Poly r0 = ptrim(a), r1 = ptrim(b);
  Poly u0 = {L->one()}, u1 = {};
  Poly v0 = {}, v1 = {L->one()};
  while (!r1.empty()) {
    auto [q, r] = pdivmod(L, r0, r1);
    Poly u2 = psub(L, u0, pmul(L, q, u1));
    Poly v2 = psub(L, v0, pmul(L, q, v1));
    r0 = std::move(r1);
    r1 = std::move(r);
    u0 = std::move(u1);
    u1 = std::move(u2);
    v0 = std::move(v1);
    v1 = std::move(v2);
  }
  FElem li = inv(r0.back());
  auto rescale = [&](Poly f) {
    for (FElem& c : f) c = li * c;
    return f;
  };
  return {rescale(r0), rescale(u0), rescale(v0)};
}

Matrix peval_mat(const Poly& f, const Matrix& a) {
  const FieldLayer* L = a.layer();
  Matrix acc(L, a.rows(), a.rows());
  for (int i = pdeg(f); i >= 0; --i) {
    acc = acc * a;
    for (int k = 0; k < a.rows(); ++k) acc.at(k, k) = acc.at(k, k) + f[i];
  }
  return acc;
}

std::string poly_key(const Poly& f) {
  std::string s;
  for (const FElem& c : f) s += c.str() + "|";
  return s;
}

// --------------------------------------------------------------------------
// Rational roots of an integer-coefficient polynomial via divisor candidates.

std::vector<Int> divisors_of(const Int& n0) {
  Int n = n0 < 0 ? Int(-n0) : n0;
  if (n > Int("1000000000000"))
    fail(Err::UnsupportedFactorDegree, "polynomial coefficients too large to factor");
  std::vector<std::pair<Int, int>> primes;
  for (Int d = 2; d <= 1000000 && d * d <= n; ++d) {
    if (n % d == 0) {
      int m = 0;
      while (n % d == 0) {
        n /= d;
        ++m;
      }
      primes.push_back({d, m});
    }
  }
  // whatever survives trial division below 10^6 is prime under the size cap
  if (n > 1) primes.push_back({n, 1});
  std::vector<Int> divs = {Int(1)};
  for (const auto& [p, m] : primes) {
    std::vector<Int> next;
    Int pk = 1;
    for (int k = 0; k <= m; ++k) {
      for (const Int& d : divs) next.push_back(Int(d * pk));
      pk *= p;
    }
    divs = std::move(next);
  }
  return divs;
}

std::vector<Rat> rational_roots(const std::vector<Rat>& f0) {
  std::vector<Rat> f = f0;
  while (!f.empty() && f.back() == 0) f.pop_back();
  if (f.size() <= 1) return {};

  Int den = 1;
  for (const Rat& q : f) {
    Int d = denominator(q);
    den = den / gcd(den, d) * d;
  }
  std::vector<Int> a;
  for (const Rat& q : f) a.push_back(numerator(Rat(q * den)));

  auto eval = [&](const Rat& x) {
    Rat acc = 0;
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i) acc = Rat(acc * x) + f[i];
    return acc;
  };

  std::set<Rat> roots;
  size_t low = 0;
  while (low < a.size() && a[low] == 0) ++low;
  if (low > 0) roots.insert(Rat(0));

  for (const Int& p : divisors_of(a[low]))
    for (const Int& q : divisors_of(a.back())) {
      Rat cand(p, q);
      if (eval(cand) == 0) roots.insert(cand);
      if (eval(Rat(-cand)) == 0) roots.insert(Rat(-cand));
    }
  return {roots.begin(), roots.end()};
}

// f(x + t) for quadratic f (used to undo the quartic depression).
Poly pshift(const FieldLayer* L, const Poly& f, const FElem& t) {
  Poly acc;
  for (int i = pdeg(f); i >= 0; --i) {
    // acc <- acc * (x + t) + f[i]
    Poly next(acc.size() + 1, L->zero());
    for (size_t k = 0; k < acc.size(); ++k) {
      next[k + 1] = next[k + 1] + acc[k];
      next[k] = next[k] + t * acc[k];
    }
    if (next.empty()) next.push_back(L->zero());
    next[0] = next[0] + f[i];
    acc = ptrim(next);
  }
  return acc;
}

// Monic rational quartic with no rational root: try to split into two
// quadratics over L through the resolvent cubic of the depressed form.
std::optional<std::pair<Poly, Poly>> split_quartic(const FieldLayer* L, const Poly& f) {
  Rat a3 = f[3].c[0], a2 = f[2].c[0], a1 = f[1].c[0], a0 = f[0].c[0];
  Rat P = a2 - Rat(3) * a3 * a3 / 8;
  Rat Q = Rat(a1 - a2 * a3 / 2) + a3 * a3 * a3 / 8;
  Rat R = Rat(a0 - a1 * a3 / 4) + Rat(a2 * a3 * a3 / 16) - Rat(3) * a3 * a3 * a3 * a3 / 256;

  // roots of z^3 + 2P z^2 + (P^2 - 4R) z - Q^2 inside L: the rational ones,
  // plus the roots of the quadratic cofactor when L is an extension
  std::vector<Rat> res = {Rat(-Q * Q), Rat(Rat(P * P) - 4 * R), Rat(2 * P), Rat(1)};
  std::vector<FElem> zs;
  std::vector<Rat> rr = rational_roots(res);
  for (const Rat& z : rr) zs.push_back(L->from_rat(z));
  if (!rr.empty()) {
    // peel one rational root; the quadratic quotient may pick up roots in L
    Rat r = rr[0];
    Rat c1 = res[2] + r;            // z^2 + c1 z + c0 is the cofactor
    Rat c0 = Rat(res[1] + r * c1);
    FElem disc = L->from_rat(Rat(Rat(c1 * c1) - 4 * c0));
    if (auto s = sqrt_in_layer(disc)) {
      zs.push_back(Rat(1, 2) * (L->from_rat(Rat(-c1)) + *s));
      zs.push_back(Rat(1, 2) * (L->from_rat(Rat(-c1)) - *s));
    }
  }

  FElem Pl = L->from_rat(P), Ql = L->from_rat(Q);
  for (const FElem& z : zs) {
    FElem aa, b, d;
    if (z.is_zero()) {
      if (Q != 0) continue;
      auto s = sqrt_in_layer(L->from_rat(Rat(Rat(P * P) - 4 * R)));
      if (!s) continue;
      aa = L->zero();
      b = Rat(1, 2) * (Pl - *s);
      d = Rat(1, 2) * (Pl + *s);
    } else {
      auto s = sqrt_in_layer(z);
      if (!s) continue;
      aa = *s;
      FElem diff = Ql / aa;     // d - b
      FElem sum = Pl + z;       // b + d
      b = Rat(1, 2) * (sum - diff);
      d = Rat(1, 2) * (sum + diff);
    }
    FElem t = L->from_rat(Rat(a3 / 4));
    Poly q1 = pshift(L, {b, aa, L->one()}, t);
    Poly q2 = pshift(L, {d, -aa, L->one()}, t);
    if (pmul(L, q1, q2) == f) return std::make_pair(q1, q2);
  }
  return std::nullopt;
}

// Factorization of a squarefree monic polynomial into irreducibles over L.
// Degree >= 3 pieces must have rational coefficients (rational-root peeling
// plus the quartic resolvent); anything that resists is reported as an
// unsupported factor degree.
std::vector<Poly> factor_squarefree(const FieldLayer* L, const Poly& m) {
  std::vector<Poly> work = {pmonic(m)}, out;
  while (!work.empty()) {
    Poly f = work.back();
    work.pop_back();
    int d = pdeg(f);
    if (d <= 0) fail(Err::BadInput, "internal: constant factor in the worklist");
    if (d == 1) {
      out.push_back(f);
      continue;
    }
    if (d == 2) {
      FElem disc = f[1] * f[1] - Rat(4) * f[0];
      if (auto s = sqrt_in_layer(disc)) {
        FElem r1 = Rat(1, 2) * (*s - f[1]);
        FElem r2 = Rat(1, 2) * (-*s - f[1]);
        out.push_back({-r1, L->one()});
        out.push_back({-r2, L->one()});
      } else {
        out.push_back(f);
      }
      continue;
    }
    if (d > 4)
      fail(Err::UnsupportedFactorDegree,
           "minimal polynomial factor of degree " + std::to_string(d));
    for (const FElem& c : f)
      if (!is_rational(c))
        fail(Err::UnsupportedFactorDegree,
             "factor of degree >= 3 with coefficients outside the rationals");
    std::vector<Rat> rp;
    for (const FElem& c : f) rp.push_back(c.c[0]);
    std::vector<Rat> roots = rational_roots(rp);
    if (!roots.empty()) {
      Poly lin = {L->from_rat(Rat(-roots[0])), L->one()};
      auto [q, rem] = pdivmod(L, f, lin);
      if (!rem.empty()) fail(Err::BadInput, "internal: root division left a remainder");
      out.push_back(lin);
      work.push_back(q);
      continue;
    }
    if (d == 3) fail(Err::UnsupportedFactorDegree, "irreducible cubic factor");
    if (auto sp = split_quartic(L, f)) {
      work.push_back(sp->first);
      work.push_back(sp->second);
      continue;
    }
    fail(Err::UnsupportedFactorDegree, "irreducible quartic factor");
  }
  std::sort(out.begin(), out.end(), [](const Poly& a, const Poly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return poly_key(a) < poly_key(b);
  });
  Poly prod = {L->one()};
  for (const Poly& f : out) prod = pmul(L, prod, f);
  if (prod != pmonic(m)) fail(Err::BadInput, "internal: factor product mismatch");
  return out;
}

// --------------------------------------------------------------------------
// Side access helpers shared by the block routines.

const FieldLayer* side_layer(const CentralBlock& b, bool minus) {
  return minus ? b.Eminus : b.E;
}

const Matrix& side_frame(const CentralBlock& b, bool minus) {
  return minus ? b.frame_minus : b.frame_plus;
}

// Action of the layer generator of the side field on an ambient vector.
std::vector<FElem> gen_apply(const BetaDecomposition& D, const CentralBlock& b, bool minus,
                             const std::vector<FElem>& v) {
  const FElem& c0 = minus ? b.c0_minus : b.c0_plus;
  const FElem& s = minus ? b.s_minus : b.s_plus;
  std::vector<FElem> w = add_vec(mat_vec(D.beta, v), scaled_vec(c0, v));
  return scaled_vec(inv(s), w);
}

// Action of a side scalar on an ambient vector of that side.
std::vector<FElem> scalar_apply(const BetaDecomposition& D, const CentralBlock& b, bool minus,
                                const FElem& xE, const std::vector<FElem>& v) {
  const FieldLayer* E = side_layer(b, minus);
  if (E == D.F) return scaled_vec(lift(xE, D.F), v);
  const int fd = D.F->deg();
  FElem f0 = D.F->zero(), f1 = D.F->zero();
  for (int r = 0; r < fd; ++r) {
    f0.c[r] = xE.c[r];
    f1.c[r] = xE.c[fd + r];
  }
  return add_vec(scaled_vec(f0, v), scaled_vec(f1, gen_apply(D, b, minus, v)));
}

void check_block_index(const BetaDecomposition& D, int bi) {
  if (bi < 0 || bi >= static_cast<int>(D.blocks.size()))
    fail(Err::BlockMismatch, "block index out of range");
}

void check_side(const BetaDecomposition& D, int bi, bool minus) {
  check_block_index(D, bi);
  if (minus && D.blocks[bi].kind != BlockKind::Jpair)
    fail(Err::BlockMismatch, "only swapped pairs have a minus side");
}

}  // namespace

// --------------------------------------------------------------------------
// Minimal polynomial.

std::vector<FElem> minimal_polynomial(const Matrix& a) {
  if (a.rows() != a.cols()) fail(Err::BadInput, "minimal polynomial of a non-square matrix");
  const FieldLayer* L = a.layer();
  const int n = a.rows();
  Matrix cur = Matrix::identity(L, n);
  Matrix pows(L, n * n, 0);
  for (int k = 0; k <= n; ++k) {
    std::vector<FElem> flat;
    flat.reserve(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) flat.push_back(cur.at(i, j));
    Matrix col = from_cols(L, n * n, {flat});
    if (k > 0) {
      if (auto sol = try_solve(pows, col)) {
        Poly m(k + 1, L->zero());
        m[k] = L->one();
        for (int j = 0; j < k; ++j) m[j] = -sol->at(j, 0);
        return m;
      }
    }
    pows = k == 0 ? col : hstack(pows, col);
    cur = cur * a;
  }
  fail(Err::BadInput, "internal: no linear relation among the matrix powers");
}

// --------------------------------------------------------------------------
// Decomposition.

namespace {

BetaDecomposition decompose_core(const FieldLayer* F, const Matrix& beta, const HermForm* h) {
  if (beta.layer() != F) fail(Err::BadInput, "matrix entries live in the wrong layer");
  if (beta.rows() != beta.cols() || beta.rows() == 0)
    fail(Err::BadInput, "a nonempty square matrix is required");
  const int n = beta.rows();
  if (h && adjoint(*h, beta) != -beta)
    fail(Err::NotInLieAlgebra, "the element is not skew for the adjoint involution");

  Poly m = minimal_polynomial(beta);
  Poly g = pgcd(F, m, pderiv(F, m));
  if (pdeg(g) != 0)
    fail(Err::H1Violated, "the minimal polynomial has a repeated factor");
  std::vector<Poly> factors = factor_squarefree(F, m);

  // block idempotents: e_i = (m / m_i) u_i evaluated at beta, with u_i the
  // inverse of m / m_i modulo m_i
  std::vector<Matrix> idems;
  for (const Poly& fi : factors) {
    auto [q, rem] = pdivmod(F, m, fi);
    if (!rem.empty()) fail(Err::BadInput, "internal: factor does not divide");
    ExtGcd eg = pextgcd(F, pdivmod(F, q, fi).second, fi);
    if (pdeg(eg.g) != 0) fail(Err::BadInput, "internal: cofactor not invertible");
    Poly ci = pdivmod(F, pmul(F, q, eg.u), m).second;
    idems.push_back(peval_mat(ci, beta));
  }
  Matrix sum(F, n, n);
  for (const Matrix& e : idems) sum = sum + e;
  if (sum != Matrix::identity(F, n))
    fail(Err::BadInput, "internal: idempotents do not sum to the identity");
  for (size_t i = 0; i < idems.size(); ++i)
    for (size_t j = 0; j < idems.size(); ++j) {
      Matrix prod = idems[i] * idems[j];
      if (i == j ? prod != idems[i] : !prod.is_zero())
        fail(Err::BadInput, "internal: idempotents are not orthogonal");
    }

  // the adjoint involution permutes the idempotents
  std::vector<int> perm(idems.size());
  if (h) {
    for (size_t i = 0; i < idems.size(); ++i) {
      Matrix adj = adjoint(*h, idems[i]);
      int match = -1;
      for (size_t j = 0; j < idems.size(); ++j)
        if (adj == idems[j]) match = static_cast<int>(j);
      if (match < 0) fail(Err::BadInput, "internal: involution does not permute the blocks");
      perm[i] = match;
    }
  }

  BetaDecomposition D;
  D.gl = (h == nullptr);
  if (h) D.h = *h;
  D.F = F;
  D.beta = beta;

  // greedy F-basis of the image of an idempotent
  auto image_basis = [&](const Matrix& e) {
    Matrix cur(F, n, 0);
    for (int j = 0; j < n; ++j) {
      Matrix test = hstack(cur, from_cols(F, n, {e.col(j)}));
      if (rank(test) == test.cols()) cur = test;
    }
    return cur;
  };

  // fill one side of a block: field, generator action data, monomial frame
  auto build_side = [&](CentralBlock& blk, bool minus, const Poly& f, const Matrix& e) {
    const FieldLayer*& E = minus ? blk.Eminus : blk.E;
    FElem& c0 = minus ? blk.c0_minus : blk.c0_plus;
    FElem& s = minus ? blk.s_minus : blk.s_plus;
    Matrix& frame = minus ? blk.frame_minus : blk.frame_plus;
    (minus ? blk.idem_minus : blk.idem) = e;

    Matrix Vb = image_basis(e);
    const int ni = Vb.cols();
    if (pdeg(f) == 1) {
      E = F;
      c0 = F->zero();
      s = F->one();
      frame = Vb;
      if (!minus) blk.dE = ni;
      return;
    }
    c0 = Rat(1, 2) * f[1];
    FElem mu_op = c0 * c0 - f[0];
    auto [mu, sc] = reduce_square_class(mu_op);
    E = Tower::quadratic(F, mu);
    s = sc;
    if (ni % 2 != 0) fail(Err::BadInput, "internal: odd block over a quadratic factor");
    if (!minus) blk.dE = ni / 2;

    std::vector<std::vector<FElem>> cols;
    Matrix span(F, n, 0);
    for (int j = 0; j < ni && span.cols() < ni; ++j) {
      std::vector<FElem> v = Vb.col(j);
      std::vector<FElem> gv = gen_apply(D, blk, minus, v);
      Matrix test = hstack(span, from_cols(F, n, {v, gv}));
      if (rank(test) == test.cols()) {
        span = test;
        cols.push_back(v);
        cols.push_back(gv);
      }
    }
    if (span.cols() != ni) fail(Err::BadInput, "internal: block basis search failed");
    frame = span;
  };

  std::vector<bool> used(factors.size(), false);
  for (size_t i = 0; i < factors.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    CentralBlock blk;
    blk.factor = factors[i];
    if (!h) {
      blk.kind = BlockKind::Gl;
      build_side(blk, false, factors[i], idems[i]);
    } else if (perm[i] == static_cast<int>(i)) {
      blk.kind = BlockKind::Jo;
      if (pdeg(factors[i]) == 2 && !factors[i][1].is_zero())
        fail(Err::BadInput, "internal: self-paired quadratic factor is not even");
      build_side(blk, false, factors[i], idems[i]);
    } else {
      blk.kind = BlockKind::Jpair;
      used[perm[i]] = true;
      build_side(blk, false, factors[i], idems[i]);
      build_side(blk, true, factors[perm[i]], idems[perm[i]]);
      if (blk.E->e() != blk.Eminus->e() || blk.E->deg() != blk.Eminus->deg() ||
          blk.frame_plus.cols() != blk.frame_minus.cols())
        fail(Err::BadInput, "internal: paired sides with different invariants");
    }
    D.blocks.push_back(std::move(blk));
  }

  // induced forms on the self-paired blocks
  if (h) {
    for (CentralBlock& blk : D.blocks) {
      if (blk.kind != BlockKind::Jo) continue;
      if (blk.E == F) {
        blk.sigmaE = h->sigma;
        Matrix gram = gram_on(*h, blk.frame_plus);
        if (det(gram).is_zero())
          fail(Err::DegenerateRestriction, "the form degenerates on a block");
        blk.h_block = make_form(F, h->sigma, h->eps, gram);
        continue;
      }
      blk.sigmaE = make_involution(blk.E, !h->sigma.trivial(), true);
      blk.lam = build_sigma_equivariant_form(blk.sigmaE, F, h->sigma);
      const int d = blk.dE;
      FElem gmono = blk.E->monomial(F->deg());
      FElem mu = FElem{F, blk.E->mu_coords()};
      FElem l1 = blk.lam(blk.E->one());
      FElem lg = blk.lam(gmono);
      Matrix M = from_cols(F, 2, {{l1, lg}, {lg, mu * l1}});
      Matrix gram(blk.E, d, d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          std::vector<FElem> wa = blk.frame_plus.col(2 * a);
          std::vector<FElem> wb = blk.frame_plus.col(2 * b);
          std::vector<FElem> gwb = blk.frame_plus.col(2 * b + 1);
          Matrix rhs = from_cols(F, 2, {{h_apply(*h, wa, wb), h_apply(*h, wa, gwb)}});
          Matrix ab = solve(M, rhs);
          gram.at(a, b) = lift(ab.at(0, 0), blk.E) + lift(ab.at(1, 0), blk.E) * gmono;
        }
      Matrix twisted = apply(blk.sigmaE, gram);
      if (h->eps < 0) twisted = -twisted;
      if (gram.transpose() != twisted)
        fail(Err::NotEpsilonHermitian, "the induced block pairing is not eps-hermitian");
      if (det(gram).is_zero())
        fail(Err::DegenerateRestriction, "the form degenerates on a block");
      blk.h_block = make_form(blk.E, blk.sigmaE, h->eps, gram);
    }
  }

  // global frame bookkeeping
  Matrix G(F, n, 0);
  for (CentralBlock& blk : D.blocks) {
    D.start_plus.push_back(G.cols());
    G = hstack(G, blk.frame_plus);
    if (blk.kind == BlockKind::Jpair) {
      D.start_minus.push_back(G.cols());
      G = hstack(G, blk.frame_minus);
    } else {
      D.start_minus.push_back(-1);
    }
  }
  if (G.cols() != n) fail(Err::BadInput, "internal: block frames do not fill the space");
  D.global_frame = G;
  D.global_frame_inv = inverse(G);
  return D;
}

}  // namespace

BetaDecomposition decompose_beta(const HermForm& h, const Matrix& beta) {
  return decompose_core(h.F, beta, &h);
}

BetaDecomposition decompose_beta_gl(const FieldLayer* F, const Matrix& beta) {
  return decompose_core(F, beta, nullptr);
}

// --------------------------------------------------------------------------
// Block coordinates.

std::vector<FElem> block_to_ambient(const BetaDecomposition& D, int bi, bool minus,
                                    const std::vector<FElem>& xE) {
  check_side(D, bi, minus);
  const CentralBlock& blk = D.blocks[bi];
  if (static_cast<int>(xE.size()) != blk.dE)
    fail(Err::DimensionMismatch, "block vector has the wrong length");
  return mat_vec(side_frame(blk, minus), flatten_vec(xE, D.F));
}

std::vector<FElem> ambient_to_block(const BetaDecomposition& D, int bi, bool minus,
                                    const std::vector<FElem>& x) {
  check_side(D, bi, minus);
  const CentralBlock& blk = D.blocks[bi];
  auto sol = try_solve(side_frame(blk, minus), from_cols(D.F, D.dim(), {x}));
  if (!sol) fail(Err::BlockMismatch, "vector does not lie in the block subspace");
  return unflatten_chunks(side_layer(blk, minus), D.F, sol->col(0));
}

Matrix block_endo_ambient(const BetaDecomposition& D, int bi, bool minus, const Matrix& aE) {
  check_side(D, bi, minus);
  const CentralBlock& blk = D.blocks[bi];
  const FieldLayer* E = side_layer(blk, minus);
  if (aE.layer() != E || aE.rows() != blk.dE || aE.cols() != blk.dE)
    fail(Err::BlockMismatch, "endomorphism has the wrong shape for the block");
  const Matrix& frame = side_frame(blk, minus);
  const int ni = frame.cols();
  Matrix MF(D.F, ni, ni);
  if (E == D.F) {
    MF = aE;
  } else {
    const int g = 2;
    for (int t = 0; t < blk.dE; ++t)
      for (int c = 0; c < g; ++c) {
        std::vector<FElem> u(blk.dE, E->zero());
        u[t] = E->monomial(c * D.F->deg());
        MF.set_col(t * g + c, flatten_vec(mat_vec(aE, u), D.F));
      }
  }
  int r0 = minus ? D.start_minus[bi] : D.start_plus[bi];
  return frame * MF * rows_slice(D.global_frame_inv, r0, ni);
}

HermForm block_restricted_form(const BetaDecomposition& D, int bi) {
  check_block_index(D, bi);
  const CentralBlock& blk = D.blocks[bi];
  if (blk.kind != BlockKind::Jo)
    fail(Err::BlockMismatch, "the ambient form restricts only to self-paired blocks");
  return make_form(D.F, D.h.sigma, D.h.eps, gram_on(D.h, blk.frame_plus));
}

DvrLattice flatten_block_lattice(const BetaDecomposition& D, int bi, bool minus,
                                 const DvrLattice& LE) {
  check_side(D, bi, minus);
  const CentralBlock& blk = D.blocks[bi];
  const FieldLayer* E = side_layer(blk, minus);
  if (LE.L != E || LE.dim() != blk.dE)
    fail(Err::BlockMismatch, "lattice has the wrong shape for the block");
  if (E == D.F) return LE;
  const int g = 2;
  const int ni = blk.dE * g;
  std::vector<std::vector<FElem>> cols;
  for (int k = 0; k < blk.dE; ++k)
    for (int c = 0; c < g; ++c) {
      FElem mc = E->monomial(c * D.F->deg());
      cols.push_back(flatten_vec(scaled_vec(mc, LE.basis.col(k)), D.F));
    }
  return make_lattice(from_cols(D.F, ni, cols));
}

// --------------------------------------------------------------------------
// Cross dual.

LatticeFunction cross_dual(const BetaDecomposition& D, int bi, const LatticeFunction& fnE) {
  check_side(D, bi, true);
  const CentralBlock& blk = D.blocks[bi];
  if (fnE.L != blk.E || fnE.dim() != blk.dE)
    fail(Err::BlockMismatch, "function has the wrong shape for the block");
  const FieldLayer* Em = blk.Eminus;
  const int d = blk.dE;
  const int g = blk.E->deg() / D.F->deg();
  const int ni = d * g;
  const long e = blk.E->e();

  // ambient splitting basis of the function
  std::vector<std::vector<FElem>> vk;
  for (int k = 0; k < d; ++k)
    vk.push_back(mat_vec(blk.frame_plus, flatten_vec(fnE.basis.col(k), D.F)));

  // dual E-basis on the partner side: h(e_{-k}, g^c v_l) = [l = k][c = 0],
  // solved over F with the first-argument twist folded into the unknowns
  std::vector<std::vector<FElem>> mono_v;  // rows (l, c)
  for (int l = 0; l < d; ++l) {
    std::vector<FElem> w = vk[l];
    for (int c = 0; c < g; ++c) {
      if (c > 0) w = gen_apply(D, blk, false, vk[l]);
      mono_v.push_back(w);
    }
  }
  Matrix A(D.F, ni, ni);
  Matrix rhs(D.F, ni, d);
  for (int r = 0; r < ni; ++r)
    for (int j = 0; j < ni; ++j)
      A.at(r, j) = h_apply(D.h, blk.frame_minus.col(j), mono_v[r]);
  for (int k = 0; k < d; ++k) rhs.at(k * g, k) = D.F->one();
  auto Y = try_solve(A, rhs);
  if (!Y) fail(Err::BadInput, "internal: block pairing is degenerate");
  Matrix Yc = apply(D.h.sigma, *Y);

  std::vector<std::vector<FElem>> dual_cols;
  std::vector<Rat> offs;
  for (int k = 0; k < d; ++k) {
    std::vector<FElem> y = Yc.col(k);
    std::vector<FElem> ek = mat_vec(blk.frame_minus, y);
    dual_cols.push_back(y);

    // pairing conductor of the line: least t with psi(pi^t o_E) in p_F
    auto psi_val = [&](const FElem& eta) {
      return val(h_apply(D.h, scalar_apply(D, blk, true, eta, ek), vk[k]));
    };
    Val v0 = Val::infinity();
    for (int c = 0; c < g; ++c) v0 = vmin(v0, psi_val(Em->monomial(c * D.F->deg())));
    if (!v0.is_finite()) fail(Err::BadInput, "internal: vanishing pairing on a line");
    auto ok = [&](long t) {
      FElem pt = unif_pow(Em, t);
      for (int c = 0; c < g; ++c)
        if (psi_val(pt * Em->monomial(c * D.F->deg())) < Val(Rat(1, D.F->e()))) return false;
      return true;
    };
    long t = to_long(rat_ceil(Rat(Rat(e) * Rat(Rat(1, D.F->e()) - v0.get()))));
    while (!ok(t)) ++t;
    while (ok(t - 1)) --t;
    offs.push_back(Rat(Rat(-fnE.offsets[k]) + Rat(t - 1, e)));
  }

  Matrix basis(Em, d, d);
  for (int k = 0; k < d; ++k)
    basis.set_col(k, unflatten_chunks(Em, D.F, dual_cols[k]));
  return make_lattice_function(basis, offs);
}

// --------------------------------------------------------------------------
// The embedding.

namespace {

struct PartCols {
  std::vector<std::vector<FElem>> cols;
  std::vector<Rat> offs;
};

PartCols framed_part(const BetaDecomposition& D, int bi, bool minus, const LatticeFunction& fnE) {
  LatticeFunction rf = restrict_scalars(fnE, D.F);
  Matrix amb = side_frame(D.blocks[bi], minus) * rf.basis;
  PartCols out;
  for (int j = 0; j < amb.cols(); ++j) out.cols.push_back(amb.col(j));
  out.offs = rf.offsets;
  return out;
}

}  // namespace

LatticeFunction embed_point(const BetaDecomposition& D, const CentralBuildingPoint& x) {
  if (x.blocks.size() != D.blocks.size())
    fail(Err::BlockMismatch, "the point must carry one component per block");
  std::vector<int> where(D.blocks.size(), -1);
  for (size_t i = 0; i < x.blocks.size(); ++i) {
    int bi = x.blocks[i].block;
    check_block_index(D, bi);
    if (where[bi] >= 0) fail(Err::BlockMismatch, "duplicate block component");
    where[bi] = static_cast<int>(i);
  }

  std::vector<std::vector<FElem>> cols;
  std::vector<Rat> offs;
  auto append = [&](const PartCols& pc) {
    cols.insert(cols.end(), pc.cols.begin(), pc.cols.end());
    offs.insert(offs.end(), pc.offs.begin(), pc.offs.end());
  };

  for (size_t bi = 0; bi < D.blocks.size(); ++bi) {
    const CentralBlock& blk = D.blocks[bi];
    const BlockPoint& bp = x.blocks[where[bi]];
    if (bp.fn.L != blk.E || bp.fn.dim() != blk.dE)
      fail(Err::BlockMismatch, "component has the wrong shape for its block");
    switch (blk.kind) {
      case BlockKind::Jo: {
        if (bp.shift != 0)
          fail(Err::BadInput, "self-paired components carry no translation");
        if (!is_self_dual(blk.h_block, bp.fn))
          fail(Err::BadInput, "self-paired component is not self-dual for the induced form");
        append(framed_part(D, static_cast<int>(bi), false, bp.fn));
        break;
      }
      case BlockKind::Jpair: {
        LatticeFunction f = translate(bp.fn, bp.shift);
        append(framed_part(D, static_cast<int>(bi), false, f));
        append(framed_part(D, static_cast<int>(bi), true,
                           cross_dual(D, static_cast<int>(bi), f)));
        break;
      }
      case BlockKind::Gl: {
        append(framed_part(D, static_cast<int>(bi), false, translate(bp.fn, bp.shift)));
        break;
      }
    }
  }

  LatticeFunction out = make_lattice_function(from_cols(D.F, D.dim(), cols), offs);
  if (!D.gl && !is_self_dual(D.h, out))
    fail(Err::BadInput, "internal: embedded point is not self-dual");
  return out;
}

}  // namespace btlf
