#include "doctest.h"

#include "btlf/latt_fun.hpp"

#include <random>

using namespace btlf;

namespace {

template <typename Fn>
Err code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error to be thrown");
  return Err::BadInput;
}

Matrix rand_invertible(const FieldLayer* L, int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-6, 6);
  for (;;) {
    Matrix M(L, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M.at(i, j) = L->from_rat(Rat(num(rng)));
    if (!det(M).is_zero()) return M;
  }
}

std::vector<FElem> rand_vec(const FieldLayer* L, int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 6);
  std::vector<FElem> v;
  for (int i = 0; i < n; ++i) v.push_back(L->from_rat(Rat(num(rng), den(rng))));
  return v;
}

// Random split function: random basis, offsets in (1/2e) Z within [-2, 2].
LatticeFunction rand_function(const FieldLayer* L, int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> off(-4 * L->e(), 4 * L->e());
  std::vector<Rat> offs;
  for (int k = 0; k < n; ++k) offs.push_back(Rat(off(rng), 2 * L->e()));
  return make_lattice_function(rand_invertible(L, n, rng), offs);
}

const std::vector<Rat>& sample_radii() {
  static const std::vector<Rat> rs = {Rat(-1), Rat(-1, 2), Rat(-1, 4), Rat(0),
                                      Rat(1, 8), Rat(1, 4), Rat(1, 2), Rat(1), Rat(7, 4)};
  return rs;
}

}  // namespace

TEST_CASE("evaluation, jumps and the split norm") {
  const FieldLayer* Q = Tower::rationals(3);
  const FieldLayer* E = Tower::quadratic(Q, Rat(3));  // ramified, e = 2

  LatticeFunction lf = make_lattice_function(Matrix::identity(E, 2), {Rat(0), Rat(1, 4)});
  CHECK(jump_reps(lf) == std::vector<Rat>{Rat(0), Rat(1, 4)});

  // second column picks up one uniformizer power at r = 0
  DvrLattice L0 = eval(lf, Rat(0));
  CHECK(member(L0, {E->one(), E->zero()}));
  CHECK(member(L0, {E->zero(), E->uniformizer()}));
  CHECK_FALSE(member(L0, {E->zero(), E->one()}));
  CHECK(eval(lf, Rat(-1, 8)) == L0);

  // periodicity; the strict step drops exactly at the jump radii
  for (const Rat& r : {Rat(0), Rat(1, 8), Rat(-2, 3)}) {
    CHECK(eval(lf, Rat(r + Rat(1, 2))) == scale_pi(eval(lf, r), 1));
    CHECK(contains(eval(lf, r), eval_plus(lf, r)));
  }
  for (const Rat& r : {Rat(0), Rat(1, 4), Rat(-3, 4)}) CHECK(eval(lf, r) != eval_plus(lf, r));
  for (const Rat& r : {Rat(1, 8), Rat(-2, 3)}) CHECK(eval(lf, r) == eval_plus(lf, r));
  CHECK(eval_plus(lf, Rat(0)) == eval(lf, Rat(1, 8)));

  // membership in Lambda(r) is exactly norm >= r
  std::mt19937 rng(11);
  for (int t = 0; t < 40; ++t) {
    std::vector<FElem> x = rand_vec(E, 2, rng);
    Val a = norm_value(lf, x);
    for (const Rat& r : sample_radii()) CHECK(member(eval(lf, r), x) == (a >= Val(r)));
  }
  CHECK(norm_value(lf, {E->zero(), E->zero()}) == Val::infinity());
  CHECK(norm_value(lf, {E->one(), E->zero()}) == Val(0));
  CHECK(norm_value(lf, {E->zero(), E->one()}) == Val(Rat(-1, 4)));
}

TEST_CASE("function equality, canonical form, group action") {
  const FieldLayer* Q = Tower::rationals(3);
  const FieldLayer* E = Tower::quadratic(Q, Rat(3));
  std::mt19937 rng(12);

  // a unimodular change of basis does not change the function
  LatticeFunction a = make_lattice_function(Matrix::identity(Q, 2), {Rat(0), Rat(0)});
  LatticeFunction b = make_lattice_function(Matrix::from_rat_rows(Q, {{1, 1}, {0, 1}}),
                                            {Rat(0), Rat(0)});
  CHECK(function_equal(a, b));
  CHECK_FALSE(function_equal(a, translate(a, Rat(1, 2))));
  CHECK(function_equal(translate(translate(a, Rat(1, 3)), Rat(-1, 3)), a));

  for (int t = 0; t < 10; ++t) {
    LatticeFunction lf = rand_function(E, 2, rng);
    LatticeFunction c = canonicalize(lf);
    CHECK(function_equal(lf, c));
    for (size_t k = 0; k < c.offsets.size(); ++k) {
      CHECK(c.offsets[k] >= 0);
      CHECK(c.offsets[k] < Rat(1, 2));
      if (k > 0) CHECK(c.offsets[k - 1] <= c.offsets[k]);
    }
    // group action transforms every member lattice
    Matrix g = rand_invertible(E, 2, rng);
    LatticeFunction glf = act(g, lf);
    for (const Rat& r : {Rat(0), Rat(1, 4), Rat(-2, 3)})
      CHECK(eval(glf, r) == make_lattice(g * eval(lf, r).basis));
  }

  CHECK(code_of([&] { make_lattice_function(Matrix::from_rat_rows(Q, {{1, 1}, {1, 1}}), {Rat(0), Rat(0)}); }) ==
        Err::BadInput);
  CHECK(code_of([&] { make_lattice_function(Matrix::identity(Q, 2), {Rat(0)}); }) ==
        Err::DimensionMismatch);
}

TEST_CASE("dual functions against dual lattices") {
  const FieldLayer* Q = Tower::rationals(3);
  const FieldLayer* F2 = Tower::quadratic(Q, Rat(2));  // unramified
  const FieldLayer* E = Tower::quadratic(Q, Rat(3));   // ramified
  std::mt19937 rng(13);

  std::vector<HermForm> forms;
  forms.push_back(make_form(Q, id_involution(Q), -1,
                            Matrix::from_rat_rows(Q, {{0, 1}, {-1, 0}})));
  forms.push_back(make_form(Q, id_involution(Q), 1,
                            Matrix::from_rat_rows(Q, {{1, 0}, {0, -3}})));
  forms.push_back(make_form(F2, top_conj_involution(F2), 1,
                            Matrix::from_rat_rows(F2, {{0, 1}, {1, 0}})));
  {
    Matrix g1(E, 1, 1);
    g1.at(0, 0) = E->monomial(1);  // anti-hermitian line over the ramified layer
    forms.push_back(make_form(E, top_conj_involution(E), -1, g1));
  }

  for (const HermForm& h : forms) {
    for (int t = 0; t < 8; ++t) {
      LatticeFunction lf = rand_function(h.F, h.dim(), rng);
      LatticeFunction dual = dual_function(h, lf);

      // pointwise: the dual function is the lattice dual of the strict step
      for (const Rat& r : sample_radii())
        CHECK(eval(dual, r) == dual_lattice(h, eval_plus(lf, -r)));

      // dual norm = norm of the dual function
      for (int s = 0; s < 6; ++s) {
        std::vector<FElem> x = rand_vec(h.F, h.dim(), rng);
        CHECK(dual_norm_value(h, lf, x) == norm_value(dual, x));
      }

      // involution and translation behaviour
      CHECK(function_equal(dual_function(h, dual), lf));
      CHECK(function_equal(dual_function(h, translate(lf, Rat(1, 3))),
                           translate(dual, Rat(-1, 3))));

      // scaling the form shifts the dual by -v(u)
      for (const Rat& u : {Rat(3), Rat(1, 3), Rat(2)}) {
        HermForm hu = scale_form(h.F->from_rat(u), h);
        Val vu = vp(u, 3);
        CHECK(function_equal(dual_function(hu, lf), translate(dual, -vu.get())));
      }
    }
  }
}

TEST_CASE("self-dual points") {
  const FieldLayer* Q = Tower::rationals(3);
  const FieldLayer* F2 = Tower::quadratic(Q, Rat(2));
  std::mt19937 rng(14);

  HermForm sp = make_form(Q, id_involution(Q), -1,
                          Matrix::from_rat_rows(Q, {{0, 1}, {-1, 0}}));
  CHECK(is_self_dual(sp, standard_function(Q, 2)));
  // the apartment through the standard point: offsets (s, -s)
  for (const Rat& s : {Rat(1, 4), Rat(-2, 3), Rat(5)}) {
    LatticeFunction lf = make_lattice_function(Matrix::identity(Q, 2), {s, -s});
    CHECK(is_self_dual(sp, lf));
    CHECK_FALSE(is_self_dual(sp, translate(lf, Rat(1, 4))));
  }

  HermForm uni = make_form(F2, top_conj_involution(F2), 1,
                           Matrix::from_rat_rows(F2, {{0, 1}, {1, 0}}));
  CHECK(is_self_dual(uni, standard_function(F2, 2)));

  // anisotropic plane <1, -3>: the self-dual point sits off the standard one
  HermForm orth = make_form(Q, id_involution(Q), 1,
                            Matrix::from_rat_rows(Q, {{1, 0}, {0, -3}}));
  LatticeFunction fixed = make_lattice_function(Matrix::identity(Q, 2), {Rat(0), Rat(-1, 2)});
  CHECK(is_self_dual(orth, fixed));
  CHECK_FALSE(is_self_dual(orth, standard_function(Q, 2)));

  // at a self-dual point the dual norm coincides with the norm
  for (int t = 0; t < 20; ++t) {
    std::vector<FElem> x = rand_vec(Q, 2, rng);
    CHECK(dual_norm_value(orth, fixed, x) == norm_value(fixed, x));
    CHECK(dual_norm_value(sp, standard_function(Q, 2), x) ==
          norm_value(standard_function(Q, 2), x));
  }
}

TEST_CASE("common splitting bases") {
  const FieldLayer* Q = Tower::rationals(3);
  const FieldLayer* E = Tower::quadratic(Q, Rat(3));
  std::mt19937 rng(15);

  // diagonal pair: the offset pairs are an invariant of the two functions,
  // up to rescaling a column by a uniformizer power (which shifts both
  // offsets of that column by the period together)
  {
    LatticeFunction a = make_lattice_function(Matrix::identity(E, 2), {Rat(0), Rat(1, 4)});
    LatticeFunction b = make_lattice_function(Matrix::identity(E, 2), {Rat(1, 8), Rat(-1, 3)});
    CommonSplit cs = common_splitting(a, b);
    auto norm_pair = [](Rat o1, Rat o2) {
      Rat shift = Rat(rat_floor(Rat(o2 * 2))) / 2;
      return std::make_pair(Rat(o1 - shift), Rat(o2 - shift));
    };
    std::vector<std::pair<Rat, Rat>> got, want = {norm_pair(Rat(0), Rat(1, 8)),
                                                  norm_pair(Rat(1, 4), Rat(-1, 3))};
    for (size_t k = 0; k < cs.off1.size(); ++k) got.push_back(norm_pair(cs.off1[k], cs.off2[k]));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);
  }

  auto check_split = [&](const LatticeFunction& a, const LatticeFunction& b) {
    CommonSplit cs = common_splitting(a, b);
    CHECK(function_equal(make_lattice_function(cs.basis, cs.off1), a));
    CHECK(function_equal(make_lattice_function(cs.basis, cs.off2), b));
    // the split-norm formula holds for random integral combinations
    std::uniform_int_distribution<int> num(-6, 6);
    for (int t = 0; t < 10; ++t) {
      std::vector<FElem> x(a.dim(), a.L->zero());
      Val v1 = Val::infinity(), v2 = Val::infinity();
      for (int k = 0; k < a.dim(); ++k) {
        Rat ck(num(rng));
        if (ck == 0) continue;
        std::vector<FElem> col = cs.basis.col(k);
        for (int i = 0; i < a.dim(); ++i) x[i] = x[i] + Rat(ck) * col[i];
        v1 = vmin(v1, vp(ck, 3) - cs.off1[k]);
        v2 = vmin(v2, vp(ck, 3) - cs.off2[k]);
      }
      CHECK(norm_value(a, x) == v1);
      CHECK(norm_value(b, x) == v2);
    }
  };

  for (int t = 0; t < 6; ++t) {
    check_split(rand_function(Q, 2, rng), rand_function(Q, 2, rng));
    check_split(rand_function(Q, 3, rng), rand_function(Q, 3, rng));
    check_split(rand_function(E, 2, rng), rand_function(E, 2, rng));
  }
  // a function against itself and against its own translate
  LatticeFunction lf = rand_function(E, 2, rng);
  check_split(lf, lf);
  check_split(lf, translate(lf, Rat(1, 4)));

  LatticeFunction q3 = rand_function(Q, 3, rng);
  LatticeFunction e2 = rand_function(E, 2, rng);
  CHECK(code_of([&] { common_splitting(q3, rand_function(Q, 2, rng)); }) ==
        Err::DimensionMismatch);
  CHECK(code_of([&] { common_splitting(q3, e2); }) == Err::BadInput);
}

TEST_CASE("barycenters") {
  const FieldLayer* Q = Tower::rationals(3);
  std::mt19937 rng(16);

  for (int t = 0; t < 6; ++t) {
    LatticeFunction a = rand_function(Q, 3, rng);
    LatticeFunction b = rand_function(Q, 3, rng);
    CHECK(function_equal(barycenter(Rat(1), a, b), a));
    CHECK(function_equal(barycenter(Rat(0), a, b), b));
    // independence of the splitting frame: swap the arguments
    CHECK(function_equal(barycenter(Rat(1, 4), a, b), barycenter(Rat(3, 4), b, a)));
    // midpoint of (a, midpoint) is the 3/4 point
    LatticeFunction mid = barycenter(Rat(1, 2), a, b);
    CHECK(function_equal(barycenter(Rat(1, 2), a, mid), barycenter(Rat(3, 4), a, b)));
  }

  // barycenters of self-dual points stay self-dual
  HermForm sp = make_form(Q, id_involution(Q), -1,
                          Matrix::from_rat_rows(Q, {{0, 1}, {-1, 0}}));
  Matrix g = Matrix::from_rat_rows(Q, {{1, Rat(2, 3)}, {0, 1}});  // symplectic
  for (const Rat& s : {Rat(1, 4), Rat(-2, 3)}) {
    LatticeFunction a = make_lattice_function(Matrix::identity(Q, 2), {s, -s});
    LatticeFunction b = act(g, make_lattice_function(Matrix::identity(Q, 2), {-s, s}));
    REQUIRE(is_self_dual(sp, a));
    REQUIRE(is_self_dual(sp, b));
    for (const Rat& t : {Rat(1, 4), Rat(1, 2), Rat(2, 3)})
      CHECK(is_self_dual(sp, barycenter(t, a, b)));
  }

  LatticeFunction a = rand_function(Q, 2, rng);
  CHECK(code_of([&] { barycenter(Rat(3, 2), a, a); }) == Err::ParameterOutOfRange);
}

TEST_CASE("restriction of scalars") {
  const FieldLayer* Q = Tower::rationals(3);
  const FieldLayer* F = Tower::quadratic(Q, Rat(2));
  const FieldLayer* E4 = Tower::quadratic(F, F->from_rat(Rat(-6)));
  const FieldLayer* E = Tower::quadratic(Q, Rat(3));
  std::mt19937 rng(17);

  auto flatten_oracle = [&](const LatticeFunction& lf, const FieldLayer* sub) {
    LatticeFunction res = restrict_scalars(lf, sub);
    CHECK(res.L == sub);
    CHECK(res.dim() == lf.dim() * (lf.L->deg() / sub->deg()));
    std::vector<Rat> radii = jump_reps(res);
    for (const Rat& r : sample_radii()) radii.push_back(r);
    const int g = lf.L->deg() / sub->deg();
    for (const Rat& r : radii) {
      // flatten the generators of Lambda(r) monomial by monomial
      Matrix big = eval(lf, r).basis;
      Matrix gens(sub, res.dim(), res.dim());
      for (int k = 0; k < big.cols(); ++k)
        for (int c = 0; c < g; ++c) {
          std::vector<FElem> col = big.col(k);
          FElem mc = lf.L->monomial(c * sub->deg());
          for (auto& e : col) e = e * mc;
          gens.set_col(k * g + c, flatten_vec(col, sub));
        }
      CHECK(make_lattice(gens) == eval(res, r));
    }
    // the norm is preserved under flattening
    for (int t = 0; t < 10; ++t) {
      std::vector<FElem> x = rand_vec(lf.L, lf.dim(), rng);
      CHECK(norm_value(res, flatten_vec(x, sub)) == norm_value(lf, x));
    }
  };

  flatten_oracle(make_lattice_function(Matrix::identity(E, 2), {Rat(0), Rat(1, 4)}), Q);
  for (int t = 0; t < 4; ++t) {
    flatten_oracle(rand_function(E, 2, rng), Q);
    flatten_oracle(rand_function(F, 2, rng), Q);
    flatten_oracle(rand_function(E4, 2, rng), F);
    flatten_oracle(rand_function(E4, 1, rng), Q);
  }

  // two-step restriction agrees with the direct one
  LatticeFunction lf4 = rand_function(E4, 2, rng);
  CHECK(function_equal(restrict_scalars(restrict_scalars(lf4, F), Q),
                       restrict_scalars(lf4, Q)));

  LatticeFunction lq = rand_function(Q, 2, rng);
  CHECK(code_of([&] { restrict_scalars(lq, E); }) == Err::BadInput);
}
