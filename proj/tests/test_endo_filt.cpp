#include "doctest.h"

#include "btlf/endo_filt.hpp"

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

Matrix rand_matrix(const FieldLayer* L, int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-6, 6);
  std::uniform_int_distribution<int> den(1, 3);
  Matrix M(L, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      FElem e = L->zero();
      for (int c = 0; c < L->deg(); ++c) e.c[c] = Rat(num(rng), den(rng));
      M.at(i, j) = e;
    }
  return M;
}

Matrix rand_invertible(const FieldLayer* L, int n, std::mt19937& rng) {
  for (;;) {
    Matrix M = rand_matrix(L, n, rng);
    if (!det(M).is_zero()) return M;
  }
}

LatticeFunction rand_function(const FieldLayer* L, int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> off(-4 * L->e(), 4 * L->e());
  std::vector<Rat> offs;
  for (int k = 0; k < n; ++k) offs.push_back(Rat(off(rng), 2 * L->e()));
  std::uniform_int_distribution<int> num(-6, 6);
  for (;;) {
    Matrix M(L, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M.at(i, j) = L->from_rat(Rat(num(rng)));
    if (!det(M).is_zero()) return make_lattice_function(M, offs);
  }
}

bool lattice_has(const DvrLattice& flat, const Matrix& a) {
  return member(flat, flatten_endo(a));
}

}  // namespace

TEST_CASE("flattening round trip and hom lattices") {
  const FieldLayer* Q = Tower::rationals(3);
  const FieldLayer* F2 = Tower::quadratic(Q, Rat(2));
  const FieldLayer* E4 = Tower::quadratic(F2, F2->from_rat(Rat(-6)));
  std::mt19937 rng(21);

  for (const FieldLayer* L : {Q, F2, E4}) {
    Matrix a = rand_matrix(L, 2, rng);
    CHECK(unflatten_endo(L, 2, flatten_endo(a)) == a);
  }

  // the endomorphisms of the standard lattice are the integral matrices
  DvrLattice std2 = standard_lattice(F2, 2);
  DvrLattice ord = hom_lattice_flat(std2, std2);
  CHECK(lattice_has(ord, Matrix::identity(F2, 2)));
  CHECK(lattice_has(ord, Matrix::from_rat_rows(F2, {{1, 7}, {0, 2}})));
  CHECK_FALSE(lattice_has(ord, Matrix::from_rat_rows(F2, {{Rat(1, 3), 0}, {0, 1}})));
  {
    Matrix w(F2, 2, 2);
    w.at(0, 1) = F2->monomial(1);  // integral monomial entry
    CHECK(lattice_has(ord, w));
  }

  // membership in hom(L1, L2) is exactly "maps L1 into L2"
  for (int t = 0; t < 15; ++t) {
    DvrLattice L1 = make_lattice(rand_invertible(F2, 2, rng));
    DvrLattice L2 = make_lattice(rand_invertible(F2, 2, rng));
    DvrLattice hom = hom_lattice_flat(L1, L2);
    Matrix a = rand_matrix(F2, 2, rng);
    bool maps = true;
    Matrix img = a * L1.basis;
    for (int j = 0; j < 2; ++j)
      if (!member(L2, img.col(j))) maps = false;
    CHECK(lattice_has(hom, a) == maps);
  }
}

TEST_CASE("end lattices match the hom-lattice intersection") {
  const FieldLayer* Q = Tower::rationals(3);
  const FieldLayer* E = Tower::quadratic(Q, Rat(3));
  std::mt19937 rng(22);

  auto oracle = [](const LatticeFunction& lf, const Rat& r) {
    bool first = true;
    DvrLattice acc;
    for (const Rat& s : jump_reps(lf)) {
      DvrLattice h = hom_lattice_flat(eval(lf, s), eval(lf, Rat(s + r)));
      if (first) {
        acc = h;
        first = false;
      } else {
        acc = lattice_intersect(acc, h);
      }
    }
    return acc;
  };

  const std::vector<Rat> radii = {Rat(0), Rat(1, 4), Rat(-1, 2), Rat(1, 3), Rat(2)};
  for (int t = 0; t < 5; ++t) {
    for (const Rat& r : radii) {
      LatticeFunction a = rand_function(Q, 2, rng);
      CHECK(end_lattice_flat(a, r) == oracle(a, r));
      LatticeFunction b = rand_function(Q, 3, rng);
      CHECK(end_lattice_flat(b, r) == oracle(b, r));
      LatticeFunction c = rand_function(E, 2, rng);
      CHECK(end_lattice_flat(c, r) == oracle(c, r));
    }
  }

  // translation invariance and periodicity
  LatticeFunction lf = rand_function(E, 2, rng);
  for (const Rat& r : radii) {
    CHECK(end_lattice_flat(translate(lf, Rat(5, 4)), r) == end_lattice_flat(lf, r));
    CHECK(end_lattice_flat(lf, Rat(r + 1)) == scale_pi(end_lattice_flat(lf, r), 1));
  }

  // the strict step agrees with evaluation just past the jump
  LatticeFunction d = make_lattice_function(Matrix::identity(Q, 2), {Rat(0), Rat(1, 2)});
  CHECK(end_lattice_flat_plus(d, Rat(0)) == end_lattice_flat(d, Rat(1, 4)));
  CHECK(end_lattice_flat_plus(d, Rat(1, 4)) == end_lattice_flat(d, Rat(1, 2)));
}

TEST_CASE("filtration profiles") {
  const FieldLayer* Q = Tower::rationals(3);
  const FieldLayer* E = Tower::quadratic(Q, Rat(3));
  std::mt19937 rng(23);

  // profile queries reproduce direct evaluation everywhere
  for (const FieldLayer* L : {Q, E}) {
    for (int t = 0; t < 3; ++t) {
      LatticeFunction lf = rand_function(L, 2, rng);
      FiltrationProfile pr = end_profile(lf);
      for (size_t i = 0; i < pr.jumps.size(); ++i) {
        CHECK(pr.jumps[i] > 0);
        CHECK(pr.jumps[i] <= 1);
        if (i > 0) CHECK(pr.jumps[i - 1] < pr.jumps[i]);
      }
      for (const Rat& r : {Rat(0), Rat(1, 4), Rat(-2, 3), Rat(3), Rat(-7, 4)})
        CHECK(profile_value(pr, r) == end_lattice_flat(lf, r));
      CHECK(profile_equal(pr, end_profile(translate(lf, Rat(1)))));
      CHECK(profile_equal(pr, end_profile(lf)));
    }
  }

  // containment: shifting the radius deepens the filtration
  LatticeFunction lf = rand_function(Q, 2, rng);
  FiltrationProfile pr = end_profile(lf);
  FiltrationProfile deeper = make_profile(
      period_candidates({Rat(0), lf.offsets[0] - lf.offsets[1], lf.offsets[1] - lf.offsets[0]},
                        lf.L->e()),
      [&](const Rat& r) { return end_lattice_flat(lf, Rat(r + 1)); });
  CHECK(profile_contains(pr, deeper));
  CHECK_FALSE(profile_contains(deeper, pr));
  CHECK_FALSE(profile_equal(pr, deeper));
  CHECK(profile_contains(pr, pr));

  CHECK(code_of([&] { make_profile({}, [&](const Rat& r) { return end_lattice_flat(lf, r); }); }) ==
        Err::BadInput);
  CHECK(code_of([&] { make_profile({Rat(2)}, [&](const Rat& r) { return end_lattice_flat(lf, r); }); }) ==
        Err::BadInput);
}

TEST_CASE("trace pairing duals") {
  const FieldLayer* Q = Tower::rationals(3);
  const FieldLayer* F2 = Tower::quadratic(Q, Rat(2));
  const FieldLayer* E = Tower::quadratic(Q, Rat(3));
  std::mt19937 rng(24);

  // (M_n(o))^* = p M_n(o) over unramified layers; over a ramified layer the
  // tame different shifts it to the strict step pi M_n(o)
  for (const FieldLayer* L : {Q, F2}) {
    HermForm tf = trace_pairing_form(L, 2);
    DvrLattice ord = hom_lattice_flat(standard_lattice(L, 2), standard_lattice(L, 2));
    CHECK(dual_lattice(tf, ord) == scale_pi(ord, 1));
  }
  {
    HermForm tf = trace_pairing_form(E, 2);
    DvrLattice ord = hom_lattice_flat(standard_lattice(E, 2), standard_lattice(E, 2));
    CHECK(dual_lattice(tf, ord) == end_lattice_flat_plus(standard_function(E, 2), Rat(0)));
    CHECK(dual_lattice(tf, ord) != scale_pi(ord, 1));
  }

  // the trace dual of the end filtration flips and opens the radius:
  // (end at r)^* = end at (-r)+
  for (const FieldLayer* L : {Q, F2, E}) {
    HermForm tf = trace_pairing_form(L, 2);
    for (int t = 0; t < 4; ++t) {
      LatticeFunction lf = rand_function(L, 2, rng);
      for (const Rat& r : {Rat(0), Rat(1, 4), Rat(-1, 2), Rat(5, 3)})
        CHECK(dual_lattice(tf, end_lattice_flat(lf, r)) == end_lattice_flat_plus(lf, Rat(-r)));
    }
  }
}

TEST_CASE("lie subspace dimensions") {
  const FieldLayer* Q = Tower::rationals(3);
  const FieldLayer* F2 = Tower::quadratic(Q, Rat(2));
  std::mt19937 rng(25);

  HermForm sp = make_form(Q, id_involution(Q), -1,
                          Matrix::from_rat_rows(Q, {{0, 1}, {-1, 0}}));
  HermForm orth = make_form(Q, id_involution(Q), 1,
                            Matrix::from_rat_rows(Q, {{1, 0}, {0, -3}}));
  HermForm uni = make_form(F2, top_conj_involution(F2), 1,
                           Matrix::from_rat_rows(F2, {{0, 1}, {1, 0}}));

  CHECK(lie_subspace_frame(sp).cols() == 3);    // sl_2
  CHECK(lie_subspace_frame(orth).cols() == 1);  // so_2
  CHECK(lie_subspace_frame(uni).cols() == 4);   // u_2 over the fixed field

  // members really satisfy a + a^sigma = 0
  for (const HermForm& h : {sp, orth, uni}) {
    Matrix W = lie_subspace_frame(h);
    std::uniform_int_distribution<int> num(-5, 5);
    for (int t = 0; t < 5; ++t) {
      std::vector<FElem> flat(W.rows(), W.layer()->zero());
      for (int j = 0; j < W.cols(); ++j) {
        Rat cj(num(rng));
        std::vector<FElem> col = W.col(j);
        for (size_t i = 0; i < flat.size(); ++i) flat[i] = flat[i] + Rat(cj) * col[i];
      }
      Matrix a = unflatten_endo(h.F, h.dim(), flat);
      CHECK((a + adjoint(h, a)).is_zero());
    }
  }
}

TEST_CASE("self-dual recovery from a translation class") {
  const FieldLayer* Q = Tower::rationals(3);
  const FieldLayer* F2 = Tower::quadratic(Q, Rat(2));
  const FieldLayer* E = Tower::quadratic(Q, Rat(3));
  std::mt19937 rng(26);

  struct Case {
    HermForm h;
    LatticeFunction sd;
  };
  std::vector<Case> cases;
  cases.push_back({make_form(Q, id_involution(Q), -1, Matrix::from_rat_rows(Q, {{0, 1}, {-1, 0}})),
                   standard_function(Q, 2)});
  cases.push_back({make_form(Q, id_involution(Q), 1, Matrix::from_rat_rows(Q, {{1, 0}, {0, -3}})),
                   make_lattice_function(Matrix::identity(Q, 2), {Rat(0), Rat(-1, 2)})});
  cases.push_back({make_form(F2, top_conj_involution(F2), 1,
                             Matrix::from_rat_rows(F2, {{0, 1}, {1, 0}})),
                   standard_function(F2, 2)});
  {
    Matrix g1(E, 1, 1);
    g1.at(0, 0) = E->monomial(1);
    LatticeFunction sd = make_lattice_function(Matrix::identity(E, 1), {Rat(-1, 4)});
    cases.push_back({make_form(E, top_conj_involution(E), -1, g1), sd});
  }

  std::uniform_int_distribution<int> num(-8, 8);
  std::uniform_int_distribution<int> den(1, 6);
  for (const Case& cs : cases) {
    REQUIRE(is_self_dual(cs.h, cs.sd));
    for (int t = 0; t < 12; ++t) {
      Rat s(num(rng), den(rng));
      LatticeFunction recovered = recover_self_dual(cs.h, translate(cs.sd, s));
      CHECK(function_equal(recovered, cs.sd));
    }
    // scaling the form by u moves the self-dual point by -v(u)/2
    for (const Rat& u : {Rat(3), Rat(1, 3), Rat(2)}) {
      HermForm hu = scale_form(cs.h.F->from_rat(u), cs.h);
      LatticeFunction recovered = recover_self_dual(hu, translate(cs.sd, Rat(1, 4)));
      Rat shift = Rat(-vp(u, 3).get() / 2);
      CHECK(function_equal(recovered, translate(cs.sd, shift)));
    }
  }

  // a class without an adjoint-stable filtration is rejected
  HermForm orth = make_form(Q, id_involution(Q), 1, Matrix::from_rat_rows(Q, {{1, 0}, {0, -3}}));
  CHECK(code_of([&] { recover_self_dual(orth, standard_function(Q, 2)); }) ==
        Err::NotSigmaFixed);
}
