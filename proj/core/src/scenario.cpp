#include "btlf/scenario.hpp"

#include <chrono>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace btlf {

namespace {

using Clock = std::chrono::steady_clock;

std::string fn_str(const LatticeFunction& lf) {
  const LatticeFunction c = canonicalize(lf);
  std::ostringstream os;
  os << "offsets(";
  for (size_t k = 0; k < c.offsets.size(); ++k) os << (k ? ", " : "") << rat_str(c.offsets[k]);
  os << ") on basis " << c.basis.str();
  return os.str();
}

std::string rat_list_str(const std::vector<Rat>& v) {
  std::ostringstream os;
  os << "{";
  for (size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << rat_str(v[k]);
  os << "}";
  return os.str();
}

// Deterministic per-check randomness; every criterion seeds its own stream.
struct Rng {
  std::mt19937 g;
  explicit Rng(unsigned s) : g(s) {}
  long pick(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(g); }
};

Rat rand_offset(Rng& rng, long max_den) {
  const long d = rng.pick(1, max_den);
  return Rat(rng.pick(-2 * max_den, 2 * max_den), d);
}

FElem rand_elem(const FieldLayer* L, Rng& rng) {
  FElem x = L->zero();
  for (int c = 0; c < L->deg(); ++c) x = x + Rat(rng.pick(-6, 6)) * L->monomial(c);
  return x;
}

Matrix rand_basis(const FieldLayer* L, int n, Rng& rng) {
  for (;;) {
    Matrix m(L, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m.at(i, j) = rand_elem(L, rng);
    if (!(det(m) == L->zero())) return m;
  }
}

LatticeFunction rand_fn(const FieldLayer* L, int n, Rng& rng, long max_den) {
  std::vector<Rat> offs;
  offs.reserve(n);
  for (int k = 0; k < n; ++k) offs.push_back(rand_offset(rng, max_den));
  return make_lattice_function(rand_basis(L, n, rng), std::move(offs));
}

std::vector<FElem> rand_vec(const FieldLayer* L, int n, Rng& rng) {
  for (;;) {
    std::vector<FElem> v;
    v.reserve(n);
    bool nz = false;
    for (int i = 0; i < n; ++i) {
      v.push_back(rand_elem(L, rng));
      nz = nz || !(v.back() == L->zero());
    }
    if (nz) return v;
  }
}

LatticeFunction diag_fn(const FieldLayer* L, std::vector<Rat> offs) {
  const int n = static_cast<int>(offs.size());
  return make_lattice_function(Matrix::identity(L, n), std::move(offs));
}

CentralBuildingPoint rand_apartment_point(const BetaDecomposition& D, Rng& rng, long den) {
  std::vector<Rat> params;
  const int r = apartment_rank(D);
  params.reserve(r);
  for (int i = 0; i < r; ++i) params.push_back(Rat(rng.pick(-2 * den, 2 * den), den));
  return apartment_point(D, params);
}

// Runs one check body (returning an empty string on success, a witness on
// failure) under the clock, turning thrown errors into failures.
template <class Body>
Report timed(const std::string& name, Body&& body) {
  Report rep;
  rep.name = name;
  const auto t0 = Clock::now();
  try {
    rep.witness = body();
    rep.pass = rep.witness.empty();
  } catch (const Error& err) {
    rep.pass = false;
    rep.witness = std::string(err_name(err.code())) + ": " + err.what();
  }
  rep.millis = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
  return rep;
}

std::vector<Rat> c1v(long a) { return {Rat(a)}; }
std::vector<Rat> c2v(long a, long b) { return {Rat(a), Rat(b)}; }

std::vector<Scenario> build_catalog() {
  std::vector<Scenario> cat;
  {
    // ramified line: E = Q_3(sqrt 3) inside the symplectic plane; the block
    // building is a point and lands on the chamber barycenter (-1/4, 1/4)
    Scenario s;
    s.name = "sp2-ramified";
    s.eps = -1;
    s.gram = {{Rat(0), Rat(1)}, {Rat(-1), Rat(0)}};
    s.beta = {{c1v(0), c1v(1)}, {c1v(3), c1v(0)}};
    s.point = {{0, "J_o", {Rat(-1, 4)}, Rat(0)}};
    s.grid_den = 8;
    s.grid_radius = Rat(1, 2);
    s.expected_diag = {Rat(-1, 4), Rat(1, 4)};
    s.checks = {"decompose", "embed", "filtration", "search-unique"};
    cat.push_back(s);
  }
  {
    // split semisimple element of the symplectic plane: one swapped pair of
    // lines, embedded through the cross dual
    Scenario s;
    s.name = "sp2-split-gl";
    s.eps = -1;
    s.gram = {{Rat(0), Rat(1)}, {Rat(-1), Rat(0)}};
    s.beta = {{c1v(1), c1v(0)}, {c1v(0), c1v(-1)}};
    s.point = {{0, "J_+", {Rat(0)}, Rat(0)}};
    s.expected_diag = {Rat(0), Rat(0)};
    s.checks = {"decompose", "embed", "filtration"};
    cat.push_back(s);
  }
  {
    // unramified unitary plane over Q_3(sqrt 2) with conjugation: beta
    // splits into two self-paired lines with trivial block buildings
    Scenario s;
    s.name = "u2-unramified";
    s.tower = {Rat(2)};
    s.conj_sigma = true;
    s.eps = 1;
    s.gram = {{Rat(0), Rat(1)}, {Rat(1), Rat(0)}};
    s.beta = {{c2v(0, 0), c2v(0, 1)}, {c2v(0, 1), c2v(0, 0)}};
    s.point = {{0, "J_o", {Rat(0)}, Rat(0)}, {1, "J_o", {Rat(0)}, Rat(0)}};
    s.expected_diag = {Rat(0), Rat(0)};
    s.checks = {"decompose", "embed", "filtration"};
    cat.push_back(s);
  }
  {
    // anisotropic orthogonal plane: the centralizer building and the whole
    // ambient fixed set is a single point
    Scenario s;
    s.name = "o2-anisotropic";
    s.eps = 1;
    s.gram = {{Rat(1), Rat(0)}, {Rat(0), Rat(-3)}};
    s.beta = {{c1v(0), c1v(3)}, {c1v(1), c1v(0)}};
    s.point = {{0, "J_o", {Rat(0)}, Rat(0)}};
    s.expected_diag = {Rat(0), Rat(-1, 2)};
    s.checks = {"decompose", "embed", "filtration"};
    cat.push_back(s);
  }
  {
    // four dimensional symplectic space: a swapped pair of lines plus a
    // ramified self-paired plane, exercising both block kinds at once
    Scenario s;
    s.name = "sp4-mixed";
    s.eps = -1;
    s.gram = {{Rat(0), Rat(0), Rat(1), Rat(0)},
              {Rat(0), Rat(0), Rat(0), Rat(1)},
              {Rat(-1), Rat(0), Rat(0), Rat(0)},
              {Rat(0), Rat(-1), Rat(0), Rat(0)}};
    s.beta = {{c1v(0), c1v(0), c1v(1), c1v(0)},
              {c1v(0), c1v(1), c1v(0), c1v(0)},
              {c1v(3), c1v(0), c1v(0), c1v(0)},
              {c1v(0), c1v(0), c1v(0), c1v(-1)}};
    s.point = {{0, "J_+", {Rat(0)}, Rat(0)}, {1, "J_o", {Rat(-1, 4)}, Rat(0)}};
    s.expected_diag = {Rat(-1, 4), Rat(0), Rat(1, 4), Rat(0)};
    s.checks = {"decompose", "embed", "filtration"};
    cat.push_back(s);
  }
  {
    // general-linear variant of the ramified line: no form, one block, and
    // the embedding is plain restriction of scalars
    Scenario s;
    s.name = "gl2-ramified";
    s.gl = true;
    s.beta = {{c1v(0), c1v(1)}, {c1v(3), c1v(0)}};
    s.point = {{0, "GL", {Rat(0)}, Rat(0)}};
    s.grid_den = 8;
    s.grid_radius = Rat(1);
    s.expected_diag = {Rat(0), Rat(1, 2)};
    s.checks = {"decompose", "embed", "filtration", "search-unique"};
    cat.push_back(s);
  }
  return cat;
}

std::vector<ScenarioData> form_scenarios() {
  std::vector<ScenarioData> out;
  for (const Scenario& sc : catalog())
    if (!sc.gl) out.push_back(realize(sc));
  return out;
}

// --- the numbered criteria ---------------------------------------------------

std::string crit_double_dual(unsigned seed) {
  Rng rng(seed);
  for (const ScenarioData& sd : form_scenarios()) {
    const int n = sd.D.dim();
    for (int t = 0; t < 200; ++t) {
      const LatticeFunction lf = rand_fn(sd.F, n, rng, 12);
      if (!function_equal(dual_function(sd.h, dual_function(sd.h, lf)), lf))
        return sd.sc.name + ": dual of dual differs at " + fn_str(lf);
    }
  }
  return {};
}

std::string crit_dual_norm(unsigned seed) {
  Rng rng(seed);
  for (const ScenarioData& sd : form_scenarios()) {
    const int n = sd.D.dim();
    for (int t = 0; t < 100; ++t) {
      const LatticeFunction lf = rand_fn(sd.F, n, rng, 12);
      const LatticeFunction du = dual_function(sd.h, lf);
      for (int s = 0; s < 6; ++s) {
        const std::vector<FElem> v = rand_vec(sd.F, n, rng);
        if (!(dual_norm_value(sd.h, lf, v) == norm_value(du, v)))
          return sd.sc.name + ": dual norm disagrees with the dual function at " + fn_str(lf);
      }
      if (function_equal(du, lf) != is_self_dual(sd.h, lf))
        return sd.sc.name + ": dual fixed point test disagrees with self-duality at " + fn_str(lf);
    }
    const LatticeFunction y = embed_point(sd.D, sd.x);
    if (!function_equal(dual_function(sd.h, y), y) || !is_self_dual(sd.h, y))
      return sd.sc.name + ": the embedded point is not fixed by the dual";
    const LatticeFunction ty = translate(y, Rat(1, 4));
    if (function_equal(dual_function(sd.h, ty), ty) || is_self_dual(sd.h, ty))
      return sd.sc.name + ": a translated embedded point passes as self-dual";
  }
  return {};
}

std::string crit_recover(unsigned seed) {
  Rng rng(seed);
  for (const ScenarioData& sd : form_scenarios()) {
    const int n = sd.D.dim();
    const HermForm h_pi = scale_form(sd.F->from_rat(Rat(sd.sc.p)), sd.h);
    const HermForm h_unit = scale_form(sd.F->from_rat(Rat(2)), sd.h);
    for (int t = 0; t < 40; ++t) {
      const LatticeFunction lf = rand_fn(sd.F, n, rng, 12);
      const LatticeFunction sdual = barycenter(Rat(1, 2), lf, dual_function(sd.h, lf));
      if (!is_self_dual(sd.h, sdual))
        return sd.sc.name + ": midpoint with the dual is not self-dual at " + fn_str(lf);
      const LatticeFunction moved = translate(sdual, rand_offset(rng, 12));
      if (!function_equal(recover_self_dual(sd.h, moved), sdual))
        return sd.sc.name + ": recovery misses the self-dual member at " + fn_str(sdual);
      if (!function_equal(recover_self_dual(h_pi, moved), translate(sdual, Rat(-1, 2))))
        return sd.sc.name + ": recovery under the pi-scaled form is not the -1/2 shift";
      if (!function_equal(recover_self_dual(h_unit, moved), sdual))
        return sd.sc.name + ": recovery under a unit-scaled form moved the point";
    }
  }
  return {};
}

std::string crit_block_duality(unsigned seed) {
  Rng rng(seed);
  for (const ScenarioData& sd : form_scenarios()) {
    for (int bi = 0; bi < static_cast<int>(sd.D.blocks.size()); ++bi) {
      const CentralBlock& blk = sd.D.blocks[bi];
      if (blk.kind != BlockKind::Jo) continue;
      const HermForm hr = block_restricted_form(sd.D, bi);
      for (int t = 0; t < 50; ++t) {
        const DvrLattice LE =
            scale_pi(make_lattice(rand_basis(blk.E, blk.dE, rng)), rng.pick(-2, 2));
        const DvrLattice a = dual_lattice(hr, flatten_block_lattice(sd.D, bi, false, LE));
        const DvrLattice b = flatten_block_lattice(sd.D, bi, false, dual_lattice(blk.h_block, LE));
        if (!(contains(a, b) && contains(b, a)))
          return sd.sc.name + ": block " + std::to_string(bi) +
                 " duality disagrees with the induced form";
      }
    }
  }
  return {};
}

std::string crit_form_scaling(unsigned seed) {
  Rng rng(seed);
  for (const ScenarioData& sd : form_scenarios()) {
    const Rat units[3] = {Rat(3), Rat(1, 3), Rat(2)};
    for (const Rat& uq : units) {
      const FElem u = sd.F->from_rat(uq);
      const BetaDecomposition Du = decompose_beta(scale_form(u, sd.h), sd.beta);
      Rat s = -val(u).get();
      s /= 2;
      for (int t = 0; t < 20; ++t) {
        const CentralBuildingPoint x = rand_apartment_point(sd.D, rng, 8);
        CentralBuildingPoint xu = x;
        for (BlockPoint& bp : xu.blocks) bp.fn = translate(bp.fn, s);
        const LatticeFunction y = embed_point(sd.D, x);
        if (!function_equal(embed_point(Du, xu), translate(y, s)))
          return sd.sc.name + ": u = " + rat_str(uq) + " embedding is not the " + rat_str(s) +
                 " shift at " + fn_str(y);
      }
    }
  }
  return {};
}

std::string crit_barycenter(unsigned seed) {
  Rng rng(seed);
  for (const Scenario& sc : catalog()) {
    const ScenarioData sd = realize(sc);
    const Rat ts[3] = {Rat(1, 4), Rat(1, 2), Rat(2, 3)};
    for (int t = 0; t < 50; ++t) {
      const CentralBuildingPoint xa = rand_apartment_point(sd.D, rng, 8);
      const CentralBuildingPoint xb = rand_apartment_point(sd.D, rng, 8);
      const LatticeFunction ya = embed_point(sd.D, xa);
      const LatticeFunction yb = embed_point(sd.D, xb);
      for (const Rat& tt : ts) {
        CentralBuildingPoint xc;
        for (size_t b = 0; b < xa.blocks.size(); ++b) {
          BlockPoint bp;
          bp.block = xa.blocks[b].block;
          bp.fn = barycenter(tt, xa.blocks[b].fn, xb.blocks[b].fn);
          bp.shift = Rat(0);
          xc.blocks.push_back(bp);
        }
        if (!function_equal(embed_point(sd.D, xc), barycenter(tt, ya, yb)))
          return sc.name + ": embedding is not affine at t = " + rat_str(tt);
      }
    }
  }
  return {};
}

std::string crit_apartment_split(unsigned seed) {
  Rng rng(seed);
  for (const Scenario& sc : catalog()) {
    const ScenarioData sd = realize(sc);
    const Matrix frame = apartment_frame(sd.D);
    for (int t = 0; t < 20; ++t) {
      const CentralBuildingPoint x = rand_apartment_point(sd.D, rng, 8);
      if (!frame_splits(frame, embed_point(sd.D, x)))
        return sc.name + ": apartment frame misses an embedded point";
    }
  }
  return {};
}

std::string crit_filtration(unsigned seed) {
  Rng rng(seed);
  for (const Scenario& sc : catalog()) {
    const ScenarioData sd = realize(sc);
    const Matrix W = sc.gl ? centralizer_end_frame(sd.D) : centralizer_lie_frame(sd.D);
    for (int t = 0; t < 10; ++t) {
      // the catalog point first, then random apartment points
      const CentralBuildingPoint x = t == 0 ? sd.x : rand_apartment_point(sd.D, rng, 8);
      const FiltrationProfile want =
          sc.gl ? central_end_profile(sd.D, x) : central_lie_profile(sd.D, x);
      if (!profile_equal(want, ambient_cut_profile(embed_point(sd.D, x), W)))
        return sc.name + ": block filtration differs from the ambient cut";
    }
  }
  return {};
}

std::string crit_grid_sp2() {
  const ScenarioData sd = realize(catalog_scenario("sp2-ramified"));
  for (const int N : {4, 8, 12}) {
    const GridSearch gs = search_unique_compatible(sd, N, Rat(1, 2), true);
    if (gs.coarse) return "N = " + std::to_string(N) + ": the embedded point missed the grid";
    if (gs.passing.size() != 1 || !(gs.passing[0] == Rat(-1, 4)))
      return "N = " + std::to_string(N) + ": expected exactly {-1/4}, got " +
             rat_list_str(gs.passing);
  }
  if (!function_equal(embed_point(sd.D, sd.x), diag_fn(sd.F, {Rat(-1, 4), Rat(1, 4)})))
    return "the embedded point is not the barycenter (-1/4, 1/4)";
  const GridSearch ctrl = search_unique_compatible(sd, 8, Rat(1, 2), false);
  const std::vector<Rat> chamber = {Rat(-1, 2), Rat(-3, 8), Rat(-1, 4), Rat(-1, 8), Rat(0)};
  if (ctrl.passing != chamber)
    return "negative control: expected the closed chamber " + rat_list_str(chamber) + ", got " +
           rat_list_str(ctrl.passing);
  return {};
}

std::string crit_grid_gl2() {
  const ScenarioData sd = realize(catalog_scenario("gl2-ramified"));
  const GridSearch gs = search_unique_classes(sd, 8);
  if (gs.coarse) return "the embedded class missed the grid";
  if (gs.passing.size() != 1 || !(gs.passing[0] == Rat(1, 2)))
    return "expected exactly the class {1/2}, got " + rat_list_str(gs.passing);
  if (!function_equal(embed_point(sd.D, sd.x), diag_fn(sd.F, {Rat(0), Rat(1, 2)})))
    return "the embedded point is not the class representative (0, 1/2)";
  return {};
}

}  // namespace

std::string block_kind_name(BlockKind k) {
  switch (k) {
    case BlockKind::Jo:
      return "J_o";
    case BlockKind::Jpair:
      return "J_+";
    default:
      return "GL";
  }
}

const std::vector<Scenario>& catalog() {
  static const std::vector<Scenario> cat = build_catalog();
  return cat;
}

const Scenario& catalog_scenario(const std::string& name) {
  for (const Scenario& s : catalog())
    if (s.name == name) return s;
  fail(Err::BadInput, "unknown scenario: " + name);
}

ScenarioData realize(const Scenario& sc) {
  ScenarioData sd;
  sd.sc = sc;
  if (sc.tower.size() > 2) fail(Err::UnsupportedTower, "at most two quadratic steps are supported");
  const FieldLayer* F = Tower::rationals(sc.p);
  for (const Rat& d : sc.tower) F = Tower::quadratic(F, d);
  sd.F = F;

  const int n = static_cast<int>(sc.beta.size());
  if (n == 0) fail(Err::BadInput, "scenario has an empty matrix");
  std::vector<std::vector<FElem>> rows(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(sc.beta[i].size()) != n) fail(Err::BadInput, "scenario matrix is not square");
    for (int j = 0; j < n; ++j) {
      const std::vector<Rat>& coords = sc.beta[i][j];
      if (static_cast<int>(coords.size()) > F->deg())
        fail(Err::BadInput, "matrix entry has more coordinates than the tower degree");
      FElem x = F->zero();
      for (size_t c = 0; c < coords.size(); ++c)
        x = x + coords[c] * F->monomial(static_cast<int>(c));
      rows[i].push_back(x);
    }
  }
  sd.beta = Matrix::from_rows(F, rows);

  if (sc.gl) {
    sd.D = decompose_beta_gl(F, sd.beta);
  } else {
    if (static_cast<int>(sc.gram.size()) != n)
      fail(Err::BadInput, "gram matrix does not match the matrix size");
    const LayerInvolution sigma = sc.conj_sigma ? top_conj_involution(F) : id_involution(F);
    sd.h = make_form(F, sigma, sc.eps, Matrix::from_rat_rows(F, sc.gram));
    sd.D = decompose_beta(sd.h, sd.beta);
  }

  if (sc.point.empty()) fail(Err::BadInput, "scenario point has no blocks");
  for (const Scenario::PointBlock& pb : sc.point) {
    if (pb.i < 0 || pb.i >= static_cast<int>(sd.D.blocks.size()))
      fail(Err::BadInput, "point block index out of range");
    const CentralBlock& blk = sd.D.blocks[pb.i];
    if (pb.kind != block_kind_name(blk.kind))
      fail(Err::BadInput, "point block kind '" + pb.kind + "' does not match the decomposition");
    if (static_cast<int>(pb.offsets.size()) != blk.dE)
      fail(Err::BadInput, "point block has the wrong number of offsets");
    BlockPoint bp;
    bp.block = pb.i;
    bp.fn = diag_fn(blk.E, pb.offsets);
    bp.shift = pb.shift;
    sd.x.blocks.push_back(bp);
  }
  return sd;
}

int criterion_count() { return 10; }

std::string criterion_name(int k) {
  switch (k) {
    case 1:
      return "double dual is the identity on split functions";
    case 2:
      return "dual norms match dual functions, with self-dual fixed points";
    case 3:
      return "self-dual recovery, shifted by half the valuation under scaling";
    case 4:
      return "block lattice duality agrees with the induced form duality";
    case 5:
      return "form scaling shifts the embedded building by half the valuation";
    case 6:
      return "the embedding preserves barycenters";
    case 7:
      return "embedded apartment points split along the apartment frame";
    case 8:
      return "block filtrations equal the ambient filtration cuts";
    case 9:
      return "the symplectic grid search pins the chamber barycenter";
    case 10:
      return "the general-linear class search pins one translation class";
    default:
      fail(Err::ParameterOutOfRange, "criterion index out of range");
  }
}

Report run_criterion(int k, unsigned seed) {
  const std::string label = criterion_name(k);
  const unsigned s = seed * 10007u + static_cast<unsigned>(k);
  switch (k) {
    case 1:
      return timed(label, [&] { return crit_double_dual(s); });
    case 2:
      return timed(label, [&] { return crit_dual_norm(s); });
    case 3:
      return timed(label, [&] { return crit_recover(s); });
    case 4:
      return timed(label, [&] { return crit_block_duality(s); });
    case 5:
      return timed(label, [&] { return crit_form_scaling(s); });
    case 6:
      return timed(label, [&] { return crit_barycenter(s); });
    case 7:
      return timed(label, [&] { return crit_apartment_split(s); });
    case 8:
      return timed(label, [&] { return crit_filtration(s); });
    case 9:
      return timed(label, [&] { return crit_grid_sp2(); });
    default:
      return timed(label, [&] { return crit_grid_gl2(); });
  }
}

std::vector<Report> run_all_criteria(unsigned seed) {
  std::vector<Report> out;
  out.reserve(criterion_count());
  for (int k = 1; k <= criterion_count(); ++k) out.push_back(run_criterion(k, seed));
  return out;
}

std::vector<Report> scenario_checks(const Scenario& sc, unsigned seed) {
  std::vector<Report> out;
  for (const std::string& check : sc.checks) {
    const std::string label = sc.name + ": " + check;
    if (check == "decompose") {
      out.push_back(timed(label, [&] {
        const ScenarioData sd = realize(sc);
        if (sd.D.blocks.size() != sc.point.size())
          return std::string("unexpected number of blocks: ") +
                 std::to_string(sd.D.blocks.size());
        return std::string();
      }));
    } else if (check == "embed") {
      out.push_back(timed(label, [&] {
        const ScenarioData sd = realize(sc);
        const LatticeFunction y = embed_point(sd.D, sd.x);
        if (!sc.gl && !is_self_dual(sd.h, y))
          return std::string("embedded point is not self-dual");
        if (!sc.expected_diag.empty()) {
          if (static_cast<int>(sc.expected_diag.size()) != sd.D.dim())
            return std::string("expected offsets have the wrong length");
          if (!function_equal(y, diag_fn(sd.F, sc.expected_diag)))
            return "embedded point is " + fn_str(y) + ", expected offsets " +
                   rat_list_str(sc.expected_diag);
        }
        return std::string();
      }));
    } else if (check == "filtration") {
      out.push_back(timed(label, [&] {
        Rng rng(seed);
        const ScenarioData sd = realize(sc);
        const Matrix W = sc.gl ? centralizer_end_frame(sd.D) : centralizer_lie_frame(sd.D);
        for (int t = 0; t < 5; ++t) {
          const CentralBuildingPoint x = t == 0 ? sd.x : rand_apartment_point(sd.D, rng, 8);
          const FiltrationProfile want =
              sc.gl ? central_end_profile(sd.D, x) : central_lie_profile(sd.D, x);
          if (!profile_equal(want, ambient_cut_profile(embed_point(sd.D, x), W)))
            return std::string("block filtration differs from the ambient cut");
        }
        return std::string();
      }));
    } else if (check == "search-unique") {
      out.push_back(timed(label, [&] {
        const ScenarioData sd = realize(sc);
        if (sc.gl) {
          const GridSearch gs = search_unique_classes(sd, sc.grid_den);
          if (gs.coarse) return std::string("warning: the embedded class is not on the grid");
          if (gs.passing.size() != 1)
            return "expected one passing class, got " + rat_list_str(gs.passing);
          if (!function_equal(diag_fn(sd.F, {Rat(0), gs.passing[0]}), embed_point(sd.D, sd.x)))
            return std::string("the passing class is not the embedded class");
          return std::string();
        }
        const GridSearch gs = search_unique_compatible(sd, sc.grid_den, sc.grid_radius, true);
        if (gs.coarse) return std::string("warning: the embedded point is not on the grid");
        if (gs.passing.size() != 1)
          return "expected one passing point, got " + rat_list_str(gs.passing);
        const LatticeFunction y = diag_fn(sd.F, {gs.passing[0], Rat(-gs.passing[0])});
        if (!function_equal(y, embed_point(sd.D, sd.x)))
          return std::string("the passing point is not the embedded point");
        return std::string();
      }));
    } else {
      Report rep;
      rep.name = label;
      rep.pass = false;
      rep.witness = "unknown check name";
      out.push_back(rep);
    }
  }
  return out;
}

GridSearch search_unique_compatible(const ScenarioData& sd, int N, const Rat& R,
                                    bool with_filtration) {
  if (sd.sc.gl) fail(Err::BadInput, "the rank-one search needs an ambient form");
  if (sd.D.dim() != 2)
    fail(Err::UnsupportedDimension, "the rank-one search is implemented in dimension two");
  if (N <= 0 || !(R > 0)) fail(Err::ParameterOutOfRange, "grid denominator and radius must be positive");
  const FieldLayer* F = sd.F;

  // torus unit: c + beta with unit determinant (the reduced norm of a unit
  // of the centralizer field); candidates must pointwise fix the image
  Matrix u;
  bool found = false;
  for (long c = 1; c <= sd.sc.p + 1 && !found; ++c) {
    const Matrix cand = F->from_rat(Rat(c)) * Matrix::identity(F, 2) + sd.D.beta;
    const FElem dc = det(cand);
    if (!(dc == F->zero()) && val(dc) == Val(Rat(0))) {
      u = cand;
      found = true;
    }
  }
  if (!found) fail(Err::IsotropySearchFailed, "no integral torus unit of the shape c + beta");

  const Matrix Wh = centralizer_lie_frame(sd.D);
  const FiltrationProfile want = central_lie_profile(sd.D, sd.x);
  const LatticeFunction image = embed_point(sd.D, sd.x);

  GridSearch out;
  bool on_grid = false;
  const long kmax = to_long(rat_floor(Rat(R * Rat(N))));
  for (long k = -kmax; k <= kmax; ++k) {
    const Rat s = Rat(k, N);
    const LatticeFunction y = diag_fn(F, {s, Rat(-s)});
    if (function_equal(y, image)) on_grid = true;
    if (!is_self_dual(sd.h, y)) continue;
    if (!function_equal(act(u, y), y)) continue;
    if (with_filtration && !profile_equal(want, ambient_cut_profile(y, Wh))) continue;
    out.passing.push_back(s);
  }
  out.coarse = !on_grid;
  return out;
}

GridSearch search_unique_classes(const ScenarioData& sd, int N) {
  if (!sd.sc.gl) fail(Err::BadInput, "the class search is the general-linear variant");
  if (sd.D.dim() != 2)
    fail(Err::UnsupportedDimension, "the class search is implemented in dimension two");
  if (N <= 0) fail(Err::ParameterOutOfRange, "grid denominator must be positive");
  const FieldLayer* F = sd.F;

  const Matrix We = centralizer_end_frame(sd.D);
  const FiltrationProfile want = central_end_profile(sd.D, sd.x);
  const LatticeFunction image = embed_point(sd.D, sd.x);
  std::vector<FElem> e1(2, F->zero());
  e1[0] = F->one();
  const Val a0 = norm_value(image, e1);

  GridSearch out;
  bool on_grid = false;
  for (long k = 0; k < N; ++k) {
    const Rat d = Rat(k, N);
    const LatticeFunction y = diag_fn(F, {Rat(0), d});
    if (a0.is_finite() && function_equal(translate(y, Rat(-a0.get())), image)) on_grid = true;
    if (profile_contains(ambient_cut_profile(y, We), want)) out.passing.push_back(d);
  }
  out.coarse = !on_grid;
  return out;
}

std::string export_rank1_tree(const ScenarioData& sd, int depth) {
  if (sd.D.dim() != 2)
    fail(Err::UnsupportedDimension, "the class tree export is rank one (dimension two)");
  if (sd.F->deg() != 1)
    fail(Err::UnsupportedTower, "the class tree export enumerates classes over the rationals");
  if (depth < 0) fail(Err::ParameterOutOfRange, "depth must be nonnegative");
  const FieldLayer* F = sd.F;
  const long p = sd.sc.p;

  const auto normalize = [&](const DvrLattice& L) {
    return scale_pi(L, -to_long(rat_floor(min_val(L).get())));
  };
  const auto key_of = [](const DvrLattice& L) {
    std::ostringstream os;
    for (int i = 0; i < L.basis.rows(); ++i)
      for (int j = 0; j < L.basis.cols(); ++j) {
        if (i + j) os << ";";
        os << L.basis.at(i, j).str();
      }
    return os.str();
  };
  const auto label_of = [](const DvrLattice& L) {
    std::ostringstream os;
    for (int i = 0; i < L.basis.rows(); ++i) {
      if (i) os << "; ";
      for (int j = 0; j < L.basis.cols(); ++j) {
        if (j) os << ",";
        os << rat_str(L.basis.at(i, j).c[0]);
      }
    }
    return os.str();
  };
  const auto neighbors = [&](const DvrLattice& L) {
    std::vector<DvrLattice> out;
    const std::vector<FElem> b1 = L.basis.col(0), b2 = L.basis.col(1);
    const FElem pi = unif_pow(F, 1);
    for (long t = 0; t < p; ++t) {
      Matrix m(F, 2, 2);
      std::vector<FElem> c0(2, F->zero()), c1(2, F->zero());
      for (int i = 0; i < 2; ++i) {
        c0[i] = b1[i] + F->from_rat(Rat(t)) * b2[i];
        c1[i] = pi * b2[i];
      }
      m.set_col(0, c0);
      m.set_col(1, c1);
      out.push_back(normalize(make_lattice(m)));
    }
    Matrix m(F, 2, 2);
    std::vector<FElem> c0(2, F->zero());
    for (int i = 0; i < 2; ++i) c0[i] = pi * b1[i];
    m.set_col(0, c0);
    m.set_col(1, b2);
    out.push_back(normalize(make_lattice(m)));
    return out;
  };

  std::vector<DvrLattice> nodes;
  std::vector<std::string> keys;
  std::vector<int> dist;
  std::map<std::string, int> index;
  std::vector<std::pair<int, int>> edges;

  const DvrLattice root = normalize(standard_lattice(F, 2));
  nodes.push_back(root);
  keys.push_back(key_of(root));
  dist.push_back(0);
  index[keys[0]] = 0;
  std::queue<int> bfs;
  bfs.push(0);
  while (!bfs.empty()) {
    const int i = bfs.front();
    bfs.pop();
    if (dist[i] == depth) continue;
    for (const DvrLattice& nb : neighbors(nodes[i])) {
      const std::string k = key_of(nb);
      const auto it = index.find(k);
      if (it != index.end()) continue;  // the parent: the class graph is a tree
      const int j = static_cast<int>(nodes.size());
      nodes.push_back(nb);
      keys.push_back(k);
      dist.push_back(dist[i] + 1);
      index[k] = j;
      edges.emplace_back(i, j);
      bfs.push(j);
    }
  }

  // classes swept out by the embedded point over one period: a vertex when
  // the image is a chain of one class, the pair of classes of a chamber edge
  // otherwise
  const LatticeFunction image = embed_point(sd.D, sd.x);
  std::set<std::string> img;
  for (const Rat& r : jump_reps(image)) img.insert(key_of(normalize(eval(image, r))));

  std::ostringstream os;
  os << "graph lattice_class_tree {\n";
  os << "  // ball of radius " << depth << " around the standard class, p = " << p << "\n";
  for (size_t i = 0; i < nodes.size(); ++i) {
    os << "  n" << i << " [label=\"" << label_of(nodes[i]) << "\"";
    if (!sd.sc.gl) {
      std::vector<Rat> zero(2, Rat(0));
      const bool sdl = is_self_dual(sd.h, make_lattice_function(nodes[i].basis, zero));
      os << ", selfdual=" << (sdl ? "true" : "false");
    }
    if (img.size() == 1 && img.count(keys[i])) os << ", image=true";
    os << "];\n";
  }
  for (const auto& e : edges) {
    os << "  n" << e.first << " -- n" << e.second;
    if (img.size() == 2 && img.count(keys[e.first]) && img.count(keys[e.second]))
      os << " [chamber=true]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace btlf
