#include "btlf/centralizer.hpp"

#include <algorithm>

namespace btlf {

namespace {

Matrix from_cols(const FieldLayer* L, int rows, const std::vector<std::vector<FElem>>& cols) {
  Matrix M(L, rows, static_cast<int>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) M.set_col(static_cast<int>(j), cols[j]);
  return M;
}

const FieldLayer* root_of(const FieldLayer* L) {
  while (L->parent()) L = L->parent();
  return L;
}

// (block, side) summands of the centralizer in global frame order.
struct Side {
  int bi;
  bool minus;
};

std::vector<Side> all_sides(const BetaDecomposition& D) {
  std::vector<Side> out;
  for (size_t bi = 0; bi < D.blocks.size(); ++bi) {
    out.push_back({static_cast<int>(bi), false});
    if (D.blocks[bi].kind == BlockKind::Jpair) out.push_back({static_cast<int>(bi), true});
  }
  return out;
}

// Flat ambient columns of the standard endomorphism units of one side, in
// the flat coordinate order of the side's own End filtration: unit (i, j)
// times each monomial of the side field, monomial fastest.
Matrix side_units_flat(const BetaDecomposition& D, int bi, bool minus) {
  const CentralBlock& b = D.blocks[bi];
  const FieldLayer* E = minus ? b.Eminus : b.E;
  const FieldLayer* root = root_of(D.F);
  const int n = D.dim();
  std::vector<std::vector<FElem>> cols;
  for (int i = 0; i < b.dE; ++i)
    for (int j = 0; j < b.dE; ++j)
      for (int c = 0; c < E->deg(); ++c) {
        Matrix aE(E, b.dE, b.dE);
        aE.at(i, j) = E->monomial(c);
        cols.push_back(flatten_endo(block_endo_ambient(D, bi, minus, aE)));
      }
  return from_cols(root, n * n * D.F->deg(), cols);
}

// One component per block, ordered and validated.
std::vector<const BlockPoint*> ordered_components(const BetaDecomposition& D,
                                                  const CentralBuildingPoint& x) {
  if (x.blocks.size() != D.blocks.size())
    fail(Err::BlockMismatch, "the point must carry one component per block");
  std::vector<const BlockPoint*> out(D.blocks.size(), nullptr);
  for (const BlockPoint& bp : x.blocks) {
    if (bp.block < 0 || bp.block >= static_cast<int>(D.blocks.size()))
      fail(Err::BlockMismatch, "block index out of range");
    if (out[bp.block]) fail(Err::BlockMismatch, "duplicate block component");
    const CentralBlock& blk = D.blocks[bp.block];
    if (bp.fn.L != blk.E || bp.fn.dim() != blk.dE)
      fail(Err::BlockMismatch, "component has the wrong shape for its block");
    if (blk.kind == BlockKind::Jo && bp.shift != 0)
      fail(Err::BadInput, "self-paired components carry no translation");
    out[bp.block] = &bp;
  }
  return out;
}

struct SideFn {
  int bi;
  bool minus;
  LatticeFunction fn;
};

// The lattice function carried by each side: the (translated) component on
// plus sides, its cross dual on minus sides.
std::vector<SideFn> side_functions(const BetaDecomposition& D, const CentralBuildingPoint& x) {
  std::vector<const BlockPoint*> comp = ordered_components(D, x);
  std::vector<SideFn> out;
  for (const Side& s : all_sides(D)) {
    const BlockPoint& bp = *comp[s.bi];
    LatticeFunction plus = translate(bp.fn, bp.shift);
    if (s.minus)
      out.push_back({s.bi, true, cross_dual(D, s.bi, plus)});
    else
      out.push_back({s.bi, false, std::move(plus)});
  }
  return out;
}

// Jump-radius candidates of the End filtration of fn: the classes of offset
// differences modulo 1/e, spread over one period.
std::vector<Rat> end_candidates(const LatticeFunction& fn) {
  std::vector<Rat> classes;
  for (const Rat& a : fn.offsets)
    for (const Rat& b : fn.offsets) classes.push_back(Rat(a - b));
  return period_candidates(classes, static_cast<int>(fn.L->e()));
}

std::vector<Rat> merge_candidates(std::vector<Rat> a, const std::vector<Rat>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

DvrLattice blockdiag_lattice(const FieldLayer* root, const std::vector<DvrLattice>& parts) {
  int N = 0;
  for (const DvrLattice& p : parts) N += p.dim();
  Matrix M(root, N, N);
  int off = 0;
  for (const DvrLattice& p : parts) {
    for (int i = 0; i < p.dim(); ++i)
      for (int j = 0; j < p.dim(); ++j) M.at(off + i, off + j) = p.basis.at(i, j);
    off += p.dim();
  }
  return make_lattice(M);
}

}  // namespace

// --------------------------------------------------------------------------
// Centralizer frames in flat ambient coordinates.

Matrix centralizer_lie_frame(const BetaDecomposition& D) {
  if (D.gl) fail(Err::BadInput, "the Lie frame needs an ambient form");
  const FieldLayer* root = root_of(D.F);
  const int N = D.dim() * D.dim() * D.F->deg();
  Matrix out(root, N, 0);
  for (size_t bi = 0; bi < D.blocks.size(); ++bi) {
    const CentralBlock& b = D.blocks[bi];
    if (b.kind == BlockKind::Jo) {
      out = hstack(out, side_units_flat(D, static_cast<int>(bi), false) *
                            lie_subspace_frame(b.h_block));
    } else {
      // diagonal embedding a  |->  a - a^sigma of the plus side
      std::vector<std::vector<FElem>> cols;
      for (int i = 0; i < b.dE; ++i)
        for (int j = 0; j < b.dE; ++j)
          for (int c = 0; c < b.E->deg(); ++c) {
            Matrix aE(b.E, b.dE, b.dE);
            aE.at(i, j) = b.E->monomial(c);
            Matrix A = block_endo_ambient(D, static_cast<int>(bi), false, aE);
            cols.push_back(flatten_endo(A - adjoint(D.h, A)));
          }
      out = hstack(out, from_cols(root, N, cols));
    }
  }
  return out;
}

Matrix centralizer_end_frame(const BetaDecomposition& D) {
  const FieldLayer* root = root_of(D.F);
  Matrix out(root, D.dim() * D.dim() * D.F->deg(), 0);
  for (const Side& s : all_sides(D)) out = hstack(out, side_units_flat(D, s.bi, s.minus));
  return out;
}

// --------------------------------------------------------------------------
// Filtration profiles.

FiltrationProfile central_lie_profile(const BetaDecomposition& D,
                                      const CentralBuildingPoint& x) {
  if (D.gl) fail(Err::BadInput, "the Lie filtration needs an ambient form");
  const FieldLayer* root = root_of(D.F);

  // per block: the plus-side function, and the Lie cut frame on Jo blocks
  std::vector<const BlockPoint*> comp = ordered_components(D, x);
  std::vector<LatticeFunction> fns;
  std::vector<Matrix> lie_frames;
  std::vector<Rat> cands;
  for (size_t bi = 0; bi < D.blocks.size(); ++bi) {
    const CentralBlock& b = D.blocks[bi];
    fns.push_back(translate(comp[bi]->fn, comp[bi]->shift));
    lie_frames.push_back(b.kind == BlockKind::Jo ? lie_subspace_frame(b.h_block)
                                                 : Matrix());
    cands = merge_candidates(std::move(cands), end_candidates(fns.back()));
  }

  auto ev = [&](const Rat& r) {
    std::vector<DvrLattice> parts;
    for (size_t bi = 0; bi < D.blocks.size(); ++bi) {
      DvrLattice full = end_lattice_flat(fns[bi], r);
      if (D.blocks[bi].kind == BlockKind::Jo)
        parts.push_back(make_lattice(intersect_subspace_coords(full, lie_frames[bi])));
      else
        parts.push_back(full);
    }
    return blockdiag_lattice(root, parts);
  };
  return make_profile(cands, ev);
}

FiltrationProfile central_end_profile(const BetaDecomposition& D,
                                      const CentralBuildingPoint& x) {
  const FieldLayer* root = root_of(D.F);
  std::vector<SideFn> sides = side_functions(D, x);
  std::vector<Rat> cands;
  for (const SideFn& s : sides) cands = merge_candidates(std::move(cands), end_candidates(s.fn));

  auto ev = [&](const Rat& r) {
    std::vector<DvrLattice> parts;
    for (const SideFn& s : sides) parts.push_back(end_lattice_flat(s.fn, r));
    return blockdiag_lattice(root, parts);
  };
  return make_profile(cands, ev);
}

FiltrationProfile central_end_cut_profile(const BetaDecomposition& D, const Matrix& Wh,
                                          const CentralBuildingPoint& x) {
  std::vector<SideFn> sides = side_functions(D, x);
  std::vector<Matrix> units;
  std::vector<Rat> cands;
  for (const SideFn& s : sides) {
    units.push_back(side_units_flat(D, s.bi, s.minus));
    cands = merge_candidates(std::move(cands), end_candidates(s.fn));
  }

  auto ev = [&](const Rat& r) {
    Matrix B(Wh.layer(), Wh.rows(), 0);
    for (size_t i = 0; i < sides.size(); ++i)
      B = hstack(B, units[i] * end_lattice_flat(sides[i].fn, r).basis);
    auto C = try_solve(B, Wh);
    if (!C) fail(Err::BadInput, "frame does not lie inside the centralizer");
    return make_lattice(inverse(dvr_hnf(C->transpose())).transpose());
  };
  return make_profile(cands, ev);
}

FiltrationProfile ambient_cut_profile(const LatticeFunction& y, const Matrix& W) {
  std::vector<Rat> cands = end_candidates(y);
  auto ev = [&](const Rat& r) {
    return make_lattice(intersect_subspace_coords(end_lattice_flat(y, r), W));
  };
  return make_profile(cands, ev);
}

// --------------------------------------------------------------------------
// Apartments.

int apartment_rank(const BetaDecomposition& D) {
  int rank = 0;
  for (const CentralBlock& b : D.blocks) {
    if (b.kind == BlockKind::Jo)
      rank += witt_decompose(b.h_block).witt_index();
    else
      rank += b.dE;
  }
  return rank;
}

CentralBuildingPoint apartment_point(const BetaDecomposition& D, const std::vector<Rat>& params) {
  if (static_cast<int>(params.size()) != apartment_rank(D))
    fail(Err::ParameterOutOfRange, "wrong number of apartment parameters");
  CentralBuildingPoint x;
  size_t next = 0;
  for (size_t bi = 0; bi < D.blocks.size(); ++bi) {
    const CentralBlock& b = D.blocks[bi];
    BlockPoint bp;
    bp.block = static_cast<int>(bi);
    bp.shift = Rat(0);
    if (b.kind == BlockKind::Jo) {
      WittDecomposition wd = witt_decompose(b.h_block);
      std::vector<std::vector<FElem>> cols;
      std::vector<Rat> offs;
      for (int t = 0; t < wd.witt_index(); ++t) {
        const Rat& s = params[next++];
        cols.push_back(wd.e[t]);
        offs.push_back(s);
        cols.push_back(wd.f[t]);
        offs.push_back(Rat(-s));
      }
      for (int j = 0; j < wd.aniso.cols(); ++j) {
        cols.push_back(wd.aniso.col(j));
        offs.push_back(Rat(Rat(-val(wd.aniso_diag[j]).get()) / 2));
      }
      bp.fn = make_lattice_function(from_cols(b.E, b.dE, cols), offs);
    } else {
      std::vector<Rat> offs;
      for (int t = 0; t < b.dE; ++t) offs.push_back(params[next++]);
      bp.fn = make_lattice_function(Matrix::identity(b.E, b.dE), offs);
    }
    x.blocks.push_back(std::move(bp));
  }
  return x;
}

Matrix apartment_frame(const BetaDecomposition& D) {
  const int n = D.dim();
  std::vector<std::vector<FElem>> cols;

  // monomial refinement of a block basis, pushed to ambient coordinates
  auto push_side = [&](int bi, bool minus, const Matrix& basisE) {
    const CentralBlock& b = D.blocks[bi];
    const FieldLayer* E = minus ? b.Eminus : b.E;
    const Matrix& frame = minus ? b.frame_minus : b.frame_plus;
    for (int k = 0; k < basisE.cols(); ++k)
      for (int c = 0; c < E->deg() / D.F->deg(); ++c) {
        FElem mc = E->monomial(c * D.F->deg());
        std::vector<FElem> w;
        for (const FElem& entry : basisE.col(k)) w.push_back(mc * entry);
        cols.push_back(mat_vec(frame, flatten_vec(w, D.F)));
      }
  };

  for (size_t bi = 0; bi < D.blocks.size(); ++bi) {
    const CentralBlock& b = D.blocks[bi];
    if (b.kind == BlockKind::Jo) {
      WittDecomposition wd = witt_decompose(b.h_block);
      std::vector<std::vector<FElem>> wcols;
      for (int t = 0; t < wd.witt_index(); ++t) {
        wcols.push_back(wd.e[t]);
        wcols.push_back(wd.f[t]);
      }
      for (int j = 0; j < wd.aniso.cols(); ++j) wcols.push_back(wd.aniso.col(j));
      push_side(static_cast<int>(bi), false, from_cols(b.E, b.dE, wcols));
    } else {
      push_side(static_cast<int>(bi), false, Matrix::identity(b.E, b.dE));
      if (b.kind == BlockKind::Jpair) {
        // the dual basis splits the cross dual of every plus-side translate
        LatticeFunction dual =
            cross_dual(D, static_cast<int>(bi), standard_function(b.E, b.dE));
        push_side(static_cast<int>(bi), true, dual.basis);
      }
    }
  }
  return from_cols(D.F, n, cols);
}

bool frame_splits(const Matrix& frame, const LatticeFunction& lf) {
  if (frame.rows() != lf.dim() || frame.cols() != lf.dim())
    fail(Err::DimensionMismatch, "frame has the wrong shape");
  std::vector<Rat> offs;
  for (int j = 0; j < frame.cols(); ++j) {
    Val a = norm_value(lf, frame.col(j));
    if (!a.is_finite()) return false;
    offs.push_back(Rat(-a.get()));
  }
  return function_equal(lf, make_lattice_function(frame, offs));
}

}  // namespace btlf
