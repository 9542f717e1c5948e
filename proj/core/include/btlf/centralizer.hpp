#pragma once

// Decomposition of a skew element beta of the unitary Lie algebra into the
// simple blocks of E = F[beta], and the induced embedding of the block
// buildings into the ambient building of lattice functions.
//
// The minimal polynomial of beta is required to be squarefree, so E is a
// product of field extensions E_i / F, each a single block V_i = e_i V.  The
// adjoint involution permutes the blocks: a self-paired block carries an
// involution of E_i and an induced eps-hermitian form h_i (kind Jo); a
// swapped pair (V_i, V_{-i}) carries no form and the two halves are matched
// through the cross dual instead (kind Jpair).  With no form at all every
// block is plain restriction of scalars (kind Gl).
//
// embed_point assembles a self-dual ambient function from one lattice
// function per block; the *_profile functions realize the block Lie/End
// filtrations inside flat ambient coordinates, where they can be compared
// exactly against the filtrations cut out by an ambient point.

#include "btlf/endo_filt.hpp"

namespace btlf {

enum class BlockKind { Jo, Jpair, Gl };

struct CentralBlock {
  BlockKind kind = BlockKind::Gl;
  std::vector<FElem> factor;  // monic irreducible factor of the minimal polynomial
  const FieldLayer* E = nullptr;       // block field F[x]/(factor)
  const FieldLayer* Eminus = nullptr;  // field of the partner block (Jpair)
  int dE = 0;                          // E-dimension of V_i

  // The layer generator g of E acts on V_i as (beta + c0) / s, where
  // gamma = beta|_{V_i} + c0 completes the square of the factor and s is the
  // uniformizer power absorbed by the square-class reduction of gamma^2.
  // Jpair blocks carry the same data for the partner side.
  Matrix idem, idem_minus;       // e_i, and e_{-i} for pairs
  FElem c0_plus, s_plus;         // zero shift and s = 1 when E == F
  FElem c0_minus, s_minus;
  Matrix frame_plus;             // n x n_i columns g^c w_t (t slot-major)
  Matrix frame_minus;            // pairs only

  // Jo data: the involution induced on E, the equivariant form lambda used
  // to transport h, and the induced form h_i with h = lambda . h_i on V_i.
  LayerInvolution sigmaE;
  SigmaLinearForm lam;
  HermForm h_block;
};

struct BetaDecomposition {
  bool gl = false;   // no ambient form: every block is a Gl block
  HermForm h;        // ambient form (unset when gl)
  const FieldLayer* F = nullptr;
  Matrix beta;
  std::vector<CentralBlock> blocks;

  // hstack of all block frames in order (plus, then minus for pairs), its
  // inverse, and the starting column of each side inside the global frame.
  Matrix global_frame, global_frame_inv;
  std::vector<int> start_plus, start_minus;

  int dim() const { return beta.rows(); }
};

// NotInLieAlgebra unless beta^sigma_h = -beta; H1Violated when the minimal
// polynomial is not squarefree; UnsupportedFactorDegree for factors of
// degree >= 3 that resist the rational-root / resolvent factorization;
// DegenerateExtension when a block field splits in the completion.
BetaDecomposition decompose_beta(const HermForm& h, const Matrix& beta);

// The same block structure for beta in End_F(V) with no form (builds Gl
// blocks; used for the general-linear compatibility searches).
BetaDecomposition decompose_beta_gl(const FieldLayer* F, const Matrix& beta);

// Minimal polynomial of a square matrix, monic, coefficients low-to-high.
std::vector<FElem> minimal_polynomial(const Matrix& a);

// --- block coordinates ------------------------------------------------------

// E-coordinates (length dE over the side field) <-> ambient F-coordinates.
// ambient_to_block is BlockMismatch if x does not lie in the side subspace.
std::vector<FElem> block_to_ambient(const BetaDecomposition& D, int bi, bool minus,
                                    const std::vector<FElem>& xE);
std::vector<FElem> ambient_to_block(const BetaDecomposition& D, int bi, bool minus,
                                    const std::vector<FElem>& x);

// Ambient matrix of an E-endomorphism of one side (zero on all other blocks).
Matrix block_endo_ambient(const BetaDecomposition& D, int bi, bool minus, const Matrix& aE);

// The ambient form restricted to the side subspace, as an F-form on the
// frame coordinates (Jo blocks; the restriction is nondegenerate there).
HermForm block_restricted_form(const BetaDecomposition& D, int bi);

// An o_E-lattice of the side viewed as an o_F-lattice in frame coordinates.
DvrLattice flatten_block_lattice(const BetaDecomposition& D, int bi, bool minus,
                                 const DvrLattice& LE);

// --- the embedding ----------------------------------------------------------

// Cross dual of a plus-side function of a Jpair block: the function on the
// partner side split by the h-dual E-basis, with the pairing conductors
// folded into the offsets.  Realizes {y : h(y, Lambda((-r)+)) in p_F}.
LatticeFunction cross_dual(const BetaDecomposition& D, int bi, const LatticeFunction& fnE);

struct BlockPoint {
  int block = 0;
  LatticeFunction fn;  // over blocks[block].E, dim dE, plus-frame coordinates
  Rat shift;           // extra translation (Jpair/Gl only; must be 0 on Jo)
};

struct CentralBuildingPoint {
  std::vector<BlockPoint> blocks;
};

// Direct sum of the block functions in ambient coordinates: Jo blocks are
// restricted scalars of self-dual functions, Jpair blocks contribute the
// plus side and its cross dual.  The result is verified self-dual (BadInput
// on a Jo component that is not self-dual for its induced form).
LatticeFunction embed_point(const BetaDecomposition& D, const CentralBuildingPoint& x);

// --- filtrations in flat ambient coordinates --------------------------------

// Frames (flat columns over Q) of the centralizer Lie algebra
//   h = { a in End_E(V) : a + a^sigma_h = 0 }
// and of the full centralizer End_E(V).
Matrix centralizer_lie_frame(const BetaDecomposition& D);
Matrix centralizer_end_frame(const BetaDecomposition& D);

// h_{x,r} in the coordinates of centralizer_lie_frame: per block the End
// filtration of the block function, cut to the block Lie algebra on Jo
// blocks and embedded diagonally ((a, -a^sigma)) on Jpair blocks.
FiltrationProfile central_lie_profile(const BetaDecomposition& D, const CentralBuildingPoint& x);

// The full End filtration H~_{x,r} of the centralizer in the coordinates of
// centralizer_end_frame (each side filtered independently).
FiltrationProfile central_end_profile(const BetaDecomposition& D, const CentralBuildingPoint& x);

// H~_{x,r} intersected with the Lie frame Wh, in Wh coordinates.
FiltrationProfile central_end_cut_profile(const BetaDecomposition& D, const Matrix& Wh,
                                          const CentralBuildingPoint& x);

// g~_{y,r} (the End filtration of an ambient function) cut to a frame, in
// frame coordinates; used with either centralizer frame.
FiltrationProfile ambient_cut_profile(const LatticeFunction& y, const Matrix& W);

// --- apartments --------------------------------------------------------------

// Number of free parameters of the block apartment: one per hyperbolic pair
// on Jo blocks (Witt decomposition of h_i), dE on Jpair/Gl blocks.
int apartment_rank(const BetaDecomposition& D);

// The apartment point with the given parameters: Jo blocks get offsets
// (s_t, -s_t) on the hyperbolic pairs and the fixed self-dual offsets
// -v(h_i(w,w))/2 on the anisotropic kernel; Jpair/Gl blocks get the
// parameters as offsets on the standard block basis.
CentralBuildingPoint apartment_point(const BetaDecomposition& D, const std::vector<Rat>& params);

// One ambient frame splitting the image of every block apartment point:
// the monomial refinement of the block Witt bases (and of the dual bases on
// the minus sides).
Matrix apartment_frame(const BetaDecomposition& D);

// Whether the columns of `frame` split lf (offsets recovered from the norm).
bool frame_splits(const Matrix& frame, const LatticeFunction& lf);

}  // namespace btlf
