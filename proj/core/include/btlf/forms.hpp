#pragma once

// Epsilon-hermitian forms h(x, y) = sigma(x)^T G y (twisted-linear in the
// first argument), their adjoint involutions, dual lattices, and exact Witt
// decompositions.  Isotropy is decided in the completion; witness vectors are
// constructed over the ground field and the search reports failure honestly
// when no rational witness is found.

#include "btlf/lattice.hpp"

namespace btlf {

enum class FormCase { orthogonal, symplectic, unitary };

struct HermForm {
  const FieldLayer* F = nullptr;
  LayerInvolution sigma;  // involution of F (identity for orthogonal/symplectic)
  int eps = 1;
  Matrix gram;            // invertible, gram^T = eps * sigma(gram)

  int dim() const { return gram.rows(); }
  FormCase kind() const;
};

// Validates the symmetry relation and invertibility.
HermForm make_form(const FieldLayer* F, const LayerInvolution& sigma, int eps,
                   const Matrix& gram);

FElem h_apply(const HermForm& h, const std::vector<FElem>& x, const std::vector<FElem>& y);

// Gram matrix of h restricted to the columns of W.
Matrix gram_on(const HermForm& h, const Matrix& W);

// Adjoint anti-involution: h(a x, y) = h(x, adjoint(a) y).
Matrix adjoint(const HermForm& h, const Matrix& a);

// Scale the form by a sigma-fixed invertible element.
HermForm scale_form(const FElem& u, const HermForm& h);

// Dual lattice {x : h(x, M) contained in p_F}.
DvrLattice dual_lattice(const HermForm& h, const DvrLattice& M);

// omega(x) = v(h(x,x)) / 2, the square-norm valuation.
Val omega_value(const HermForm& h, const std::vector<FElem>& x);

// Hilbert symbol of the completion of the layer (odd residue characteristic).
int hilbert_symbol_layer(const FElem& a, const FElem& b);

// Witt decomposition: hyperbolic pairs (h(e_i, f_i) = 1, both isotropic) plus
// an orthogonal anisotropic kernel, everything mutually h-orthogonal.
struct WittDecomposition {
  std::vector<std::vector<FElem>> e, f;  // hyperbolic pairs, ambient coords
  Matrix aniso;                          // n x a orthogonal basis of the kernel
  std::vector<FElem> aniso_diag;         // h(w_k, w_k) for the kernel basis
  int witt_index() const { return static_cast<int>(e.size()); }
};

// UnsupportedDimension beyond dim 8; AnisotropicTooLarge when the kernel in
// the completion has dimension > 2; IsotropySearchFailed when the form is
// isotropic in the completion but no witness was found over the ground field.
WittDecomposition witt_decompose(const HermForm& h);

// Whether the form is isotropic over the completion (the decision procedure
// backing witt_decompose).
bool padically_isotropic(const HermForm& h);

}  // namespace btlf
