#pragma once

// Tower of at most two quadratic layers over Q, carrying the p-adic
// valuation (normalized with v(p) = 1).  Layers are immutable, interned for
// the lifetime of the process, and identified by pointer.
//
// Every layer comes with its monomial Q-basis {1, g_F, g_E, g_F g_E} (or a
// prefix of it).  Construction rejects generators whose square is a square in
// the completion, which is exactly the condition for the valuation to extend
// uniquely; as a consequence the monomial basis always "splits" the
// valuation: v(sum q_i b_i) = min_i (v_p(q_i) + v(b_i)).

#include "btlf/numeric.hpp"

#include <memory>
#include <utility>

namespace btlf {

class FieldLayer;
struct FElem;

class FieldLayer {
 public:
  long p() const { return p_; }
  const FieldLayer* parent() const { return parent_; }
  int deg() const { return deg_; }          // degree over Q
  int e() const { return e_; }              // ramification index over Q
  int f() const { return f_; }              // residue degree over Q
  const Rat& basis_val(int i) const { return basis_val_[i]; }
  const std::string& name() const { return name_; }
  bool has_top_gen(int i) const { return top_mask_[i]; }
  bool has_parent_gen(int i) const { return parent_mask_[i]; }
  // coordinates of b_i * b_j in the monomial basis
  const std::vector<Rat>& mult(int i, int j) const { return mult_[i * deg_ + j]; }
  // generator square (coords in the parent layer), empty for Q
  const std::vector<Rat>& mu_coords() const { return mu_coords_; }
  Int residue_size() const;                 // p^f

  FElem zero() const;
  FElem one() const;
  FElem from_rat(const Rat& q) const;
  FElem monomial(int i) const;              // b_i
  FElem uniformizer() const;                // valuation exactly 1/e

 private:
  friend class Tower;
  FieldLayer() = default;

  long p_ = 0;
  const FieldLayer* parent_ = nullptr;
  int deg_ = 1, e_ = 1, f_ = 1;
  std::vector<Rat> mu_coords_;
  std::vector<Rat> basis_val_;
  std::vector<bool> top_mask_, parent_mask_;
  std::vector<std::vector<Rat>> mult_;
  std::vector<Rat> unif_coords_;
  std::string name_;
};

// Element of a layer: flat rational coordinates in the monomial basis.
struct FElem {
  const FieldLayer* L = nullptr;
  std::vector<Rat> c;

  bool is_zero() const;
  std::string str() const;
};

FElem operator+(const FElem& a, const FElem& b);
FElem operator-(const FElem& a, const FElem& b);
FElem operator-(const FElem& a);
FElem operator*(const FElem& a, const FElem& b);
FElem operator*(const Rat& q, const FElem& a);
bool operator==(const FElem& a, const FElem& b);
inline bool operator!=(const FElem& a, const FElem& b) { return !(a == b); }

FElem inv(const FElem& a);                       // RankDeficient on zero
inline FElem operator/(const FElem& a, const FElem& b) { return a * inv(b); }

Val val(const FElem& a);
bool is_integral(const FElem& a);                // v >= 0

// Galois conjugation over the parent layer (flips the top generator).
FElem conj_top(const FElem& a);

// Apply a sign pattern (+-1 per monomial); used for the building involutions.
FElem apply_signs(const FElem& a, const std::vector<int>& signs);

// Lift an element of an ancestor layer into `target`.
FElem lift(const FElem& a, const FieldLayer* target);

// Trace and norm to the parent layer.
FElem trace_to_parent(const FElem& a);
FElem norm_to_parent(const FElem& a);

// Canonical representative modulo pi^k o_L (coordinate-wise digit cutoff).
FElem elem_mod(const FElem& a, long k);

// pi^k as an element (k may be negative).
FElem unif_pow(const FieldLayer* L, long k);

// Exact square root inside the layer, if one exists.
std::optional<FElem> sqrt_in_layer(const FElem& a);

// Whether x != 0 is a square in the completion of L at its place.
bool is_square_in_completion(const FElem& x);

// (mu', s) with mu = s^2 mu', s a uniformizer power, and v(mu') in
// [0, 2/e): the square-class representative whose square root has an
// adapted valuation.
std::pair<FElem, FElem> reduce_square_class(const FElem& mu);

// The tower factory.  Layers are interned: building the same extension twice
// yields the same pointer.
class Tower {
 public:
  // Base layer: Q with v_p.  UnsupportedResidueChar unless p is an odd prime.
  static const FieldLayer* rationals(long p);

  // Quadratic layer over `base` generated by a square root of mu.  The
  // square class of mu is first reduced by uniformizer squares so that the
  // new generator has valuation in [0, 1/e_base); this keeps every monomial
  // o-adapted (o_L is the free o_base-module on the relative monomials),
  // which the lattice-flattening routines depend on.  quadratic(Q, 27) and
  // quadratic(Q, 3) therefore intern to the same layer.
  // DegenerateExtension if mu is a square in the completion (this includes
  // rational squares); UnsupportedTower above the second quadratic layer.
  static const FieldLayer* quadratic(const FieldLayer* base, const FElem& mu);
  static const FieldLayer* quadratic(const FieldLayer* base, const Rat& d);
};

bool is_ancestor(const FieldLayer* anc, const FieldLayer* l);

// ---------------------------------------------------------------------------
// Involutions and sigma-equivariant linear forms.

// An involution acting diagonally on the monomial basis of a layer.
struct LayerInvolution {
  const FieldLayer* L = nullptr;
  std::vector<int> signs;  // one entry per monomial

  FElem operator()(const FElem& x) const { return apply_signs(x, signs); }
  bool trivial() const;
};

// Identity, and conjugation over the parent layer, as involutions.
LayerInvolution id_involution(const FieldLayer* L);
LayerInvolution top_conj_involution(const FieldLayer* L);
// The involution with sign -1 exactly on monomials containing any generator
// listed in `flip_parent_gen` / `flip_top_gen`.
LayerInvolution make_involution(const FieldLayer* L, bool flip_parent_gen, bool flip_top_gen);

// The fixed field of an involution, realized as its own interned layer
// together with the embedding into the big layer.
struct FixedSubfield {
  const FieldLayer* big = nullptr;
  const FieldLayer* sub = nullptr;
  std::vector<FElem> emb;  // images in `big` of sub's monomials

  FElem to_big(const FElem& x) const;
  FElem from_big(const FElem& y) const;  // BadInput if y is not fixed
};

FixedSubfield fixed_subfield(const LayerInvolution& sigma);

// sigma-equivariant F-linear form lambda: E -> F with the conductor
// normalization {e in E^o : lambda^o(e o_{E^o}) in p_{F_o}} = p_{E^o}.
struct SigmaLinearForm {
  const FieldLayer* E = nullptr;
  const FieldLayer* F = nullptr;
  LayerInvolution sigma;       // involution on E (restricting to sigma_F on F)
  LayerInvolution sigma_F;     // involution on F
  FixedSubfield fixed;         // E^o
  std::vector<FElem> vals;     // lambda(b_i) for each monomial of E
  std::vector<Rat> lam0;       // lambda^o on the monomials of E^o

  FElem operator()(const FElem& x) const;
  Rat apply0(const FElem& x_sub) const;  // lambda^o on the subfield layer
};

// Canonical construction (trace composed with a projection, then the
// conductor normalization, then a rational unit rescale so lambda(1) = 1
// whenever lambda(1) is a unit of F_o).
SigmaLinearForm build_sigma_equivariant_form(const LayerInvolution& sigma,
                                             const FieldLayer* F,
                                             const LayerInvolution& sigma_F);

// Variant with a caller-supplied lambda^o (used by tests to exercise the
// normalization path); lam0 is given on the monomial basis of the fixed field.
SigmaLinearForm build_sigma_equivariant_form(const LayerInvolution& sigma,
                                             const FieldLayer* F,
                                             const LayerInvolution& sigma_F,
                                             const std::vector<Rat>& lam0);

// The unit u in E^o with lambda2(x) = lambda1(u x); NotShiftRelated when the
// two forms are not unit-related (cannot happen for admissible forms).
FElem compare_linear_forms(const SigmaLinearForm& l1, const SigmaLinearForm& l2);

}  // namespace btlf
