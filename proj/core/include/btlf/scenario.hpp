#pragma once

// Desk-scale scenario catalog and the property-suite runner behind the CLI
// and the acceptance binary.  A scenario pins a prime, a ground tower, an
// optional form, a skew element, a distinguished point of the block
// buildings, and grid parameters for the uniqueness searches; the criteria
// are numbered and runnable one at a time so failures stay attributable.

#include "btlf/centralizer.hpp"

#include <string>

namespace btlf {

struct Scenario {
  std::string name;
  long p = 3;
  bool gl = false;                 // no ambient form
  std::vector<Rat> tower;          // generator squares of F over Q (at most 2)
  bool conj_sigma = false;         // sigma_F is conjugation of the top layer
  int eps = 1;
  std::vector<std::vector<Rat>> gram;              // rational gram (unused when gl)
  std::vector<std::vector<std::vector<Rat>>> beta; // coords per entry over F

  struct PointBlock {
    int i = 0;
    std::string kind;              // "J_o", "J_+", "GL" (validated on realize)
    std::vector<Rat> offsets;      // identity-basis offsets over the block field
    Rat shift;
  };
  std::vector<PointBlock> point;

  int grid_den = 8;
  Rat grid_radius = Rat(1, 2);
  int samples = 20;
  std::vector<Rat> expected_diag;   // embedded offsets on the standard basis
  std::vector<std::string> checks;  // which scenario-level checks to run
};

// The six built-in scenarios.
const std::vector<Scenario>& catalog();
const Scenario& catalog_scenario(const std::string& name);  // BadInput if unknown

// "J_o", "J_+", "GL" — the names used in scenario points and reports.
std::string block_kind_name(BlockKind k);

// Everything a check needs, materialized: tower, form, decomposition, and
// the distinguished point (validated against the block structure).
struct ScenarioData {
  Scenario sc;
  const FieldLayer* F = nullptr;
  HermForm h;          // unset when sc.gl
  Matrix beta;
  BetaDecomposition D;
  CentralBuildingPoint x;
};
ScenarioData realize(const Scenario& sc);

// --- check registry ----------------------------------------------------------

struct Report {
  std::string name;
  bool pass = false;
  std::string witness;   // nonempty exactly when the check failed
  long long millis = 0;
};

// The numbered acceptance criteria (1-based).
int criterion_count();
std::string criterion_name(int k);
Report run_criterion(int k, unsigned seed);
std::vector<Report> run_all_criteria(unsigned seed);

// Per-scenario checks for the CLI: decomposition shape, embedded point
// against the expected offsets, filtration compatibility, and (where grid
// parameters apply) the uniqueness search.
std::vector<Report> scenario_checks(const Scenario& sc, unsigned seed);

// --- grid searches -----------------------------------------------------------

struct GridSearch {
  std::vector<Rat> passing;
  bool coarse = false;   // the embedded point itself is not on the grid
};

// Rank-one classical search: apartment candidates (s, -s) with s in (1/N)Z,
// |s| <= R, required self-dual and fixed by a torus unit of F[beta]^x; when
// with_filtration is set, the Lie filtration equality against the scenario
// point is required as well.  Dimension 2 with a form only.
GridSearch search_unique_compatible(const ScenarioData& sd, int N, const Rat& R,
                                    bool with_filtration);

// General-linear search over translation classes (0, d), d in (1/N)Z within
// [0, 1): keeps the classes whose ambient End filtration, cut to the
// centralizer, contains the block End filtration of the scenario point.
GridSearch search_unique_classes(const ScenarioData& sd, int N);

// --- tree export -------------------------------------------------------------

// DOT graph of the radius-`depth` ball of the lattice-class tree (n = 2,
// form required): vertices carry selfdual marks, and the edge holding the
// embedded scenario point is marked as the fixed chamber.
std::string export_rank1_tree(const ScenarioData& sd, int depth);

}  // namespace btlf
