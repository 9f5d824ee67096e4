#pragma once
// Layered triangulations of mapping tori, their gluing equations, shape
// solutions, shear-bend coordinates on every layer and the lift of the bottom
// layer to a monodromy-invariant Kashaev character.

#include <array>

#include "painv/numeric.hpp"
#include "painv/surface.hpp"

namespace painv {

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateShear : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoInvariantDecoration : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// z, z' = 1/(1-z), z'' = 1 - 1/z
enum class ShapeKind { Z = 0, Zp = 1, Zpp = 2 };

struct ShapePosition {
  int tet = 0;
  ShapeKind kind = ShapeKind::Z;
};

// Tetrahedron k sits between layers k and k+1: its bottom pair is the flipped
// edge, its top pair the new edge (both carry z'), the sides b, d carry z and
// a, c carry z''.
struct LayeredTetrahedron {
  int bottom = 0;  // edge label in layer k
  int top = 0;     // edge label in layer k+1
  std::array<int, 4> sides{};  // a, b, c, d as sides of layer k
};

class LayeredTriangulation {
 public:
  explicit LayeredTriangulation(MappingClassCertificate cert);

  const MappingClassCertificate& certificate() const { return cert_; }
  const std::vector<LayeredTetrahedron>& tetrahedra() const { return tets_; }
  int num_tetrahedra() const { return static_cast<int>(tets_.size()); }
  int num_edges() const { return cert_.layers.front().num_edges(); }
  // 3-manifold edge containing edge x of layer i
  int edge_class(int layer, int edge) const { return classes_.at(layer).at(edge); }
  int num_edge_classes() const { return num_classes_; }
  // Shapes met walking up from edge x of layer i until the tetrahedron that
  // flips it, wrapping through the monodromy at the top.
  std::vector<ShapePosition> above(int layer, int edge) const;

 private:
  MappingClassCertificate cert_;
  std::vector<LayeredTetrahedron> tets_;
  std::vector<std::vector<int>> classes_;
  int num_classes_ = 0;
};

// Rejects the empty word: the identity has no layered triangulation.
LayeredTriangulation build_layered(const MappingClassCertificate& cert);

// Rows of the log-linear system sum m (log shape) = target. The first rows
// are edges (target 2 pi i), the rest cusp rows from the puncture vectors of
// the bottom layer (parabolic holonomy). z' is eliminated in (A, B, nu) via
// log z' = pi i - log z - log z''.
struct GluingSystem {
  int tets = 0;
  int edge_rows = 0;
  std::vector<std::vector<std::array<int64_t, 3>>> counts;  // [row][tet] = (z, z', z'') multiplicities
  std::vector<int64_t> degree;  // cusp rows: sum of c_v, 0 for edge rows
  IMat A, B;
  IVec nu;
  int rows() const { return static_cast<int>(counts.size()); }
};

GluingSystem edge_gluing_equations(const LayeredTriangulation& lt);
GluingSystem gluing_equations(const LayeredTriangulation& lt);

struct ShapeSolution {
  CVec shapes;
  CVec logZ, logZpp;   // branches with A logZ + B logZpp = pi i nu
  Real residual;       // max |z^A z''^B - (-1)^nu|
  Real branch_residual;
  int steps = 0;       // Newton steps taken
  int restarts = 0;
  long bits = 0;
  int positive = 0, flat = 0, negative = 0;  // orientation census
  Real volume;
};

struct NewtonOptions {
  int max_steps = 200;
  int restarts = 16;
  unsigned seed = 1;
};

ShapeSolution newton_refine(const GluingSystem& system, const CVec& seed, long target_bits,
                            const NewtonOptions& opts = {});
// Fill logs, residuals, census and volume for given shapes without iterating.
ShapeSolution evaluate_solution(const GluingSystem& system, const CVec& shapes);

// Bloch-Wigner dilogarithm Im Li2(z) + arg(1-z) log|z|.
Real bloch_wigner(const Complex& z);

// Shear-bend coordinates on all layers. The quantization uses the mirror
// image of the geometric solution (conjugate shapes), matching the
// orientation of the clock and shift operators.
struct ShearBendLayers {
  CVec shapes;                // conjugated shapes actually used
  std::vector<CVec> log_t;    // [layer][edge], sum of logs above minus pi i
  std::vector<CVec> t;        // exp(log_t)
  CVec log_zpp;               // principal log z'' per tetrahedron
  Real flip_audit;            // flipped edge: -z' below, -1/z' above
  Real mutation_audit;        // classical mutation layer i -> i+1
  Real parabolic_audit;       // prod t^(c_v) = 1 on layer 0
  Real invariance_audit;      // layer N relabeled equals layer 0
  // theta_i = exp(log z''_i / n)
  Complex theta(int tet, int n) const;
};

ShearBendLayers shear_bend_layers(const LayeredTriangulation& lt, const ShapeSolution& sol);

// log sigma_0 on the side basis of the bottom Kashaev lattice, solved modulo
// 2 pi i from: the CF pullback equals the layer-0 shears, triviality on the
// homology part, and invariance under the flip chain followed by phi_*. The
// invariance rows also fix the decoration torus. With strict off an
// inconsistent system is solved on its consistent rows and the residuals
// report the rest.
struct KashaevCoordinateLift {
  CVec lambda;
  IMat monodromy;     // F = (f_0 ... f_{N-1}) phi_*
  CVec drift;         // constant part of the chain
  Real cfr_residual, homology_residual, invariance_residual;  // modulo 2 pi i
  ScalarMap scalar(int n) const;  // exp(lambda / n)
};

KashaevCoordinateLift lift_to_kashaev_coordinates(const LayeredTriangulation& lt, const ShearBendLayers& sbl,
                                                  const KashaevLattice& lattice, bool strict = true);

// Distance of z to the nearest multiple of 2 pi i.
Real distance_to_2pi_i(const Complex& z);

}  // namespace painv
