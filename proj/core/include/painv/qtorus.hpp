#pragma once
// Lattices with skew forms, their quantum tori at a root of unity, the
// clock-and-shift representations and intertwiners between them.

#include <functional>
#include <map>
#include <optional>

#include "painv/numeric.hpp"

namespace painv {

struct SkewLattice {
  IMat gram;
  int rank() const { return gram.rows; }
  // Throws unless gram is square and antisymmetric.
  void validate() const;
};

struct SymplecticBasis {
  IMat change;                  // columns: alpha_1, beta_1, ..., alpha_r, beta_r, radical...
  std::vector<int64_t> blocks;  // d_i
  int radical_rank = 0;
};

// change^T gram change = (+) d_i J_2 (+) 0, with d_1 | d_2 | ...
SymplecticBasis skew_normal_form(const SkewLattice& l);

// Multiplicative map on the lattice, stored on the standard basis.
struct ScalarMap {
  CVec values;
  Complex operator()(const IVec& k) const;
};

ScalarMap scalar_map_from_logs(const CVec& logs);

struct CentralMonomialError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CentralCharacterMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingRootValue : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonDiagonalAction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Irreducible representation on C^(n^r): for the i-th block
// rho(alpha_i) = s S^(d_i), rho(beta_i) = s T, S e_j = q^(2j) e_j,
// T e_j = e_(j+1); the first block is the most significant tensor index.
class TorusRepresentation {
 public:
  TorusRepresentation() = default;
  TorusRepresentation(SkewLattice lattice, SymplecticBasis basis, RootOfUnity q, ScalarMap scalar);

  const SkewLattice& lattice() const { return lattice_; }
  const SymplecticBasis& basis() const { return basis_; }
  const IMat& basis_inverse() const { return change_inv_; }
  const RootOfUnity& q() const { return q_; }
  const ScalarMap& scalar() const { return scalar_; }
  int n() const { return q_.n(); }
  int blocks() const { return static_cast<int>(basis_.blocks.size()); }
  int dim() const { return dim_; }
  int rank() const { return lattice_.rank(); }

  // Weyl-ordered x^k without the scalar: phase q^(-sum_{i<j} w'_ij kappa_i kappa_j)
  // in adapted coordinates kappa.
  GPMatrix unscaled(const IVec& k) const;
  // rep_monomial
  GPMatrix monomial(const IVec& k) const;

 private:
  SkewLattice lattice_;
  SymplecticBasis basis_;
  IMat change_inv_, adapted_gram_;
  RootOfUnity q_;
  ScalarMap scalar_;
  int dim_ = 1;
};

GPMatrix rep_monomial(const TorusRepresentation& rep, const IVec& k);

// Representation with adapted basis from skew_normal_form(gram). The scalar on
// alpha/beta is exp(<basis vector, logsig>/n); on the radical it is fixed by
// targets (v_j, log value) which must form a unimodular system there.
struct RadicalTarget {
  IVec vector;
  Complex log_value;
};
TorusRepresentation adapted_representation(const IMat& gram, const RootOfUnity& q, const CVec& logsig,
                                           const std::vector<RadicalTarget>& radical_targets);

struct EigenPair {
  Complex value;
  CVec vector;
};
struct MonomialEigendata {
  std::vector<EigenPair> pairs;  // one per basis vector of C^dim
  int multiplicity = 0;          // dim / n
  CVec roots;                    // the n distinct eigenvalues
};
// Eigenvectors from the cycle structure of the permutation: on each cycle the
// eigenvectors are discrete Fourier vectors twisted by the scales.
MonomialEigendata monomial_eigendata(const TorusRepresentation& rep, const IVec& k);

// sum_m f_m X^m with f the interpolant of values on the roots x_j = y q^(2j).
// y must satisfy y^n = sigma(k) where X = rep_monomial(k).
struct RootValues {
  Complex y;
  CVec values;  // at y q^(2j), j = 0..n-1
};
CVec interpolation_coefficients(const RootOfUnity& q, const RootValues& rv);
DenseMatrix functional_calculus(const TorusRepresentation& rep, const IVec& k, const RootValues& rv);
// f(X) * a for a generalized permutation X, in O(n * dim^2).
DenseMatrix apply_functional_calculus(const GPMatrix& x, const RootOfUnity& q, const RootValues& rv,
                                      const DenseMatrix& a);

// Rescaled monomial map: x^k -> scalar(k) x^(lattice k).
struct MonomialMap {
  IMat lattice;
  ScalarMap scalar;
};

struct Intertwiner {
  DenseMatrix B;
  Real residual;  // max over generators of ||image(g) B - B rho(g)|| / ||B||
};

using OperatorImage = std::function<GPMatrix(const IVec&)>;

// B with image(g) B = B rho(g) for all g. The image must be a representation
// of the same lattice given on generalized permutation operators. With
// strict off a central character mismatch is not rejected; the residual then
// measures it.
Intertwiner intertwine(const TorusRepresentation& rep, const OperatorImage& image, bool strict = true);
Intertwiner monomial_intertwiner(const TorusRepresentation& source, const TorusRepresentation& target,
                                 const MonomialMap& map);
// U with repA(x) = U^-1 repB(x) U.
Intertwiner intertwine_reps(const TorusRepresentation& a, const TorusRepresentation& b);

// Simultaneous eigenspaces of the family; keys are q-exponents of the
// eigenvalues, values are the standard basis indices spanning the block.
using WeightBlocks = std::map<std::vector<int>, std::vector<int>>;
WeightBlocks weight_block_projectors(const TorusRepresentation& rep, const std::vector<IVec>& family);

}  // namespace painv
