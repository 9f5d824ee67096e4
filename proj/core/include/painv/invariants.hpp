#pragma once
// Cyclic dilogarithms, the flip factorization of the monodromy intertwiner,
// the operators A^K, A^CF, A^H, their puncture-weight blocks, normalized
// traces and the operator-level decomposition check.

#include <map>

#include "painv/geometry.hpp"
#include "painv/qtorus.hpp"
#include "painv/surface.hpp"

namespace painv {

struct BlockLeakage : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularOperator : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FormIncompatible : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VerificationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// prod_{j=1}^{n-1} (1 - q^j x)^j
Complex cyclic_dilog(const RootOfUnity& q, const Complex& x);

// Psi(q^(2k) y) = c_y theta^k prod_{j=1}^k (1 + q^(2j-1) y), with c_y the
// principal n-th root of theta^(n(n-1)/2) D_{q^2}(-q y).
struct PsiTable {
  Complex y, theta, cy;
  CVec values;  // k = 0..n-1
  RootValues root_values() const { return {y, values}; }
};
PsiTable psi_table(const RootOfUnity& q, const Complex& y, const Complex& theta);
// y = exp(log_t / n)
PsiTable psi_table_from_log(const RootOfUnity& q, const Complex& log_t, const Complex& theta);

struct PsiAudit {
  Real functional_equation;  // max |Psi(q^2 x) - theta (1 + q x) Psi(x)| over the root set, cyclically
  Real product;              // |prod Psi - 1|
  Real nth_power;            // max |Psi(x)^n - c D_{q^2}(-q x)|, c = theta^(n(n-1)/2)
};
PsiAudit audit_psi(const RootOfUnity& q, const PsiTable& t);

// ---------------------------------------------------------------- flip chain

// Data of the chain of flips on one lattice: M_i from layer i+1 to layer i,
// the forms on each layer and the flipped vector on each layer.
struct FlipChainData {
  std::vector<IMat> maps;
  std::vector<IMat> forms;
  std::vector<IVec> pushed;  // chi_e in layer-i coordinates
  IMat monodromy;            // phi_*
  CVec theta;                // theta_i
};

struct FlipFactorization {
  IVec pushed;     // f_i chi_e in layer-0 coordinates
  Complex y;       // scalar of the pushed monomial
  GPMatrix X;      // X_i^#
  PsiTable psi;
};

struct ChainResult {
  std::vector<FlipFactorization> factors;
  IMat composed;          // f_0 ... f_{N-1}
  ScalarMap final_scalar; // s_N on the layer-N lattice
  Intertwiner B;
  DenseMatrix A;          // Psi(X_0) ... Psi(X_{N-1}) B
};

// theta_i^n = z''_i, i.e. theta from the shear-bend data for this n.
FlipChainData kashaev_chain_data(const LayeredTriangulation& lt, const ShearBendLayers& sbl, int n);
FlipChainData cf_chain_data(const LayeredTriangulation& lt, const ShearBendLayers& sbl, int n);

std::vector<FlipFactorization> chain_flip_factorization(const TorusRepresentation& rep, const FlipChainData& data,
                                                        IMat* composed = nullptr, ScalarMap* final_scalar = nullptr);
ChainResult run_flip_chain(const TorusRepresentation& rep, const FlipChainData& data, bool strict = true);

// ---------------------------------------------------------------- representations

struct PunctureWeights {
  std::vector<int> exponents;  // l_v for every puncture, zeta_v = q^(l_v), sum = 0 mod n
};

TorusRepresentation kashaev_representation(const KashaevLattice& lat, const KashaevCoordinateLift& lift,
                                           const RootOfUnity& q);
TorusRepresentation cf_representation(const IdealTriangulation& tri, const ShearBendLayers& sbl,
                                      const PunctureWeights& w, const RootOfUnity& q);

// Homology sub-lattice: orthogonal of the CF image inside the Kashaev lattice.
struct HomologyData {
  IMat basis;    // columns in the Kashaev lattice
  IMat gram;     // basis^T W basis
  IMat action;   // monodromy on the basis
  std::vector<IVec> puncture_classes;  // coordinates of i_CFr(c_v)
};
HomologyData homology_data(const KashaevLattice& lat, const KashaevCoordinateLift& lift);

TorusRepresentation homology_representation(const IMat& gram, const std::vector<IVec>& puncture_classes,
                                            const PunctureWeights& w, const RootOfUnity& q);

DenseMatrix compute_A_K(const TorusRepresentation& rep, const FlipChainData& data);
DenseMatrix compute_A_CF(const TorusRepresentation& rep, const FlipChainData& data);
// Intertwiner of x^k -> x^(action k) on the homology torus.
Intertwiner compute_A_H(const TorusRepresentation& rep, const IMat& action);

// ---------------------------------------------------------------- abelian surgery formula

// Linking matrix of the surgery link together with the two boundary
// components; colors ordered (summed components..., h0, h1).
struct SurgeryPresentation {
  IMat linking;
  int summed = 0;
  int genus = 1;
};
Complex gauss_phase(const RootOfUnity& q);
// e_{h1} -> delta^(-sigma) / sqrt(n^(g+summed)) sum_{h0} sum_k q^(c^T Q c) e_{h0}
DenseMatrix gauss_sum_AH(const SurgeryPresentation& s, const RootOfUnity& q);

// ---------------------------------------------------------------- blocks and traces

struct OperatorBlock {
  std::vector<int> source_key, target_key;
  std::vector<int> source, target;  // basis indices
  DenseMatrix matrix;
  bool diagonal() const { return source_key == target_key; }
};

struct BlockDecomposition {
  std::vector<OperatorBlock> blocks;
  Real leakage;   // largest relative off-pattern mass
  Complex det;    // from the block determinants
};

BlockDecomposition block_decompose(const DenseMatrix& A, const WeightBlocks& weights, const Real& tol);

struct TraceReport {
  Complex value;   // tr / det^(1/D), principal root
  Real magnitude;
  int dim = 0;     // the phase is defined up to mu_D
};
TraceReport normalize_and_trace(const Complex& trace, const Complex& det, int dim);
TraceReport normalize_and_trace(const DenseMatrix& A);

// n |coker(phi_hat - 1) tensor Z/n|
int64_t homology_order(const IMat& capped_action, int n);
// The action on H_1 of the closed surface: the symplectic part of the
// homology action in the normal-form basis of its gram matrix.
IMat capped_action(const HomologyData& h);

// Normalized traces of A^CF and A^H for one weight tuple.
TraceReport cf_trace(const LayeredTriangulation& lt, const ShearBendLayers& sbl, const PunctureWeights& w,
                     const RootOfUnity& q, bool strict = true);
TraceReport homology_trace(const HomologyData& h, const PunctureWeights& w, const RootOfUnity& q);

// ---------------------------------------------------------------- full bundle

struct BlockVerification {
  std::vector<int> key;
  Real proportionality;    // min_s ||A_z - s U^-1 (ACF (x) AH) U|| / ||A_z||
  Real trace_powers;       // max_m relative defect of |tr A^m| = |tr ACF^m| |tr AH^m|
  Real intertwiner_residual;
  Complex scalar;
  TraceReport TK_block, TCF, TH;
  Complex eta;             // s det(ACF)^(1/dCF) det(AH)^(1/dH) / det(AK)^(1/D)
  Complex det;             // block determinant
};

struct IntertwinerBundle {
  int n = 0;
  DenseMatrix AK;
  Intertwiner BK;
  BlockDecomposition blocks;
  TraceReport TK;
  std::vector<BlockVerification> verified;  // diagonal blocks
  Real block_det_spread;   // max relative difference of diagonal block determinants
  Real psi_audit;
  int64_t order = 0;       // homology order
  Real TH_expected;        // sqrt(order / n)
};

struct BundleOptions {
  bool verify = true;
  int trace_powers = 0;  // 0 means 2n
  // Off: accept inconsistent central characters and report residuals, used
  // for perturbed inputs.
  bool strict = true;
};

IntertwinerBundle build_bundle(const LayeredTriangulation& lt, const ShearBendLayers& sbl,
                               const KashaevLattice& lat, const KashaevCoordinateLift& lift, const RootOfUnity& q,
                               const BundleOptions& opts = {});

}  // namespace painv
