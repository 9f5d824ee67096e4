#pragma once
// Property suites shared by the unit tests and the acceptance binary. Each
// returns the worst defect seen against its tolerance.

#include <cstdint>
#include <string>

#include "painv/pipeline.hpp"

namespace checks {

using painv::Real;

struct CheckResult {
  bool pass = true;
  Real worst;
  int cases = 0;
  std::string detail;

  // Records a defect; fails when it exceeds tol.
  void observe(const Real& defect, const Real& tol, const std::string& what);
  void fail(const std::string& what);
};

// x_i x_j = q^(2 w_ij) x_j x_i, Weyl composition and central n-th powers on
// random rank-4 lattices.
CheckResult torus_relations(int n, int trials, uint64_t seed);
// Eigendata of random non-central monomials against dense nullities.
CheckResult monomial_spectra(int n, int count, uint64_t seed);
// Functional equation, unit product and n-th power law of Psi at random t.
CheckResult psi_identities(int n, int count, uint64_t seed);
// flip(flip(T, e), e) is isomorphic to T along random flip walks.
CheckResult flip_involution(int count, uint64_t seed);
// Intertwiners between unitary representations are unitary and agree with a
// direct linear solve up to one scalar.
CheckResult intertwiner_unitarity(int n, int trials, uint64_t seed);
// Gauss-sum operator against the homology intertwiner on every surgery preset.
CheckResult gl1_proportionality(const std::vector<int>& orders);
// Diagonal block determinants of A^K agree.
CheckResult block_determinants(const painv::IntertwinerBundle& b);

}  // namespace checks
