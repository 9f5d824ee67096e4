#include "checks.hpp"

#include <random>
#include <sstream>

#include "oracles.hpp"

namespace checks {

using namespace painv;

void CheckResult::observe(const Real& defect, const Real& tol, const std::string& what) {
  ++cases;
  if (defect > worst) worst = defect;
  if (defect > tol && pass) {
    pass = false;
    detail = what + ": " + defect.str(6);
  }
}

void CheckResult::fail(const std::string& what) {
  ++cases;
  if (pass) detail = what;
  pass = false;
}

namespace {

Real default_tol() { return tolerance(24); }

// Random skew form of rank 4 whose blocks are units mod n.
SkewLattice random_lattice(std::mt19937_64& rng, int n, int rank = 4) {
  std::uniform_int_distribution<int> d(-2, 2);
  for (;;) {
    IMat g(rank, rank);
    for (int i = 0; i < rank; ++i)
      for (int j = i + 1; j < rank; ++j) {
        g(i, j) = d(rng);
        g(j, i) = -g(i, j);
      }
    SymplecticBasis sb = skew_normal_form({g});
    bool ok = !sb.blocks.empty();
    for (int64_t b : sb.blocks)
      if (b % n == 0) ok = false;
    if (ok) return {g};
  }
}

ScalarMap random_scalars(std::mt19937_64& rng, int rank) {
  ScalarMap s;
  for (int i = 0; i < rank; ++i) s.values.push_back(oracle::random_unit(rng));
  return s;
}

IVec random_vector(std::mt19937_64& rng, int rank, int bound) {
  std::uniform_int_distribution<int> d(-bound, bound);
  IVec k(rank);
  for (auto& x : k) x = d(rng);
  return k;
}

Real dense_gap(const DenseMatrix& a, const DenseMatrix& b) { return max_abs(a - b); }

TorusRepresentation random_rep(std::mt19937_64& rng, int n, SkewLattice* out_lattice = nullptr) {
  SkewLattice l = random_lattice(rng, n);
  if (out_lattice) *out_lattice = l;
  return TorusRepresentation(l, skew_normal_form(l), RootOfUnity(n), random_scalars(rng, l.rank()));
}

}  // namespace

CheckResult torus_relations(int n, int trials, uint64_t seed) {
  std::mt19937_64 rng(seed);
  CheckResult r;
  const Real tol = default_tol();
  RootOfUnity q(n);
  for (int t = 0; t < trials; ++t) {
    SkewLattice l;
    TorusRepresentation rep = random_rep(rng, n, &l);
    const int m = l.rank();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        DenseMatrix xi = DenseMatrix::from_gp(rep.monomial(unit_vector(m, i)));
        DenseMatrix xj = DenseMatrix::from_gp(rep.monomial(unit_vector(m, j)));
        DenseMatrix lhs = oracle::naive_product(xi, xj);
        DenseMatrix rhs = q.pow(2 * l.gram(i, j)) * oracle::naive_product(xj, xi);
        r.observe(dense_gap(lhs, rhs), tol, "defining relation");
      }
    for (int s = 0; s < 5; ++s) {
      IVec k = random_vector(rng, m, 3), h = random_vector(rng, m, 3);
      DenseMatrix lhs = oracle::naive_product(DenseMatrix::from_gp(rep.monomial(k)), DenseMatrix::from_gp(rep.monomial(h)));
      DenseMatrix rhs = q.pow(dot(k, l.gram * h)) * DenseMatrix::from_gp(rep.monomial(k + h));
      r.observe(dense_gap(lhs, rhs), tol, "Weyl composition");
      Complex c;
      if (!rep.monomial(static_cast<int64_t>(n) * k).is_scalar(tol, &c)) r.fail("n-th power is not central");
    }
  }
  return r;
}

CheckResult monomial_spectra(int n, int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  CheckResult r;
  const Real tol = default_tol();
  int done = 0;
  while (done < count) {
    SkewLattice l;
    TorusRepresentation rep = random_rep(rng, n, &l);
    for (int s = 0; s < 10 && done < count; ++s) {
      IVec k = random_vector(rng, l.rank(), 2);
      IVec wk = l.gram * k;
      bool central = true;
      for (auto v : wk)
        if (v % n) central = false;
      if (central) continue;
      ++done;
      GPMatrix g = rep.monomial(k);
      DenseMatrix X = DenseMatrix::from_gp(g);
      DenseMatrix Xn = DenseMatrix::identity(rep.dim());
      for (int p = 0; p < n; ++p) Xn = oracle::naive_product(Xn, X);
      Complex c = Xn(0, 0);
      r.observe(dense_gap(Xn, c * DenseMatrix::identity(rep.dim())), tol, "n-th power not scalar");
      MonomialEigendata ed = monomial_eigendata(rep, k);
      if (static_cast<int>(ed.roots.size()) != n) {
        r.fail("wrong number of eigenvalues");
        continue;
      }
      if (ed.multiplicity * n != rep.dim()) r.fail("wrong multiplicity");
      for (const auto& lam : ed.roots) {
        r.observe(abs(pow(lam, n) - c), tol, "eigenvalue is not an n-th root");
        DenseMatrix shifted = X - lam * DenseMatrix::identity(rep.dim());
        int nullity = rep.dim() - oracle::rank(shifted, pow2(-precision() / 2));
        if (nullity != rep.dim() / n) r.fail("dense nullity differs from dim/n");
      }
      for (const auto& pr : ed.pairs) {
        CVec xv = X * pr.vector;
        Real d;
        for (size_t i = 0; i < xv.size(); ++i) d = std::max(d, abs(xv[i] - pr.value * pr.vector[i]));
        r.observe(d / vec_norm(pr.vector), tol, "eigenvector equation");
      }
    }
  }
  return r;
}

CheckResult psi_identities(int n, int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  CheckResult r;
  const Real tol = default_tol();
  RootOfUnity q(n);
  RootOfUnity q2 = q.squared();
  for (int i = 0; i < count; ++i) {
    Complex t = oracle::random_complex(rng, 3.0);
    if (abs(t + Complex(1)) < Real(0.1)) continue;
    // theta^n = z'' = 1/(1+t) for the flipped edge t = -z'
    Complex theta = exp(-log(Complex(1) + t) * (Real(1) / Real(n)));
    PsiTable tab = psi_table_from_log(q, log(t), theta);
    PsiAudit a = audit_psi(q, tab);
    r.observe(a.functional_equation, tol, "Psi functional equation");
    r.observe(a.product, tol, "Psi product over roots");
    // n-th power law against a direct product with c = (1+t)^(-(n-1)/2)
    Complex c = exp(-log(Complex(1) + t) * (Real(n - 1) / Real(2)));
    for (int k = 0; k < n; ++k) {
      Complex x = tab.y * q.pow(2 * k), D(1);
      for (int j = 1; j < n; ++j) {
        Complex f = Complex(1) + q2.pow(j) * q.value() * x;
        for (int e = 0; e < j; ++e) D *= f;
      }
      Complex lhs = pow(tab.values[k], n), rhs = c * D;
      r.observe(abs(lhs - rhs) / (Real(1) + abs(rhs)), tol, "Psi n-th power law");
    }
  }
  return r;
}

CheckResult flip_involution(int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  CheckResult r;
  std::vector<IdealTriangulation> starts;
  for (const char* name : {"fig8", "t09265"}) starts.push_back(load_preset(name).triangulation());
  int done = 0, walk = 0;
  while (done < count) {
    IdealTriangulation tri = starts[walk++ % starts.size()];
    for (int step = 0; step < 25 && done < count; ++step) {
      std::uniform_int_distribution<int> pick(0, tri.num_edges() - 1);
      int e = pick(rng);
      std::pair<IdealTriangulation, FlipFrame> once;
      try {
        once = flip(tri, e);
      } catch (const UnflippableEdge&) {
        continue;
      }
      ++done;
      ++r.cases;
      auto twice = flip(once.first, e).first;
      if (find_isomorphisms(twice, tri).empty()) r.fail("flip twice is not isomorphic to the start");
      const auto& t1 = once.first;
      if (t1.genus() != tri.genus() || t1.num_punctures() != tri.num_punctures()) r.fail("topology changed");
      if (t1.num_edges() != -3 * t1.euler_characteristic() || t1.num_faces() != -2 * t1.euler_characteristic())
        r.fail("edge or face count");
      IMat eps = epsilon_matrix(t1);
      if (!(eps == oracle::corner_count_epsilon(t1))) r.fail("epsilon differs from the corner count");
      if (!is_zero(eps * IVec(t1.num_edges(), 1))) r.fail("1 not in the radical");
      for (int v = 0; v < t1.num_punctures(); ++v)
        if (!is_zero(eps * t1.puncture_vectors().row(v))) r.fail("c_v not in the radical");
      tri = t1;
    }
  }
  return r;
}

namespace {

// Symplectic change of the adapted basis: (alpha_1, beta_1) -> (beta_1, -alpha_1),
// beta_2 -> beta_2 + alpha_2 when a second block exists.
SymplecticBasis twisted_basis(const SymplecticBasis& sb) {
  const int m = sb.change.rows;
  IMat S = IMat::identity(m);
  S(0, 0) = 0;
  S(1, 0) = 1;
  S(0, 1) = -1;
  S(1, 1) = 0;
  if (sb.blocks.size() > 1 && sb.blocks[0] == sb.blocks[1]) S(2, 3) = 1;
  SymplecticBasis out = sb;
  out.change = sb.change * S;
  return out;
}

}  // namespace

CheckResult intertwiner_unitarity(int n, int trials, uint64_t seed) {
  std::mt19937_64 rng(seed);
  CheckResult r;
  const Real tol = default_tol();
  for (int t = 0; t < trials; ++t) {
    SkewLattice l = random_lattice(rng, n);
    ScalarMap s = random_scalars(rng, l.rank());
    SymplecticBasis sb = skew_normal_form(l);
    RootOfUnity q(n);
    TorusRepresentation a(l, sb, q, s), b(l, twisted_basis(sb), q, s);
    Intertwiner U = intertwine_reps(a, b);
    r.observe(U.residual, tol, "intertwining residual");
    DenseMatrix I = DenseMatrix::identity(a.dim());
    r.observe(max_abs(adjoint(U.B) * U.B - I), tol, "unitarity");
    // Schur uniqueness against the direct solve
    DenseMatrix V = oracle::solve_intertwiner(a, b);
    ScalarFit fit = best_scalar_fit(V, U.B);
    r.observe(fit.residual, tol, "independent intertwiner is not proportional");
  }
  return r;
}

CheckResult gl1_proportionality(const std::vector<int>& orders) {
  CheckResult r;
  const Real tol = default_tol();
  for (int n : orders) {
    RootOfUnity q(n);
    for (const auto& s : load_surgery_presets()) {
      IMat action = twist_word_homology_action(s.twist_word, s.intersection);
      IMat gram = s.intersection + s.intersection;  // twice the intersection form
      TorusRepresentation rep = homology_representation(gram, {}, PunctureWeights{}, q);
      Intertwiner ah = compute_A_H(rep, action);
      DenseMatrix gs = gauss_sum_AH(s.surgery, q);
      ScalarFit fit = best_scalar_fit(gs, ah.B);
      std::ostringstream what;
      what << s.name << " at n=" << n;
      r.observe(fit.residual, tol, what.str() + " not proportional");
      r.observe(abs(abs(fit.s) - Real(1)), tol, what.str() + " scalar off the unit circle");
      // the scalar is a fourth root of unity
      r.observe(abs(pow(fit.s, 4) - Complex(1)), tol, what.str() + " scalar not in mu_4");
    }
  }
  return r;
}

CheckResult block_determinants(const IntertwinerBundle& b) {
  CheckResult r;
  r.observe(b.block_det_spread, default_tol(), "diagonal block determinants differ");
  return r;
}

}  // namespace checks
