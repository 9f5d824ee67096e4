#include "painv/invariants.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace painv {

namespace {
Complex from_int(int64_t v) { return Complex(Real(static_cast<long>(v))); }

Complex nth_root(const Complex& z, long d) { return exp(log(z) * (Real(1) / Real(d))); }

int perm_sign(const std::vector<int>& order) {
  // order lists original indices in their new positions
  std::vector<int> pos(order.size());
  for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  std::vector<bool> seen(order.size(), false);
  int sign = 1;
  for (size_t i = 0; i < order.size(); ++i) {
    if (seen[i]) continue;
    size_t len = 0;
    for (size_t j = i; !seen[j]; j = pos[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

GPMatrix restrict_gp(const GPMatrix& g, const std::vector<int>& idx) {
  std::vector<int> local(g.dim, -1);
  for (size_t i = 0; i < idx.size(); ++i) local[idx[i]] = static_cast<int>(i);
  GPMatrix r;
  r.dim = static_cast<int>(idx.size());
  r.perm.resize(r.dim);
  r.scales.resize(r.dim);
  for (int i = 0; i < r.dim; ++i) {
    int t = local[g.perm[idx[i]]];
    if (t < 0) throw BlockLeakage("operator does not preserve the weight block");
    r.perm[i] = t;
    r.scales[i] = g.scales[idx[i]];
  }
  return r;
}

DenseMatrix power_step(const DenseMatrix& a, const DenseMatrix& cur) { return a * cur; }
}  // namespace

// ---------------------------------------------------------------- dilogarithms

Complex cyclic_dilog(const RootOfUnity& q, const Complex& x) {
  Complex one(1), r(1);
  for (int j = 1; j < q.n(); ++j) r *= pow(one - q.pow(j) * x, j);
  return r;
}

PsiTable psi_table(const RootOfUnity& q, const Complex& y, const Complex& theta) {
  const int n = q.n();
  PsiTable t;
  t.y = y;
  t.theta = theta;
  Complex one(1);
  if (abs(pow(y, n) + one) < tolerance(40)) throw DegenerateShear("Psi table at t = -1");
  Complex D = cyclic_dilog(q.squared(), -(q.value() * y));
  t.cy = nth_root(pow(theta, static_cast<int64_t>(n) * (n - 1) / 2) * D, n);
  Complex acc = t.cy;
  for (int k = 0; k < n; ++k) {
    if (k > 0) acc = acc * theta * (one + q.pow(2 * k - 1) * y);
    t.values.push_back(acc);
  }
  return t;
}

PsiTable psi_table_from_log(const RootOfUnity& q, const Complex& log_t, const Complex& theta) {
  return psi_table(q, exp(log_t * (Real(1) / Real(q.n()))), theta);
}

PsiAudit audit_psi(const RootOfUnity& q, const PsiTable& t) {
  const int n = q.n();
  PsiAudit a;
  Complex one(1), prod(1);
  Complex c = pow(t.theta, static_cast<int64_t>(n) * (n - 1) / 2);
  RootOfUnity q2 = q.squared();
  for (int k = 0; k < n; ++k) {
    Complex x = t.y * q.pow(2 * k);
    Complex lhs = t.values[(k + 1) % n];
    Complex rhs = t.theta * (one + q.value() * x) * t.values[k];
    a.functional_equation = std::max(a.functional_equation, abs(lhs - rhs) / (Real(1) + abs(rhs)));
    prod *= t.values[k];
    Complex pn = pow(t.values[k], n), dn = c * cyclic_dilog(q2, -(q.value() * x));
    a.nth_power = std::max(a.nth_power, abs(pn - dn) / (Real(1) + abs(dn)));
  }
  a.product = abs(prod - one);
  return a;
}

// ---------------------------------------------------------------- chains

FlipChainData kashaev_chain_data(const LayeredTriangulation& lt, const ShearBendLayers& sbl, int n) {
  const auto& cert = lt.certificate();
  FlipChainData d;
  for (int i = 0; i < cert.steps(); ++i) {
    const auto& before = cert.layers[i];
    d.maps.push_back(kashaev_flip_map(before, cert.layers[i + 1], cert.frames[i]));
    d.forms.push_back(kashaev_form(before));
    d.pushed.push_back(flip_vector(before, cert.frames[i]));
    d.theta.push_back(sbl.theta(i, n));
  }
  d.monodromy = kashaev_monodromy(cert);
  return d;
}

FlipChainData cf_chain_data(const LayeredTriangulation& lt, const ShearBendLayers& sbl, int n) {
  const auto& cert = lt.certificate();
  const int E = lt.num_edges();
  FlipChainData d;
  for (int i = 0; i < cert.steps(); ++i) {
    const auto& before = cert.layers[i];
    d.maps.push_back(cf_flip_map(before, cert.frames[i]));
    d.forms.push_back(epsilon_matrix(before));
    d.pushed.push_back(unit_vector(E, edge_of(cert.frames[i].e)));
    d.theta.push_back(sbl.theta(i, n));
  }
  d.monodromy = cf_monodromy(cert);
  return d;
}

std::vector<FlipFactorization> chain_flip_factorization(const TorusRepresentation& rep, const FlipChainData& data,
                                                        IMat* composed, ScalarMap* final_scalar) {
  const int m = rep.rank();
  IMat f = IMat::identity(m);
  ScalarMap vs = rep.scalar();
  std::vector<FlipFactorization> out;
  for (size_t i = 0; i < data.maps.size(); ++i) {
    const IVec& ce = data.pushed[i];
    FlipFactorization ff;
    ff.pushed = f * ce;
    ff.y = vs(ce);
    ff.X = ff.y * rep.unscaled(ff.pushed);
    ff.psi = psi_table(rep.q(), ff.y, data.theta[i]);
    const IMat& M = data.maps[i];
    IVec wce = data.forms[i] * ce;
    ScalarMap next;
    for (int j = 0; j < m; ++j) {
      IVec col = M.col(j);
      next.values.push_back(vs(col) * pow(data.theta[i], dot(col, wce)));
    }
    vs = std::move(next);
    f = f * M;
    out.push_back(std::move(ff));
  }
  if (composed) *composed = f;
  if (final_scalar) *final_scalar = vs;
  return out;
}

ChainResult run_flip_chain(const TorusRepresentation& rep, const FlipChainData& data, bool strict) {
  ChainResult r;
  r.factors = chain_flip_factorization(rep, data, &r.composed, &r.final_scalar);
  const IMat fP = r.composed * data.monodromy;
  r.B = intertwine(
      rep, [&](const IVec& k) { return r.final_scalar(data.monodromy * k) * rep.unscaled(fP * k); }, strict);
  r.A = r.B.B;
  for (auto it = r.factors.rbegin(); it != r.factors.rend(); ++it)
    r.A = apply_functional_calculus(it->X, rep.q(), it->psi.root_values(), r.A);
  return r;
}

// ---------------------------------------------------------------- representations

TorusRepresentation kashaev_representation(const KashaevLattice& lat, const KashaevCoordinateLift& lift,
                                           const RootOfUnity& q) {
  return TorusRepresentation(SkewLattice{lat.gram}, lat.adapted, q, lift.scalar(q.n()));
}

namespace {
void check_weights(const PunctureWeights& w, int p, int n) {
  if (static_cast<int>(w.exponents.size()) != p) throw std::invalid_argument("one weight per puncture");
  int64_t s = 0;
  for (int l : w.exponents) s += l;
  if (((s % n) + n) % n) throw std::invalid_argument("puncture weights must multiply to 1");
}
}  // namespace

TorusRepresentation cf_representation(const IdealTriangulation& tri, const ShearBendLayers& sbl,
                                      const PunctureWeights& w, const RootOfUnity& q) {
  const int p = tri.num_punctures(), E = tri.num_edges();
  check_weights(w, p, q.n());
  std::vector<RadicalTarget> targets;
  const Complex lq = q.log_value();
  for (int v = 0; v + 1 < p; ++v) targets.push_back({tri.puncture_vectors().row(v), lq * from_int(w.exponents[v])});
  targets.push_back({IVec(E, 1), Complex()});
  return adapted_representation(epsilon_matrix(tri), q, sbl.log_t.front(), targets);
}

HomologyData homology_data(const KashaevLattice& lat, const KashaevCoordinateLift& lift) {
  HomologyData h;
  h.basis = lat.homology;
  h.gram = h.basis.transpose() * lat.gram * h.basis;
  const int k = h.basis.cols;
  h.action = IMat(k, k);
  for (int j = 0; j < k; ++j) h.action.set_col(j, int_solve(h.basis, lift.monodromy * h.basis.col(j)));
  for (const auto& c : lat.puncture_images) h.puncture_classes.push_back(int_solve(h.basis, c));
  return h;
}

TorusRepresentation homology_representation(const IMat& gram, const std::vector<IVec>& puncture_classes,
                                            const PunctureWeights& w, const RootOfUnity& q) {
  const int p = static_cast<int>(puncture_classes.size());
  check_weights(w, p, q.n());
  std::vector<RadicalTarget> targets;
  const Complex lq = q.log_value();
  for (int v = 0; v + 1 < p; ++v) targets.push_back({puncture_classes[v], lq * from_int(w.exponents[v])});
  return adapted_representation(gram, q, CVec(gram.rows), targets);
}

DenseMatrix compute_A_K(const TorusRepresentation& rep, const FlipChainData& data) {
  return run_flip_chain(rep, data).A;
}

DenseMatrix compute_A_CF(const TorusRepresentation& rep, const FlipChainData& data) {
  return run_flip_chain(rep, data).A;
}

Intertwiner compute_A_H(const TorusRepresentation& rep, const IMat& action) {
  const IMat& g = rep.lattice().gram;
  if (!(action.transpose() * g * action == g)) throw FormIncompatible("homology action does not preserve the form");
  return intertwine(rep, [&](const IVec& k) { return rep.monomial(action * k); });
}

// ---------------------------------------------------------------- abelian surgery formula

Complex gauss_phase(const RootOfUnity& q) {
  Complex g;
  for (int j = 0; j < q.n(); ++j) g += q.pow(static_cast<int64_t>(j) * j);
  return g * (Real(1) / abs(g));
}

DenseMatrix gauss_sum_AH(const SurgeryPresentation& s, const RootOfUnity& q) {
  const IMat& Q = s.linking;
  const int L = s.summed, m = Q.rows;
  if (Q.cols != m || m != L + 2) throw std::invalid_argument("linking matrix must cover the summed components and h0, h1");
  const RootOfUnity qr = q.squared();
  const int n = q.n();
  const int sig = signature(Q);
  Complex pref = pow(inverse(gauss_phase(qr)), sig) * (Real(1) / sqrt(pow(Complex(Real(n)), s.genus + L).re));
  int64_t total = 1;
  for (int i = 0; i < L; ++i) total *= n;
  DenseMatrix A(n);
  IVec c(m);
  for (int h0 = 0; h0 < n; ++h0)
    for (int h1 = 0; h1 < n; ++h1) {
      Complex sum;
      for (int64_t K = 0; K < total; ++K) {
        int64_t rest = K;
        for (int i = 0; i < L; ++i) {
          c[i] = rest % n;
          rest /= n;
        }
        c[L] = h0;
        c[L + 1] = h1;
        int64_t e = dot(c, Q * c);
        sum += qr.pow(e);
      }
      A(h0, h1) = pref * sum;
    }
  return A;
}

// ---------------------------------------------------------------- blocks and traces

BlockDecomposition block_decompose(const DenseMatrix& A, const WeightBlocks& weights, const Real& tol) {
  BlockDecomposition out;
  std::map<std::vector<int>, std::vector<int>> keys(weights.begin(), weights.end());
  std::vector<std::vector<int>> key_list;
  for (const auto& [key, idx] : keys) key_list.push_back(key);
  std::map<std::vector<int>, int> key_index;
  for (size_t i = 0; i < key_list.size(); ++i) key_index[key_list[i]] = static_cast<int>(i);
  std::vector<int> block_of(A.rows());
  for (const auto& [key, idx] : keys)
    for (int i : idx) block_of[i] = key_index[key];

  std::vector<int> rows_new, cols_new;
  std::set<int> used_targets;
  out.det = Complex(1);
  for (const auto& [key, idx] : keys) {
    std::vector<Real> mass(key_list.size());
    Real total;
    for (int c : idx)
      for (int r = 0; r < A.rows(); ++r) {
        Real v = norm(A(r, c));
        mass[block_of[r]] += v;
        total += v;
      }
    if (total.is_zero()) throw SingularOperator("operator vanishes on a weight block");
    int best = 0;
    for (size_t b = 1; b < mass.size(); ++b)
      if (mass[b] > mass[best]) best = static_cast<int>(b);
    Real leak = (total - mass[best]) / total;
    if (leak > out.leakage) out.leakage = leak;
    if (leak > tol) {
      std::ostringstream os;
      os << "off-pattern mass " << leak.str(6) << " in a weight block";
      throw BlockLeakage(os.str());
    }
    const auto& tkey = key_list[best];
    const auto& tidx = keys.at(tkey);
    if (tidx.size() != idx.size() || !used_targets.insert(best).second)
      throw BlockLeakage("weight blocks are not permuted bijectively");
    OperatorBlock b;
    b.source_key = key;
    b.target_key = tkey;
    b.source = idx;
    b.target = tidx;
    b.matrix = submatrix(A, tidx, idx);
    out.det *= lu_det(b.matrix);
    rows_new.insert(rows_new.end(), tidx.begin(), tidx.end());
    cols_new.insert(cols_new.end(), idx.begin(), idx.end());
    out.blocks.push_back(std::move(b));
  }
  if (perm_sign(rows_new) * perm_sign(cols_new) < 0) out.det = -out.det;
  return out;
}

TraceReport normalize_and_trace(const Complex& trace, const Complex& det, int dim) {
  if (det.is_zero()) throw SingularOperator("determinant vanishes");
  TraceReport t;
  t.dim = dim;
  t.value = trace / nth_root(det, dim);
  t.magnitude = abs(t.value);
  return t;
}

TraceReport normalize_and_trace(const DenseMatrix& A) { return normalize_and_trace(trace(A), lu_det(A), A.rows()); }

int64_t homology_order(const IMat& capped, int n) {
  IMat M = capped - IMat::identity(capped.rows);
  SmithForm sf = smith_form(M);
  int64_t order = n;
  for (int i = 0; i < M.rows; ++i) {
    int64_t d = i < M.cols ? std::llabs(sf.D(i, i)) : 0;
    order *= d == 0 ? n : std::gcd<int64_t>(d, n);
  }
  return order;
}

IMat capped_action(const HomologyData& h) {
  SymplecticBasis sb = skew_normal_form({h.gram});
  IMat Ci = unimodular_inverse(sb.change);
  IMat A = Ci * h.action * sb.change;
  const int r = 2 * static_cast<int>(sb.blocks.size());
  IMat out(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) out(i, j) = A(i, j);
  return out;
}

TraceReport cf_trace(const LayeredTriangulation& lt, const ShearBendLayers& sbl, const PunctureWeights& w,
                     const RootOfUnity& q, bool strict) {
  TorusRepresentation rep = cf_representation(lt.certificate().layers.front(), sbl, w, q);
  return normalize_and_trace(run_flip_chain(rep, cf_chain_data(lt, sbl, q.n()), strict).A);
}

TraceReport homology_trace(const HomologyData& h, const PunctureWeights& w, const RootOfUnity& q) {
  TorusRepresentation rep = homology_representation(h.gram, h.puncture_classes, w, q);
  return normalize_and_trace(compute_A_H(rep, h.action).B);
}

// ---------------------------------------------------------------- bundle

namespace {

DenseMatrix normalized(const DenseMatrix& a, Complex* det = nullptr) {
  Complex d = lu_det(a);
  if (det) *det = d;
  return inverse(nth_root(d, a.rows())) * a;
}

BlockVerification verify_block(const OperatorBlock& blk, const LayeredTriangulation& lt,
                               const ShearBendLayers& sbl, const KashaevLattice& lat, const HomologyData& hd,
                               const TorusRepresentation& repK, const Complex& detK, int DK, const RootOfUnity& q,
                               const BundleOptions& opts) {
  const int n = q.n();
  const IdealTriangulation& tri = lt.certificate().layers.front();
  const int p = tri.num_punctures(), E = tri.num_edges(), h = hd.basis.cols;
  BlockVerification bv;
  bv.key = blk.source_key;
  PunctureWeights w;
  int64_t s = 0;
  for (int v = 0; v + 1 < p; ++v) {
    w.exponents.push_back(bv.key[v]);
    s += bv.key[v];
  }
  w.exponents.push_back(static_cast<int>(((-s) % n + n) % n));

  TorusRepresentation repCF = cf_representation(tri, sbl, w, q);
  ChainResult cf = run_flip_chain(repCF, cf_chain_data(lt, sbl, n), opts.strict);
  TorusRepresentation repH = homology_representation(hd.gram, hd.puncture_classes, w, q);
  Intertwiner ah = compute_A_H(repH, hd.action);
  const DenseMatrix& ACF = cf.A;
  const DenseMatrix& AH = ah.B;

  // tensor representation of the CF and homology sub-tori
  const int r1 = repCF.blocks(), r2 = repH.blocks();
  const IMat& C1 = repCF.basis().change;
  const IMat& C2 = repH.basis().change;
  std::vector<IVec> cols;
  auto pad = [&](const IVec& v, bool first) {
    IVec out(E + h, 0);
    for (size_t i = 0; i < v.size(); ++i) out[(first ? 0 : E) + i] = v[i];
    return out;
  };
  for (int i = 0; i < 2 * r1; ++i) cols.push_back(pad(C1.col(i), true));
  for (int i = 0; i < 2 * r2; ++i) cols.push_back(pad(C2.col(i), false));
  for (int i = 2 * r1; i < E; ++i) cols.push_back(pad(C1.col(i), true));
  for (int i = 2 * r2; i < h; ++i) cols.push_back(pad(C2.col(i), false));
  SymplecticBasis sbT;
  sbT.change = IMat::from_columns(cols, E + h);
  sbT.blocks = repCF.basis().blocks;
  sbT.blocks.insert(sbT.blocks.end(), repH.basis().blocks.begin(), repH.basis().blocks.end());
  sbT.radical_rank = (E - 2 * r1) + (h - 2 * r2);
  ScalarMap sT;
  sT.values = repCF.scalar().values;
  sT.values.insert(sT.values.end(), repH.scalar().values.begin(), repH.scalar().values.end());
  TorusRepresentation repT(SkewLattice{direct_sum(repCF.lattice().gram, hd.gram)}, sbT, q, sT);
  if (repT.dim() != static_cast<int>(blk.source.size()))
    throw VerificationFailed("tensor representation and weight block differ in dimension");

  Intertwiner phi = intertwine(repT, [&](const IVec& k) {
    IVec cf(k.begin(), k.begin() + E), hv(k.begin() + E, k.end());
    IVec kk = lat.cfr * cf + hd.basis * hv;
    return restrict_gp(repK.monomial(kk), blk.source);
  }, opts.strict);
  bv.intertwiner_residual = phi.residual;
  DenseMatrix M = phi.B * kron(ACF, AH) * inverse(phi.B);
  ScalarFit fit = best_scalar_fit(blk.matrix, M);
  bv.scalar = fit.s;
  bv.proportionality = fit.residual;

  Complex dCF, dH, dZ;
  DenseMatrix nCF = normalized(ACF, &dCF), nH = normalized(AH, &dH), nZ = normalized(blk.matrix, &dZ);
  bv.det = dZ;
  bv.TCF = normalize_and_trace(trace(ACF), dCF, ACF.rows());
  bv.TH = normalize_and_trace(trace(AH), dH, AH.rows());
  bv.TK_block = normalize_and_trace(trace(blk.matrix), detK, DK);
  bv.eta = fit.s * nth_root(dCF, ACF.rows()) * nth_root(dH, AH.rows()) / nth_root(detK, DK);

  const int powers = opts.trace_powers > 0 ? opts.trace_powers : 2 * n;
  DenseMatrix pZ = nZ, pCF = nCF, pH = nH;
  for (int m = 1; m <= powers; ++m) {
    if (m > 1) {
      pZ = power_step(nZ, pZ);
      pCF = power_step(nCF, pCF);
      pH = power_step(nH, pH);
    }
    Real lhs = abs(trace(pZ)), rhs = abs(trace(pCF)) * abs(trace(pH));
    Real d = abs(lhs - rhs) / (Real(1) + rhs);
    if (d > bv.trace_powers) bv.trace_powers = d;
  }
  return bv;
}

}  // namespace

IntertwinerBundle build_bundle(const LayeredTriangulation& lt, const ShearBendLayers& sbl,
                               const KashaevLattice& lat, const KashaevCoordinateLift& lift, const RootOfUnity& q,
                               const BundleOptions& opts) {
  const int n = q.n();
  IntertwinerBundle b;
  b.n = n;
  TorusRepresentation repK = kashaev_representation(lat, lift, q);
  ChainResult ck = run_flip_chain(repK, kashaev_chain_data(lt, sbl, n), opts.strict);
  b.AK = std::move(ck.A);
  b.BK = std::move(ck.B);
  for (const auto& f : ck.factors) {
    PsiAudit a = audit_psi(q, f.psi);
    b.psi_audit = std::max({b.psi_audit, a.functional_equation, a.product, a.nth_power});
  }
  const int p = lt.certificate().layers.front().num_punctures();
  std::vector<IVec> family(lat.puncture_images.begin(), lat.puncture_images.begin() + (p - 1));
  WeightBlocks wb = weight_block_projectors(repK, family);
  b.blocks = block_decompose(b.AK, wb, opts.strict ? pow2(-precision() / 3) : Real(1) / Real(16));
  Complex tr;
  for (const auto& blk : b.blocks.blocks)
    if (blk.diagonal()) tr += trace(blk.matrix);
  b.TK = normalize_and_trace(tr, b.blocks.det, b.AK.rows());

  HomologyData hd = homology_data(lat, lift);
  b.order = homology_order(capped_action(hd), n);
  b.TH_expected = sqrt(Real(static_cast<long>(b.order)) / Real(n));

  Complex first;
  bool have_first = false;
  for (const auto& blk : b.blocks.blocks) {
    if (!blk.diagonal()) continue;
    Complex d = lu_det(blk.matrix);
    if (!have_first) {
      first = d;
      have_first = true;
    } else {
      b.block_det_spread = std::max(b.block_det_spread, abs(d - first) / abs(first));
    }
  }
  if (opts.verify)
    for (const auto& blk : b.blocks.blocks)
      if (blk.diagonal())
        b.verified.push_back(verify_block(blk, lt, sbl, lat, hd, repK, b.blocks.det, b.AK.rows(), q, opts));
  return b;
}

}  // namespace painv
