#include "painv/qtorus.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace painv {

namespace {
std::string vec_str(const IVec& v) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}
int64_t floordiv(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
}  // namespace

void SkewLattice::validate() const {
  if (gram.rows != gram.cols) throw std::invalid_argument("gram matrix not square");
  for (int i = 0; i < gram.rows; ++i)
    for (int j = 0; j < gram.cols; ++j)
      if (gram(i, j) != -gram(j, i)) throw std::invalid_argument("gram matrix not antisymmetric");
}

SymplecticBasis skew_normal_form(const SkewLattice& l) {
  l.validate();
  IMat G = l.gram;
  const int m = G.rows;
  IMat C = IMat::identity(m);
  auto swap = [&](int i, int j) {
    if (i == j) return;
    for (int c = 0; c < m; ++c) std::swap(G(i, c), G(j, c));
    for (int r = 0; r < m; ++r) std::swap(G(r, i), G(r, j));
    for (int r = 0; r < m; ++r) std::swap(C(r, i), C(r, j));
  };
  // basis vector e_l += c e_s, applied as a congruence
  auto add = [&](int l, int s, int64_t c) {
    if (!c) return;
    for (int k = 0; k < m; ++k) G(l, k) += c * G(s, k);
    for (int k = 0; k < m; ++k) G(k, l) += c * G(k, s);
    for (int r = 0; r < m; ++r) C(r, l) += c * C(r, s);
  };
  SymplecticBasis out;
  int k = 0;
  while (k + 1 < m) {
    int bi = -1, bj = -1;
    int64_t best = 0;
    for (int i = k; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (G(i, j) && (bi < 0 || std::llabs(G(i, j)) < best)) {
          best = std::llabs(G(i, j));
          bi = i;
          bj = j;
        }
    if (bi < 0) break;
    swap(k, bi);
    if (bj == k) bj = bi;
    swap(k + 1, bj);
    if (G(k, k + 1) < 0) swap(k, k + 1);
    const int64_t d = G(k, k + 1);
    bool clean = true;
    for (int l2 = k + 2; l2 < m; ++l2) {
      add(l2, k + 1, -floordiv(G(k, l2), d));
      add(l2, k, floordiv(G(k + 1, l2), d));
      if (G(k, l2) || G(k + 1, l2)) clean = false;
    }
    if (!clean) continue;  // a smaller pivot appeared; start the pair over
    int bad = -1;
    for (int a = k + 2; a < m && bad < 0; ++a)
      for (int b = k + 2; b < m; ++b)
        if (G(a, b) % d) {
          bad = a;
          break;
        }
    if (bad >= 0) {
      add(k, bad, 1);
      continue;
    }
    out.blocks.push_back(d);
    k += 2;
  }
  out.change = C;
  out.radical_rank = m - 2 * static_cast<int>(out.blocks.size());
  return out;
}

Complex ScalarMap::operator()(const IVec& k) const {
  if (k.size() != values.size()) throw std::invalid_argument("ScalarMap: vector length mismatch");
  Complex r(1);
  for (size_t j = 0; j < k.size(); ++j)
    if (k[j]) r *= pow(values[j], k[j]);
  return r;
}

ScalarMap scalar_map_from_logs(const CVec& logs) {
  ScalarMap s;
  for (const auto& l : logs) s.values.push_back(exp(l));
  return s;
}

// ---------------------------------------------------------------- representation

TorusRepresentation::TorusRepresentation(SkewLattice lattice, SymplecticBasis basis, RootOfUnity q,
                                         ScalarMap scalar)
    : lattice_(std::move(lattice)), basis_(std::move(basis)), q_(std::move(q)), scalar_(std::move(scalar)) {
  lattice_.validate();
  change_inv_ = unimodular_inverse(basis_.change);
  adapted_gram_ = basis_.change.transpose() * lattice_.gram * basis_.change;
  const int r = blocks();
  for (int i = 0; i < rank(); ++i)
    for (int j = 0; j < rank(); ++j) {
      int64_t want = 0;
      if (i / 2 == j / 2 && i < 2 * r) {
        if (i % 2 == 0 && j == i + 1) want = basis_.blocks[i / 2];
        if (i % 2 == 1 && j == i - 1) want = -basis_.blocks[i / 2];
      }
      if (adapted_gram_(i, j) != want) throw std::invalid_argument("basis is not in skew normal form");
    }
  if (static_cast<int>(scalar_.values.size()) != rank())
    throw std::invalid_argument("scalar map has the wrong length");
  dim_ = 1;
  for (int i = 0; i < r; ++i) dim_ *= n();
}

GPMatrix TorusRepresentation::unscaled(const IVec& k) const {
  const IVec kap = change_inv_ * k;
  const int n_ = n(), r = blocks(), m = rank();
  int64_t ph = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (adapted_gram_(i, j)) ph -= adapted_gram_(i, j) * (kap[i] % n_) * (kap[j] % n_) % n_;
  std::vector<int> a(r), b(r);
  for (int i = 0; i < r; ++i) {
    a[i] = q_.mod(basis_.blocks[i] * kap[2 * i]);
    b[i] = q_.mod(kap[2 * i + 1]);
  }
  GPMatrix g;
  g.dim = dim_;
  g.perm.resize(dim_);
  g.scales.resize(dim_);
  std::vector<int> digit(r);
  for (int J = 0; J < dim_; ++J) {
    int rest = J;
    for (int i = r - 1; i >= 0; --i) {
      digit[i] = rest % n_;
      rest /= n_;
    }
    int64_t e = ph;
    int target = 0;
    for (int i = 0; i < r; ++i) {
      int jj = (digit[i] + b[i]) % n_;
      e += 2LL * a[i] * jj;
      target = target * n_ + jj;
    }
    g.perm[J] = target;
    g.scales[J] = q_.pow(e);
  }
  return g;
}

GPMatrix TorusRepresentation::monomial(const IVec& k) const { return scalar_(k) * unscaled(k); }

GPMatrix rep_monomial(const TorusRepresentation& rep, const IVec& k) { return rep.monomial(k); }

TorusRepresentation adapted_representation(const IMat& gram, const RootOfUnity& q, const CVec& logsig,
                                           const std::vector<RadicalTarget>& radical_targets) {
  SkewLattice lat{gram};
  SymplecticBasis sb = skew_normal_form(lat);
  const int m = gram.rows, r = static_cast<int>(sb.blocks.size()), g = m - 2 * r;
  IMat Ci = unimodular_inverse(sb.change);
  CVec lv(m);
  const Real n(q.n());
  for (int i = 0; i < 2 * r; ++i) {
    Complex s;
    for (int j = 0; j < m; ++j)
      if (sb.change(j, i)) s += Complex(Real(static_cast<long>(sb.change(j, i)))) * logsig.at(j);
    lv[i] = s * (Real(1) / n);
  }
  if (g) {
    if (static_cast<int>(radical_targets.size()) != g)
      throw std::invalid_argument("radical targets must match the radical rank");
    IMat A(g, g);
    for (int t = 0; t < g; ++t) {
      IVec c = Ci * radical_targets[t].vector;
      for (int i = 0; i < 2 * r; ++i)
        if (c[i]) throw std::invalid_argument("radical target is not in the radical");
      for (int i = 0; i < g; ++i) A(i, t) = c[2 * r + i];
    }
    IMat Ait = unimodular_inverse(A).transpose();
    for (int i = 0; i < g; ++i) {
      Complex s;
      for (int t = 0; t < g; ++t)
        if (Ait(i, t)) s += Complex(Real(static_cast<long>(Ait(i, t)))) * radical_targets[t].log_value;
      lv[2 * r + i] = s;
    }
  }
  // e_j = sum_i Ci(i, j) b_i
  CVec logstd(m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      if (Ci(i, j)) logstd[j] += Complex(Real(static_cast<long>(Ci(i, j)))) * lv[i];
  return TorusRepresentation(lat, sb, q, scalar_map_from_logs(logstd));
}

// ---------------------------------------------------------------- spectra

MonomialEigendata monomial_eigendata(const TorusRepresentation& rep, const IVec& k) {
  const int n = rep.n();
  // central iff omega(k, .) vanishes mod n on the lattice
  IVec wk = rep.lattice().gram.transpose() * k;
  bool central = std::all_of(wk.begin(), wk.end(), [&](int64_t x) { return x % n == 0; });
  if (central) throw CentralMonomialError("monomial " + vec_str(k) + " is central");
  GPMatrix x = rep.monomial(k);
  MonomialEigendata out;
  out.multiplicity = x.dim / n;
  std::vector<bool> seen(x.dim, false);
  for (int start = 0; start < x.dim; ++start) {
    if (seen[start]) continue;
    std::vector<int> cyc;
    for (int j = start; !seen[j]; j = x.perm[j]) {
      seen[j] = true;
      cyc.push_back(j);
    }
    const int L = static_cast<int>(cyc.size());
    Complex lam(1);
    for (int j : cyc) lam *= x.scales[j];
    // L-th roots of lam: mu_t = lam^(1/L) w^t, w = exp(2 pi i / L)
    Complex base = exp(log(lam) * (Real(1) / Real(L)));
    for (int t = 0; t < L; ++t) {
      Complex mu = base * expi(Real(2) * pi() * Real(t) / Real(L));
      CVec v(x.dim);
      Complex c(1);
      Complex muinv = inverse(mu);
      for (int s = 0; s < L; ++s) {
        v[cyc[s]] = c;
        c = c * x.scales[cyc[s]] * muinv;
      }
      Real nv = vec_norm(v);
      for (auto& e : v) e *= Real(1) / nv;
      out.pairs.push_back({mu, std::move(v)});
    }
  }
  // distinct eigenvalues
  Real tol = tolerance(40);
  for (const auto& p : out.pairs) {
    bool fresh = true;
    for (const auto& r : out.roots)
      if (abs(r - p.value) < tol * (Real(1) + abs(r))) fresh = false;
    if (fresh) out.roots.push_back(p.value);
  }
  return out;
}

CVec interpolation_coefficients(const RootOfUnity& q, const RootValues& rv) {
  const int n = q.n();
  if (static_cast<int>(rv.values.size()) != n) throw MissingRootValue("need one value per n-th root");
  // f_m = (1/n) sum_j F(x_j) x_j^(-m), x_j = y q^(2j)
  CVec f(n);
  Complex yinv = inverse(rv.y);
  for (int m = 0; m < n; ++m) {
    Complex s;
    Complex ym = pow(yinv, m);
    for (int j = 0; j < n; ++j) add_mul(s, rv.values[j], q.pow(-2LL * j * m));
    f[m] = s * ym * (Real(1) / Real(n));
  }
  return f;
}

DenseMatrix apply_functional_calculus(const GPMatrix& x, const RootOfUnity& q, const RootValues& rv,
                                      const DenseMatrix& a) {
  CVec f = interpolation_coefficients(q, rv);
  DenseMatrix out = f[0] * a;
  DenseMatrix cur = a;
  for (int m = 1; m < q.n(); ++m) {
    cur = gp_left(x, cur);
    DenseMatrix t = f[m] * cur;
    out += t;
  }
  return out;
}

DenseMatrix functional_calculus(const TorusRepresentation& rep, const IVec& k, const RootValues& rv) {
  IVec wk = rep.lattice().gram.transpose() * k;
  if (std::all_of(wk.begin(), wk.end(), [&](int64_t x) { return x % rep.n() == 0; }))
    throw CentralMonomialError("functional calculus of central monomial " + vec_str(k));
  GPMatrix x = rep.monomial(k);
  // y must be an n-th root of sigma(k) = X^n
  Complex xn;
  if (!x.pow(rep.n()).is_scalar(tolerance(40), &xn))
    throw CentralCharacterMismatch("X^n is not scalar for " + vec_str(k));
  if (abs(pow(rv.y, rep.n()) - xn) > tolerance(40) * (Real(1) + abs(xn)))
    throw MissingRootValue("root base y is not an n-th root of sigma(k)");
  return apply_functional_calculus(x, rep.q(), rv, DenseMatrix::identity(rep.dim()));
}

// ---------------------------------------------------------------- intertwiners

namespace {
Real gp_relative_residual(const GPMatrix& left, const DenseMatrix& B, const GPMatrix& right) {
  DenseMatrix d = gp_left(left, B) - gp_right(B, right);
  return frobenius(d) / frobenius(B);
}

void check_central_character(const TorusRepresentation& rep, const OperatorImage& image) {
  const int m = rep.rank(), r = rep.blocks();
  const auto& C = rep.basis().change;
  Real tol = tolerance(40);
  for (int i = 0; i < m; ++i) {
    IVec g = C.col(i);
    GPMatrix img = image(g);
    GPMatrix own = rep.monomial(g);
    Complex a, b;
    if (i >= 2 * r) {
      // radical: both sides are scalars and must agree exactly
      if (!img.is_scalar(tol, &a) || !own.is_scalar(tol, &b) || abs(a - b) > tol * (Real(1) + abs(b)))
        throw CentralCharacterMismatch("central character differs on radical vector " + vec_str(g));
      continue;
    }
    if (!img.pow(rep.n()).is_scalar(tol, &a) || !own.pow(rep.n()).is_scalar(tol, &b) ||
        abs(a - b) > tol * (Real(1) + abs(b)))
      throw CentralCharacterMismatch("n-th power character differs on " + vec_str(g));
  }
}
}  // namespace

Intertwiner intertwine(const TorusRepresentation& rep, const OperatorImage& image, bool strict) {
  if (strict) check_central_character(rep, image);
  const int n = rep.n(), r = rep.blocks(), dim = rep.dim();
  const auto& C = rep.basis().change;
  // joint eigenvector of image(alpha_i) with the eigenvalue rho(alpha_i) has on e_0
  std::vector<GPMatrix> A(r);
  CVec mu_inv(r);
  for (int i = 0; i < r; ++i) {
    A[i] = image(C.col(2 * i));
    GPMatrix own = rep.monomial(C.col(2 * i));
    mu_inv[i] = inverse(own.scales[0]);
  }
  CVec w;
  Real tiny = tolerance(60);
  for (int j = 0; j < dim && w.empty(); ++j) {
    CVec v(dim);
    v[j] = Complex(1);
    for (int i = 0; i < r; ++i) {
      CVec acc = v, cur = v;
      for (int m = 1; m < n; ++m) {
        cur = A[i].apply(cur);
        for (auto& x : cur) x *= mu_inv[i];
        for (int t = 0; t < dim; ++t) acc[t] += cur[t];
      }
      v = std::move(acc);
    }
    Real nv = vec_norm(v);
    if (nv > tiny) {
      for (auto& x : v) x *= Real(1) / nv;
      w = std::move(v);
    }
  }
  if (w.empty()) throw CentralCharacterMismatch("no joint eigenvector for the alpha generators");

  // ladder: column of e_(idx) is image(l.beta) w / c where rho(l.beta) e_0 = c e_idx
  DenseMatrix B(dim);
  std::vector<int> l(r, 0);
  for (int t = 0; t < dim; ++t) {
    int rest = t;
    for (int i = r - 1; i >= 0; --i) {
      l[i] = rest % n;
      rest /= n;
    }
    IVec k(rep.rank(), 0);
    for (int i = 0; i < r; ++i) k = k + static_cast<int64_t>(l[i]) * C.col(2 * i + 1);
    GPMatrix own = rep.monomial(k);
    int idx = own.perm[0];
    Complex cinv = inverse(own.scales[0]);
    CVec col = image(k).apply(w);
    for (auto& x : col) x = x * cinv;
    B.set_column(idx, col);
  }
  // phase: first nonzero entry of column 0 positive real
  Real tol = tolerance(60) * max_abs(B);
  for (int i = 0; i < dim; ++i)
    if (abs(B(i, 0)) > tol) {
      Complex ph = conj(B(i, 0)) * (Real(1) / abs(B(i, 0)));
      B *= ph;
      break;
    }
  Intertwiner out{std::move(B), Real(0)};
  for (int j = 0; j < rep.rank(); ++j) {
    IVec e = unit_vector(rep.rank(), j);
    Real res = gp_relative_residual(image(e), out.B, rep.monomial(e));
    if (res > out.residual) out.residual = res;
  }
  return out;
}

Intertwiner monomial_intertwiner(const TorusRepresentation& source, const TorusRepresentation& target,
                                 const MonomialMap& map) {
  return intertwine(source, [&](const IVec& k) { return map.scalar(k) * target.unscaled(map.lattice * k); });
}

Intertwiner intertwine_reps(const TorusRepresentation& a, const TorusRepresentation& b) {
  if (!(a.lattice().gram == b.lattice().gram)) throw std::invalid_argument("representations of different lattices");
  return intertwine(a, [&](const IVec& k) { return b.monomial(k); });
}

WeightBlocks weight_block_projectors(const TorusRepresentation& rep, const std::vector<IVec>& family) {
  WeightBlocks out;
  std::vector<GPMatrix> ops;
  for (const auto& k : family) {
    ops.push_back(rep.monomial(k));
    if (!ops.back().is_identity_perm()) throw NonDiagonalAction("family member " + vec_str(k) + " is not diagonal");
  }
  Real tol = tolerance(40);
  for (int J = 0; J < rep.dim(); ++J) {
    std::vector<int> key;
    for (const auto& g : ops) key.push_back(rep.q().log_q(g.scales[J], tol));
    out[key].push_back(J);
  }
  return out;
}

}  // namespace painv
