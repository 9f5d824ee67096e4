#include "painv/geometry.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <numeric>
#include <random>
#include <sstream>

namespace painv {

namespace {

// Reset negative zeros so principal logs of real negative numbers are +pi i.
Complex clean(Complex z) {
  if (z.re.is_zero()) z.re = Real(0);
  if (z.im.is_zero()) z.im = Real(0);
  return z;
}

std::array<Complex, 3> shape_triple(const Complex& z) {
  Complex one(1);
  return {clean(z), clean(inverse(one - z)), clean(one - inverse(z))};
}

Complex pi_i() { return Complex(Real(0), pi()); }

}  // namespace

// ---------------------------------------------------------------- layered triangulation

LayeredTriangulation::LayeredTriangulation(MappingClassCertificate cert) : cert_(std::move(cert)) {
  const int N = cert_.steps(), E = num_edges();
  if (N == 0) throw std::invalid_argument("the empty flip word has no layered triangulation");
  for (const auto& fr : cert_.frames) tets_.push_back({edge_of(fr.e), edge_of(fr.e1p), {fr.a, fr.b, fr.c, fr.d}});
  std::vector<int> parent((N + 1) * E);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto join = [&](int a, int b) { parent[find(a)] = find(b); };
  for (int i = 0; i < N; ++i)
    for (int x = 0; x < E; ++x)
      if (x != tets_[i].bottom) join(i * E + x, (i + 1) * E + x);
  for (int x = 0; x < E; ++x) join(N * E + x, edge_of(cert_.relabeling[x]));
  std::vector<int> id((N + 1) * E, -1);
  classes_.assign(N + 1, std::vector<int>(E));
  for (int i = 0; i <= N; ++i)
    for (int x = 0; x < E; ++x) {
      int r = find(i * E + x);
      if (id[r] < 0) id[r] = num_classes_++;
      classes_[i][x] = id[r];
    }
}

std::vector<ShapePosition> LayeredTriangulation::above(int layer, int edge) const {
  const int N = num_tetrahedra();
  std::vector<ShapePosition> out;
  int x = edge, k = layer, wraps = 0;
  while (true) {
    if (k == N) {
      x = edge_of(cert_.relabeling[x]);
      k = 0;
      if (++wraps > 2) throw std::logic_error("edge is never flipped");
    }
    const auto& t = tets_[k];
    if (t.bottom == x) {
      out.push_back({k, ShapeKind::Zp});
      return out;
    }
    static const ShapeKind kinds[4] = {ShapeKind::Zpp, ShapeKind::Z, ShapeKind::Zpp, ShapeKind::Z};
    for (int s = 0; s < 4; ++s)
      if (edge_of(t.sides[s]) == x) out.push_back({k, kinds[s]});
    ++k;
  }
}

LayeredTriangulation build_layered(const MappingClassCertificate& cert) { return LayeredTriangulation(cert); }

// ---------------------------------------------------------------- gluing equations

namespace {
void finish_system(GluingSystem& g) {
  const int R = g.rows(), N = g.tets;
  g.A = IMat(R, N);
  g.B = IMat(R, N);
  g.nu.assign(R, 0);
  for (int r = 0; r < R; ++r) {
    int64_t target = r < g.edge_rows ? 2 : g.degree[r];
    for (int k = 0; k < N; ++k) {
      const auto& c = g.counts[r][k];
      g.A(r, k) = c[0] - c[1];
      g.B(r, k) = c[2] - c[1];
      target -= c[1];
    }
    g.nu[r] = target;
  }
}
}  // namespace

GluingSystem edge_gluing_equations(const LayeredTriangulation& lt) {
  GluingSystem g;
  g.tets = lt.num_tetrahedra();
  g.edge_rows = lt.num_edge_classes();
  g.counts.assign(g.edge_rows, std::vector<std::array<int64_t, 3>>(g.tets, {0, 0, 0}));
  g.degree.assign(g.edge_rows, 0);
  for (int k = 0; k < g.tets; ++k) {
    const auto& t = lt.tetrahedra()[k];
    g.counts[lt.edge_class(k, t.bottom)][k][1] += 1;
    g.counts[lt.edge_class(k + 1, t.top)][k][1] += 1;
    static const int kinds[4] = {2, 0, 2, 0};
    for (int s = 0; s < 4; ++s) g.counts[lt.edge_class(k, edge_of(t.sides[s]))][k][kinds[s]] += 1;
  }
  finish_system(g);
  return g;
}

GluingSystem gluing_equations(const LayeredTriangulation& lt) {
  GluingSystem g = edge_gluing_equations(lt);
  const IdealTriangulation& bottom = lt.certificate().layers.front();
  const IMat& cv = bottom.puncture_vectors();
  for (int v = 0; v < bottom.num_punctures(); ++v) {
    std::vector<std::array<int64_t, 3>> row(g.tets, {0, 0, 0});
    int64_t deg = 0;
    for (int x = 0; x < lt.num_edges(); ++x) {
      if (!cv(v, x)) continue;
      deg += cv(v, x);
      for (const auto& p : lt.above(0, x)) row[p.tet][static_cast<int>(p.kind)] += cv(v, x);
    }
    g.counts.push_back(row);
    g.degree.push_back(deg);
  }
  finish_system(g);
  return g;
}

// ---------------------------------------------------------------- Newton

namespace {

struct Eval {
  CVec F;
  DenseMatrix J;
  Real norm;
};

Eval evaluate(const GluingSystem& g, const CVec& z) {
  const int R = g.rows(), N = g.tets;
  std::vector<std::array<Complex, 3>> logs(N), dlogs(N);
  Complex one(1);
  for (int k = 0; k < N; ++k) {
    auto s = shape_triple(z[k]);
    for (int j = 0; j < 3; ++j) logs[k][j] = log(s[j]);
    dlogs[k] = {inverse(z[k]), inverse(one - z[k]), inverse(z[k] * (z[k] - one))};
  }
  Eval e{CVec(R), DenseMatrix(R, N), Real(0)};
  const Real p = pi();
  for (int r = 0; r < R; ++r) {
    Complex s;
    for (int k = 0; k < N; ++k)
      for (int j = 0; j < 3; ++j)
        if (g.counts[r][k][j]) {
          Complex m(Real(static_cast<long>(g.counts[r][k][j])));
          s += m * logs[k][j];
          e.J(r, k) += m * dlogs[k][j];
        }
    Real target;
    if (r < g.edge_rows) {
      target = Real(2) * p * round(s.im / (Real(2) * p));
    } else {
      long par = ((g.degree[r] % 2) + 2) % 2;
      Real m = round((s.im / p - Real(par)) / Real(2));
      target = p * (Real(2) * m + Real(par));
    }
    e.F[r] = s - Complex(Real(0), target);
    Real a = abs(e.F[r]);
    if (a > e.norm) e.norm = a;
  }
  return e;
}

int numerical_rank(DenseMatrix a, const Real& rel) {
  const int R = a.rows(), C = a.cols();
  Real scale = max_abs(a);
  if (scale.is_zero()) return 0;
  int rank = 0;
  std::vector<bool> used_r(R, false), used_c(C, false);
  for (int step = 0; step < std::min(R, C); ++step) {
    int pr = -1, pc = -1;
    Real best(0);
    for (int i = 0; i < R; ++i)
      if (!used_r[i])
        for (int j = 0; j < C; ++j)
          if (!used_c[j] && abs(a(i, j)) > best) {
            best = abs(a(i, j));
            pr = i;
            pc = j;
          }
    if (pr < 0 || best < rel * scale) break;
    used_r[pr] = used_c[pc] = true;
    ++rank;
    Complex inv = inverse(a(pr, pc));
    for (int i = 0; i < R; ++i) {
      if (used_r[i]) continue;
      Complex l = a(i, pc) * inv;
      for (int j = 0; j < C; ++j) sub_mul(a(i, j), l, a(pr, j));
    }
  }
  return rank;
}

// Gauss-Newton step: least squares through the normal equations.
CVec gn_step(const Eval& e) {
  const int R = e.J.rows(), N = e.J.cols();
  DenseMatrix H(N, N);
  CVec rhs(N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      Complex s;
      for (int r = 0; r < R; ++r) add_mul(s, conj(e.J(r, i)), e.J(r, j));
      H(i, j) = s;
    }
    Complex s;
    for (int r = 0; r < R; ++r) sub_mul(s, conj(e.J(r, i)), e.F[r]);
    rhs[i] = s;
  }
  return inverse(H) * rhs;
}

bool run_newton(const GluingSystem& g, CVec& z, const NewtonOptions& opts, int& steps) {
  const Real goal = tolerance(20), stop = tolerance(6);
  Eval e = evaluate(g, z);
  steps = 0;
  for (int it = 0; it < opts.max_steps; ++it) {
    if (e.norm < stop) return true;
    CVec dz;
    try {
      dz = gn_step(e);
    } catch (const NumericError&) {
      return false;
    }
    // damped: halve until the residual decreases
    Real lam(1);
    bool improved = false;
    for (int h = 0; h < 30; ++h) {
      CVec trial = z;
      for (size_t k = 0; k < z.size(); ++k) trial[k] += lam * dz[k];
      bool ok = true;
      for (const auto& t : trial)
        if (t.is_zero() || abs(t - Complex(1)) < tolerance(4)) ok = false;
      if (ok) {
        try {
          Eval e2 = evaluate(g, trial);
          if (e2.norm < e.norm) {
            z = std::move(trial);
            e = std::move(e2);
            improved = true;
            break;
          }
        } catch (const NumericError&) {
        }
      }
      lam = lam / Real(2);
    }
    ++steps;
    if (!improved) return e.norm < goal;
  }
  return e.norm < goal;
}

// Newton in w = log z on A w + B log z'' = pi i nu with the branch held fixed.
// Near an angle structure this is close to linear, so it reaches the
// geometric solution from the regular shape where the rounded form stalls.
bool run_log_newton(const GluingSystem& g, CVec& z, const NewtonOptions& opts, int& steps) {
  const int R = g.rows(), N = g.tets;
  const Real goal = tolerance(20), stop = tolerance(6);
  const Complex one(1);
  auto eval = [&](const CVec& w, Eval& e) {
    e = Eval{CVec(R), DenseMatrix(R, N), Real(0)};
    CVec lzpp(N), dzpp(N);
    for (int k = 0; k < N; ++k) {
      Complex zk = exp(w[k]);
      if (abs(zk - one) < tolerance(4)) return false;
      lzpp[k] = log(one - inverse(zk));
      dzpp[k] = inverse(zk - one);
    }
    for (int r = 0; r < R; ++r) {
      Complex f = Complex(Real(0), -pi() * Real(g.nu[r]));
      for (int k = 0; k < N; ++k) {
        Real a(g.A(r, k)), b(g.B(r, k));
        f += a * w[k] + b * lzpp[k];
        e.J(r, k) = Complex(a) + b * dzpp[k];
      }
      e.F[r] = f;
      if (abs(f) > e.norm) e.norm = abs(f);
    }
    return true;
  };
  CVec w;
  for (const auto& zk : z) {
    if (zk.is_zero()) return false;
    w.push_back(log(zk));
  }
  Eval e;
  if (!eval(w, e)) return false;
  steps = 0;
  for (int it = 0; it < opts.max_steps; ++it) {
    if (e.norm < stop) break;
    CVec dw;
    try {
      dw = gn_step(e);
    } catch (const NumericError&) {
      return false;
    }
    Real lam(1);
    bool improved = false;
    for (int h = 0; h < 30 && !improved; ++h, lam = lam / Real(2)) {
      CVec trial = w;
      for (int k = 0; k < N; ++k) trial[k] += lam * dw[k];
      Eval e2;
      if (eval(trial, e2) && e2.norm < e.norm) {
        w = std::move(trial);
        e = std::move(e2);
        improved = true;
      }
    }
    ++steps;
    if (!improved) break;
  }
  if (!(e.norm < goal)) return false;
  for (int k = 0; k < N; ++k) z[k] = exp(w[k]);
  return true;
}

}  // namespace

ShapeSolution evaluate_solution(const GluingSystem& g, const CVec& shapes) {
  const int R = g.rows(), N = g.tets;
  ShapeSolution s;
  s.shapes = shapes;
  s.bits = precision();
  s.logZ.resize(N);
  s.logZpp.resize(N);
  Real tiny = tolerance(40);
  for (int k = 0; k < N; ++k) {
    auto t = shape_triple(shapes[k]);
    s.logZ[k] = log(t[0]);
    s.logZpp[k] = log(t[2]);
    if (shapes[k].im > tiny)
      ++s.positive;
    else if (shapes[k].im < -tiny)
      ++s.negative;
    else
      ++s.flat;
    s.volume += bloch_wigner(shapes[k]);
  }
  // product residual
  Complex one(1);
  for (int r = 0; r < R; ++r) {
    Complex p(1);
    for (int k = 0; k < N; ++k) {
      auto t = shape_triple(shapes[k]);
      if (g.A(r, k)) p *= pow(t[0], g.A(r, k));
      if (g.B(r, k)) p *= pow(t[2], g.B(r, k));
    }
    Complex target(g.nu[r] % 2 ? -1 : 1);
    Real d = abs(p - target);
    if (d > s.residual) s.residual = d;
  }
  // move logs by multiples of 2 pi i so the log identity holds with nu
  const Real p = pi();
  IVec shift(R);
  bool integral = true;
  for (int r = 0; r < R; ++r) {
    Complex sum;
    for (int k = 0; k < N; ++k) {
      sum += Complex(Real(static_cast<long>(g.A(r, k)))) * s.logZ[k];
      sum += Complex(Real(static_cast<long>(g.B(r, k)))) * s.logZpp[k];
    }
    long m = to_long(sum.im / p) - g.nu[r];
    if (m % 2) integral = false;
    shift[r] = -m / 2;
  }
  if (integral && !is_zero(shift)) {
    IMat AB(R, 2 * N);
    for (int r = 0; r < R; ++r)
      for (int k = 0; k < N; ++k) {
        AB(r, k) = g.A(r, k);
        AB(r, N + k) = g.B(r, k);
      }
    try {
      IVec ab = int_solve(AB, shift);
      Complex tpi(Real(0), Real(2) * p);
      for (int k = 0; k < N; ++k) {
        s.logZ[k] += Complex(Real(static_cast<long>(ab[k]))) * tpi;
        s.logZpp[k] += Complex(Real(static_cast<long>(ab[N + k]))) * tpi;
      }
    } catch (const std::domain_error&) {
    }
  }
  for (int r = 0; r < R; ++r) {
    Complex sum = -Complex(Real(0), p * Real(g.nu[r]));
    for (int k = 0; k < N; ++k) {
      sum += Complex(Real(static_cast<long>(g.A(r, k)))) * s.logZ[k];
      sum += Complex(Real(static_cast<long>(g.B(r, k)))) * s.logZpp[k];
    }
    Real d = abs(sum);
    if (d > s.branch_residual) s.branch_residual = d;
  }
  return s;
}

ShapeSolution newton_refine(const GluingSystem& g, const CVec& seed, long target_bits, const NewtonOptions& opts) {
  PrecisionGuard guard(target_bits);
  if (static_cast<int>(seed.size()) != g.tets) throw std::invalid_argument("one seed per tetrahedron");
  // rank audit at the seed
  {
    CVec z0;
    for (const auto& s : seed) z0.push_back(promote(s));
    Eval e = evaluate(g, z0);
    int rk = numerical_rank(e.J, pow2(-40));
    if (rk < g.tets) {
      std::ostringstream os;
      os << "gluing system has numerical rank " << rk << " < " << g.tets;
      throw RankDeficient(os.str());
    }
  }
  std::mt19937 rng(opts.seed);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  CVec z;
  int steps = 0, attempt = 0;
  for (; attempt <= opts.restarts; ++attempt) {
    z.clear();
    for (const auto& s : seed) {
      Complex c = promote(s);
      if (attempt > 0) c = Complex(Real(0.5 + jitter(rng)), Real(0.866 + jitter(rng)));
      z.push_back(c);
    }
    CVec start = z;
    if (run_log_newton(g, z, opts, steps)) break;
    z = start;
    if (run_newton(g, z, opts, steps)) break;
  }
  if (attempt > opts.restarts) {
    std::ostringstream os;
    os << "Newton iteration did not converge after " << opts.restarts << " restarts";
    throw NonConvergence(os.str());
  }
  // snap flat tetrahedra onto the real line when the residual allows it
  for (auto& c : z)
    if (abs(c.im) < tolerance(40) * (Real(1) + abs(c))) {
      Complex keep = c;
      c.im = Real(0);
      if (!(evaluate(g, z).norm < tolerance(20))) c = keep;
    }
  ShapeSolution s = evaluate_solution(g, z);
  s.steps = steps;
  s.restarts = attempt;
  return s;
}

// ---------------------------------------------------------------- Bloch-Wigner

namespace {
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// B_k / (k+1)!
const std::vector<cpp_rational>& dilog_coefficients(size_t count) {
  static std::vector<cpp_rational> bern{cpp_rational(1)};
  static std::vector<cpp_rational> coef;
  while (bern.size() < count) {
    const size_t m = bern.size();
    cpp_rational s = 0;
    cpp_int binom = 1;  // C(m+1, k)
    for (size_t k = 0; k < m; ++k) {
      s += cpp_rational(binom) * bern[k];
      binom = binom * cpp_int(m + 1 - k) / cpp_int(k + 1);
    }
    bern.push_back(-s / cpp_rational(m + 1));
  }
  cpp_int fact = 1;
  for (size_t k = 0; k < coef.size() + 1; ++k) fact *= cpp_int(k + 1);
  while (coef.size() < count) {
    size_t k = coef.size();
    coef.push_back(bern[k] / cpp_rational(fact));
    fact *= cpp_int(k + 2);
  }
  return coef;
}

Real to_real(const cpp_rational& r) {
  return Real(boost::multiprecision::numerator(r).str()) / Real(boost::multiprecision::denominator(r).str());
}

// Im Li2(w) via sum B_k u^(k+1)/(k+1)!, u = -log(1-w), |u| < 2 pi
Real im_li2(const Complex& w) {
  Complex u = -log(Complex(1) - w);
  Complex pw = u;
  Real sum(0), tol = tolerance(4);
  size_t terms = 64;
  for (size_t k = 0;; ++k) {
    if (k >= terms) terms *= 2;
    const auto& c = dilog_coefficients(terms);
    if (!c[k].is_zero()) {
      Complex t = pw * to_real(c[k]);
      sum += t.im;
      if (k > 4 && abs(t) < tol) break;
    }
    pw = pw * u;
    if (k > 4000) throw NumericError("dilogarithm series did not converge");
  }
  return sum;
}
}  // namespace

Real bloch_wigner(const Complex& z) {
  Complex one(1);
  if (z.is_zero() || (z - one).is_zero()) return Real(0);
  // the six images of z under the anharmonic group and the sign of D on them
  const Complex images[6] = {z, one - inverse(z), inverse(one - z), inverse(z), one - z, z / (z - one)};
  const int signs[6] = {1, 1, 1, -1, -1, -1};
  int best = 0;
  Real bu;
  for (int i = 0; i < 6; ++i) {
    Real u = abs(log(clean(one - images[i])));
    if (i == 0 || u < bu) {
      bu = u;
      best = i;
    }
  }
  const Complex& w = images[best];
  Real d = im_li2(w) + arg(clean(one - w)) * log(abs(w));
  return signs[best] > 0 ? d : -d;
}

// ---------------------------------------------------------------- shear-bends

Complex ShearBendLayers::theta(int tet, int n) const { return exp(log_zpp.at(tet) * (Real(1) / Real(n))); }

ShearBendLayers shear_bend_layers(const LayeredTriangulation& lt, const ShapeSolution& sol) {
  const int N = lt.num_tetrahedra(), E = lt.num_edges();
  const auto& cert = lt.certificate();
  ShearBendLayers out;
  std::vector<std::array<Complex, 3>> logs(N), vals(N);
  for (int k = 0; k < N; ++k) {
    out.shapes.push_back(clean(conj(sol.shapes[k])));
    vals[k] = shape_triple(out.shapes[k]);
    for (int j = 0; j < 3; ++j) logs[k][j] = log(vals[k][j]);
    out.log_zpp.push_back(logs[k][2]);
  }
  const Real tiny = tolerance(40);
  for (int i = 0; i <= N; ++i) {
    CVec lg(E), t(E);
    for (int x = 0; x < E; ++x) {
      Complex s = -pi_i();
      for (const auto& p : lt.above(i, x)) s += logs[p.tet][static_cast<int>(p.kind)];
      lg[x] = s;
      t[x] = exp(s);
      if (abs(t[x] + Complex(1)) < tiny) {
        std::ostringstream os;
        os << "shear-bend of edge " << x << " on layer " << i << " is -1";
        throw DegenerateShear(os.str());
      }
    }
    out.log_t.push_back(std::move(lg));
    out.t.push_back(std::move(t));
  }
  auto rel = [](const Complex& a, const Complex& b) { return abs(a - b) / (Real(1) + abs(b)); };
  Complex one(1);
  for (int k = 0; k < N; ++k) {
    const auto& tet = lt.tetrahedra()[k];
    const Complex& zp = vals[k][1];
    out.flip_audit = std::max(out.flip_audit, rel(out.t[k][tet.bottom], -zp));
    out.flip_audit = std::max(out.flip_audit, rel(out.t[k + 1][tet.top], -inverse(zp)));
    IMat eps = epsilon_matrix(cert.layers[k]);
    const int e = tet.bottom;
    const Complex& te = out.t[k][e];
    for (int x = 0; x < E; ++x) {
      Complex pred;
      if (x == e) {
        pred = inverse(te);
      } else {
        int64_t ex = eps(x, e);
        pred = out.t[k][x] * pow(te, std::max<int64_t>(ex, 0)) * pow(one + te, -ex);
      }
      out.mutation_audit = std::max(out.mutation_audit, rel(pred, out.t[k + 1][x]));
    }
  }
  const IMat& cv = cert.layers.front().puncture_vectors();
  for (int v = 0; v < cv.rows; ++v) {
    Complex p(1);
    for (int x = 0; x < E; ++x)
      if (cv(v, x)) p *= pow(out.t[0][x], cv(v, x));
    out.parabolic_audit = std::max(out.parabolic_audit, abs(p - one));
  }
  for (int x = 0; x < E; ++x)
    out.invariance_audit =
        std::max(out.invariance_audit, rel(out.t[N][x], out.t[0][edge_of(cert.relabeling[x])]));
  return out;
}

// ---------------------------------------------------------------- Kashaev lift

Real distance_to_2pi_i(const Complex& z) {
  Real tp = Real(2) * pi();
  Real k = round(z.im / tp);
  return abs(z - Complex(Real(0), k * tp));
}

ScalarMap KashaevCoordinateLift::scalar(int n) const {
  CVec logs;
  for (const auto& l : lambda) logs.push_back(l * (Real(1) / Real(n)));
  return scalar_map_from_logs(logs);
}

namespace {
Complex int_dot(const IVec& a, const CVec& x) {
  Complex s;
  for (size_t j = 0; j < a.size(); ++j)
    if (a[j]) s += Complex(Real(static_cast<long>(a[j]))) * x[j];
  return s;
}
}  // namespace

KashaevCoordinateLift lift_to_kashaev_coordinates(const LayeredTriangulation& lt, const ShearBendLayers& sbl,
                                                  const KashaevLattice& lat, bool strict) {
  const auto& cert = lt.certificate();
  const int E = lt.num_edges(), m = lat.gram.rows, N = lt.num_tetrahedra();
  KashaevCoordinateLift out;
  // chain: Lambda_N = F^T Lambda_0 - c
  IMat f = IMat::identity(m);
  CVec c(m);
  for (int i = 0; i < N; ++i) {
    const auto& before = cert.layers[i];
    const auto& fr = cert.frames[i];
    IMat M = kashaev_flip_map(before, cert.layers[i + 1], fr);
    IVec wchi = kashaev_form(before) * flip_vector(before, fr);
    Complex l = log(Complex(1) + sbl.t[i][edge_of(fr.e)]);
    CVec shifted = c;
    for (int j = 0; j < m; ++j)
      if (wchi[j]) shifted[j] += Complex(Real(static_cast<long>(wchi[j]))) * l;
    IMat Mt = M.transpose();
    for (int j = 0; j < m; ++j) c[j] = int_dot(Mt.row(j), shifted);
    f = f * M;
  }
  IMat P = kashaev_monodromy(cert);
  out.monodromy = f * P;
  IMat Pt = P.transpose();
  CVec drift(m);
  for (int j = 0; j < m; ++j) drift[j] = int_dot(Pt.row(j), c);
  out.drift = drift;

  std::vector<IVec> rows;
  CVec rhs;
  for (int x = 0; x < E; ++x) {
    rows.push_back(lat.cfr.col(x));
    rhs.push_back(sbl.log_t[0][x]);
  }
  const int h = lat.homology.cols;
  for (int j = 0; j < h; ++j) {
    rows.push_back(lat.homology.col(j));
    rhs.push_back(Complex());
  }
  IMat G = out.monodromy.transpose() - IMat::identity(m);
  for (int j = 0; j < m; ++j) {
    rows.push_back(G.row(j));
    rhs.push_back(drift[j]);
  }
  IMat S = IMat::from_rows(rows, m);
  SmithForm sf = smith_form(S);
  const int R = S.rows;
  CVec ur(R);
  for (int i = 0; i < R; ++i) ur[i] = int_dot(sf.U.row(i), rhs);
  CVec mu(m);
  const Real tol = tolerance(60);
  for (int i = 0; i < R; ++i) {
    int64_t d = i < m ? sf.D(i, i) : 0;
    if (d) {
      mu[i] = ur[i] * (Real(1) / Real(static_cast<long>(d)));
    } else if (strict && distance_to_2pi_i(ur[i]) > tol * (Real(1) + abs(ur[i]))) {
      throw NoInvariantDecoration("invariance equations are inconsistent modulo 2 pi i");
    }
  }
  out.lambda.resize(m);
  for (int j = 0; j < m; ++j) out.lambda[j] = int_dot(sf.V.row(j), mu);
  for (int r = 0; r < R; ++r) {
    Real d = distance_to_2pi_i(int_dot(rows[r], out.lambda) - rhs[r]);
    Real& slot = r < E ? out.cfr_residual : (r < E + h ? out.homology_residual : out.invariance_residual);
    if (d > slot) slot = d;
  }
  return out;
}

}  // namespace painv
