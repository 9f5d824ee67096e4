#include "painv/numeric.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace painv {

namespace {
std::atomic<long> g_bits{256};

int64_t checked_mul(int64_t x, int64_t y) {
  int64_t r;
  if (__builtin_mul_overflow(x, y, &r)) throw std::overflow_error("integer overflow");
  return r;
}
int64_t checked_add(int64_t x, int64_t y) {
  int64_t r;
  if (__builtin_add_overflow(x, y, &r)) throw std::overflow_error("integer overflow");
  return r;
}
}  // namespace

void set_precision(long bits) {
  if (bits < 64) throw std::invalid_argument("precision must be at least 64 bits");
  g_bits = bits;
  mpfr_set_default_prec(bits);
}

long precision() { return g_bits; }

Real tolerance(long slack) { return pow2(-precision() + slack); }

Real promote(const Real& x) {
  Real r;
  mpfr_set(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Complex promote(const Complex& z) { return {promote(z.re), promote(z.im)}; }

// ---------------------------------------------------------------- Real

Real::Real() {
  mpfr_init2(v_, g_bits);
  mpfr_set_zero(v_, 1);
}
Real::Real(int v) : Real(static_cast<long>(v)) {}
Real::Real(long v) {
  mpfr_init2(v_, g_bits);
  mpfr_set_si(v_, v, MPFR_RNDN);
}
Real::Real(double v) {
  mpfr_init2(v_, g_bits);
  mpfr_set_d(v_, v, MPFR_RNDN);
}
Real::Real(const std::string& decimal) {
  mpfr_init2(v_, g_bits);
  if (mpfr_set_str(v_, decimal.c_str(), 10, MPFR_RNDN) != 0)
    throw std::invalid_argument("not a decimal number: " + decimal);
}
Real::Real(const Real& o) {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
}
// A moved-from Real has a null limb pointer; assignment re-initializes it.
Real::Real(Real&& o) noexcept {
  v_[0] = o.v_[0];
  o.v_->_mpfr_d = nullptr;
}
Real::~Real() {
  if (v_->_mpfr_d) mpfr_clear(v_);
}
void Real::ensure() {
  if (!v_->_mpfr_d) mpfr_init2(v_, g_bits);
}
Real& Real::operator=(const Real& o) {
  if (this == &o) return *this;
  ensure();
  if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) mpfr_set_prec(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator=(Real&& o) noexcept {
  if (this == &o) return *this;
  if (v_->_mpfr_d) mpfr_clear(v_);
  v_[0] = o.v_[0];
  o.v_->_mpfr_d = nullptr;
  return *this;
}

Real& Real::operator+=(const Real& o) {
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real Real::operator-() const {
  Real r(*this);
  mpfr_neg(r.v_, r.v_, MPFR_RNDN);
  return r;
}

long Real::exponent() const {
  if (mpfr_zero_p(v_)) return -(1L << 40);
  return static_cast<long>(mpfr_get_exp(v_));
}

std::string Real::str(int digits) const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits, v_);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

Real operator+(Real a, const Real& b) { return a += b; }
Real operator-(Real a, const Real& b) { return a -= b; }
Real operator*(Real a, const Real& b) { return a *= b; }
Real operator/(Real a, const Real& b) { return a /= b; }
bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.get(), b.get()); }
bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.get(), b.get()); }
bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.get(), b.get()); }
bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.get(), b.get()); }
bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.get(), b.get()); }

#define PAINV_UNARY(name, fn)            \
  Real name(const Real& x) {             \
    Real r;                              \
    fn(r.get(), x.get(), MPFR_RNDN);     \
    return r;                            \
  }
PAINV_UNARY(abs, mpfr_abs)
PAINV_UNARY(sqrt, mpfr_sqrt)
PAINV_UNARY(exp, mpfr_exp)
PAINV_UNARY(log, mpfr_log)
PAINV_UNARY(sin, mpfr_sin)
PAINV_UNARY(cos, mpfr_cos)
#undef PAINV_UNARY

Real atan2(const Real& y, const Real& x) {
  Real r;
  mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN);
  return r;
}
Real round(const Real& x) {
  Real r;
  mpfr_round(r.get(), x.get());
  return r;
}
Real floor(const Real& x) {
  Real r;
  mpfr_floor(r.get(), x.get());
  return r;
}
Real pi() {
  Real r;
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}
Real pow2(long e) {
  Real r(1);
  mpfr_mul_2si(r.get(), r.get(), e, MPFR_RNDN);
  return r;
}
long to_long(const Real& x) { return mpfr_get_si(x.get(), MPFR_RNDN); }

// ---------------------------------------------------------------- Complex

Complex& Complex::operator+=(const Complex& o) {
  re += o.re;
  im += o.im;
  return *this;
}
Complex& Complex::operator-=(const Complex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}
Complex& Complex::operator*=(const Complex& o) {
  Complex r;
  mul_into(r, *this, o);
  *this = std::move(r);
  return *this;
}
Complex& Complex::operator/=(const Complex& o) {
  *this = *this / o;
  return *this;
}
Complex& Complex::operator*=(const Real& o) {
  re *= o;
  im *= o;
  return *this;
}
std::string Complex::str(int digits) const {
  std::string s = re.str(digits);
  if (im.sign() < 0)
    s += " - " + (-im).str(digits) + "i";
  else
    s += " + " + im.str(digits) + "i";
  return s;
}

Complex operator+(Complex a, const Complex& b) { return a += b; }
Complex operator-(Complex a, const Complex& b) { return a -= b; }
Complex operator*(const Complex& a, const Complex& b) {
  Complex r;
  mul_into(r, a, b);
  return r;
}
Complex operator/(const Complex& a, const Complex& b) {
  Real d = norm(b);
  Complex r(a.re * b.re + a.im * b.im, a.im * b.re - a.re * b.im);
  r.re /= d;
  r.im /= d;
  return r;
}
Complex operator*(Complex a, const Real& b) { return a *= b; }
Complex operator*(const Real& b, Complex a) { return a *= b; }

Complex conj(const Complex& z) { return {z.re, -z.im}; }
Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }
Real abs(const Complex& z) {
  Real r;
  mpfr_hypot(r.get(), z.re.get(), z.im.get(), MPFR_RNDN);
  return r;
}
Real arg(const Complex& z) { return atan2(z.im, z.re); }
Complex exp(const Complex& z) { return polar(exp(z.re), z.im); }
Complex log(const Complex& z) {
  if (z.is_zero()) throw NumericError("log of zero");
  return {log(abs(z)), arg(z)};
}
Complex pow(const Complex& z, int64_t e) {
  if (e < 0) return inverse(pow(z, -e));
  Complex r(1), b(z);
  while (e) {
    if (e & 1) r *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return r;
}
Complex polar(const Real& r, const Real& theta) {
  Complex z;
  mpfr_sin_cos(z.im.get(), z.re.get(), theta.get(), MPFR_RNDN);
  z.re *= r;
  z.im *= r;
  return z;
}
Complex expi(const Real& theta) { return polar(Real(1), theta); }
Complex i_unit() { return {Real(0), Real(1)}; }
Complex inverse(const Complex& z) { return Complex(1) / z; }

namespace {
struct Scratch {
  Real t1, t2;
};
Scratch& scratch() {
  thread_local Scratch s;
  // Track precision changes between calls.
  if (s.t1.bits() != precision()) s = Scratch{};
  return s;
}
}  // namespace

void mul_into(Complex& out, const Complex& a, const Complex& b) {
  Scratch& s = scratch();
  mpfr_mul(s.t1.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(s.t2.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(out.im.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_fma(out.im.get(), a.im.get(), b.re.get(), out.im.get(), MPFR_RNDN);
  mpfr_sub(out.re.get(), s.t1.get(), s.t2.get(), MPFR_RNDN);
}

void add_mul(Complex& acc, const Complex& a, const Complex& b) {
  Scratch& s = scratch();
  mpfr_mul(s.t1.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_fms(s.t1.get(), a.re.get(), b.re.get(), s.t1.get(), MPFR_RNDN);
  mpfr_mul(s.t2.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_fma(s.t2.get(), a.im.get(), b.re.get(), s.t2.get(), MPFR_RNDN);
  mpfr_add(acc.re.get(), acc.re.get(), s.t1.get(), MPFR_RNDN);
  mpfr_add(acc.im.get(), acc.im.get(), s.t2.get(), MPFR_RNDN);
}

void sub_mul(Complex& acc, const Complex& a, const Complex& b) {
  Scratch& s = scratch();
  mpfr_mul(s.t1.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_fms(s.t1.get(), a.re.get(), b.re.get(), s.t1.get(), MPFR_RNDN);
  mpfr_mul(s.t2.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_fma(s.t2.get(), a.im.get(), b.re.get(), s.t2.get(), MPFR_RNDN);
  mpfr_sub(acc.re.get(), acc.re.get(), s.t1.get(), MPFR_RNDN);
  mpfr_sub(acc.im.get(), acc.im.get(), s.t2.get(), MPFR_RNDN);
}

// ---------------------------------------------------------------- roots of unity

RootOfUnity::RootOfUnity(int n, int64_t k) : n_(n), k_(k) {
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("root of unity order must be odd and >= 3");
  pow_.reserve(n);
  // Each power from its own angle so the table is exact to working precision.
  for (int e = 0; e < n; ++e) {
    int64_t j = ((k % n + n) % n) * e % n;
    pow_.push_back(expi(Real(2) * pi() * Real(static_cast<long>(j)) / Real(n)));
  }
}

int RootOfUnity::log_q(const Complex& z, const Real& tol) const {
  int best = 0;
  Real bd = abs(z - pow_[0]);
  for (int l = 1; l < n_; ++l) {
    Real d = abs(z - pow_[l]);
    if (d < bd) {
      bd = d;
      best = l;
    }
  }
  if (bd > tol) throw NumericError("value is not a power of q: " + z.str(12));
  return best;
}

Complex RootOfUnity::log_value() const {
  int64_t j = ((k_ % n_) + n_) % n_;
  return {Real(0), Real(2) * pi() * Real(static_cast<long>(j)) / Real(n_)};
}

// ---------------------------------------------------------------- integers

IMat::IMat(std::initializer_list<std::initializer_list<int64_t>> init) {
  rows = static_cast<int>(init.size());
  cols = rows ? static_cast<int>(init.begin()->size()) : 0;
  for (const auto& r : init) {
    if (static_cast<int>(r.size()) != cols) throw std::invalid_argument("ragged matrix");
    a.insert(a.end(), r.begin(), r.end());
  }
}

IMat IMat::identity(int n) {
  IMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}
IMat IMat::from_columns(const std::vector<IVec>& cs, int r) {
  IMat m(r, static_cast<int>(cs.size()));
  for (int j = 0; j < m.cols; ++j) m.set_col(j, cs[j]);
  return m;
}
IMat IMat::from_rows(const std::vector<IVec>& rs, int c) {
  IMat m(static_cast<int>(rs.size()), c);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rs[i].at(j);
  return m;
}
IMat IMat::transpose() const {
  IMat t(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}
IVec IMat::col(int j) const {
  IVec v(rows);
  for (int i = 0; i < rows; ++i) v[i] = (*this)(i, j);
  return v;
}
IVec IMat::row(int i) const { return IVec(a.begin() + static_cast<long>(i) * cols, a.begin() + static_cast<long>(i + 1) * cols); }
void IMat::set_col(int j, const IVec& v) {
  if (static_cast<int>(v.size()) != rows) throw std::invalid_argument("column size mismatch");
  for (int i = 0; i < rows; ++i) (*this)(i, j) = v[i];
}

IMat operator*(const IMat& x, const IMat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matrix product shape mismatch");
  IMat r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      int64_t v = x(i, k);
      if (!v) continue;
      for (int j = 0; j < y.cols; ++j) r(i, j) = checked_add(r(i, j), checked_mul(v, y(k, j)));
    }
  return r;
}
IVec operator*(const IMat& x, const IVec& v) {
  if (x.cols != static_cast<int>(v.size())) throw std::invalid_argument("matvec shape mismatch");
  IVec r(x.rows, 0);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) r[i] = checked_add(r[i], checked_mul(x(i, j), v[j]));
  return r;
}
IMat operator-(const IMat& x, const IMat& y) {
  IMat r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a.at(i);
  return r;
}
IMat operator+(const IMat& x, const IMat& y) {
  IMat r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a.at(i);
  return r;
}
IVec operator+(const IVec& x, const IVec& y) {
  IVec r = x;
  for (size_t i = 0; i < r.size(); ++i) r[i] += y.at(i);
  return r;
}
IVec operator-(const IVec& x, const IVec& y) {
  IVec r = x;
  for (size_t i = 0; i < r.size(); ++i) r[i] -= y.at(i);
  return r;
}
IVec operator*(int64_t s, const IVec& v) {
  IVec r = v;
  for (auto& x : r) x *= s;
  return r;
}
int64_t dot(const IVec& x, const IVec& y) {
  int64_t s = 0;
  for (size_t i = 0; i < x.size(); ++i) s = checked_add(s, checked_mul(x[i], y.at(i)));
  return s;
}
IVec unit_vector(int n, int i) {
  IVec v(n, 0);
  v.at(i) = 1;
  return v;
}
bool is_zero(const IVec& v) {
  return std::all_of(v.begin(), v.end(), [](int64_t x) { return x == 0; });
}
IMat direct_sum(const IMat& x, const IMat& y) {
  IMat r(x.rows + y.rows, x.cols + y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) r(i, j) = x(i, j);
  for (int i = 0; i < y.rows; ++i)
    for (int j = 0; j < y.cols; ++j) r(x.rows + i, x.cols + j) = y(i, j);
  return r;
}

std::vector<int64_t> SmithForm::diagonal() const {
  std::vector<int64_t> d;
  for (int i = 0; i < std::min(D.rows, D.cols); ++i) d.push_back(D(i, i));
  return d;
}

namespace {
void swap_rows(IMat& m, int i, int j) {
  if (i == j) return;
  for (int c = 0; c < m.cols; ++c) std::swap(m(i, c), m(j, c));
}
void swap_cols(IMat& m, int i, int j) {
  if (i == j) return;
  for (int r = 0; r < m.rows; ++r) std::swap(m(r, i), m(r, j));
}
// row dst += c * row src
void add_row(IMat& m, int src, int dst, int64_t c) {
  if (!c) return;
  for (int k = 0; k < m.cols; ++k) m(dst, k) = checked_add(m(dst, k), checked_mul(c, m(src, k)));
}
void add_col(IMat& m, int src, int dst, int64_t c) {
  if (!c) return;
  for (int k = 0; k < m.rows; ++k) m(k, dst) = checked_add(m(k, dst), checked_mul(c, m(k, src)));
}
int64_t floordiv(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
}  // namespace

SmithForm smith_form(const IMat& m) {
  IMat A = m;
  IMat U = IMat::identity(m.rows), V = IMat::identity(m.cols);
  const int lim = std::min(m.rows, m.cols);
  int t = 0;
  while (t < lim) {
    int bi = -1, bj = -1;
    int64_t best = 0;
    for (int i = t; i < A.rows; ++i)
      for (int j = t; j < A.cols; ++j)
        if (A(i, j) && (bi < 0 || std::llabs(A(i, j)) < best)) {
          best = std::llabs(A(i, j));
          bi = i;
          bj = j;
        }
    if (bi < 0) break;
    swap_rows(A, t, bi);
    swap_rows(U, t, bi);
    swap_cols(A, t, bj);
    swap_cols(V, t, bj);
    bool done = false;
    while (!done) {
      done = true;
      for (int i = t + 1; i < A.rows; ++i)
        if (A(i, t)) {
          int64_t c = floordiv(A(i, t), A(t, t));
          add_row(A, t, i, -c);
          add_row(U, t, i, -c);
          if (A(i, t)) {
            swap_rows(A, t, i);
            swap_rows(U, t, i);
            done = false;
          }
        }
      for (int j = t + 1; j < A.cols; ++j)
        if (A(t, j)) {
          int64_t c = floordiv(A(t, j), A(t, t));
          add_col(A, t, j, -c);
          add_col(V, t, j, -c);
          if (A(t, j)) {
            swap_cols(A, t, j);
            swap_cols(V, t, j);
            done = false;
          }
        }
      if (done) {
        // divisibility: fold an offending row into the pivot row and redo
        for (int i = t + 1; i < A.rows && done; ++i)
          for (int j = t + 1; j < A.cols; ++j)
            if (A(i, j) % A(t, t)) {
              add_row(A, i, t, 1);
              add_row(U, i, t, 1);
              done = false;
              break;
            }
      }
    }
    if (A(t, t) < 0) {
      for (int k = 0; k < A.cols; ++k) A(t, k) = -A(t, k);
      for (int k = 0; k < U.cols; ++k) U(t, k) = -U(t, k);
    }
    ++t;
  }
  SmithForm f{U, A, V, 0};
  for (int i = 0; i < lim; ++i)
    if (A(i, i)) ++f.rank;
  return f;
}

int rank(const IMat& m) { return smith_form(m).rank; }

IMat kernel(const IMat& m) {
  SmithForm f = smith_form(m);
  IMat k(m.cols, m.cols - f.rank);
  for (int j = f.rank; j < m.cols; ++j) k.set_col(j - f.rank, f.V.col(j));
  return k;
}

IVec int_solve(const IMat& m, const IVec& rhs) {
  SmithForm f = smith_form(m);
  IVec y = f.U * rhs;
  IVec x(m.cols, 0);
  for (int i = 0; i < m.rows; ++i) {
    int64_t d = i < std::min(m.rows, m.cols) ? f.D(i, i) : 0;
    if (d == 0) {
      if (y[i] != 0) throw std::domain_error("integer system has no solution");
    } else {
      if (y[i] % d) throw std::domain_error("integer system has no integer solution");
      x[i] = y[i] / d;
    }
  }
  return f.V * x;
}

IMat unimodular_inverse(const IMat& m) {
  if (m.rows != m.cols) throw std::invalid_argument("inverse of non-square matrix");
  SmithForm f = smith_form(m);
  for (int i = 0; i < m.rows; ++i)
    if (f.D(i, i) != 1) throw std::domain_error("matrix is not unimodular");
  return f.V * f.U;
}

int64_t det(const IMat& m) {
  if (m.rows != m.cols) throw std::invalid_argument("det of non-square matrix");
  // fraction-free (Bareiss) elimination in big integers
  using boost::multiprecision::cpp_int;
  const int n = m.rows;
  std::vector<cpp_int> a(m.a.begin(), m.a.end());
  cpp_int prev = 1;
  int sgn = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a[k * n + k] == 0) {
      int p = k + 1;
      while (p < n && a[p * n + k] == 0) ++p;
      if (p == n) return 0;
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
      sgn = -sgn;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
    prev = a[k * n + k];
  }
  cpp_int d = n ? a[(n - 1) * n + (n - 1)] * sgn : cpp_int(1);
  return static_cast<int64_t>(d);
}

int signature(const IMat& m) {
  using boost::multiprecision::cpp_rational;
  if (m.rows != m.cols) throw std::invalid_argument("signature of non-square matrix");
  const int n = m.rows;
  std::vector<cpp_rational> a(m.a.begin(), m.a.end());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m(i, j) != m(j, i)) throw std::invalid_argument("signature of non-symmetric matrix");
  auto at = [&](int i, int j) -> cpp_rational& { return a[i * n + j]; };
  int pos = 0, neg = 0;
  std::vector<bool> used(n, false);
  for (int step = 0; step < n; ++step) {
    int p = -1;
    for (int i = 0; i < n; ++i)
      if (!used[i] && at(i, i) != 0) {
        p = i;
        break;
      }
    if (p < 0) {
      // all remaining diagonal entries vanish: replace e_i by e_i + e_j
      int pi = -1, pj = -1;
      for (int i = 0; i < n && pi < 0; ++i)
        for (int j = 0; j < n; ++j)
          if (!used[i] && !used[j] && i != j && at(i, j) != 0) {
            pi = i;
            pj = j;
            break;
          }
      if (pi < 0) break;
      for (int k = 0; k < n; ++k) at(pi, k) += at(pj, k);
      for (int k = 0; k < n; ++k) at(k, pi) += at(k, pj);
      p = pi;
    }
    used[p] = true;
    cpp_rational d = at(p, p);
    (d > 0 ? pos : neg)++;
    for (int i = 0; i < n; ++i) {
      if (used[i] || at(i, p) == 0) continue;
      cpp_rational c = at(i, p) / d;
      for (int k = 0; k < n; ++k) at(i, k) -= c * at(p, k);
      for (int k = 0; k < n; ++k) at(k, i) -= c * at(k, p);
    }
  }
  return pos - neg;
}

// ---------------------------------------------------------------- GPMatrix

GPMatrix GPMatrix::identity(int dim) { return scalar(dim, Complex(1)); }

GPMatrix GPMatrix::scalar(int dim, const Complex& s) {
  GPMatrix g;
  g.dim = dim;
  g.perm.resize(dim);
  std::iota(g.perm.begin(), g.perm.end(), 0);
  g.scales.assign(dim, s);
  return g;
}

bool GPMatrix::is_identity_perm() const {
  for (int j = 0; j < dim; ++j)
    if (perm[j] != j) return false;
  return true;
}

int GPMatrix::perm_sign() const {
  std::vector<bool> seen(dim, false);
  int sgn = 1;
  for (int j = 0; j < dim; ++j) {
    if (seen[j]) continue;
    int len = 0;
    for (int k = j; !seen[k]; k = perm[k]) {
      seen[k] = true;
      ++len;
    }
    if (len % 2 == 0) sgn = -sgn;
  }
  return sgn;
}

Complex GPMatrix::entry(int i, int j) const { return perm[j] == i ? scales[j] : Complex(0); }

CVec GPMatrix::apply(const CVec& v) const {
  if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("GPMatrix apply: size mismatch");
  CVec out(dim);
  for (int j = 0; j < dim; ++j) mul_into(out[perm[j]], scales[j], v[j]);
  return out;
}

GPMatrix GPMatrix::pow(int64_t m) const {
  if (m < 0) throw std::invalid_argument("negative GPMatrix power");
  GPMatrix r = identity(dim), b = *this;
  while (m) {
    if (m & 1) r = gp_compose(r, b);
    m >>= 1;
    if (m) b = gp_compose(b, b);
  }
  return r;
}

bool GPMatrix::is_scalar(const Real& tol, Complex* s) const {
  if (!is_identity_perm()) return false;
  for (int j = 1; j < dim; ++j)
    if (abs(scales[j] - scales[0]) > tol * (Real(1) + abs(scales[0]))) return false;
  if (s) *s = dim ? scales[0] : Complex(1);
  return true;
}

GPMatrix gp_compose(const GPMatrix& a, const GPMatrix& b) {
  if (a.dim != b.dim) throw std::invalid_argument("gp_compose: dimension mismatch");
  GPMatrix r;
  r.dim = a.dim;
  r.perm.resize(a.dim);
  r.scales.resize(a.dim);
  for (int j = 0; j < a.dim; ++j) {
    int k = b.perm[j];
    r.perm[j] = a.perm[k];
    mul_into(r.scales[j], b.scales[j], a.scales[k]);
  }
  return r;
}
GPMatrix operator*(const GPMatrix& a, const GPMatrix& b) { return gp_compose(a, b); }
GPMatrix operator*(const Complex& s, GPMatrix a) {
  for (auto& x : a.scales) x = s * x;
  return a;
}

// ---------------------------------------------------------------- DenseMatrix

DenseMatrix::DenseMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

DenseMatrix DenseMatrix::identity(int dim) {
  DenseMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = Complex(1);
  return m;
}

DenseMatrix DenseMatrix::from_gp(const GPMatrix& g) {
  DenseMatrix m(g.dim);
  for (int j = 0; j < g.dim; ++j) m(g.perm[j], j) = g.scales[j];
  return m;
}

CVec DenseMatrix::column(int j) const {
  CVec v(rows_);
  for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}
void DenseMatrix::set_column(int j, const CVec& v) {
  for (int i = 0; i < rows_; ++i) (*this)(i, j) = v.at(i);
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& o) {
  for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_.at(i);
  return *this;
}
DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& o) {
  for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_.at(i);
  return *this;
}
DenseMatrix& DenseMatrix::operator*=(const Complex& s) {
  Complex t;
  for (auto& x : a_) {
    mul_into(t, x, s);
    std::swap(x, t);
  }
  return *this;
}

DenseMatrix operator*(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.cols() != y.rows()) throw std::invalid_argument("matrix product shape mismatch");
  DenseMatrix r(x.rows(), y.cols());
  for (int i = 0; i < x.rows(); ++i) {
    Complex* ri = r.row(i);
    for (int k = 0; k < x.cols(); ++k) {
      const Complex& xik = x(i, k);
      if (xik.is_zero()) continue;
      const Complex* yk = y.row(k);
      for (int j = 0; j < y.cols(); ++j) add_mul(ri[j], xik, yk[j]);
    }
  }
  return r;
}
DenseMatrix operator+(DenseMatrix x, const DenseMatrix& y) { return x += y; }
DenseMatrix operator-(DenseMatrix x, const DenseMatrix& y) { return x -= y; }
DenseMatrix operator*(const Complex& s, DenseMatrix x) { return x *= s; }
CVec operator*(const DenseMatrix& x, const CVec& v) {
  CVec r(x.rows());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) add_mul(r[i], x(i, j), v.at(j));
  return r;
}

DenseMatrix gp_left(const GPMatrix& g, const DenseMatrix& x) {
  if (g.dim != x.rows()) throw std::invalid_argument("gp_left: dimension mismatch");
  DenseMatrix r(x.rows(), x.cols());
  for (int j = 0; j < g.dim; ++j) {
    Complex* dst = r.row(g.perm[j]);
    const Complex* src = x.row(j);
    for (int c = 0; c < x.cols(); ++c) mul_into(dst[c], g.scales[j], src[c]);
  }
  return r;
}

DenseMatrix gp_right(const DenseMatrix& x, const GPMatrix& g) {
  if (g.dim != x.cols()) throw std::invalid_argument("gp_right: dimension mismatch");
  DenseMatrix r(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < g.dim; ++j) mul_into(r(i, j), x(i, g.perm[j]), g.scales[j]);
  return r;
}

Complex trace(const DenseMatrix& x) {
  Complex t;
  for (int i = 0; i < std::min(x.rows(), x.cols()); ++i) t += x(i, i);
  return t;
}
Real frobenius(const DenseMatrix& x) {
  Real s;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) s += norm(x(i, j));
  return sqrt(s);
}
Real max_abs(const DenseMatrix& x) {
  Real m;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) {
      Real a = abs(x(i, j));
      if (a > m) m = a;
    }
  return m;
}
Real vec_norm(const CVec& v) {
  Real s;
  for (const auto& x : v) s += norm(x);
  return sqrt(s);
}
DenseMatrix adjoint(const DenseMatrix& x) {
  DenseMatrix r(x.cols(), x.rows());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) r(j, i) = conj(x(i, j));
  return r;
}
DenseMatrix kron(const DenseMatrix& x, const DenseMatrix& y) {
  DenseMatrix r(x.rows() * y.rows(), x.cols() * y.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j)
      for (int k = 0; k < y.rows(); ++k)
        for (int l = 0; l < y.cols(); ++l) mul_into(r(i * y.rows() + k, j * y.cols() + l), x(i, j), y(k, l));
  return r;
}
DenseMatrix submatrix(const DenseMatrix& x, const std::vector<int>& rows, const std::vector<int>& cols) {
  DenseMatrix r(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) r(static_cast<int>(i), static_cast<int>(j)) = x(rows[i], cols[j]);
  return r;
}

namespace {
// In-place LU with partial pivoting; returns the permutation sign, 0 if singular.
int lu_inplace(DenseMatrix& a, std::vector<int>& piv) {
  const int n = a.rows();
  piv.resize(n);
  std::iota(piv.begin(), piv.end(), 0);
  int sgn = 1;
  Complex l;
  for (int k = 0; k < n; ++k) {
    int p = k;
    Real best = norm(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      Real v = norm(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best.is_zero()) return 0;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(piv[k], piv[p]);
      sgn = -sgn;
    }
    Complex inv = inverse(a(k, k));
    const Complex* rk = a.row(k);
    for (int i = k + 1; i < n; ++i) {
      Complex* ri = a.row(i);
      mul_into(l, ri[k], inv);
      ri[k] = l;
      if (l.is_zero()) continue;
      for (int j = k + 1; j < n; ++j) sub_mul(ri[j], l, rk[j]);
    }
  }
  return sgn;
}
}  // namespace

Complex lu_det(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("lu_det: non-square matrix");
  DenseMatrix a = m;
  std::vector<int> piv;
  int sgn = lu_inplace(a, piv);
  if (sgn == 0) return Complex(0);
  Complex d(sgn);
  for (int i = 0; i < a.rows(); ++i) d *= a(i, i);
  return d;
}

Complex lu_det(const GPMatrix& g) {
  Complex d(g.perm_sign());
  for (const auto& s : g.scales) d *= s;
  return d;
}

DenseMatrix inverse(const DenseMatrix& m) {
  const int n = m.rows();
  DenseMatrix a = m;
  std::vector<int> piv;
  if (lu_inplace(a, piv) == 0) throw NumericError("inverse of a singular matrix");
  DenseMatrix r(n);
  for (int c = 0; c < n; ++c) {
    // solve L U x = P e_c
    CVec x(n);
    for (int i = 0; i < n; ++i) {
      x[i] = Complex(piv[i] == c ? 1 : 0);
      for (int k = 0; k < i; ++k) sub_mul(x[i], a(i, k), x[k]);
    }
    for (int i = n - 1; i >= 0; --i) {
      for (int k = i + 1; k < n; ++k) sub_mul(x[i], a(i, k), x[k]);
      x[i] = x[i] / a(i, i);
    }
    r.set_column(c, x);
  }
  return r;
}

ScalarFit best_scalar_fit(const DenseMatrix& x, const DenseMatrix& y) {
  Complex num;
  Real den;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) {
      add_mul(num, conj(y(i, j)), x(i, j));
      den += norm(y(i, j));
    }
  if (den.is_zero()) throw NumericError("scalar fit against a zero matrix");
  Complex s = num * (Real(1) / den);
  DenseMatrix d = x - s * y;
  return {s, frobenius(d) / frobenius(x)};
}

}  // namespace painv
