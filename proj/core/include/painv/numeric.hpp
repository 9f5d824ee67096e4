#pragma once
// Arbitrary-precision complex arithmetic and the structured linear algebra
// used by every other module.

#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace painv {

// ---------------------------------------------------------------- precision

// Working precision in bits. New Reals pick this up at construction.
void set_precision(long bits);
long precision();

// 2^(-precision + slack)
class Real;
Real tolerance(long slack = 20);

// Scoped precision change, restored on exit.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(long bits) : saved_(precision()) { set_precision(bits); }
  ~PrecisionGuard() { set_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  long saved_;
};

// ---------------------------------------------------------------- Real

class Real {
 public:
  Real();
  Real(int v);
  Real(long v);
  Real(double v);
  explicit Real(const std::string& decimal);
  Real(const Real& o);
  Real(Real&& o) noexcept;
  ~Real();
  Real& operator=(const Real& o);
  Real& operator=(Real&& o) noexcept;

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  long bits() const { return static_cast<long>(mpfr_get_prec(v_)); }

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real operator-() const;

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  // Exponent e with 2^(e-1) <= |x| < 2^e; very negative for zero.
  long exponent() const;

  // Decimal rendering with the given number of significant digits.
  std::string str(int digits = 20) const;

 private:
  void ensure();
  mpfr_t v_;
};

Real operator+(Real a, const Real& b);
Real operator-(Real a, const Real& b);
Real operator*(Real a, const Real& b);
Real operator/(Real a, const Real& b);
bool operator<(const Real& a, const Real& b);
bool operator>(const Real& a, const Real& b);
bool operator<=(const Real& a, const Real& b);
bool operator>=(const Real& a, const Real& b);
bool operator==(const Real& a, const Real& b);

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real atan2(const Real& y, const Real& x);
Real round(const Real& x);
Real floor(const Real& x);
Real pi();
Real pow2(long e);  // 2^e
long to_long(const Real& x);  // nearest integer
// Copy of x carried at the current working precision.
Real promote(const Real& x);

// ---------------------------------------------------------------- Complex

struct Complex {
  Real re, im;

  Complex() = default;
  Complex(const Real& r) : re(r), im(0) {}
  Complex(const Real& r, const Real& i) : re(r), im(i) {}
  Complex(int r) : re(r), im(0) {}
  Complex(long r) : re(r), im(0) {}
  Complex(double r) : re(r), im(0) {}
  Complex(double r, double i) : re(r), im(i) {}

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
  Complex& operator*=(const Real& o);
  Complex operator-() const { return {-re, -im}; }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  std::string str(int digits = 20) const;
};

Complex operator+(Complex a, const Complex& b);
Complex operator-(Complex a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator*(Complex a, const Real& b);
Complex operator*(const Real& b, Complex a);

Complex conj(const Complex& z);
Real abs(const Complex& z);
Real norm(const Complex& z);  // |z|^2
Real arg(const Complex& z);
Complex exp(const Complex& z);
Complex log(const Complex& z);  // principal branch, Im in (-pi, pi]
Complex pow(const Complex& z, int64_t e);
Complex polar(const Real& r, const Real& theta);
Complex expi(const Real& theta);  // exp(i theta)
Complex i_unit();
Complex inverse(const Complex& z);
Complex promote(const Complex& z);

// In-place kernels for hot loops; they reuse thread-local scratch space.
void mul_into(Complex& out, const Complex& a, const Complex& b);
void add_mul(Complex& acc, const Complex& a, const Complex& b);  // acc += a*b
void sub_mul(Complex& acc, const Complex& a, const Complex& b);  // acc -= a*b

using CVec = std::vector<Complex>;

// ---------------------------------------------------------------- roots of unity

class RootOfUnity {
 public:
  RootOfUnity() = default;
  // exp(2 pi i k / n); n must be odd and >= 3.
  RootOfUnity(int n, int64_t k = 1);

  int n() const { return n_; }
  int64_t k() const { return k_; }
  const Complex& value() const { return pow_[1 % n_]; }
  // q^e for any integer e, read from an exact table.
  const Complex& pow(int64_t e) const { return pow_[mod(e)]; }
  int mod(int64_t e) const { return static_cast<int>(((e % n_) + n_) % n_); }
  // The root q^2; the abelian surgery formula is evaluated there.
  RootOfUnity squared() const { return RootOfUnity(n_, 2 * k_); }
  // Exponent l with q^l closest to z; throws if |q^l - z| exceeds tol.
  int log_q(const Complex& z, const Real& tol) const;
  // Principal log of q, i.e. 2 pi i (k mod n) / n.
  Complex log_value() const;

 private:
  int n_ = 0;
  int64_t k_ = 0;
  std::vector<Complex> pow_;
};

// ---------------------------------------------------------------- integers

using IVec = std::vector<int64_t>;

struct IMat {
  int rows = 0, cols = 0;
  std::vector<int64_t> a;

  IMat() = default;
  IMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}
  IMat(std::initializer_list<std::initializer_list<int64_t>> init);

  int64_t& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  int64_t operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static IMat identity(int n);
  static IMat from_columns(const std::vector<IVec>& cols, int rows);
  static IMat from_rows(const std::vector<IVec>& rows, int cols);
  IMat transpose() const;
  IVec col(int j) const;
  IVec row(int i) const;
  void set_col(int j, const IVec& v);
  bool operator==(const IMat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

IMat operator*(const IMat& x, const IMat& y);
IVec operator*(const IMat& x, const IVec& v);
IMat operator-(const IMat& x, const IMat& y);
IMat operator+(const IMat& x, const IMat& y);
IVec operator+(const IVec& x, const IVec& y);
IVec operator-(const IVec& x, const IVec& y);
IVec operator*(int64_t s, const IVec& v);
int64_t dot(const IVec& x, const IVec& y);
IVec unit_vector(int n, int i);
bool is_zero(const IVec& v);
// Block diagonal sum.
IMat direct_sum(const IMat& x, const IMat& y);

struct SmithForm {
  IMat U, D, V;  // U * m * V = D
  int rank = 0;
  std::vector<int64_t> diagonal() const;
};

// Unimodular U, V with U m V diagonal, diagonal entries non-negative and each
// dividing the next. Pivot: smallest nonzero modulus, row-major first.
SmithForm smith_form(const IMat& m);
int rank(const IMat& m);
// Integer basis of {x : m x = 0}, as columns.
IMat kernel(const IMat& m);
// Some integer x with m x = rhs, or throws std::domain_error.
IVec int_solve(const IMat& m, const IVec& rhs);
// Inverse of a unimodular matrix; throws if not unimodular.
IMat unimodular_inverse(const IMat& m);
int64_t det(const IMat& m);

// Exact signature of a symmetric integer matrix.
int signature(const IMat& m);

// ---------------------------------------------------------------- matrices

// m e_j = scales[j] e_{perm[j]}
struct GPMatrix {
  int dim = 0;
  std::vector<int> perm;
  CVec scales;

  static GPMatrix identity(int dim);
  static GPMatrix scalar(int dim, const Complex& s);
  bool is_identity_perm() const;
  int perm_sign() const;
  Complex entry(int i, int j) const;
  CVec apply(const CVec& v) const;
  GPMatrix pow(int64_t m) const;
  // True with *s filled when the matrix is s * Id to within tol.
  bool is_scalar(const Real& tol, Complex* s = nullptr) const;
};

GPMatrix gp_compose(const GPMatrix& a, const GPMatrix& b);  // a * b
GPMatrix operator*(const GPMatrix& a, const GPMatrix& b);
GPMatrix operator*(const Complex& s, GPMatrix a);

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols);
  explicit DenseMatrix(int dim) : DenseMatrix(dim, dim) {}

  static DenseMatrix identity(int dim);
  static DenseMatrix from_gp(const GPMatrix& g);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int dim() const { return rows_; }
  Complex& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const Complex& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  Complex* row(int i) { return &a_[static_cast<size_t>(i) * cols_]; }
  const Complex* row(int i) const { return &a_[static_cast<size_t>(i) * cols_]; }
  CVec column(int j) const;
  void set_column(int j, const CVec& v);

  DenseMatrix& operator+=(const DenseMatrix& o);
  DenseMatrix& operator-=(const DenseMatrix& o);
  DenseMatrix& operator*=(const Complex& s);

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Complex> a_;
};

DenseMatrix operator*(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix operator+(DenseMatrix x, const DenseMatrix& y);
DenseMatrix operator-(DenseMatrix x, const DenseMatrix& y);
DenseMatrix operator*(const Complex& s, DenseMatrix x);
CVec operator*(const DenseMatrix& x, const CVec& v);
// g * x and x * g without densifying g.
DenseMatrix gp_left(const GPMatrix& g, const DenseMatrix& x);
DenseMatrix gp_right(const DenseMatrix& x, const GPMatrix& g);

Complex trace(const DenseMatrix& x);
Real frobenius(const DenseMatrix& x);
Real max_abs(const DenseMatrix& x);
Real vec_norm(const CVec& v);
DenseMatrix adjoint(const DenseMatrix& x);
DenseMatrix kron(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix submatrix(const DenseMatrix& x, const std::vector<int>& rows,
                      const std::vector<int>& cols);
DenseMatrix inverse(const DenseMatrix& x);

// Determinant by elimination with partial pivoting on modulus.
Complex lu_det(const DenseMatrix& m);
// Determinant of a generalized permutation matrix: sign(perm) * prod(scales).
Complex lu_det(const GPMatrix& g);

// s minimizing ||x - s y||_F, and the relative residual ||x - s y|| / ||x||.
struct ScalarFit {
  Complex s;
  Real residual;
};
ScalarFit best_scalar_fit(const DenseMatrix& x, const DenseMatrix& y);

// ---------------------------------------------------------------- errors

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace painv
