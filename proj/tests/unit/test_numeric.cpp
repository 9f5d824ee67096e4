#include <random>

#include "../support/oracles.hpp"
#include "helpers.hpp"

using namespace painv;
using testing::close;
using testing::small;

TEST_SUITE("numeric") {

TEST_CASE("working precision is carried by new values") {
  CHECK(precision() == 256);
  Real x(1);
  CHECK(x.bits() == 256);
  {
    PrecisionGuard g(128);
    CHECK(Real(2).bits() == 128);
    CHECK(promote(x).bits() == 128);
  }
  CHECK(Real(3).bits() == 256);
  CHECK(Real("0.1").str(5) == "0.1");
}

TEST_CASE("root of unity tables") {
  for (int n : {3, 5, 15}) {
    RootOfUnity q(n);
    CHECK(small(abs(abs(q.value()) - Real(1))));
    CHECK(small(abs(pow(q.value(), n) - Complex(1))));
    CHECK(close(q.pow(-1), inverse(q.value())));
    CHECK(q.log_q(q.pow(7), tolerance(40)) == 7 % n);
  }
  RootOfUnity q(15, 8);
  CHECK(close(q.value(), expi(Real(16) * pi() / Real(15))));
  CHECK_THROWS(RootOfUnity(4));
}

TEST_CASE("gp_compose agrees with the dense product") {
  RootOfUnity q(3);
  GPMatrix S, T;
  S.dim = T.dim = 3;
  for (int j = 0; j < 3; ++j) {
    S.perm.push_back(j);
    S.scales.push_back(q.pow(2 * j));
    T.perm.push_back((j + 1) % 3);
    T.scales.push_back(Complex(1));
  }
  DenseMatrix dS = DenseMatrix::from_gp(S), dT = DenseMatrix::from_gp(T);
  DenseMatrix ST = DenseMatrix::from_gp(gp_compose(S, T));
  CHECK(small(max_abs(ST - oracle::naive_product(dS, dT))));
  // clock and shift q-commute: S T = q^2 T S
  CHECK(small(max_abs(ST - q.pow(2) * DenseMatrix::from_gp(T * S))));
  GPMatrix id = GPMatrix::identity(3);
  CHECK((id * id).is_identity_perm());
  // a pure n-cycle has order n
  GPMatrix c = T.pow(3);
  Complex s;
  CHECK(c.is_scalar(tolerance(24), &s));
  CHECK(close(s, Complex(1)));
}

TEST_CASE("gp_compose on random pairs") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const int d = 7;
    GPMatrix a, b;
    a.dim = b.dim = d;
    a.perm.resize(d);
    b.perm.resize(d);
    std::iota(a.perm.begin(), a.perm.end(), 0);
    std::iota(b.perm.begin(), b.perm.end(), 0);
    std::shuffle(a.perm.begin(), a.perm.end(), rng);
    std::shuffle(b.perm.begin(), b.perm.end(), rng);
    for (int i = 0; i < d; ++i) {
      a.scales.push_back(oracle::random_complex(rng, 2));
      b.scales.push_back(oracle::random_complex(rng, 2));
    }
    DenseMatrix dense = oracle::naive_product(DenseMatrix::from_gp(a), DenseMatrix::from_gp(b));
    CHECK(max_abs(DenseMatrix::from_gp(a * b) - dense) <= tolerance(8) * Real(16));
  }
}

TEST_CASE("determinants") {
  CHECK(close(lu_det(DenseMatrix::identity(9)), Complex(1)));
  RootOfUnity q(3);
  DenseMatrix d(3);
  d(0, 0) = q.value();
  d(1, 1) = q.pow(2);
  d(2, 2) = Complex(1);
  CHECK(close(lu_det(d), Complex(1)));

  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, 3);
  const Complex units[4] = {Complex(1), Complex(-1), Complex(0, 1), Complex(0, -1)};
  DenseMatrix m(8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) m(i, j) = units[pick(rng)];
  Complex cof = oracle::cofactor_det(m);
  CHECK(abs(lu_det(m) - cof) < Real(1e-70));

  // generalized permutation path: sign(perm) * prod(scales)
  GPMatrix g;
  g.dim = 3;
  g.perm = {1, 0, 2};
  g.scales = {Complex(2), Complex(3), Complex(5)};
  CHECK(close(lu_det(g), Complex(-30)));
  CHECK(close(lu_det(DenseMatrix::from_gp(g)), Complex(-30)));
  // singular input returns zero
  DenseMatrix z(2);
  z(0, 0) = z(0, 1) = z(1, 0) = z(1, 1) = Complex(1);
  CHECK(small(abs(lu_det(z))));
}

TEST_CASE("lu_det is multiplicative") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    DenseMatrix a(6), b(6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        a(i, j) = oracle::random_complex(rng, 1);
        b(i, j) = oracle::random_complex(rng, 1);
      }
    Complex lhs = lu_det(a * b), rhs = lu_det(a) * lu_det(b);
    CHECK(abs(lhs - rhs) <= tolerance(16) * (Real(1) + abs(rhs)));
  }
}

TEST_CASE("inverse and scalar fit") {
  std::mt19937_64 rng(3);
  DenseMatrix a(5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) a(i, j) = oracle::random_complex(rng, 1);
  CHECK(small(max_abs(a * inverse(a) - DenseMatrix::identity(5)), 40));
  Complex s(2, -3);
  ScalarFit fit = best_scalar_fit(s * a, a);
  CHECK(close(fit.s, s));
  CHECK(small(fit.residual));
}

TEST_CASE("smith form") {
  SmithForm a = smith_form(IMat{{2, 0}, {0, 3}});
  CHECK(a.diagonal() == std::vector<int64_t>{1, 6});
  CHECK(a.U * IMat{{2, 0}, {0, 3}} * a.V == a.D);
  SmithForm z = smith_form(IMat(3, 2));
  CHECK(z.rank == 0);
  CHECK(z.diagonal() == std::vector<int64_t>{0, 0});
  SmithForm u = smith_form(IMat{{1, 1}, {1, 0}});
  CHECK(u.diagonal() == std::vector<int64_t>{1, 1});
  CHECK(std::llabs(det(u.U)) == 1);
  CHECK(std::llabs(det(u.V)) == 1);
}

TEST_CASE("integer solves, kernels and signatures") {
  IMat m{{2, 4, 6}, {1, 1, 1}};
  IVec x = int_solve(m, IVec{10, 3});
  CHECK(m * x == IVec{10, 3});
  CHECK_THROWS_AS(int_solve(IMat{{2}}, IVec{1}), std::domain_error);
  IMat k = kernel(m);
  CHECK(k.cols == 1);
  CHECK(is_zero(m * k.col(0)));
  CHECK(rank(m) == 2);
  CHECK(signature(IMat{{1, 0}, {0, -1}}) == 0);
  CHECK(signature(IMat{{2, 1}, {1, 2}}) == 2);
  CHECK(signature(IMat{{0, 1}, {1, 0}}) == 0);
  IMat u{{2, 1}, {1, 1}};
  CHECK(u * unimodular_inverse(u) == IMat::identity(2));
}

}  // TEST_SUITE
