#include "support.hpp"

#include <Eigen/Eigenvalues>

using namespace sisdp;
using namespace testing;

namespace {

// Explicit svec-basis matrix of Z ↦ X∘Z.
Matrix jordanMatrix(const SymMatrix& x) {
  return svecOperatorMatrix(x.dim(),
                            [&](const SymMatrix& z) { return jordan(x, z); });
}

double spectralNorm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

// PSD with some exactly-zero eigenvalues.
SymMatrix psdWithKernel(Rng& rng, int m) {
  Vector d(m);
  for (int i = 0; i < m; ++i) d(i) = rng.uniform() < 0.0 ? 0.0 : rng.uniform(0.0, 5.0);
  const Matrix q = rng.orthogonal(m);
  return SymMatrix::symmetrize(q * d.asDiagonal() * q.transpose());
}

}  // namespace

TEST_CASE("svec of small matrices") {
  const Vector v = svec(sym2(1, 2, 3));
  REQUIRE(v.size() == 3);
  CHECK(v(0) == doctest::Approx(1.0));
  CHECK(v(1) == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(v(2) == doctest::Approx(3.0));

  const Vector e = svec(SymMatrix::identity(2));
  CHECK(e(0) == 1.0);
  CHECK(e(1) == 0.0);
  CHECK(e(2) == 1.0);
}

TEST_CASE("smat inverts svec") {
  Rng rng(3);
  for (int m = 1; m <= 6; ++m) {
    const SymMatrix x = rng.sym(m);
    CHECK((smat(svec(x)) - x).frobeniusNorm() <= 1e-14);
  }
}

TEST_CASE("property: svec is an isometry for the trace inner product") {
  forAll(500, 11, [](Rng& rng, int, std::string& why) {
    const int m = rng.integer(1, 8);
    const SymMatrix x = rng.sym(m), y = rng.sym(m);
    // oracle: trace(XY) from the dense product
    const double direct = (x.dense() * y.dense()).trace();
    const double err = std::abs(svec(x).dot(svec(y)) - direct);
    const double bound = 1e-12 * x.frobeniusNorm() * y.frobeniusNorm();
    why = describe(err, bound);
    return err <= bound;
  });
}

TEST_CASE("SymMatrix never exposes an asymmetric state") {
  Matrix a(2, 2);
  a << 1, 5, -7, 2;
  const SymMatrix u = SymMatrix::fromUpper(a);
  CHECK(u(1, 0) == 5.0);
  SymMatrix s(3);
  s.set(0, 2, 4.0);
  CHECK(s(2, 0) == 4.0);
  CHECK(SymMatrix::symmetrize(a)(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("Jordan product examples") {
  Rng rng(5);
  const SymMatrix y = rng.sym(3);
  CHECK((jordan(SymMatrix::identity(3), y) - y).frobeniusNorm() <= 1e-15);

  const SymMatrix z = jordan(diag({1, 2}), sym2(0, 1, 0));
  CHECK((z - sym2(0, 1.5, 0)).frobeniusNorm() <= 1e-15);

  const SymMatrix d = jordan(diag({2, 3}), diag({2, 3}));
  CHECK((d - diag({4, 9})).frobeniusNorm() <= 1e-15);
}

TEST_CASE("Lyapunov solve examples") {
  Rng rng(7);
  const SymMatrix y = rng.sym(3);
  CHECK((lyapunovSolve(SymMatrix::identity(3), y) - y).frobeniusNorm() <= 1e-14);

  const SymMatrix z = lyapunovSolve(diag({1, 2}), sym2(2, 3, 8));
  CHECK((z - sym2(2, 2, 4)).frobeniusNorm() <= 1e-13);
  // recompute X∘Z
  CHECK((jordan(diag({1, 2}), z) - sym2(2, 3, 8)).frobeniusNorm() <= 1e-13);

  const Vector d = rng.vector(4, 0.5, 3.0);
  const SymMatrix yy = rng.sym(4);
  const SymMatrix zz = lyapunovSolve(SymMatrix::diagonal(d), yy);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(zz(i, j) == doctest::Approx(2 * yy(i, j) / (d(i) + d(j))).epsilon(1e-12));

  CHECK_THROWS_AS(lyapunovSolve(diag({1, -1}), sym2(1, 0, 1)), NotPositiveDefinite);
}

TEST_CASE("property: Lyapunov residual up to condition number 1e6") {
  forAll(200, 13, [](Rng& rng, int i, std::string& why) {
    const int m = rng.integer(1, 10);
    const double cond = std::pow(10.0, 6.0 * (i % 7) / 6.0);
    const SymMatrix x = rng.pd(m, cond);
    const SymMatrix y = rng.sym(m);
    const SymMatrix z = lyapunovSolve(x, y);
    const double res = (jordan(x, z) - y).frobeniusNorm() /
                       std::max(1.0, y.frobeniusNorm());
    why = describe(res, 1e-10);
    return res <= 1e-10;
  });
}

TEST_CASE("minEigRatio examples") {
  CHECK(minEigRatio(SymMatrix::identity(3), -2.0 * SymMatrix::identity(3)) ==
        doctest::Approx(-2.0));
  CHECK(minEigRatio(diag({1, 4}), diag({-1, 8})) == doctest::Approx(-1.0));
}

TEST_CASE("property: minEigRatio matches the nonsymmetric eigenvalues of X^-1 D") {
  forAll(200, 17, [](Rng& rng, int, std::string& why) {
    const int m = rng.integer(1, 8);
    const SymMatrix x = rng.pd(m, 100.0);
    const SymMatrix d = rng.sym(m);
    const Matrix prod = x.dense().inverse() * d.dense();
    Eigen::EigenSolver<Matrix> es(prod);
    const double oracle = es.eigenvalues().real().minCoeff();
    const double err = std::abs(minEigRatio(x, d) - oracle);
    why = describe(err, 1e-10);
    return err <= 1e-10 * (1 + std::abs(oracle));
  });
}

TEST_CASE("property: minEigRatio above -1 keeps X + D positive definite") {
  forAll(300, 19, [](Rng& rng, int, std::string& why) {
    const int m = rng.integer(1, 6);
    const SymMatrix x = rng.pd(m, 50.0);
    const SymMatrix d = 3.0 * rng.sym(m);
    const double r = minEigRatio(x, d);
    // X + sD ⪰ 0 exactly for s ≤ −1/r when r < 0
    const bool pd = lambdaMin(x + d) > 0;
    why = "ratio " + std::to_string(r) + " pd " + std::to_string(pd);
    if (r > -1.0 + 1e-9) return pd;
    if (r < -1.0 - 1e-9) return !pd;
    return true;
  });
  // boundary: λ_min(X + sΔX) hits zero at s = −1/λ_min(X⁻¹ΔX)
  const SymMatrix x = diag({1, 2});
  const SymMatrix dx = diag({-4, 1});
  const double s = -1.0 / minEigRatio(x, dx);
  CHECK(lambdaMin(x + s * dx) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("NT scaling point examples") {
  const SymMatrix w1 = ntScalingPoint(SymMatrix::identity(3), SymMatrix::identity(3));
  CHECK((w1 - SymMatrix::identity(3)).frobeniusNorm() <= 1e-14);
  const SymMatrix w2 = ntScalingPoint(SymMatrix::identity(2), diag({4, 9}));
  CHECK((w2 - diag({0.5, 1.0 / 3.0})).frobeniusNorm() <= 1e-14);
}

TEST_CASE("property: NT identity WVW = X on 200 pairs") {
  forAll(200, 23, [](Rng& rng, int, std::string& why) {
    const int m = rng.integer(1, 10);
    const SymMatrix x = rng.pd(m, 1e3), v = rng.pd(m, 1e3);
    const SymMatrix w = ntScalingPoint(x, v);
    const double rel =
        (w.dense() * v.dense() * w.dense() - x.dense()).norm() / x.frobeniusNorm();
    why = describe(rel, 1e-10);
    return rel <= 1e-10 && isPositiveDefinite(w);
  });
}

TEST_CASE("square root pairs") {
  const SqrtPair e = sqrtInvSqrt(SymMatrix::identity(2));
  CHECK((e.sqrt - SymMatrix::identity(2)).frobeniusNorm() <= 1e-15);
  CHECK((e.invSqrt - SymMatrix::identity(2)).frobeniusNorm() <= 1e-15);
  const SqrtPair d = sqrtInvSqrt(diag({4, 9}));
  CHECK((d.sqrt - diag({2, 3})).frobeniusNorm() <= 1e-14);
  CHECK((d.invSqrt - diag({0.5, 1.0 / 3.0})).frobeniusNorm() <= 1e-14);

  Rng rng(29);
  for (int t = 0; t < 50; ++t) {
    const SymMatrix x = rng.pd(rng.integer(1, 8), 1e4);
    const SqrtPair p = sqrtInvSqrt(x);
    CHECK((p.sqrt.dense() * p.sqrt.dense() - x.dense()).norm() <=
          1e-10 * x.frobeniusNorm());
    CHECK((p.sqrt.dense() * p.invSqrt.dense() - Matrix::Identity(x.dim(), x.dim()))
              .norm() <= 1e-10);
  }
}

TEST_CASE("positive definiteness test") {
  CHECK(isPositiveDefinite(SymMatrix::identity(3)));
  CHECK_FALSE(isPositiveDefinite(diag({1, 0})));
  CHECK_FALSE(isPositiveDefinite(diag({1, -1e-3})));
  CHECK_FALSE(isPositiveDefinite(diag({1e6, 1e-9})));
}

TEST_CASE("eigenvalues come out ascending") {
  Rng rng(31);
  const EigenDecomposition e = eig(rng.sym(6));
  for (int i = 1; i < 6; ++i) CHECK(e.values(i - 1) <= e.values(i));
}

TEST_CASE("property: commutator bound against the Jordan residual") {
  forAll(1000, 37, [](Rng& rng, int, std::string& why) {
    const int m = rng.integer(1, 6);
    const SymMatrix x = psdWithKernel(rng, m);
    const SymMatrix y = 3.0 * rng.sym(m);
    const double mu = rng.uniform(0.0, 2.0);
    const Matrix xy = x.dense() * y.dense();
    const double lhs = (xy - xy.transpose()).norm();
    const double rhs = 2.0 * (jordan(x, y) - mu * SymMatrix::identity(m)).frobeniusNorm();
    why = describe(lhs, rhs);
    return lhs <= rhs * (1 + 1e-12) + 1e-13;
  });
}

TEST_CASE("property: operator commutator bound in svec coordinates") {
  forAll(1000, 41, [](Rng& rng, int, std::string& why) {
    const int m = rng.integer(1, 5);
    const SymMatrix x = psdWithKernel(rng, m);
    const SymMatrix y = 3.0 * rng.sym(m);
    const double mu = rng.uniform(0.0, 2.0);
    const Matrix lx = jordanMatrix(x), ly = jordanMatrix(y);
    const double lhs = spectralNorm(lx * ly - ly * lx);
    const double rhs = (jordan(x, y) - mu * SymMatrix::identity(m)).frobeniusNorm();
    why = describe(lhs, rhs);
    return lhs <= rhs * (1 + 1e-12) + 1e-13;
  });
}

TEST_CASE("Jordan operator matrix is symmetric in svec coordinates") {
  Rng rng(43);
  const Matrix l = jordanMatrix(rng.sym(4));
  CHECK((l - l.transpose()).norm() <= 1e-14);
}
