#include "sisdp/linalg.hpp"

#include <cmath>

namespace sisdp {

namespace {

void checkSameDim(const SymMatrix& a, const SymMatrix& b, const char* where) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch(std::string(where) + ": " +
                            std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
  }
}

void requirePd(const EigenDecomposition& e, double norm2, const char* where) {
  if (e.values.size() == 0 ||
      !(e.values(0) > 1e-12 * (1.0 + norm2))) {
    throw NotPositiveDefinite(std::string(where) +
                              ": matrix is not positive definite (lambda_min=" +
                              std::to_string(e.values.size() ? e.values(0)
                                                             : 0.0) +
                              ")");
  }
}

void requirePd(const EigenDecomposition& e, const char* where) {
  requirePd(e, e.values.cwiseAbs().maxCoeff(), where);
}

}  // namespace

SymMatrix SymMatrix::fromUpper(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("SymMatrix::fromUpper: matrix is not square");
  }
  SymMatrix s;
  s.a_ = m.triangularView<Eigen::Upper>();
  s.a_.triangularView<Eigen::StrictlyLower>() =
      s.a_.transpose().triangularView<Eigen::StrictlyLower>();
  return s;
}

SymMatrix SymMatrix::symmetrize(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("SymMatrix::symmetrize: matrix is not square");
  }
  SymMatrix s;
  s.a_ = 0.5 * (m + m.transpose());
  return s;
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix s;
  s.a_ = Matrix::Identity(dim, dim);
  return s;
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  SymMatrix s;
  s.a_ = d.asDiagonal();
  return s;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  checkSameDim(*this, o, "SymMatrix::operator+=");
  a_ += o.a_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  checkSameDim(*this, o, "SymMatrix::operator-=");
  a_ -= o.a_;
  return *this;
}

void SymMatrix::axpy(double s, const SymMatrix& o) {
  checkSameDim(*this, o, "SymMatrix::axpy");
  a_ += s * o.a_;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
SymMatrix operator-(SymMatrix a) { return a *= -1.0; }

double inner(const SymMatrix& x, const SymMatrix& y) {
  checkSameDim(x, y, "inner");
  return x.dense().cwiseProduct(y.dense()).sum();
}

SymMatrix congruence(const Matrix& p, const SymMatrix& x) {
  return SymMatrix::symmetrize(p * x.dense() * p.transpose());
}

Vector svec(const SymMatrix& x) {
  const int m = x.dim();
  Vector v(svecLength(m));
  int k = 0;
  for (int j = 0; j < m; ++j) {
    v(k++) = x(j, j);
    for (int i = j + 1; i < m; ++i) v(k++) = M_SQRT2 * x(i, j);
  }
  return v;
}

SymMatrix smat(const Vector& v) {
  const int len = static_cast<int>(v.size());
  const int m = static_cast<int>(std::lround((std::sqrt(8.0 * len + 1) - 1) / 2));
  if (svecLength(m) != len) {
    throw DimensionMismatch("smat: length " + std::to_string(len) +
                            " is not triangular");
  }
  SymMatrix x(m);
  int k = 0;
  for (int j = 0; j < m; ++j) {
    x.set(j, j, v(k++));
    for (int i = j + 1; i < m; ++i) x.set(i, j, v(k++) / M_SQRT2);
  }
  return x;
}

SymMatrix jordan(const SymMatrix& x, const SymMatrix& y) {
  checkSameDim(x, y, "jordan");
  const Matrix xy = x.dense() * y.dense();
  return SymMatrix::symmetrize(xy);
}

EigenDecomposition eig(const SymMatrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(x.dense());
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double lambdaMin(const SymMatrix& x) { return eig(x).values(0); }

double lambdaMax(const SymMatrix& x) {
  const auto e = eig(x);
  return e.values(e.values.size() - 1);
}

bool isPositiveDefinite(const SymMatrix& x) {
  if (x.dim() == 0 || !x.dense().allFinite()) return false;
  const auto e = eig(x);
  return e.values(0) > 1e-12 * (1.0 + e.values.cwiseAbs().maxCoeff());
}

LyapunovOperator::LyapunovOperator(const SymMatrix& x) : x_(x), e_(eig(x)) {
  requirePd(e_, "LyapunovOperator");
}

SymMatrix LyapunovOperator::apply(const SymMatrix& z) const {
  return jordan(x_, z);
}

SymMatrix LyapunovOperator::solve(const SymMatrix& y) const {
  checkSameDim(x_, y, "LyapunovOperator::solve");
  const Matrix& q = e_.vectors;
  const Vector& d = e_.values;
  Matrix yt = q.transpose() * y.dense() * q;
  const int m = x_.dim();
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) yt(i, j) *= 2.0 / (d(i) + d(j));
  }
  return SymMatrix::symmetrize(q * yt * q.transpose());
}

SymMatrix lyapunovSolve(const SymMatrix& x, const SymMatrix& y) {
  return LyapunovOperator(x).solve(y);
}

double minEigRatio(const SymMatrix& x, const SymMatrix& d) {
  checkSameDim(x, d, "minEigRatio");
  const auto roots = sqrtInvSqrt(x);
  return lambdaMin(congruence(roots.invSqrt.dense(), d));
}

SqrtPair sqrtInvSqrt(const SymMatrix& x) {
  const auto e = eig(x);
  requirePd(e, "sqrtInvSqrt");
  return {spectralMap(e, [](double v) { return std::sqrt(v); }),
          spectralMap(e, [](double v) { return 1.0 / std::sqrt(v); })};
}

SymMatrix inverse(const SymMatrix& x) {
  const auto e = eig(x);
  requirePd(e, "inverse");
  return spectralMap(e, [](double v) { return 1.0 / v; });
}

SymMatrix ntScalingPoint(const SymMatrix& x, const SymMatrix& v) {
  checkSameDim(x, v, "ntScalingPoint");
  if (!isPositiveDefinite(v)) {
    throw NotPositiveDefinite("ntScalingPoint: V is not positive definite");
  }
  const auto xr = sqrtInvSqrt(x);
  // W = X^{1/2} (X^{1/2} V X^{1/2})^{-1/2} X^{1/2}
  const auto inner_roots = sqrtInvSqrt(congruence(xr.sqrt.dense(), v));
  return congruence(xr.sqrt.dense(), inner_roots.invSqrt);
}

}  // namespace sisdp
