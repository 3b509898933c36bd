#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"

#include "sisdp/linalg.hpp"
#include "sisdp/problem.hpp"

namespace testing {

using sisdp::Matrix;
using sisdp::SymMatrix;
using sisdp::Vector;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }
  Vector vector(int n, double lo = -1.0, double hi = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }
  Matrix matrix(int r, int c) {
    Matrix a(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) a(i, j) = uniform();
    return a;
  }
  SymMatrix sym(int m) { return SymMatrix::symmetrize(matrix(m, m)); }

  Matrix orthogonal(int m) {
    Eigen::HouseholderQR<Matrix> qr(matrix(m, m));
    return qr.householderQ() * Matrix::Identity(m, m);
  }

  /// Q diag(d) Qᵀ with log-uniform eigenvalues spanning [1, cond].
  SymMatrix pd(int m, double cond = 10.0) {
    Vector d(m);
    for (int i = 0; i < m; ++i) {
      d(i) = std::pow(cond, m == 1 ? 0.5 : static_cast<double>(i) / (m - 1));
    }
    const Matrix q = orthogonal(m);
    return SymMatrix::symmetrize(q * d.asDiagonal() * q.transpose());
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Runs `trial(rng, i)` for i < count; on the first failing trial reports
/// its index and seed through doctest and stops.
inline void forAll(int count, std::uint64_t seed,
                   const std::function<bool(Rng&, int, std::string&)>& trial) {
  for (int i = 0; i < count; ++i) {
    Rng rng(seed * 1000003ULL + static_cast<std::uint64_t>(i));
    std::string why;
    if (!trial(rng, i, why)) {
      FAIL_CHECK("trial " << i << " (seed " << seed << ") failed: " << why);
      return;
    }
  }
}

inline std::string describe(double got, double bound) {
  std::ostringstream s;
  s << got << " > " << bound;
  return s.str();
}

/// Central differences of a scalar function.
inline Vector fdGradient(const std::function<double(const Vector&)>& f,
                         const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

inline Matrix fdJacobian(const std::function<Vector(const Vector&)>& f,
                         const Vector& x, double h = 1e-6) {
  const Vector f0 = f(x);
  Matrix j(f0.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    j.col(i) = (f(xp) - f(xm)) / (2 * h);
  }
  return j;
}

/// ‖a − b‖ / max(1, ‖b‖), the relative error used for derivative checks.
inline double relErr(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline SymMatrix sym2(double a, double b, double c) {
  Matrix m(2, 2);
  m << a, b, b, c;
  return SymMatrix::fromUpper(m);
}

inline SymMatrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<int>(d.size()));
  int i = 0;
  for (double x : d) v(i++) = x;
  return SymMatrix::diagonal(v);
}

/// g(x, τ) from closures; unset derivatives are zero.
struct LambdaConstraint final : sisdp::IndexedConstraint {
  std::function<double(const Vector&, double)> g;
  std::function<Vector(const Vector&, double)> gx;
  std::function<Matrix(const Vector&, double)> gxx;
  std::function<double(const Vector&, double)> gt;
  std::function<double(const Vector&, double)> gtt;
  std::function<Vector(const Vector&, double)> gxt;

  double value(const Vector& x, double t) const override { return g(x, t); }
  Vector gradX(const Vector& x, double t) const override {
    return gx ? gx(x, t) : Vector::Zero(x.size());
  }
  Matrix hessXX(const Vector& x, double t) const override {
    return gxx ? gxx(x, t) : Matrix::Zero(x.size(), x.size());
  }
  double dTau(const Vector& x, double t) const override {
    return gt ? gt(x, t) : 0.0;
  }
  double d2Tau(const Vector& x, double t) const override {
    return gtt ? gtt(x, t) : 0.0;
  }
  Vector gradXdTau(const Vector& x, double t) const override {
    return gxt ? gxt(x, t) : Vector::Zero(x.size());
  }
};

/// min cᵀx s.t. g ≤ 0 with F(x) = I₁ (no matrix coupling), n variables.
inline sisdp::SisdpProblem scalarProblem(
    std::shared_ptr<const sisdp::IndexedConstraint> g, int n,
    sisdp::Interval t = {0.0, 1.0}) {
  std::vector<SymMatrix> affine(n + 1, SymMatrix::zero(1));
  affine[0] = SymMatrix::identity(1);
  return sisdp::SisdpProblem(
      std::make_shared<sisdp::LinearObjective>(Vector::Zero(n)), std::move(g),
      std::move(affine), t);
}

}  // namespace testing
