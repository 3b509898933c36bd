#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace sisdp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an operation needs a positive definite argument and does not
/// get one.
class NotPositiveDefinite : public std::domain_error {
 public:
  explicit NotPositiveDefinite(const std::string& what)
      : std::domain_error(what) {}
};

class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& what)
      : std::invalid_argument(what) {}
};

/**
 * Dense real symmetric matrix.
 *
 * Every constructor and mutator writes both (i,j) and (j,i), so an
 * asymmetric state cannot be observed through the public interface.
 */
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim) : a_(Matrix::Zero(dim, dim)) {}

  /// Builds from the upper triangle of `m`; the lower triangle is ignored.
  static SymMatrix fromUpper(const Matrix& m);
  /// Builds from (m + mᵀ)/2.
  static SymMatrix symmetrize(const Matrix& m);
  static SymMatrix identity(int dim);
  static SymMatrix zero(int dim) { return SymMatrix(dim); }
  static SymMatrix diagonal(const Vector& d);

  int dim() const { return static_cast<int>(a_.rows()); }
  double operator()(int i, int j) const { return a_(i, j); }
  void set(int i, int j, double v) {
    a_(i, j) = v;
    a_(j, i) = v;
  }
  const Matrix& dense() const { return a_; }

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s) {
    a_ *= s;
    return *this;
  }
  /// this += s * o
  void axpy(double s, const SymMatrix& o);

  double frobeniusNorm() const { return a_.norm(); }
  double trace() const { return a_.trace(); }

 private:
  Matrix a_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);
SymMatrix operator-(SymMatrix a);

/// Trace inner product X•Y.
double inner(const SymMatrix& x, const SymMatrix& y);

/// Congruence P X Pᵀ.
SymMatrix congruence(const Matrix& p, const SymMatrix& x);

/// Length m(m+1)/2 of the svec of an m×m matrix.
inline int svecLength(int m) { return m * (m + 1) / 2; }

/// (X₁₁, √2X₂₁, …, √2X_m1, X₂₂, √2X₃₂, …, X_mm): column-wise lower triangle.
Vector svec(const SymMatrix& x);
SymMatrix smat(const Vector& v);

/// Jordan product (XY + YX)/2.
SymMatrix jordan(const SymMatrix& x, const SymMatrix& y);

/// Symmetric eigendecomposition with ascending eigenvalues.
struct EigenDecomposition {
  Vector values;
  Matrix vectors;  ///< columns are eigenvectors
};
EigenDecomposition eig(const SymMatrix& x);

double lambdaMin(const SymMatrix& x);
double lambdaMax(const SymMatrix& x);

/// λ_min > 1e-12·(1 + ‖X‖₂).
bool isPositiveDefinite(const SymMatrix& x);

/// Builds Q diag(f(d)) Qᵀ.
template <typename F>
SymMatrix spectralMap(const EigenDecomposition& e, F&& f) {
  Vector d = e.values.unaryExpr(std::forward<F>(f));
  return SymMatrix::symmetrize(e.vectors * d.asDiagonal() *
                               e.vectors.transpose());
}

/**
 * The Jordan-multiplication operator L_X : Z ↦ X∘Z for a positive definite
 * X, with its inverse. The eigendecomposition of X is computed once.
 */
class LyapunovOperator {
 public:
  explicit LyapunovOperator(const SymMatrix& x);

  /// X∘Z
  SymMatrix apply(const SymMatrix& z) const;
  /// Z such that X∘Z = Y.
  SymMatrix solve(const SymMatrix& y) const;

  const EigenDecomposition& decomposition() const { return e_; }

 private:
  SymMatrix x_;
  EigenDecomposition e_;
};

/// Z with X∘Z = Y; throws NotPositiveDefinite if X is not pd.
SymMatrix lyapunovSolve(const SymMatrix& x, const SymMatrix& y);

/// λ_min(X⁻¹D) computed as λ_min(X^{-1/2} D X^{-1/2}).
double minEigRatio(const SymMatrix& x, const SymMatrix& d);

struct SqrtPair {
  SymMatrix sqrt;
  SymMatrix invSqrt;
};
SqrtPair sqrtInvSqrt(const SymMatrix& x);

SymMatrix inverse(const SymMatrix& x);

/// Nesterov-Todd scaling point: the pd W with W V W = X.
SymMatrix ntScalingPoint(const SymMatrix& x, const SymMatrix& v);

/// Matrix of a linear operator S^m → S^m in svec coordinates.
template <typename Op>
Matrix svecOperatorMatrix(int m, Op&& op) {
  const int len = svecLength(m);
  Matrix out(len, len);
  Vector unit = Vector::Zero(len);
  for (int k = 0; k < len; ++k) {
    unit.setZero();
    unit(k) = 1.0;
    out.col(k) = svec(op(smat(unit)));
  }
  return out;
}

}  // namespace sisdp
