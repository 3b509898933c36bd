#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sisdp/linalg.hpp"

namespace sisdp {

/// Smooth objective f : ℝⁿ → ℝ.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Matrix hessian(const Vector& x) const = 0;
};

/// The semi-infinite constraint g(x, τ) ≤ 0 for τ ∈ T, with the partial
/// derivatives needed by local reduction.
class IndexedConstraint {
 public:
  virtual ~IndexedConstraint() = default;
  virtual double value(const Vector& x, double tau) const = 0;
  virtual Vector gradX(const Vector& x, double tau) const = 0;
  virtual Matrix hessXX(const Vector& x, double tau) const = 0;
  virtual double dTau(const Vector& x, double tau) const = 0;
  virtual double d2Tau(const Vector& x, double tau) const = 0;
  /// ∇ₓ ∂g/∂τ
  virtual Vector gradXdTau(const Vector& x, double tau) const = 0;
};

/// Value and first two derivatives of a scalar function of τ.
struct ScalarJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/**
 * g(x, τ) = Σᵢ xᵢ pᵢ(τ) + h(τ), where pᵢ(τ) = Σₗ coeffs(i, l) τˡ.
 * Both built-in families have this form.
 */
class AffinePolynomialConstraint final : public IndexedConstraint {
 public:
  AffinePolynomialConstraint(Matrix coeffs,
                             std::function<ScalarJet(double)> offset);

  double value(const Vector& x, double tau) const override;
  Vector gradX(const Vector& x, double tau) const override;
  Matrix hessXX(const Vector& x, double tau) const override;
  double dTau(const Vector& x, double tau) const override;
  double d2Tau(const Vector& x, double tau) const override;
  Vector gradXdTau(const Vector& x, double tau) const override;

  const Matrix& coeffs() const { return coeffs_; }

 private:
  // Rows: monomials τˡ and their first/second derivatives.
  Vector powers(double tau, int order) const;

  Matrix coeffs_;
  std::function<ScalarJet(double)> offset_;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct LinearEquality {
  Vector a;
  double b = 0.0;
};

/**
 * Minimize f(x) s.t. g(x,τ) ≤ 0 (τ ∈ T), F(x) = F₀ + Σ xᵢFᵢ ⪰ 0 and
 * optional rows aᵀx = b.
 *
 * T is an interval unless index points are set, in which case the
 * semi-infinite constraint is enforced only on that finite set (used by the
 * exchange method).
 */
class SisdpProblem {
 public:
  /// `affine` holds F₀, F₁, …, F_n. `constraint` may be null.
  SisdpProblem(std::shared_ptr<const Objective> objective,
               std::shared_ptr<const IndexedConstraint> constraint,
               std::vector<SymMatrix> affine, Interval index_set,
               std::vector<LinearEquality> equalities = {});

  int n() const { return static_cast<int>(affine_.size()) - 1; }
  int m() const { return affine_.front().dim(); }

  const Objective& objective() const { return *objective_; }
  bool hasIndexedConstraint() const { return constraint_ != nullptr; }
  const IndexedConstraint& constraint() const { return *constraint_; }

  const Interval& indexSet() const { return index_set_; }
  const std::optional<std::vector<double>>& indexPoints() const {
    return index_points_;
  }

  /// F₀ + Σ xᵢFᵢ
  SymMatrix F(const Vector& x) const;
  /// Σ dᵢFᵢ (no offset)
  SymMatrix linearPart(const Vector& d) const;
  /// Fᵢ for i = 1..n
  const SymMatrix& basis(int i) const { return affine_[i]; }
  const SymMatrix& offset() const { return affine_[0]; }
  /// (Fᵢ • V)ᵢ
  Vector adjoint(const SymMatrix& v) const;

  const std::vector<LinearEquality>& equalities() const { return equalities_; }
  int numEqualities() const { return static_cast<int>(equalities_.size()); }
  Matrix equalityMatrix() const;
  Vector equalityRhs() const;

  /// Same problem with T replaced by a finite subset.
  SisdpProblem withIndexPoints(std::vector<double> points) const;
  /// Same problem with the semi-infinite constraint removed.
  SisdpProblem withoutIndexedConstraint() const;

 private:
  std::shared_ptr<const Objective> objective_;
  std::shared_ptr<const IndexedConstraint> constraint_;
  std::vector<SymMatrix> affine_;
  Interval index_set_;
  std::optional<std::vector<double>> index_points_;
  std::vector<LinearEquality> equalities_;
};

class LinearObjective final : public Objective {
 public:
  explicit LinearObjective(Vector c) : c_(std::move(c)) {}
  double value(const Vector& x) const override { return c_.dot(x); }
  Vector gradient(const Vector&) const override { return c_; }
  Matrix hessian(const Vector&) const override {
    return Matrix::Zero(c_.size(), c_.size());
  }

 private:
  Vector c_;
};

/// ½xᵀMx + cᵀx + ω‖x‖⁴
class QuarticObjective final : public Objective {
 public:
  QuarticObjective(Matrix m, Vector c, double omega);
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Matrix hessian(const Vector& x) const override;

 private:
  Matrix m_;
  Vector c_;
  double omega_;
};

// Vectorization of symmetric matrix variables: x lists the upper triangle
// row-wise, (x₁₁, x₁₂, …, x₁m, x₂₂, …, x_mm).

Vector vectorizeSym(const SymMatrix& x);
SymMatrix unvectorizeSym(const Vector& x, int m);
/// Fᵢ = E_kk for diagonal slots and E_kl + E_lk otherwise, so Σ xᵢFᵢ = X.
std::vector<SymMatrix> symBasis(int m);
/// (k, l) with k ≤ l for every slot of the vectorization.
std::vector<std::pair<int, int>> symSlots(int m);

}  // namespace sisdp
