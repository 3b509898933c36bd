#include "sisdp/problem.hpp"

#include <stdexcept>

namespace sisdp {

AffinePolynomialConstraint::AffinePolynomialConstraint(
    Matrix coeffs, std::function<ScalarJet(double)> offset)
    : coeffs_(std::move(coeffs)), offset_(std::move(offset)) {}

Vector AffinePolynomialConstraint::powers(double tau, int order) const {
  const int d = static_cast<int>(coeffs_.cols());
  Vector v = Vector::Zero(d);
  // order 0: τˡ, order 1: l τ^{l-1}, order 2: l(l-1) τ^{l-2}
  double p = 1.0;
  for (int l = order; l < d; ++l) {
    double f = 1.0;
    for (int r = 0; r < order; ++r) f *= (l - r);
    v(l) = f * p;
    p *= tau;
  }
  return v;
}

double AffinePolynomialConstraint::value(const Vector& x, double tau) const {
  const double base = x.dot(coeffs_ * powers(tau, 0));
  return offset_ ? base + offset_(tau).value : base;
}

Vector AffinePolynomialConstraint::gradX(const Vector&, double tau) const {
  return coeffs_ * powers(tau, 0);
}

Matrix AffinePolynomialConstraint::hessXX(const Vector& x, double) const {
  return Matrix::Zero(x.size(), x.size());
}

double AffinePolynomialConstraint::dTau(const Vector& x, double tau) const {
  const double base = x.dot(coeffs_ * powers(tau, 1));
  return offset_ ? base + offset_(tau).d1 : base;
}

double AffinePolynomialConstraint::d2Tau(const Vector& x, double tau) const {
  const double base = x.dot(coeffs_ * powers(tau, 2));
  return offset_ ? base + offset_(tau).d2 : base;
}

Vector AffinePolynomialConstraint::gradXdTau(const Vector&, double tau) const {
  return coeffs_ * powers(tau, 1);
}

SisdpProblem::SisdpProblem(std::shared_ptr<const Objective> objective,
                           std::shared_ptr<const IndexedConstraint> constraint,
                           std::vector<SymMatrix> affine, Interval index_set,
                           std::vector<LinearEquality> equalities)
    : objective_(std::move(objective)),
      constraint_(std::move(constraint)),
      affine_(std::move(affine)),
      index_set_(index_set),
      equalities_(std::move(equalities)) {
  if (!objective_) throw std::invalid_argument("SisdpProblem: no objective");
  if (affine_.size() < 2) {
    throw std::invalid_argument("SisdpProblem: need F0 and at least one Fi");
  }
  for (const auto& fi : affine_) {
    if (fi.dim() != affine_.front().dim()) {
      throw DimensionMismatch("SisdpProblem: F_i of differing order");
    }
  }
  if (!(index_set_.lo <= index_set_.hi)) {
    throw std::invalid_argument("SisdpProblem: empty index interval");
  }
  for (const auto& eq : equalities_) {
    if (eq.a.size() != n()) {
      throw DimensionMismatch("SisdpProblem: equality row length");
    }
  }
}

SymMatrix SisdpProblem::F(const Vector& x) const {
  SymMatrix out = affine_[0];
  for (int i = 0; i < n(); ++i) {
    if (x(i) != 0.0) out.axpy(x(i), affine_[i + 1]);
  }
  return out;
}

SymMatrix SisdpProblem::linearPart(const Vector& d) const {
  SymMatrix out(m());
  for (int i = 0; i < n(); ++i) {
    if (d(i) != 0.0) out.axpy(d(i), affine_[i + 1]);
  }
  return out;
}

Vector SisdpProblem::adjoint(const SymMatrix& v) const {
  Vector out(n());
  for (int i = 0; i < n(); ++i) out(i) = inner(affine_[i + 1], v);
  return out;
}

Matrix SisdpProblem::equalityMatrix() const {
  Matrix a(numEqualities(), n());
  for (int r = 0; r < numEqualities(); ++r) a.row(r) = equalities_[r].a;
  return a;
}

Vector SisdpProblem::equalityRhs() const {
  Vector b(numEqualities());
  for (int r = 0; r < numEqualities(); ++r) b(r) = equalities_[r].b;
  return b;
}

SisdpProblem SisdpProblem::withIndexPoints(std::vector<double> points) const {
  SisdpProblem out = *this;
  for (double t : points) {
    if (t < index_set_.lo || t > index_set_.hi) {
      throw std::invalid_argument("withIndexPoints: point outside T");
    }
  }
  out.index_points_ = std::move(points);
  return out;
}

SisdpProblem SisdpProblem::withoutIndexedConstraint() const {
  SisdpProblem out = *this;
  out.constraint_.reset();
  out.index_points_.reset();
  return out;
}

QuarticObjective::QuarticObjective(Matrix m, Vector c, double omega)
    : m_(std::move(m)), c_(std::move(c)), omega_(omega) {}

double QuarticObjective::value(const Vector& x) const {
  const double sq = x.squaredNorm();
  return 0.5 * x.dot(m_ * x) + c_.dot(x) + omega_ * sq * sq;
}

Vector QuarticObjective::gradient(const Vector& x) const {
  return m_ * x + c_ + 4.0 * omega_ * x.squaredNorm() * x;
}

Matrix QuarticObjective::hessian(const Vector& x) const {
  const auto n = x.size();
  return m_ + 4.0 * omega_ *
                  (x.squaredNorm() * Matrix::Identity(n, n) +
                   2.0 * x * x.transpose());
}

std::vector<std::pair<int, int>> symSlots(int m) {
  std::vector<std::pair<int, int>> slots;
  slots.reserve(svecLength(m));
  for (int k = 0; k < m; ++k) {
    for (int l = k; l < m; ++l) slots.emplace_back(k, l);
  }
  return slots;
}

Vector vectorizeSym(const SymMatrix& x) {
  const auto slots = symSlots(x.dim());
  Vector v(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    v(i) = x(slots[i].first, slots[i].second);
  }
  return v;
}

SymMatrix unvectorizeSym(const Vector& x, int m) {
  const auto slots = symSlots(m);
  if (static_cast<std::size_t>(x.size()) != slots.size()) {
    throw DimensionMismatch("unvectorizeSym: length mismatch");
  }
  SymMatrix out(m);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    out.set(slots[i].first, slots[i].second, x(i));
  }
  return out;
}

std::vector<SymMatrix> symBasis(int m) {
  std::vector<SymMatrix> basis;
  for (const auto& [k, l] : symSlots(m)) {
    SymMatrix e(m);
    e.set(k, l, 1.0);
    basis.push_back(std::move(e));
  }
  return basis;
}

}  // namespace sisdp
