#include "sisdp/directions.hpp"

#include <cmath>

namespace sisdp {

std::string toString(ScalingKind k) {
  switch (k) {
    case ScalingKind::AhoLike:
      return "aho";
    case ScalingKind::Hkm:
      return "hkm";
    case ScalingKind::Nt:
      return "nt";
  }
  return "unknown";
}

ScalingKind parseScaling(const std::string& name) {
  if (name == "aho") return ScalingKind::AhoLike;
  if (name == "hkm") return ScalingKind::Hkm;
  if (name == "nt") return ScalingKind::Nt;
  throw std::invalid_argument("unknown scaling '" + name +
                              "' (expected aho, hkm or nt)");
}

ScalingPair scalingMatrices(ScalingKind kind, const SymMatrix& f,
                            const SymMatrix& v) {
  const int m = f.dim();
  switch (kind) {
    case ScalingKind::AhoLike:
      return {Matrix::Identity(m, m), Matrix::Identity(m, m)};
    case ScalingKind::Hkm: {
      const auto r = sqrtInvSqrt(f);
      return {r.invSqrt.dense(), r.sqrt.dense()};
    }
    case ScalingKind::Nt: {
      const auto r = sqrtInvSqrt(ntScalingPoint(f, v));
      return {r.invSqrt.dense(), r.sqrt.dense()};
    }
  }
  throw std::logic_error("scalingMatrices: bad kind");
}

Scaling::Scaling(ScalingKind kind, const SisdpProblem& problem,
                 const Vector& x, const SymMatrix& v)
    : Scaling(kind, problem, problem.F(x), v) {}

Scaling::Scaling(ScalingKind kind, const SisdpProblem& problem,
                 const SymMatrix& f, const SymMatrix& v)
    : Scaling(kind, problem, f, v, scalingMatrices(kind, f, v)) {}

Scaling::Scaling(ScalingKind kind, const SisdpProblem& problem,
                 const SymMatrix& f, const SymMatrix& v,
                 const ScalingPair& pair)
    : kind_(kind),
      p_(pair.p),
      pinv_(pair.pinv),
      fp_(kind == ScalingKind::AhoLike ? f : congruence(pair.p, f)),
      vp_(kind == ScalingKind::AhoLike ? v
                                       : congruence(pair.pinv.transpose(), v)),
      lf_(fp_) {
  if (!isPositiveDefinite(v)) {
    throw NotPositiveDefinite("Scaling: V is not positive definite");
  }
  fpi_.reserve(problem.n());
  for (int i = 1; i <= problem.n(); ++i) {
    fpi_.push_back(kind == ScalingKind::AhoLike
                       ? problem.basis(i)
                       : congruence(p_, problem.basis(i)));
  }
}

SymMatrix Scaling::scalePrimal(const SymMatrix& d) const {
  return kind_ == ScalingKind::AhoLike ? d : congruence(p_, d);
}

SymMatrix Scaling::unscaleDual(const SymMatrix& d) const {
  return kind_ == ScalingKind::AhoLike ? d : congruence(p_.transpose(), d);
}

SymMatrix Scaling::scaledLinearPart(const Vector& d) const {
  SymMatrix out(fp_.dim());
  for (int i = 0; i < n(); ++i) {
    if (d(i) != 0.0) out.axpy(d(i), fpi_[i]);
  }
  return out;
}

SymMatrix Scaling::averagedOperator(const SymMatrix& d) const {
  return 0.5 * (lf_.solve(jordan(vp_, d)) + jordan(vp_, lf_.solve(d)));
}

SymMatrix Scaling::complementarityOperator(const SymMatrix& d) const {
  return 0.5 * (jordan(vp_, d) + lf_.apply(jordan(vp_, lf_.solve(d))));
}

Vector xiP(const Scaling& scaling) {
  const SymMatrix fp_inv = inverse(scaling.FP());
  Vector xi(scaling.n());
  for (int i = 0; i < scaling.n(); ++i) xi(i) = inner(scaling.basis(i), fp_inv);
  return xi;
}

Matrix assembleHP(const Scaling& scaling) {
  const int n = scaling.n();
  const int m = scaling.FP().dim();
  // Columns: vec(L_F⁻¹ F_Pʲ) and vec(V_P ∘ F_Pʲ).
  Matrix k(m * m, n);
  Matrix g(m * m, n);
  for (int j = 0; j < n; ++j) {
    const SymMatrix kj = scaling.jordanF().solve(scaling.basis(j));
    const SymMatrix gj = jordan(scaling.VP(), scaling.basis(j));
    k.col(j) = Eigen::Map<const Vector>(kj.dense().data(), m * m);
    g.col(j) = Eigen::Map<const Vector>(gj.dense().data(), m * m);
  }
  const Matrix kg = k.transpose() * g;
  return 0.5 * (kg + kg.transpose());
}

Matrix lagrangianHessian(const SisdpProblem& problem,
                         const ReducedModel& reduced, const Vector& x,
                         const Vector& y) {
  Matrix h = problem.objective().hessian(x);
  for (int i = 0; i < reduced.size(); ++i) {
    if (y(i) != 0.0) h += y(i) * reduced.points[i].hess;
  }
  return 0.5 * (h + h.transpose());
}

LiftedMatrix liftEigenvalues(const Matrix& b, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.transpose()));
  LiftedMatrix out;
  out.minEigenvalueBefore = es.eigenvalues()(0);
  if (out.minEigenvalueBefore >= floor) {
    out.matrix = 0.5 * (b + b.transpose());
    return out;
  }
  Vector d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) {
    if (d(i) < floor) d(i) = 1.0;
  }
  const Matrix& q = es.eigenvectors();
  out.matrix = q * d.asDiagonal() * q.transpose();
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose());
  out.lifted = true;
  return out;
}

LiftedMatrix assembleBP(const SisdpProblem& problem,
                        const ReducedModel& reduced, const Vector& x,
                        const Vector& y, const Scaling& scaling,
                        double floor) {
  return liftEigenvalues(
      lagrangianHessian(problem, reduced, x, y) + assembleHP(scaling), floor);
}

SymMatrix recoverDualStep(const Scaling& scaling, const SymMatrix& f,
                          const SymMatrix& v, const Vector& dx, double mu) {
  const SymMatrix coupling =
      scaling.unscaleDual(scaling.averagedOperator(scaling.scaledLinearPart(dx)));
  return mu * inverse(f) - v - coupling;
}

FirstDirection firstDirection(const SisdpProblem& problem,
                              const ReducedModel& reduced, const Vector& x,
                              const Vector& y, const Vector& z,
                              const SymMatrix& v, double mu, ScalingKind kind,
                              double lift_floor) {
  const int n = problem.n();
  const int p = reduced.size();
  const int me = problem.numEqualities();
  const SymMatrix f = problem.F(x);
  const Scaling scaling(kind, problem, f, v);

  const LiftedMatrix b = assembleBP(problem, reduced, x, y, scaling, lift_floor);
  QpProblem qp;
  qp.H = b.matrix;
  qp.q = problem.objective().gradient(x) - mu * xiP(scaling);
  qp.G.resize(p, n);
  qp.c.resize(p);
  for (int i = 0; i < p; ++i) {
    qp.G.row(i) = reduced.points[i].grad.transpose();
    qp.c(i) = reduced.points[i].value;
  }
  qp.A = problem.equalityMatrix();
  qp.b = problem.equalityRhs() - qp.A * x;

  FirstDirection out;
  out.lifted = b.lifted;
  out.qp = solveQp(qp);
  if (!out.qp.ok()) {
    throw DirectionFailure("first direction: QP " + toString(out.qp.status));
  }
  Direction& d = out.direction;
  d.dx = out.qp.d;
  d.dy = out.qp.lambda - y;
  d.dz = me > 0 ? Vector(out.qp.nu - z) : Vector::Zero(0);
  d.dV = recoverDualStep(scaling, f, v, d.dx, mu);
  return out;
}

std::vector<int> linearizedActiveSet(const ReducedModel& reduced,
                                     const Vector& dx) {
  std::vector<int> active;
  for (int i = 0; i < reduced.size(); ++i) {
    const auto& pt = reduced.points[i];
    const double lin = pt.value + pt.grad.dot(dx);
    if (std::abs(lin) <= 1e-8 * (1.0 + std::abs(pt.value))) active.push_back(i);
  }
  return active;
}

std::optional<std::vector<int>> mapActiveSet(const std::vector<int>& active,
                                             const Correspondence& map) {
  std::vector<int> out;
  for (int i : active) {
    int image = -1;
    for (std::size_t j = 0; j < map.newToOld.size(); ++j) {
      if (map.newToOld[j] && *map.newToOld[j] == i) {
        image = static_cast<int>(j);
        break;
      }
    }
    if (image < 0) return std::nullopt;
    out.push_back(image);
  }
  return out;
}

SymMatrix Scaling::scaleDual(const SymMatrix& d) const {
  return kind_ == ScalingKind::AhoLike ? d : congruence(pinv_.transpose(), d);
}

std::optional<Direction> secondDirection(const SisdpProblem& problem,
                                         const ReducedModel& reduced,
                                         const Vector& x, const Vector& y,
                                         const Vector& z, const SymMatrix& v,
                                         double mu, ScalingKind kind,
                                         const std::vector<int>& active) {
  const int n = problem.n();
  const int m = problem.m();
  const int sv = svecLength(m);
  const int na = static_cast<int>(active.size());
  const int me = problem.numEqualities();
  const SymMatrix f = problem.F(x);
  const Scaling scaling(kind, problem, f, v);

  // Unknowns (Δx, svec ΔV, y_J + Δy_J, z + Δz).
  const int iv = n;
  const int iy = n + sv;
  const int iz = n + sv + na;
  const int dim = iz + me;
  Matrix k = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);

  // Stationarity.
  k.topLeftCorner(n, n) = lagrangianHessian(problem, reduced, x, y);
  for (int i = 0; i < n; ++i) {
    k.block(i, iv, 1, sv) = -svec(problem.basis(i + 1)).transpose();
  }
  rhs.head(n) = problem.adjoint(v) - problem.objective().gradient(x);

  // Scaled complementarity:
  // F_P∘ΔV_P + ½(L_{V_P} + L_{F_P}L_{V_P}L_{F_P}⁻¹)ΔF_P = μI − F_P∘V_P.
  for (int i = 0; i < n; ++i) {
    k.block(iv, i, sv, 1) =
        svec(scaling.complementarityOperator(scaling.basis(i)));
  }
  k.block(iv, iv, sv, sv) = svecOperatorMatrix(m, [&](const SymMatrix& dv) {
    return jordan(scaling.FP(), scaling.scaleDual(dv));
  });
  SymMatrix comp = mu * SymMatrix::identity(m);
  comp -= jordan(scaling.FP(), scaling.VP());
  rhs.segment(iv, sv) = svec(comp);

  // Linearized active constraints; Δyᵢ = −ŷᵢ elsewhere.
  for (int r = 0; r < na; ++r) {
    const auto& pt = reduced.points[active[r]];
    k.block(0, iy + r, n, 1) = pt.grad;
    k.block(iy + r, 0, 1, n) = pt.grad.transpose();
    rhs(iy + r) = -pt.value;
  }
  if (me > 0) {
    const Matrix a = problem.equalityMatrix();
    k.block(0, iz, n, me) = a.transpose();
    k.block(iz, 0, me, n) = a;
    rhs.tail(me) = problem.equalityRhs() - a * x;
  }

  Eigen::PartialPivLU<Matrix> lu(k);
  // Eigen's estimate is meaningless once a pivot is exactly zero.
  const Vector piv = lu.matrixLU().diagonal().cwiseAbs();
  if (!(piv.minCoeff() > 1e-14 * piv.maxCoeff())) return std::nullopt;
  if (!(lu.rcond() >= 1e-12)) return std::nullopt;
  Vector sol = lu.solve(rhs);
  if (!sol.allFinite()) return std::nullopt;
  // One step of iterative refinement.
  sol += lu.solve(rhs - k * sol);

  Direction d;
  d.dx = sol.head(n);
  d.dV = smat(sol.segment(iv, sv));
  d.dy = -y;
  for (int r = 0; r < na; ++r) d.dy(active[r]) = sol(iy + r) - y(active[r]);
  d.dz = me > 0 ? Vector(sol.tail(me) - z) : Vector::Zero(0);
  return d;
}

double stepSize(const SymMatrix& f, const SymMatrix& df, const SymMatrix& v,
                const SymMatrix& dv, double delta_step) {
  if (!(delta_step > 0.0 && delta_step < 1.0)) {
    throw std::invalid_argument("stepSize: delta_step must lie in (0,1)");
  }
  auto cap = [delta_step](double lam) {
    return lam <= -1.0 ? -delta_step / lam : 1.0;
  };
  return std::min(cap(minEigRatio(f, df)), cap(minEigRatio(v, dv)));
}

}  // namespace sisdp
