#include "sisdp/qp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sisdp {

std::string toString(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal:
      return "optimal";
    case QpStatus::Infeasible:
      return "infeasible";
    case QpStatus::MaxIterations:
      return "max_iterations";
    case QpStatus::Singular:
      return "singular";
  }
  return "unknown";
}

double kktResidual(const QpProblem& p, const QpSolution& s) {
  double worst = 0.0;
  Vector stat = p.H * s.d + p.q;
  if (p.numInequalities() > 0) stat += p.G.transpose() * s.lambda;
  if (p.numEqualities() > 0) stat += p.A.transpose() * s.nu;
  worst = std::max(worst, stat.lpNorm<Eigen::Infinity>());
  if (p.numInequalities() > 0) {
    const Vector slack = p.c + p.G * s.d;
    worst = std::max(worst, slack.maxCoeff());
    worst = std::max(worst, -s.lambda.minCoeff());
    worst = std::max(worst, s.lambda.cwiseProduct(slack).cwiseAbs().maxCoeff());
  }
  if (p.numEqualities() > 0) {
    worst = std::max(worst, (p.A * s.d - p.b).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

namespace {

/// Equality-constrained KKT system for the current working set.
class WorkingSet {
 public:
  explicit WorkingSet(const QpProblem& p) : p_(p) {}

  /// Rows: equalities first, then the listed inequalities.
  bool factor(const std::vector<int>& active) {
    const int n = p_.n();
    const int me = p_.numEqualities();
    const int k = me + static_cast<int>(active.size());
    Matrix kkt = Matrix::Zero(n + k, n + k);
    kkt.topLeftCorner(n, n) = p_.H;
    for (int r = 0; r < me; ++r) {
      kkt.block(n + r, 0, 1, n) = p_.A.row(r);
      kkt.block(0, n + r, n, 1) = p_.A.row(r).transpose();
    }
    for (std::size_t r = 0; r < active.size(); ++r) {
      const int row = n + me + static_cast<int>(r);
      kkt.block(row, 0, 1, n) = p_.G.row(active[r]);
      kkt.block(0, row, n, 1) = p_.G.row(active[r]).transpose();
    }
    lu_.compute(kkt);
    // Barrier Hessians near the end of a run reach condition numbers around
    // 1e17, so only pivots that are zero for all practical purposes count.
    lu_.setThreshold(1e-22);
    return lu_.isInvertible();
  }

  Vector solve(const Vector& rhs) const { return lu_.solve(rhs); }

 private:
  const QpProblem& p_;
  Eigen::FullPivLU<Matrix> lu_;
};

}  // namespace

QpSolution solveQp(const QpProblem& p, const QpOptions& opts) {
  const int n = p.n();
  const int mi = p.numInequalities();
  const int me = p.numEqualities();
  if (p.H.rows() != n || p.H.cols() != n || p.G.rows() != mi ||
      (mi > 0 && p.G.cols() != n) || p.A.rows() != me ||
      (me > 0 && p.A.cols() != n)) {
    throw DimensionMismatch("solveQp: inconsistent problem dimensions");
  }

  QpSolution sol;
  sol.lambda = Vector::Zero(mi);
  sol.nu = Vector::Zero(me);
  std::vector<int> active;
  WorkingSet ws(p);

  const double scale = 1.0 + p.q.lpNorm<Eigen::Infinity>();
  const double add_tol =
      1e-13 * (1.0 + (mi > 0 ? p.c.lpNorm<Eigen::Infinity>() : 0.0)) * scale;

  auto solveWorking = [&]() -> bool {
    if (!ws.factor(active)) return false;
    Vector rhs = Vector::Zero(n + me + static_cast<int>(active.size()));
    rhs.head(n) = -p.q;
    if (me > 0) rhs.segment(n, me) = p.b;
    for (std::size_t r = 0; r < active.size(); ++r) {
      rhs(n + me + r) = -p.c(active[r]);
    }
    const Vector sol_vec = ws.solve(rhs);
    sol.d = sol_vec.head(n);
    sol.nu = sol_vec.segment(n, me);
    for (std::size_t r = 0; r < active.size(); ++r) {
      sol.lambda(active[r]) = sol_vec(n + me + r);
    }
    return true;
  };

  if (!solveWorking()) {
    sol.d = Vector::Zero(n);
    sol.status = QpStatus::Singular;
    return sol;
  }
  if (me > 0 && (p.A * sol.d - p.b).lpNorm<Eigen::Infinity>() >
                    1e-8 * (1.0 + p.b.lpNorm<Eigen::Infinity>())) {
    sol.status = QpStatus::Infeasible;
    return sol;
  }

  std::vector<bool> is_active(mi, false);
  while (true) {
    if (sol.iterations >= opts.maxIterations) {
      sol.status = QpStatus::MaxIterations;
      return sol;
    }
    // Most violated inactive inequality.
    int j = -1;
    double worst = add_tol;
    for (int i = 0; i < mi; ++i) {
      if (is_active[i]) continue;
      const double s = p.c(i) + p.G.row(i).dot(sol.d);
      if (s > worst) {
        worst = s;
        j = i;
      }
    }
    if (j < 0) break;

    // Raise λ_j until constraint j becomes active, dropping blocking
    // constraints whose multipliers hit zero.
    while (true) {
      ++sol.iterations;
      if (sol.iterations > opts.maxIterations) {
        sol.status = QpStatus::MaxIterations;
        return sol;
      }
      if (!ws.factor(active)) {
        sol.status = QpStatus::Singular;
        return sol;
      }
      const int k = me + static_cast<int>(active.size());
      Vector rhs = Vector::Zero(n + k);
      rhs.head(n) = -p.G.row(j).transpose();
      const Vector dir = ws.solve(rhs);
      const Vector dz = dir.head(n);
      const Vector dmu = dir.tail(k);

      const double slack = p.c(j) + p.G.row(j).dot(sol.d);
      const double curvature = -p.G.row(j).dot(dz);
      const double primal_t =
          curvature > 1e-14 * (1.0 + p.G.row(j).squaredNorm())
              ? slack / curvature
              : std::numeric_limits<double>::infinity();

      double dual_t = std::numeric_limits<double>::infinity();
      int drop = -1;
      for (std::size_t r = 0; r < active.size(); ++r) {
        const double rate = dmu(me + static_cast<int>(r));
        if (rate < 0.0) {
          const double t = sol.lambda(active[r]) / -rate;
          if (t < dual_t) {
            dual_t = t;
            drop = static_cast<int>(r);
          }
        }
      }

      const double t = std::min(primal_t, dual_t);
      if (!std::isfinite(t)) {
        sol.status = QpStatus::Infeasible;
        return sol;
      }
      sol.d += t * dz;
      if (me > 0) sol.nu += t * dmu.head(me);
      for (std::size_t r = 0; r < active.size(); ++r) {
        sol.lambda(active[r]) += t * dmu(me + static_cast<int>(r));
      }
      sol.lambda(j) += t;

      if (primal_t <= dual_t) {
        active.push_back(j);
        is_active[j] = true;
        break;
      }
      sol.lambda(active[drop]) = 0.0;
      is_active[active[drop]] = false;
      active.erase(active.begin() + drop);
    }
  }

  // Polish on the final working set.
  const Vector lambda_before = sol.lambda;
  if (solveWorking()) {
    for (int i = 0; i < mi; ++i) {
      if (!is_active[i]) sol.lambda(i) = 0.0;
    }
    if (sol.lambda.size() > 0 && sol.lambda.minCoeff() < 0.0) {
      // Tiny negative multipliers from round-off.
      sol.lambda = sol.lambda.cwiseMax(0.0);
    }
  } else {
    sol.lambda = lambda_before;
  }
  sol.status = QpStatus::Optimal;
  return sol;
}

}  // namespace sisdp
