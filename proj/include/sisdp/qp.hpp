#pragma once

#include <string>

#include "sisdp/linalg.hpp"

namespace sisdp {

/// minimize ½dᵀHd + qᵀd  s.t.  c + G d ≤ 0,  A d = b.
///
/// Rows of G are the inequality normals gᵢᵀ; rows of A the equality rows.
struct QpProblem {
  Matrix H;
  Vector q;
  Matrix G;
  Vector c;
  Matrix A;
  Vector b;

  int n() const { return static_cast<int>(q.size()); }
  int numInequalities() const { return static_cast<int>(c.size()); }
  int numEqualities() const { return static_cast<int>(b.size()); }
};

enum class QpStatus { Optimal, Infeasible, MaxIterations, Singular };

std::string toString(QpStatus s);

struct QpSolution {
  Vector d;
  Vector lambda;  ///< inequality multipliers, ≥ 0
  Vector nu;      ///< equality multipliers
  QpStatus status = QpStatus::Optimal;
  int iterations = 0;

  bool ok() const { return status == QpStatus::Optimal; }
};

/// Worst of the four KKT residuals (stationarity, primal feasibility,
/// dual feasibility, complementarity) measured in the ∞-norm.
double kktResidual(const QpProblem& p, const QpSolution& s);

struct QpOptions {
  double tolerance = 1e-10;  ///< scaled by 1 + ‖q‖∞
  int maxIterations = 500;
};

/**
 * Dual active-set method for strictly convex QPs.
 *
 * Starts from the equality-constrained minimizer and repeatedly adds the
 * most violated inequality, dropping active inequalities whose multipliers
 * reach zero on the way, so every intermediate point is dual feasible.
 * Requires H positive definite.
 */
QpSolution solveQp(const QpProblem& p, const QpOptions& opts = {});

}  // namespace sisdp
