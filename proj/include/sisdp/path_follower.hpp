#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sisdp/directions.hpp"
#include "sisdp/families.hpp"
#include "sisdp/problem.hpp"
#include "sisdp/reduction.hpp"

namespace sisdp {

/// Primal-dual point (x, y, V) plus equality multipliers z. The measure y is
/// carried as weights on the maximizers of `reduced`, which is always the
/// reduced model at x.
struct Iterate {
  Vector x;
  ReducedModel reduced;
  Vector y;
  Vector z;
  SymMatrix V;
};

/// Barrier schedule and algorithm constants.
struct Schedule {
  double mu = 1.0;
  double eps = 1.0;
  double alpha = 0.99;
  double beta = 0.8;
  double gamma1 = 1.0;
  double gamma2 = 5.0;
  double c = 1.0 / 2.99;
  double deltaStep = 0.9;
  double epsFloor = 1e-7;

  /// γ₁ = √(m(m+1)/2), γ₂ = 5, c = 1/2.99, α = 0.99, β = 0.8, μ₀ = 1 and
  /// ε₀ = γ₁μ₀^{1+α}.
  static Schedule defaults(int m);

  /// Throws std::invalid_argument if a constant is out of range.
  void validate() const;
};

/// μ ← min(βμ, γ₂μ^{1+cα}), ε ← max(ε_floor, γ₁μ^{1+α}).
Schedule updateParameters(const Schedule& s);
/// μ ← βμ, ε ← βε.
Schedule geometricUpdate(const Schedule& s);

struct SolverOptions {
  ScalingKind scaling = ScalingKind::Nt;
  ReductionOptions reduction;
  double tolR0 = 1e-8;
  double muMin = 1e-10;
  int maxOuter = 300;
  int fallbackMaxIter = 100;
  double trackRadius = 0.1;
  double liftFloor = 1e-8;
  /// Wall-clock budget in seconds; 0 disables it.
  double timeLimit = 0.0;
};

struct ResidualParts {
  double theta = 0.0;  ///< (max_τ g)₊
  Vector phi1;         ///< stationarity
  double phi2 = 0.0;   ///< Σ yᵢ ĝᵢ
  Vector phi3;         ///< svec(F∘V − μI)
  double eq = 0.0;     ///< ‖Ax − b‖

  double norm() const;
};

/// R_μ parts evaluated from the raw oracles at the support points of y.
ResidualParts residual(const SisdpProblem& problem, const Iterate& it,
                       double mu, const ReductionOptions& opts = {});

/// R_μ ≤ ε, F(x) ≻ 0, V ≻ 0 and y ≥ 0.
bool inNeighborhood(const SisdpProblem& problem, const Iterate& it, double mu,
                    double eps, const ReductionOptions& opts = {});

/// Iterate at x with V₀ = mI, y = 1 on every detected maximizer, z = 0.
/// Throws NotPositiveDefinite unless F(x) ≻ 0.
Iterate initialPoint(const SisdpProblem& problem, const Vector& x0,
                     const ReductionOptions& opts = {});

/// X⁰ = m⁻¹I for the linear family, x⁰ = 0 for the nonlinear one.
Vector familyStart(Family family, int m);

/// w + sΔw, re-detecting maximizers at the new x and carrying multipliers
/// across by track().
Iterate advance(const SisdpProblem& problem, const Iterate& w,
                const Direction& d, double s, const SolverOptions& opts,
                Correspondence* map = nullptr);

enum class SolveStatus {
  Converged,
  MuBelowFloor,
  FallbackFailed,
  MaxIterations,
  TimeLimit,
};

std::string toString(SolveStatus s);

struct TraceRow {
  int k = 0;
  double mu = 0.0;
  double eps = 0.0;
  double rMu = 0.0;
  double r0 = 0.0;
  double sHalf = 0.0;
  double sOne = 0.0;
  bool fallbackUsed = false;
  int pActive = 0;
  int qpIterations = 0;
  double wallMs = 0.0;
};

struct SolveTrace {
  std::vector<TraceRow> rows;
  SolveStatus status = SolveStatus::MaxIterations;
  std::string message;
  double finalR0 = 0.0;
  int fallbackIterations = 0;  ///< inner iterations spent in the fallback

  /// Fraction of outer iterations that needed the fallback.
  double fallbackRate() const;
};

/// `k,mu,eps,R_mu,R_0,s_half,s_one,fallback_used,p_active,qp_iters,wall_ms`
void writeTraceCsv(const SolveTrace& trace, std::ostream& out);

struct SolveResult {
  Iterate iterate;
  SolveTrace trace;
  /// (x, svec V) of w⁰, w¹, … for convergence-rate diagnostics.
  std::vector<Vector> history;
};

struct FallbackResult {
  Iterate iterate;
  int iterations = 0;
  int qpIterations = 0;
  bool success = false;
  std::vector<double> residuals;  ///< R_μ after each accepted step
  std::string message;
};

/// f(x) − μ log det F(x) + ρ((max_τ g)₊ + ‖Ax − b‖₁); +∞ unless F(x) ≻ 0.
double barrierMerit(const SisdpProblem& problem, const Vector& x, double mu,
                    double rho, const ReductionOptions& opts = {});

/**
 * Damped first-direction iteration for a point of N_μ^ε: each step solves
 * the barrier QP at the current point, takes the fraction-to-boundary step
 * and halves it until R_μ decreases by the factor (1 − 1e-4·s).
 *
 * Where B_P had to be lifted the QP direction need not reduce R_μ at all. If
 * no halving succeeds, the iteration switches for good to an Armijo search
 * on barrierMerit along the same direction, which it does descend.
 */
FallbackResult fallbackInner(const SisdpProblem& problem, const Iterate& w,
                             double mu, double eps, const SolverOptions& opts,
                             int max_iter = 100);

/// Path following with a geometric schedule and fallbackInner as the
/// inner solver.
SolveResult algorithm1(const SisdpProblem& problem, const Iterate& w0,
                       Schedule schedule, const SolverOptions& opts);

/// Two-step path following: QP direction, Newton-type second direction,
/// neighbourhood test, fallback, power schedule.
SolveResult algorithm2(const SisdpProblem& problem, const Iterate& w0,
                       Schedule schedule, const SolverOptions& opts);

/// Least-squares slope of log‖wᵏ⁺¹ − w*‖ against log‖wᵏ − w*‖ over the last
/// `pairs` pairs, w* the final history entry. nullopt if fewer than two
/// usable pairs.
std::optional<double> fitConvergenceExponent(const std::vector<Vector>& history,
                                             int pairs = 4);

/// ‖wᵏ⁺¹ − w*‖ / ‖wᵏ − w*‖ over the last `pairs` pairs.
std::vector<double> convergenceRatios(const std::vector<Vector>& history,
                                      int pairs = 4);

}  // namespace sisdp
