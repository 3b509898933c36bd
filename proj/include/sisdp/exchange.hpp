#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sisdp/path_follower.hpp"

namespace sisdp {

/// A new index coincided with one already in T_r; the inner solve was not
/// accurate enough for the exchange step to make progress.
class ExchangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExchangeOptions {
  double theta = 1e-6;
  int maxRounds = 50;
  double dedupRadius = 1e-9;
  /// Rounds continue past an unconverged inner solve whose R_0 on the
  /// finite problem is at most this.
  double innerAcceptR0 = 1e-6;
  SolverOptions inner;
};

/// A τ̄ with g(x, τ̄) > θ, the global maximizer of g(x,·); nullopt if
/// max_τ g(x,τ) ≤ θ.
std::optional<double> mostViolated(const SisdpProblem& problem,
                                   const Vector& x, double theta,
                                   const ReductionOptions& opts = {});

/// max of g(x,·) over `points` uniform points of T.
double denseGridViolation(const SisdpProblem& problem, const Vector& x,
                          int points = 100000);

struct ExchangeRound {
  int round = 0;
  int nIndices = 0;
  int innerIterations = 0;
  double maxViolation = 0.0;
  double wallMs = 0.0;
  SolveStatus innerStatus = SolveStatus::Converged;
};

struct ExchangeResult {
  std::vector<double> indices;  ///< T_r in insertion order
  std::vector<double> added;    ///< indices added after T₀
  std::vector<ExchangeRound> rounds;
  SolveResult inner;            ///< last inner solve
  bool success = false;
  std::string message;
  double certifiedViolation = 0.0;  ///< dense-grid max of g at the final x
  double finalR0 = 0.0;             ///< R_0 of the semi-infinite problem

  const Vector& x() const { return inner.iterate.x; }
};

/**
 * Discretization with exchange: T₀ = {T_min, T_max}; each round solves the
 * problem restricted to T_r with algorithm2 from x0, then adds the global
 * maximizer of g(x^r,·) while it exceeds θ.
 */
ExchangeResult solveExchange(const SisdpProblem& problem, const Vector& x0,
                             const Schedule& schedule,
                             const ExchangeOptions& opts = {});

/// `round,n_indices,inner_iters,max_violation,wall_ms`
void writeRoundsCsv(const std::vector<ExchangeRound>& rounds,
                    std::ostream& out);

}  // namespace sisdp
