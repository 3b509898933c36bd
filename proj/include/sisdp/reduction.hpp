#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sisdp/problem.hpp"

namespace sisdp {

enum class MaximizerKind { Interior, BoundaryLeft, BoundaryRight, Discrete };

/// One element τᵢ of S_δ(x) with the reduced constraint ĝᵢ(x) = g(x, τᵢ(x))
/// and its derivatives.
struct Maximizer {
  double tau = 0.0;
  MaximizerKind kind = MaximizerKind::Interior;
  double value = 0.0;  ///< ĝᵢ(x)
  Vector grad;         ///< ∇ĝᵢ(x)
  Matrix hess;         ///< ∇²ĝᵢ(x)
  Vector tauGrad;      ///< ∇τᵢ(x)
};

struct ReducedModel {
  std::vector<Maximizer> points;
  /// max over T of g(x,·) (−∞ without a semi-infinite constraint).
  double globalMax = -std::numeric_limits<double>::infinity();

  int size() const { return static_cast<int>(points.size()); }
  bool empty() const { return points.empty(); }
  Vector values() const;
};

struct ReductionOptions {
  int gridN = 100;        ///< N; the grid has N+1 points
  double deltaRed = 0.1;  ///< S_δ radius
};

struct GlobalMax {
  double tau = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

/// max_τ g(x,τ): grid evaluation followed by projected Newton refinement of
/// every grid-local maximizer.
GlobalMax globalMax(const SisdpProblem& problem, const Vector& x,
                    const ReductionOptions& opts = {});

/// Builds S_δ(x) with reduced derivatives.
ReducedModel detectMaximizers(const SisdpProblem& problem, const Vector& x,
                              const ReductionOptions& opts = {});

class DegenerateMaximizer : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ImplicitDerivatives {
  Vector tauGrad;
  Vector grad;
  Matrix hess;
};

/// Implicit-function-theorem derivatives at a maximizer. Throws
/// DegenerateMaximizer if an interior point has ∂²g/∂τ² ≥ −1e-10.
ImplicitDerivatives implicitDerivatives(const SisdpProblem& problem,
                                        const Vector& x, double tau,
                                        MaximizerKind kind);

/// Projected Newton refinement of ∂g/∂τ = 0 from `start` within [lo, hi].
struct RefinedPoint {
  double tau = 0.0;
  double value = 0.0;
  MaximizerKind kind = MaximizerKind::Interior;
};
RefinedPoint refineMaximizer(const IndexedConstraint& g, const Vector& x,
                             double start, double lo, double hi,
                             double spacing);

/// newToOld[j] is the old index matched with new maximizer j, if any.
struct Correspondence {
  std::vector<std::optional<int>> newToOld;
};

struct TrackResult {
  Correspondence map;
  Vector y;  ///< multipliers aligned with the new model
};

/// Matches each new maximizer to the old one minimizing
/// |τⱼ⁺ − τᵢ − ∇τᵢᵀΔx|, accepting residuals ≤ radius; greedy by residual
/// so the map is injective. Unmatched new points get multiplier 0.
TrackResult track(const ReducedModel& old_model, const ReducedModel& new_model,
                  const Vector& dx, const Vector& y_old, double radius = 0.1);

}  // namespace sisdp
