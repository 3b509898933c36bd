#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "sisdp/problem.hpp"

namespace sisdp {

/// Maximize A₀•X s.t. A(τ)•X ≥ 0 (τ∈T), I•X = 1, X ⪰ 0, with
/// A(τ)ᵢⱼ = Σₗ a_{i,j,l} τˡ.
struct LinearEigInstance {
  int m = 0;
  int q = 0;
  SymMatrix a0;
  std::vector<SymMatrix> coeffs;  ///< coeffs[l](i, j) = a_{i,j,l}
  Interval index_set{0.0, 1.0};

  SymMatrix a(double tau) const;
};

/// Minimize ½xᵀMx + cᵀx + ω‖x‖⁴ s.t.
/// Σᵢ τ^{i−1}xᵢ ≤ Σᵢ τ^{2i} + sin(9πτ) + 2 (τ∈T), X(x) + κI ⪰ 0.
struct NonlinearQuarticInstance {
  int m = 0;
  Matrix M;
  Vector c;
  double omega = 0.01;
  double kappa = 0.01;
  Interval index_set{0.0, 1.0};
};

using Instance = std::variant<LinearEigInstance, NonlinearQuarticInstance>;

enum class Family { LinearEig, NonlinearQuartic };

Family familyOf(const Instance& inst);
std::string familyName(Family f);
Family parseFamily(const std::string& name);

SisdpProblem buildLinearEig(const LinearEigInstance& inst);
SisdpProblem buildNonlinearQuartic(const NonlinearQuarticInstance& inst);
SisdpProblem buildProblem(const Instance& inst);

/// Optimum of the linear instance with the semi-infinite constraint dropped:
/// X̃ = vvᵀ for a unit top eigenvector v of A₀.
SymMatrix relaxedLinearOptimum(const LinearEigInstance& inst);

/// min over 21 uniform points of A(τ)•X.
double gridMinimumLoad(const LinearEigInstance& inst, const SymMatrix& x);

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Draws A₀ and a_{i,j,l} i.i.d. uniform on [−1,1] until the relaxed
/// optimum violates the semi-infinite constraint on the 21-point grid by at
/// least 1e-3. Throws GenerationError after 1000 rejected draws.
LinearEigInstance generateLinearInstance(int m, int q, std::uint64_t seed);

NonlinearQuarticInstance generateNonlinearInstance(int m, std::uint64_t seed,
                                                   double omega = 0.01,
                                                   double kappa = 0.01);

/// Problem-file encoding. Matrices are dense row-major arrays.
nlohmann::json toJson(const Instance& inst);

class ProblemFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ProblemFormatError naming the offending field.
Instance instanceFromJson(const nlohmann::json& j);
Instance loadInstance(const std::string& path);
void saveInstance(const Instance& inst, const std::string& path);

}  // namespace sisdp
