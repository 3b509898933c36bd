#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sisdp/linalg.hpp"
#include "sisdp/problem.hpp"
#include "sisdp/qp.hpp"
#include "sisdp/reduction.hpp"

namespace sisdp {

/// Monteiro-Zhang scaling matrix choices.
enum class ScalingKind {
  AhoLike,  ///< P = I
  Hkm,      ///< P = F(x)^{-1/2}
  Nt,       ///< P = W^{-1/2}, W the NT scaling point of (F(x), V)
};

std::string toString(ScalingKind k);
/// Accepts "aho", "hkm", "nt".
ScalingKind parseScaling(const std::string& name);

/// P and P⁻¹.
struct ScalingPair {
  Matrix p;
  Matrix pinv;
};

ScalingPair scalingMatrices(ScalingKind kind, const SymMatrix& f,
                            const SymMatrix& v);

/**
 * The congruence F_P(x) = P F(x) Pᵀ, V_P = P⁻ᵀ V P⁻¹ at a fixed (x, V),
 * together with the scaled basis F_Pⁱ = P Fᵢ Pᵀ and the Jordan operator of
 * F_P(x).
 */
class Scaling {
 public:
  Scaling(ScalingKind kind, const SisdpProblem& problem, const Vector& x,
          const SymMatrix& v);
  /// Same, with F(x) already evaluated.
  Scaling(ScalingKind kind, const SisdpProblem& problem, const SymMatrix& f,
          const SymMatrix& v);

  ScalingKind kind() const { return kind_; }
  const Matrix& P() const { return p_; }
  const SymMatrix& FP() const { return fp_; }
  const SymMatrix& VP() const { return vp_; }
  const SymMatrix& basis(int i) const { return fpi_[i]; }  ///< F_P^{i+1}
  int n() const { return static_cast<int>(fpi_.size()); }
  const LyapunovOperator& jordanF() const { return lf_; }

  /// P D Pᵀ
  SymMatrix scalePrimal(const SymMatrix& d) const;
  /// Pᵀ D P, the inverse of the dual scaling.
  SymMatrix unscaleDual(const SymMatrix& d) const;
  /// P⁻ᵀ D P⁻¹, the dual scaling.
  SymMatrix scaleDual(const SymMatrix& d) const;
  /// Σ dᵢ F_Pⁱ
  SymMatrix scaledLinearPart(const Vector& d) const;

  /// ½(L_{F_P}⁻¹ L_{V_P} + L_{V_P} L_{F_P}⁻¹) D
  SymMatrix averagedOperator(const SymMatrix& d) const;
  /// ½(L_{V_P} + L_{F_P} L_{V_P} L_{F_P}⁻¹) D
  SymMatrix complementarityOperator(const SymMatrix& d) const;

 private:
  Scaling(ScalingKind kind, const SisdpProblem& problem, const SymMatrix& f,
          const SymMatrix& v, const ScalingPair& pair);

  ScalingKind kind_;
  Matrix p_;
  Matrix pinv_;
  SymMatrix fp_;
  SymMatrix vp_;
  std::vector<SymMatrix> fpi_;
  LyapunovOperator lf_;
};

/// ξ_P(x) = (F_Pⁱ • F_P(x)⁻¹)ᵢ = ∇ log det F_P(x).
Vector xiP(const Scaling& scaling);

/// (H_P)ᵢⱼ = ½ F_Pⁱ • (L_{F_P}⁻¹ L_{V_P} + L_{V_P} L_{F_P}⁻¹) F_Pʲ.
Matrix assembleHP(const Scaling& scaling);

/// ∇²f(x) + Σ yᵢ ∇²ĝᵢ(x).
Matrix lagrangianHessian(const SisdpProblem& problem,
                         const ReducedModel& reduced, const Vector& x,
                         const Vector& y);

struct LiftedMatrix {
  Matrix matrix;
  double minEigenvalueBefore = 0.0;
  bool lifted = false;
};

/// Replaces eigenvalues below `floor` by 1, keeping eigenvectors.
LiftedMatrix liftEigenvalues(const Matrix& b, double floor = 1e-8);

/// B_P = ∇²ₓₓL(x,y) + H_P(x,V), lifted.
LiftedMatrix assembleBP(const SisdpProblem& problem,
                        const ReducedModel& reduced, const Vector& x,
                        const Vector& y, const Scaling& scaling,
                        double floor = 1e-8);

/// A search direction (Δx, Δy, Δz, ΔV); Δy aligned with a ReducedModel.
struct Direction {
  Vector dx;
  Vector dy;
  Vector dz;
  SymMatrix dV;
};

/// ΔV from the scaled complementarity row:
/// ΔV = Pᵀ[μF_P⁻¹ − V_P − ½(L_{F_P}⁻¹L_{V_P} + L_{V_P}L_{F_P}⁻¹)ΣΔxᵢF_Pⁱ]P.
SymMatrix recoverDualStep(const Scaling& scaling, const SymMatrix& f,
                          const SymMatrix& v, const Vector& dx, double mu);

class DirectionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FirstDirection {
  Direction direction;
  QpSolution qp;
  bool lifted = false;
};

/// Solves the barrier QP at (x, y, z, V) for μ and recovers ΔV. Throws
/// DirectionFailure if the QP cannot be solved.
FirstDirection firstDirection(const SisdpProblem& problem,
                              const ReducedModel& reduced, const Vector& x,
                              const Vector& y, const Vector& z,
                              const SymMatrix& v, double mu, ScalingKind kind,
                              double lift_floor = 1e-8);

/// J_a = {i : ĝᵢ + ∇ĝᵢᵀΔx = 0} with tolerance 1e-8·(1 + |ĝᵢ|).
std::vector<int> linearizedActiveSet(const ReducedModel& reduced,
                                     const Vector& dx);

/// Maps J_a through a correspondence; nullopt if some index has no image.
std::optional<std::vector<int>> mapActiveSet(const std::vector<int>& active,
                                             const Correspondence& map);

/**
 * Newton-type second direction at (x̂, ŷ, ẑ, V̂): solves the square system
 * made of the stationarity row, the scaled complementarity row, ĝᵢ + ∇ĝᵢᵀΔx
 * = 0 for i ∈ J_a and ŷᵢ + Δyᵢ = 0 otherwise, plus the equality rows.
 * Unknowns are (Δx, svec ΔV, y_J + Δy_J, z + Δz). Returns nullopt when
 * the system is singular (reciprocal condition estimate < 1e-12).
 */
std::optional<Direction> secondDirection(const SisdpProblem& problem,
                                         const ReducedModel& reduced,
                                         const Vector& x, const Vector& y,
                                         const Vector& z, const SymMatrix& v,
                                         double mu, ScalingKind kind,
                                         const std::vector<int>& active);

/// Fraction-to-boundary step: s = min(t, u) with t = −δ/λ_min(F⁻¹ΔF) when
/// that eigenvalue is ≤ −1 and t = 1 otherwise; u likewise for (V, ΔV).
double stepSize(const SymMatrix& f, const SymMatrix& df, const SymMatrix& v,
                const SymMatrix& dv, double delta_step);

}  // namespace sisdp
