#include "sisdp/path_follower.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace sisdp {

Schedule Schedule::defaults(int m) {
  Schedule s;
  s.gamma1 = std::sqrt(m * (m + 1) / 2.0);
  s.mu = 1.0;
  s.eps = s.gamma1 * std::pow(s.mu, 1.0 + s.alpha);
  return s;
}

void Schedule::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("schedule: " + what);
  };
  if (!(mu > 0.0)) fail("mu0 must be positive");
  if (!(eps > 0.0)) fail("eps0 must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) fail("beta must lie in (0,1)");
  if (!(gamma1 > 0.0)) fail("gamma1 must be positive");
  if (!(gamma2 > 0.0)) fail("gamma2 must be positive");
  if (!(c > 0.0 && c <= 1.0 / (alpha + 2.0))) {
    fail("c must lie in (0, 1/(alpha+2)]");
  }
  if (!(deltaStep > 0.0 && deltaStep < 1.0)) {
    fail("delta_step must lie in (0,1)");
  }
  if (!(epsFloor >= 0.0)) fail("eps floor must be non-negative");
}

Schedule updateParameters(const Schedule& s) {
  Schedule out = s;
  out.mu = std::min(s.beta * s.mu, s.gamma2 * std::pow(s.mu, 1.0 + s.c * s.alpha));
  out.eps = std::max(s.epsFloor, s.gamma1 * std::pow(out.mu, 1.0 + s.alpha));
  return out;
}

Schedule geometricUpdate(const Schedule& s) {
  Schedule out = s;
  out.mu = s.beta * s.mu;
  out.eps = s.beta * s.eps;
  return out;
}

double ResidualParts::norm() const {
  return std::sqrt(theta * theta + phi1.squaredNorm() + phi2 * phi2 +
                   phi3.squaredNorm() + eq * eq);
}

ResidualParts residual(const SisdpProblem& problem, const Iterate& it,
                       double mu, const ReductionOptions& opts) {
  ResidualParts r;
  r.phi1 = problem.objective().gradient(it.x) - problem.adjoint(it.V);
  if (problem.hasIndexedConstraint()) {
    const auto& g = problem.constraint();
    for (int i = 0; i < it.reduced.size(); ++i) {
      const double tau = it.reduced.points[i].tau;
      r.phi1 += it.y(i) * g.gradX(it.x, tau);
      r.phi2 += it.y(i) * g.value(it.x, tau);
    }
    r.theta = std::max(0.0, globalMax(problem, it.x, opts).value);
  }
  if (problem.numEqualities() > 0) {
    r.phi1 += problem.equalityMatrix().transpose() * it.z;
    r.eq = (problem.equalityMatrix() * it.x - problem.equalityRhs()).norm();
  }
  SymMatrix comp = jordan(problem.F(it.x), it.V);
  comp -= mu * SymMatrix::identity(problem.m());
  r.phi3 = svec(comp);
  return r;
}

namespace {

bool interiorValid(const SisdpProblem& problem, const Iterate& it) {
  if (it.y.size() > 0 && it.y.minCoeff() < 0.0) return false;
  if (!it.x.allFinite()) return false;
  return isPositiveDefinite(problem.F(it.x)) && isPositiveDefinite(it.V);
}

}  // namespace

bool inNeighborhood(const SisdpProblem& problem, const Iterate& it, double mu,
                    double eps, const ReductionOptions& opts) {
  if (!interiorValid(problem, it)) return false;
  return residual(problem, it, mu, opts).norm() <= eps;
}

Iterate initialPoint(const SisdpProblem& problem, const Vector& x0,
                     const ReductionOptions& opts) {
  if (x0.size() != problem.n()) {
    throw DimensionMismatch("initialPoint: x0 has the wrong length");
  }
  if (!isPositiveDefinite(problem.F(x0))) {
    throw NotPositiveDefinite("initialPoint: F(x0) is not positive definite");
  }
  Iterate w;
  w.x = x0;
  w.reduced = detectMaximizers(problem, x0, opts);
  w.y = Vector::Ones(w.reduced.size());
  w.z = Vector::Zero(problem.numEqualities());
  w.V = problem.m() * SymMatrix::identity(problem.m());
  return w;
}

Vector familyStart(Family family, int m) {
  if (family == Family::LinearEig) {
    return vectorizeSym((1.0 / m) * SymMatrix::identity(m));
  }
  return Vector::Zero(svecLength(m));
}

Iterate advance(const SisdpProblem& problem, const Iterate& w,
                const Direction& d, double s, const SolverOptions& opts,
                Correspondence* map) {
  Iterate out;
  out.x = w.x + s * d.dx;
  out.V = w.V;
  out.V.axpy(s, d.dV);
  out.z = w.z.size() > 0 ? Vector(w.z + s * d.dz) : w.z;
  const Vector y_old = w.y + s * d.dy;
  out.reduced = detectMaximizers(problem, out.x, opts.reduction);
  TrackResult tr =
      track(w.reduced, out.reduced, s * d.dx, y_old, opts.trackRadius);
  out.y = std::move(tr.y);
  if (map) *map = std::move(tr.map);
  return out;
}

std::string toString(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::MuBelowFloor:
      return "mu_below_floor";
    case SolveStatus::FallbackFailed:
      return "fallback_failed";
    case SolveStatus::MaxIterations:
      return "max_iterations";
    case SolveStatus::TimeLimit:
      return "time_limit";
  }
  return "unknown";
}

double SolveTrace::fallbackRate() const {
  if (rows.empty()) return 0.0;
  int used = 0;
  for (const auto& r : rows) used += r.fallbackUsed ? 1 : 0;
  return static_cast<double>(used) / static_cast<double>(rows.size());
}

void writeTraceCsv(const SolveTrace& trace, std::ostream& out) {
  out << "k,mu,eps,R_mu,R_0,s_half,s_one,fallback_used,p_active,qp_iters,"
         "wall_ms\n";
  out << std::scientific
      << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : trace.rows) {
    out << r.k << ',' << r.mu << ',' << r.eps << ',' << r.rMu << ',' << r.r0
        << ',' << r.sHalf << ',' << r.sOne << ',' << (r.fallbackUsed ? 1 : 0)
        << ',' << r.pActive << ',' << r.qpIterations << ',' << r.wallMs
        << '\n';
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double msSince(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Vector stackPrimalDual(const Iterate& w) {
  const Vector sv = svec(w.V);
  Vector out(w.x.size() + sv.size());
  out << w.x, sv;
  return out;
}

double safeResidual(const SisdpProblem& problem, const Iterate& w, double mu,
                    const ReductionOptions& opts) {
  const double r = residual(problem, w, mu, opts).norm();
  return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
}

struct LoopState {
  Clock::time_point start = Clock::now();
  bool timedOut(const SolverOptions& opts) const {
    return opts.timeLimit > 0.0 && msSince(start) > 1e3 * opts.timeLimit;
  }
};

/// Shared termination bookkeeping; true if the loop should stop.
bool checkStop(const SisdpProblem& problem, const Iterate& w,
               const SolverOptions& opts, const LoopState& st, int k,
               SolveTrace& trace) {
  const double r0 = safeResidual(problem, w, 0.0, opts.reduction);
  trace.finalR0 = r0;
  if (r0 <= opts.tolR0 && interiorValid(problem, w)) {
    trace.status = SolveStatus::Converged;
    return true;
  }
  if (k >= opts.maxOuter) {
    trace.status = SolveStatus::MaxIterations;
    trace.message = "outer iteration limit reached";
    return true;
  }
  if (st.timedOut(opts)) {
    trace.status = SolveStatus::TimeLimit;
    trace.message = "time limit reached";
    return true;
  }
  return false;
}

/// After the μ update: stop once μ falls below the floor.
bool checkMuFloor(const SisdpProblem& problem, const Iterate& w,
                  const Schedule& next, const SolverOptions& opts,
                  SolveTrace& trace) {
  if (next.mu >= opts.muMin) return false;
  trace.finalR0 = safeResidual(problem, w, 0.0, opts.reduction);
  trace.status = trace.finalR0 <= opts.tolR0 ? SolveStatus::Converged
                                             : SolveStatus::MuBelowFloor;
  if (trace.status == SolveStatus::MuBelowFloor) {
    trace.message = "mu fell below the floor before R_0 met the tolerance";
  }
  return true;
}

}  // namespace

double barrierMerit(const SisdpProblem& problem, const Vector& x, double mu,
                    double rho, const ReductionOptions& opts) {
  Eigen::LLT<Matrix> llt(problem.F(x).dense());
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  double penalty = 0.0;
  if (problem.hasIndexedConstraint()) {
    penalty += std::max(0.0, globalMax(problem, x, opts).value);
  }
  if (problem.numEqualities() > 0) {
    penalty += (problem.equalityMatrix() * x - problem.equalityRhs()).lpNorm<1>();
  }
  const double v = problem.objective().value(x) - mu * logdet + rho * penalty;
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

namespace {

/// Largest step keeping F(x), V positive definite (fraction-to-boundary) and
/// y non-negative.
double interiorStep(const SisdpProblem& problem, const Iterate& w,
                    Direction& d, double delta) {
  double s = stepSize(problem.F(w.x), problem.linearPart(d.dx), w.V, d.dV,
                      delta);
  for (int i = 0; i < d.dy.size(); ++i) {
    if (d.dy(i) >= 0.0) continue;
    if (w.y(i) <= 0.0) {
      d.dy(i) = 0.0;
    } else {
      s = std::min(s, w.y(i) / -d.dy(i));
    }
  }
  return s;
}

/// Backtracks from s until R_μ(w + sd) ≤ (1 − 1e-4·s)R_μ(w).
std::optional<std::pair<Iterate, double>> residualSearch(
    const SisdpProblem& problem, const Iterate& w, const Direction& d,
    double s, double r, double mu, const SolverOptions& opts) {
  for (int h = 0; h <= 30; ++h, s *= 0.5) {
    Iterate cand = advance(problem, w, d, s, opts);
    if (!interiorValid(problem, cand)) continue;
    const double rc = safeResidual(problem, cand, mu, opts.reduction);
    if (rc <= (1.0 - 1e-4 * s) * r) return std::make_pair(std::move(cand), rc);
  }
  return std::nullopt;
}

/// Backtracks from s until the barrier merit decreases by 1e-4·s·|D|, D its
/// directional-derivative model.
std::optional<Iterate> meritSearch(const SisdpProblem& problem,
                                   const Iterate& w, const Direction& d,
                                   double s, double mu, double rho,
                                   const SolverOptions& opts) {
  const SymMatrix f_inv = inverse(problem.F(w.x));
  const Vector xi = problem.adjoint(f_inv);
  double penalty = 0.0;
  if (problem.hasIndexedConstraint()) {
    penalty += std::max(0.0, globalMax(problem, w.x, opts.reduction).value);
  }
  if (problem.numEqualities() > 0) {
    penalty += (problem.equalityMatrix() * w.x - problem.equalityRhs()).lpNorm<1>();
  }
  const double slope =
      (problem.objective().gradient(w.x) - mu * xi).dot(d.dx) - rho * penalty;
  const double psi0 = barrierMerit(problem, w.x, mu, rho, opts.reduction);
  for (int h = 0; h <= 30; ++h, s *= 0.5) {
    Iterate cand = advance(problem, w, d, s, opts);
    if (!interiorValid(problem, cand)) continue;
    const double psi = barrierMerit(problem, cand.x, mu, rho, opts.reduction);
    // Round-off allowance for when the direction has all but vanished.
    const double slack = 1e-12 * (1.0 + std::abs(psi0));
    if (psi <= psi0 + 1e-4 * s * std::min(slope, 0.0) + slack) return cand;
  }
  return std::nullopt;
}

}  // namespace

FallbackResult fallbackInner(const SisdpProblem& problem, const Iterate& w,
                             double mu, double eps, const SolverOptions& opts,
                             int max_iter) {
  FallbackResult out;
  out.iterate = w;
  double r = safeResidual(problem, w, mu, opts.reduction);
  const double delta = 0.9;
  bool merit_phase = false;
  double rho = 0.0;
  for (;;) {
    if (r <= eps && interiorValid(problem, out.iterate)) {
      out.success = true;
      return out;
    }
    if (out.iterations >= max_iter) {
      out.message = "fallback iteration limit reached";
      return out;
    }
    const Iterate& cur = out.iterate;
    ++out.iterations;

    FirstDirection fd;
    double s = 0.0;
    try {
      fd = firstDirection(problem, cur.reduced, cur.x, cur.y, cur.z, cur.V,
                          mu, opts.scaling, opts.liftFloor);
      s = interiorStep(problem, cur, fd.direction, delta);
    } catch (const std::exception& e) {
      out.message = std::string("fallback: ") + e.what();
      return out;
    }
    out.qpIterations += fd.qp.iterations;

    if (!merit_phase) {
      auto next = residualSearch(problem, cur, fd.direction, s, r, mu, opts);
      if (next) {
        out.iterate = std::move(next->first);
        r = next->second;
        out.residuals.push_back(r);
        continue;
      }
      merit_phase = true;
    }
    const double lam =
        fd.qp.lambda.size() > 0 ? fd.qp.lambda.lpNorm<Eigen::Infinity>() : 0.0;
    const double nu =
        fd.qp.nu.size() > 0 ? fd.qp.nu.lpNorm<Eigen::Infinity>() : 0.0;
    rho = std::max(rho, 2.0 * std::max(lam, nu) + 1.0);
    auto next = meritSearch(problem, cur, fd.direction, s, mu, rho, opts);
    if (!next) {
      out.message = "fallback: line search failed";
      return out;
    }
    out.iterate = std::move(*next);
    r = safeResidual(problem, out.iterate, mu, opts.reduction);
    out.residuals.push_back(r);
  }
}

SolveResult algorithm1(const SisdpProblem& problem, const Iterate& w0,
                       Schedule schedule, const SolverOptions& opts) {
  schedule.validate();
  SolveResult res;
  res.iterate = w0;
  res.history.push_back(stackPrimalDual(w0));
  LoopState st;
  for (int k = 0;; ++k) {
    if (checkStop(problem, res.iterate, opts, st, k, res.trace)) break;
    const auto t0 = Clock::now();
    TraceRow row;
    row.k = k;
    row.mu = schedule.mu;
    row.eps = schedule.eps;
    row.fallbackUsed = true;
    FallbackResult fb = fallbackInner(problem, res.iterate, schedule.mu,
                                      schedule.eps, opts, opts.fallbackMaxIter);
    res.trace.fallbackIterations += fb.iterations;
    row.qpIterations = fb.qpIterations;
    if (!fb.success) {
      res.trace.status = SolveStatus::FallbackFailed;
      res.trace.message = fb.message;
      res.trace.finalR0 = safeResidual(problem, res.iterate, 0.0, opts.reduction);
      break;
    }
    res.iterate = std::move(fb.iterate);
    res.history.push_back(stackPrimalDual(res.iterate));
    row.rMu = safeResidual(problem, res.iterate, schedule.mu, opts.reduction);
    row.r0 = safeResidual(problem, res.iterate, 0.0, opts.reduction);
    row.pActive = res.iterate.reduced.size();
    row.wallMs = msSince(t0);
    res.trace.rows.push_back(row);
    const Schedule next = geometricUpdate(schedule);
    if (checkMuFloor(problem, res.iterate, next, opts, res.trace)) break;
    schedule = next;
  }
  return res;
}

SolveResult algorithm2(const SisdpProblem& problem, const Iterate& w0,
                       Schedule schedule, const SolverOptions& opts) {
  schedule.validate();
  SolveResult res;
  res.iterate = w0;
  res.history.push_back(stackPrimalDual(w0));
  LoopState st;
  for (int k = 0;; ++k) {
    if (checkStop(problem, res.iterate, opts, st, k, res.trace)) break;
    const auto t0 = Clock::now();
    const double mu = schedule.mu;
    const double eps = schedule.eps;
    const Iterate& w = res.iterate;
    TraceRow row;
    row.k = k;
    row.mu = mu;
    row.eps = eps;

    std::vector<const Iterate*> candidates{&w};
    std::optional<Iterate> w_half;
    std::optional<Iterate> w_plus;
    bool accepted = false;
    try {
      const FirstDirection fd = firstDirection(
          problem, w.reduced, w.x, w.y, w.z, w.V, mu, opts.scaling,
          opts.liftFloor);
      row.qpIterations += fd.qp.iterations;
      const Direction& d1 = fd.direction;
      row.sHalf = stepSize(problem.F(w.x), problem.linearPart(d1.dx), w.V,
                           d1.dV, schedule.deltaStep);
      Correspondence map;
      w_half = advance(problem, w, d1, row.sHalf, opts, &map);
      const std::vector<int> active = linearizedActiveSet(w.reduced, d1.dx);
      row.pActive = static_cast<int>(active.size());
      const auto mapped = mapActiveSet(active, map);
      if (mapped) {
        const Iterate& h = *w_half;
        const auto d2 = secondDirection(problem, h.reduced, h.x, h.y, h.z,
                                        h.V, mu, opts.scaling, *mapped);
        if (d2) {
          row.sOne = stepSize(problem.F(h.x), problem.linearPart(d2->dx), h.V,
                              d2->dV, schedule.deltaStep);
          w_plus = advance(problem, h, *d2, row.sOne, opts);
          accepted = inNeighborhood(problem, *w_plus, mu, eps, opts.reduction);
        }
      }
    } catch (const DirectionFailure&) {
    } catch (const NotPositiveDefinite&) {
    }
    if (w_half) candidates.push_back(&*w_half);
    if (w_plus) candidates.push_back(&*w_plus);

    Iterate next;
    if (accepted) {
      next = std::move(*w_plus);
    } else {
      row.fallbackUsed = true;
      // Restart from whichever available point is closest to the path.
      const Iterate* best = &w;
      double best_r = std::numeric_limits<double>::infinity();
      for (const Iterate* c : candidates) {
        if (!interiorValid(problem, *c)) continue;
        const double r = safeResidual(problem, *c, mu, opts.reduction);
        if (r < best_r) {
          best_r = r;
          best = c;
        }
      }
      FallbackResult fb =
          fallbackInner(problem, *best, mu, eps, opts, opts.fallbackMaxIter);
      res.trace.fallbackIterations += fb.iterations;
      row.qpIterations += fb.qpIterations;
      if (!fb.success) {
        row.wallMs = msSince(t0);
        res.trace.rows.push_back(row);
        res.trace.status = SolveStatus::FallbackFailed;
        res.trace.message = fb.message;
        res.trace.finalR0 = safeResidual(problem, w, 0.0, opts.reduction);
        break;
      }
      next = std::move(fb.iterate);
    }
    res.iterate = std::move(next);
    res.history.push_back(stackPrimalDual(res.iterate));
    row.rMu = safeResidual(problem, res.iterate, mu, opts.reduction);
    row.r0 = safeResidual(problem, res.iterate, 0.0, opts.reduction);
    row.wallMs = msSince(t0);
    res.trace.rows.push_back(row);

    const Schedule upd = updateParameters(schedule);
    if (checkMuFloor(problem, res.iterate, upd, opts, res.trace)) break;
    schedule = upd;
  }
  return res;
}

std::vector<double> convergenceRatios(const std::vector<Vector>& history,
                                      int pairs) {
  std::vector<double> out;
  if (history.size() < 3) return out;
  const Vector& star = history.back();
  const int last = static_cast<int>(history.size()) - 2;
  const int first = std::max(0, last - pairs);
  for (int k = first; k < last; ++k) {
    const double a = (history[k] - star).norm();
    const double b = (history[k + 1] - star).norm();
    if (a > 0.0) out.push_back(b / a);
  }
  return out;
}

std::optional<double> fitConvergenceExponent(const std::vector<Vector>& history,
                                             int pairs) {
  if (history.size() < 3) return std::nullopt;
  const Vector& star = history.back();
  // The last entry is w* itself, so the usable errors stop one short.
  const int last = static_cast<int>(history.size()) - 2;
  const int first = std::max(0, last - pairs);
  std::vector<double> lx, ly;
  for (int k = first; k < last; ++k) {
    const double a = (history[k] - star).norm();
    const double b = (history[k + 1] - star).norm();
    if (a > 0.0 && b > 0.0) {
      lx.push_back(std::log(a));
      ly.push_back(std::log(b));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) return std::nullopt;
  return sxy / sxx;
}

}  // namespace sisdp
