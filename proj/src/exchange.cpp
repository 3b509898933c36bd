#include "sisdp/exchange.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace sisdp {

std::optional<double> mostViolated(const SisdpProblem& problem,
                                   const Vector& x, double theta,
                                   const ReductionOptions& opts) {
  if (!(theta > 0.0)) throw std::invalid_argument("mostViolated: theta must be > 0");
  if (!problem.hasIndexedConstraint()) return std::nullopt;
  const GlobalMax gm = globalMax(problem, x, opts);
  if (gm.value <= theta) return std::nullopt;
  return gm.tau;
}

double denseGridViolation(const SisdpProblem& problem, const Vector& x,
                          int points) {
  if (!problem.hasIndexedConstraint()) {
    return -std::numeric_limits<double>::infinity();
  }
  const auto& g = problem.constraint();
  const Interval t = problem.indexSet();
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double tau = t.lo + (t.hi - t.lo) * i / (points - 1);
    best = std::max(best, g.value(x, tau));
  }
  return best;
}

ExchangeResult solveExchange(const SisdpProblem& problem, const Vector& x0,
                             const Schedule& schedule,
                             const ExchangeOptions& opts) {
  using Clock = std::chrono::steady_clock;
  ExchangeResult res;
  const Interval t = problem.indexSet();
  res.indices = {t.lo};
  if (t.hi > t.lo) res.indices.push_back(t.hi);

  for (int r = 0;; ++r) {
    if (r >= opts.maxRounds) {
      res.message = "round limit reached";
      break;
    }
    const auto t0 = Clock::now();
    const SisdpProblem relaxed = problem.withIndexPoints(res.indices);
    const Iterate w0 = initialPoint(relaxed, x0, opts.inner.reduction);
    res.inner = algorithm2(relaxed, w0, schedule, opts.inner);

    ExchangeRound row;
    row.round = r;
    row.nIndices = static_cast<int>(res.indices.size());
    row.innerIterations = static_cast<int>(res.inner.trace.rows.size());
    row.innerStatus = res.inner.trace.status;
    const GlobalMax gm = problem.hasIndexedConstraint()
                             ? globalMax(problem, res.x(), opts.inner.reduction)
                             : GlobalMax{};
    row.maxViolation = std::max(0.0, gm.value);
    row.wallMs =
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    res.rounds.push_back(row);

    // An inner run that stalls near the end of its schedule still leaves an
    // x accurate enough to locate the next violated index.
    const bool usable =
        res.inner.trace.status == SolveStatus::Converged ||
        residual(relaxed, res.inner.iterate, 0.0, opts.inner.reduction).norm() <=
            opts.innerAcceptR0;
    if (!usable) {
      res.message = "inner solve failed in round " + std::to_string(r) + ": " +
                    toString(res.inner.trace.status);
      break;
    }
    const auto tau = mostViolated(problem, res.x(), opts.theta,
                                  opts.inner.reduction);
    if (!tau) {
      res.success = true;
      break;
    }
    for (double s : res.indices) {
      if (std::abs(s - *tau) <= opts.dedupRadius) {
        throw ExchangeError("exchange: index " + std::to_string(*tau) +
                            " is already in T_r but still violated");
      }
    }
    res.indices.push_back(*tau);
    res.added.push_back(*tau);
  }

  res.certifiedViolation = denseGridViolation(problem, res.x());
  res.finalR0 = residual(problem, res.inner.iterate, 0.0,
                         opts.inner.reduction).norm();
  return res;
}

void writeRoundsCsv(const std::vector<ExchangeRound>& rounds,
                    std::ostream& out) {
  out << "round,n_indices,inner_iters,max_violation,wall_ms\n";
  out << std::scientific
      << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : rounds) {
    out << r.round << ',' << r.nIndices << ',' << r.innerIterations << ','
        << r.maxViolation << ',' << r.wallMs << '\n';
  }
}

}  // namespace sisdp
