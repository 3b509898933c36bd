#include "sisdp/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace sisdp {

namespace {

constexpr double kDedupRadius = 1e-6;
constexpr double kFlatTolerance = 1e-12;
constexpr int kNewtonIterations = 30;

std::vector<double> gridPoints(const Interval& t, int n) {
  std::vector<double> s(n + 1);
  for (int i = 0; i <= n; ++i) s[i] = t.lo + i * (t.hi - t.lo) / n;
  s[n] = t.hi;
  return s;
}

/// Indices of grid-local maximizers (endpoints compare with one neighbour).
std::vector<int> gridLocalMaxima(const std::vector<double>& v) {
  std::vector<int> out;
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || v[i] >= v[i - 1];
    const bool right_ok = i == n - 1 || v[i] >= v[i + 1];
    if (left_ok && right_ok) out.push_back(i);
  }
  return out;
}

Maximizer makeMaximizer(const SisdpProblem& problem, const Vector& x,
                        double tau, double value, MaximizerKind kind) {
  Maximizer mx;
  mx.tau = tau;
  mx.kind = kind;
  mx.value = value;
  ImplicitDerivatives d;
  try {
    d = implicitDerivatives(problem, x, tau, kind);
  } catch (const DegenerateMaximizer&) {
    // Flat interior peak: no implicit function exists, freeze τ.
    d = implicitDerivatives(problem, x, tau, MaximizerKind::Discrete);
  }
  mx.grad = std::move(d.grad);
  mx.hess = std::move(d.hess);
  mx.tauGrad = std::move(d.tauGrad);
  return mx;
}

std::vector<RefinedPoint> refinedGridMaxima(const SisdpProblem& problem,
                                            const Vector& x,
                                            const ReductionOptions& opts,
                                            double cutoff_below_max,
                                            double* grid_max, bool* flat) {
  const auto& g = problem.constraint();
  const Interval& t = problem.indexSet();
  const auto s = gridPoints(t, opts.gridN);
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) v[i] = g.value(x, s[i]);
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  *grid_max = *hi_it;
  *flat = (*hi_it - *lo_it) <= kFlatTolerance * (1.0 + std::abs(*hi_it));

  std::vector<RefinedPoint> refined;
  if (*flat) {
    refined.push_back({t.lo, v.front(), MaximizerKind::BoundaryLeft});
    refined.push_back({t.hi, v.back(), MaximizerKind::BoundaryRight});
    return refined;
  }
  const double spacing = (t.hi - t.lo) / opts.gridN;
  for (int i : gridLocalMaxima(v)) {
    if (!(v[i] > *grid_max - cutoff_below_max)) continue;
    refined.push_back(refineMaximizer(g, x, s[i], t.lo, t.hi, spacing));
  }
  // Merge refined duplicates of one peak, keeping the larger value.
  std::sort(refined.begin(), refined.end(),
            [](const RefinedPoint& a, const RefinedPoint& b) {
              return a.tau < b.tau;
            });
  std::vector<RefinedPoint> unique;
  for (const auto& r : refined) {
    if (!unique.empty() && r.tau - unique.back().tau <= kDedupRadius) {
      if (r.value > unique.back().value) unique.back() = r;
    } else {
      unique.push_back(r);
    }
  }
  return unique;
}

}  // namespace

Vector ReducedModel::values() const {
  Vector v(size());
  for (int i = 0; i < size(); ++i) v(i) = points[i].value;
  return v;
}

RefinedPoint refineMaximizer(const IndexedConstraint& g, const Vector& x,
                             double start, double lo, double hi,
                             double spacing) {
  double t = std::clamp(start, lo, hi);
  double val = g.value(x, t);
  for (int it = 0; it < kNewtonIterations; ++it) {
    const double gt = g.dTau(x, t);
    const double gtt = g.d2Tau(x, t);
    if ((t <= lo && gt <= 0.0) || (t >= hi && gt >= 0.0)) break;
    if (std::abs(gt) <= 1e-10) break;
    double step = gtt < 0.0 ? -gt / gtt : std::copysign(0.25 * spacing, gt);
    // Ascent safeguard: halve until g does not decrease.
    double trial = t;
    double trial_val = val;
    bool moved = false;
    for (int h = 0; h < 40; ++h) {
      trial = std::clamp(t + step, lo, hi);
      trial_val = g.value(x, trial);
      if (trial_val >= val - 1e-14 * (1.0 + std::abs(val))) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved || std::abs(trial - t) <= 1e-14) {
      if (moved) {
        t = trial;
        val = trial_val;
      }
      break;
    }
    t = trial;
    val = trial_val;
  }
  const double gt = g.dTau(x, t);
  MaximizerKind kind = MaximizerKind::Interior;
  if (t <= lo && gt <= 0.0) {
    kind = MaximizerKind::BoundaryLeft;
  } else if (t >= hi && gt >= 0.0) {
    kind = MaximizerKind::BoundaryRight;
  }
  return {t, val, kind};
}

GlobalMax globalMax(const SisdpProblem& problem, const Vector& x,
                    const ReductionOptions& opts) {
  GlobalMax best;
  if (!problem.hasIndexedConstraint()) return best;
  const auto& g = problem.constraint();
  if (const auto& pts = problem.indexPoints()) {
    for (double t : *pts) {
      const double v = g.value(x, t);
      if (v > best.value) best = {t, v};
    }
    return best;
  }
  double grid_max = 0.0;
  bool flat = false;
  const auto refined = refinedGridMaxima(
      problem, x, opts, std::numeric_limits<double>::infinity(), &grid_max,
      &flat);
  for (const auto& r : refined) {
    if (r.value > best.value) best = {r.tau, r.value};
  }
  return best;
}

ReducedModel detectMaximizers(const SisdpProblem& problem, const Vector& x,
                              const ReductionOptions& opts) {
  if (!(opts.deltaRed > 0.0)) {
    throw std::invalid_argument("detectMaximizers: delta_red must be > 0");
  }
  ReducedModel model;
  if (!problem.hasIndexedConstraint()) return model;
  const auto& g = problem.constraint();

  if (const auto& pts = problem.indexPoints()) {
    std::vector<double> values;
    values.reserve(pts->size());
    for (double t : *pts) {
      values.push_back(g.value(x, t));
      model.globalMax = std::max(model.globalMax, values.back());
    }
    for (std::size_t i = 0; i < pts->size(); ++i) {
      if (values[i] > model.globalMax - opts.deltaRed) {
        model.points.push_back(makeMaximizer(problem, x, (*pts)[i], values[i],
                                             MaximizerKind::Discrete));
      }
    }
    return model;
  }

  double grid_max = 0.0;
  bool flat = false;
  const auto refined =
      refinedGridMaxima(problem, x, opts, opts.deltaRed, &grid_max, &flat);
  double best = grid_max;
  for (const auto& r : refined) best = std::max(best, r.value);
  model.globalMax = best;
  for (const auto& r : refined) {
    if (flat || r.value > best - opts.deltaRed) {
      model.points.push_back(makeMaximizer(problem, x, r.tau, r.value, r.kind));
    }
  }
  return model;
}

ImplicitDerivatives implicitDerivatives(const SisdpProblem& problem,
                                        const Vector& x, double tau,
                                        MaximizerKind kind) {
  const auto& g = problem.constraint();
  ImplicitDerivatives d;
  d.grad = g.gradX(x, tau);
  d.hess = g.hessXX(x, tau);
  if (kind != MaximizerKind::Interior) {
    d.tauGrad = Vector::Zero(x.size());
    return d;
  }
  const double gtt = g.d2Tau(x, tau);
  if (!(gtt < -1e-10)) {
    throw DegenerateMaximizer("implicitDerivatives: d2g/dtau2 = " +
                              std::to_string(gtt) + " at tau = " +
                              std::to_string(tau));
  }
  const Vector gxt = g.gradXdTau(x, tau);
  d.tauGrad = -gxt / gtt;
  const Matrix cross = gxt * d.tauGrad.transpose();
  d.hess += 0.5 * (cross + cross.transpose());
  return d;
}

TrackResult track(const ReducedModel& old_model, const ReducedModel& new_model,
                  const Vector& dx, const Vector& y_old, double radius) {
  const int p_old = old_model.size();
  const int p_new = new_model.size();
  std::vector<std::tuple<double, int, int>> pairs;  // residual, new, old
  for (int j = 0; j < p_new; ++j) {
    for (int i = 0; i < p_old; ++i) {
      const auto& o = old_model.points[i];
      const double predicted =
          o.tau + (o.tauGrad.size() == dx.size() ? o.tauGrad.dot(dx) : 0.0);
      const double r = std::abs(new_model.points[j].tau - predicted);
      if (r <= radius) pairs.emplace_back(r, j, i);
    }
  }
  std::sort(pairs.begin(), pairs.end());

  TrackResult out;
  out.map.newToOld.assign(p_new, std::nullopt);
  out.y = Vector::Zero(p_new);
  std::vector<bool> old_used(p_old, false);
  for (const auto& [r, j, i] : pairs) {
    if (out.map.newToOld[j] || old_used[i]) continue;
    out.map.newToOld[j] = i;
    old_used[i] = true;
    if (i < y_old.size()) out.y(j) = y_old(i);
  }
  return out;
}

}  // namespace sisdp
