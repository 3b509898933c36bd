#include "sisdp/bench.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sisdp {

std::string toString(Method m) {
  return m == Method::Path ? "path" : "disc";
}

Method parseMethod(const std::string& s) {
  if (s == "path") return Method::Path;
  if (s == "disc") return Method::Disc;
  throw std::invalid_argument("unknown method '" + s +
                              "' (expected path or disc)");
}

Schedule RunConfig::schedule(int m) const {
  Schedule s = Schedule::defaults(m);
  if (gamma1) s.gamma1 = *gamma1;
  s.gamma2 = gamma2;
  s.c = c;
  s.alpha = alpha;
  s.beta = beta;
  s.deltaStep = deltaStep;
  s.mu = mu0;
  s.eps = s.gamma1 * std::pow(mu0, 1.0 + alpha);
  return s;
}

SolverOptions RunConfig::solverOptions() const {
  SolverOptions o;
  o.scaling = scaling;
  o.reduction.gridN = gridN;
  o.reduction.deltaRed = deltaRed;
  o.tolR0 = tolR0;
  o.muMin = muMin;
  o.timeLimit = timeLimit;
  return o;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument(what);
  };
  if (gridN < 2) fail("grid-n must be at least 2");
  if (!(deltaRed > 0.0)) fail("delta-red must be positive");
  if (!(theta > 0.0)) fail("theta must be positive");
  if (!(tolR0 > 0.0)) fail("tol-r0 must be positive");
  if (!(muMin > 0.0)) fail("mu-min must be positive");
  if (!(timeLimit >= 0.0)) fail("time limit must be non-negative");
  schedule(1).validate();
}

namespace {

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

int instanceDim(const Instance& inst) {
  return std::visit([](const auto& i) { return i.m; }, inst);
}

}  // namespace

RunOutcome runInstance(const Instance& inst, const RunConfig& cfg) {
  cfg.validate();
  const int m = instanceDim(inst);
  const SisdpProblem problem = buildProblem(inst);
  const Schedule sched = cfg.schedule(m);
  const SolverOptions opts = cfg.solverOptions();
  const Vector x0 = familyStart(familyOf(inst), m);

  RunOutcome out;
  out.method = cfg.method;
  out.scaling = cfg.scaling;
  const auto t0 = std::chrono::steady_clock::now();

  if (cfg.method == Method::Path) {
    const Iterate w0 = initialPoint(problem, x0, opts.reduction);
    SolveResult r = algorithm2(problem, w0, sched, opts);
    out.wallSeconds = seconds(t0);
    out.trace = std::move(r.trace);
    out.status = toString(out.trace.status);
    out.finalR0 = out.trace.finalR0;
    out.success = out.finalR0 <= cfg.tolR0;
    out.iters = static_cast<int>(out.trace.rows.size());
    out.fallbackRate = out.trace.fallbackRate();
    out.exponentFit = fitConvergenceExponent(r.history);
    out.message = out.trace.message;
    return out;
  }

  ExchangeOptions eo;
  eo.theta = cfg.theta;
  eo.inner = opts;
  try {
    ExchangeResult r = solveExchange(problem, x0, sched, eo);
    out.wallSeconds = seconds(t0);
    out.rounds = static_cast<int>(r.rounds.size());
    int fb = 0;
    for (const auto& row : r.rounds) out.iters += row.innerIterations;
    out.trace = r.inner.trace;
    for (const auto& row : out.trace.rows) fb += row.fallbackUsed ? 1 : 0;
    // fallback rate of the last inner solve, which produced the answer
    out.fallbackRate = out.trace.rows.empty()
                           ? 0.0
                           : static_cast<double>(fb) / out.trace.rows.size();
    out.finalR0 = r.finalR0;
    out.certifiedViolation = r.certifiedViolation;
    out.success = r.success && r.certifiedViolation <= cfg.theta + 1e-8;
    out.status = r.success ? (out.success ? "converged" : "uncertified")
                           : "exchange_failed";
    out.message = r.message;
    out.exchangeRounds = std::move(r.rounds);
  } catch (const ExchangeError& e) {
    out.wallSeconds = seconds(t0);
    out.status = "exchange_failed";
    out.message = e.what();
  }
  return out;
}

nlohmann::json summaryJson(const RunOutcome& out) {
  nlohmann::json j;
  j["final_R0"] = out.finalR0;
  j["iters"] = out.iters;
  j["fallback_rate"] = out.fallbackRate;
  j["rounds"] = out.rounds;
  j["status"] = out.status;
  j["exponent_fit"] =
      out.exponentFit ? nlohmann::json(*out.exponentFit) : nlohmann::json();
  j["method"] = toString(out.method);
  j["scaling"] = toString(out.scaling);
  j["wall_seconds"] = out.wallSeconds;
  j["success"] = out.success;
  if (out.method == Method::Disc) {
    j["certified_violation"] = out.certifiedViolation;
  }
  if (!out.message.empty()) j["message"] = out.message;
  return j;
}

std::string variantName(Method m, ScalingKind k) {
  return m == Method::Disc ? "disc" : toString(k);
}

BenchRow toBenchRow(const RunOutcome& o, std::uint64_t seed) {
  BenchRow row;
  row.seed = seed;
  row.method = o.method;
  row.scaling = o.scaling;
  row.iters = o.iters;
  row.finalR0 = o.finalR0;
  row.fallbackRate = o.fallbackRate;
  row.rounds = o.rounds;
  row.wallSeconds = o.wallSeconds;
  row.exponentFit = o.exponentFit;
  row.success = o.success;
  row.status = o.status;
  return row;
}

std::vector<BenchAggregate> BenchReport::aggregates() const {
  std::vector<BenchAggregate> aggs;
  std::map<std::string, std::size_t> slot;
  std::vector<int> fitCount;
  for (const auto& r : rows) {
    const std::string v = variantName(r.method, r.scaling);
    auto it = slot.find(v);
    if (it == slot.end()) {
      it = slot.emplace(v, aggs.size()).first;
      aggs.push_back({});
      aggs.back().variant = v;
      fitCount.push_back(0);
    }
    BenchAggregate& a = aggs[it->second];
    a.count += 1;
    a.successes += r.success ? 1 : 0;
    a.meanIters += r.iters;
    a.meanFinalR0 += r.finalR0;
    a.meanFallbackRate += r.fallbackRate;
    a.meanRounds += r.rounds;
    a.meanWallSeconds += r.wallSeconds;
    if (r.exponentFit) {
      a.meanExponentFit = a.meanExponentFit.value_or(0.0) + *r.exponentFit;
      fitCount[it->second] += 1;
    }
  }
  for (std::size_t i = 0; i < aggs.size(); ++i) {
    BenchAggregate& a = aggs[i];
    const double n = a.count;
    a.meanIters /= n;
    a.meanFinalR0 /= n;
    a.meanFallbackRate /= n;
    a.meanRounds /= n;
    a.meanWallSeconds /= n;
    if (a.meanExponentFit) *a.meanExponentFit /= fitCount[i];
  }
  return aggs;
}

Instance generateInstance(Family family, int m, int q, std::uint64_t seed) {
  if (family == Family::LinearEig) return generateLinearInstance(m, q, seed);
  return generateNonlinearInstance(m, seed);
}

BenchReport runBench(const BenchSpec& spec, std::ostream* progress) {
  BenchReport report;
  for (std::uint64_t seed : spec.seeds) {
    std::optional<Instance> inst;
    try {
      inst = generateInstance(spec.family, spec.m, spec.q, seed);
    } catch (const GenerationError&) {
    }
    for (const auto& v : spec.variants) {
      RunConfig cfg = spec.base;
      cfg.seed = seed;
      if (v == "disc") {
        cfg.method = Method::Disc;
      } else {
        cfg.method = Method::Path;
        cfg.scaling = parseScaling(v);
      }
      BenchRow row;
      row.seed = seed;
      row.method = cfg.method;
      row.scaling = cfg.scaling;
      if (!inst) {
        row.status = "generation_failed";
      } else {
        row = toBenchRow(runInstance(*inst, cfg), seed);
      }
      if (progress) {
        *progress << "seed " << seed << ' ' << v << ": " << row.status
                  << " R0=" << row.finalR0 << '\n';
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

namespace {

std::string fmtOpt(const std::optional<double>& v, int prec) {
  if (!v) return "-";
  std::ostringstream s;
  s << std::fixed << std::setprecision(prec) << *v;
  return s.str();
}

}  // namespace

void writeBenchRowsCsv(const BenchReport& report, std::ostream& out) {
  out << "seed,variant,iters,final_R0,fallback_rate,rounds,wall_s,"
         "exponent_fit,success,status\n";
  out << std::scientific
      << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : report.rows) {
    out << r.seed << ',' << variantName(r.method, r.scaling) << ',' << r.iters
        << ',' << r.finalR0 << ',' << r.fallbackRate << ',' << r.rounds << ','
        << r.wallSeconds << ',';
    if (r.exponentFit) out << *r.exponentFit;
    out << ',' << (r.success ? 1 : 0) << ',' << r.status << '\n';
  }
}

void writeBenchTable(const BenchReport& report, std::ostream& out) {
  out << std::left << std::setw(8) << "variant" << std::right << std::setw(6)
      << "runs" << std::setw(6) << "ok" << std::setw(10) << "ave.iter"
      << std::setw(12) << "R0*" << std::setw(10) << "fallback" << std::setw(8)
      << "rounds" << std::setw(10) << "time(s)" << std::setw(9) << "exp.fit"
      << '\n';
  for (const auto& a : report.aggregates()) {
    std::ostringstream r0;
    r0 << std::scientific << std::setprecision(2) << a.meanFinalR0;
    out << std::left << std::setw(8) << a.variant << std::right
        << std::setw(6) << a.count << std::setw(6) << a.successes
        << std::setw(10) << std::fixed << std::setprecision(1) << a.meanIters
        << std::setw(12) << r0.str() << std::setw(10) << std::setprecision(3)
        << a.meanFallbackRate << std::setw(8) << std::setprecision(1)
        << a.meanRounds << std::setw(10) << std::setprecision(3)
        << a.meanWallSeconds << std::setw(9) << fmtOpt(a.meanExponentFit, 3)
        << '\n';
  }
  out << std::defaultfloat;
}

nlohmann::json benchJson(const BenchReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"seed", r.seed},
                    {"variant", variantName(r.method, r.scaling)},
                    {"iters", r.iters},
                    {"final_R0", r.finalR0},
                    {"fallback_rate", r.fallbackRate},
                    {"rounds", r.rounds},
                    {"wall_seconds", r.wallSeconds},
                    {"exponent_fit", r.exponentFit ? nlohmann::json(*r.exponentFit)
                                                   : nlohmann::json()},
                    {"success", r.success},
                    {"status", r.status}});
  }
  nlohmann::json aggs = nlohmann::json::array();
  for (const auto& a : report.aggregates()) {
    aggs.push_back(
        {{"variant", a.variant},
         {"count", a.count},
         {"successes", a.successes},
         {"mean_iters", a.meanIters},
         {"mean_final_R0", a.meanFinalR0},
         {"mean_fallback_rate", a.meanFallbackRate},
         {"mean_rounds", a.meanRounds},
         {"mean_wall_seconds", a.meanWallSeconds},
         {"mean_exponent_fit", a.meanExponentFit
                                   ? nlohmann::json(*a.meanExponentFit)
                                   : nlohmann::json()}});
  }
  return {{"rows", rows}, {"aggregates", aggs}};
}

}  // namespace sisdp
