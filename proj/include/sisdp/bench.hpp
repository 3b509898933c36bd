#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sisdp/exchange.hpp"
#include "sisdp/families.hpp"
#include "sisdp/path_follower.hpp"

namespace sisdp {

enum class Method { Path, Disc };

std::string toString(Method m);
Method parseMethod(const std::string& s);

/// One solver configuration. gamma1 unset means √(m(m+1)/2).
struct RunConfig {
  Method method = Method::Path;
  ScalingKind scaling = ScalingKind::Nt;
  double mu0 = 1.0;
  double beta = 0.8;
  std::optional<double> gamma1;
  double gamma2 = 5.0;
  double c = 1.0 / 2.99;
  double alpha = 0.99;
  double deltaStep = 0.9;
  int gridN = 100;
  double deltaRed = 0.1;
  double theta = 1e-6;
  double tolR0 = 1e-8;
  double muMin = 1e-10;
  double timeLimit = 0.0;
  std::uint64_t seed = 1;

  Schedule schedule(int m) const;
  SolverOptions solverOptions() const;
  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

struct RunOutcome {
  Method method = Method::Path;
  ScalingKind scaling = ScalingKind::Nt;
  std::string status;
  bool success = false;
  double finalR0 = 0.0;
  int iters = 0;  ///< outer iterations; summed over rounds for disc
  double fallbackRate = 0.0;
  int rounds = 0;  ///< 0 for path
  double wallSeconds = 0.0;
  std::optional<double> exponentFit;
  double certifiedViolation = 0.0;  ///< disc only
  std::string message;
  SolveTrace trace;  ///< path trace, or the last inner trace for disc
  std::vector<ExchangeRound> exchangeRounds;
};

/// Solves from the family's standard start. Solver failures are reported in
/// the outcome; invalid input still throws.
RunOutcome runInstance(const Instance& inst, const RunConfig& cfg);

/// Keys final_R0, iters, fallback_rate, rounds, status, exponent_fit.
nlohmann::json summaryJson(const RunOutcome& out);

struct BenchRow {
  std::uint64_t seed = 0;
  Method method = Method::Path;
  ScalingKind scaling = ScalingKind::Nt;
  int iters = 0;
  double finalR0 = 0.0;
  double fallbackRate = 0.0;
  int rounds = 0;
  double wallSeconds = 0.0;
  std::optional<double> exponentFit;
  bool success = false;
  std::string status;
};

BenchRow toBenchRow(const RunOutcome& out, std::uint64_t seed);

/// Means over the rows of one (method, scaling) variant. exponentFit is the
/// mean over rows that have one.
struct BenchAggregate {
  std::string variant;
  int count = 0;
  int successes = 0;
  double meanIters = 0.0;
  double meanFinalR0 = 0.0;
  double meanFallbackRate = 0.0;
  double meanRounds = 0.0;
  double meanWallSeconds = 0.0;
  std::optional<double> meanExponentFit;
};

/// "aho", "nt", "hkm" for path rows, "disc" for disc rows.
std::string variantName(Method m, ScalingKind k);

struct BenchReport {
  std::vector<BenchRow> rows;

  /// Variants in first-appearance order.
  std::vector<BenchAggregate> aggregates() const;
};

struct BenchSpec {
  Family family = Family::LinearEig;
  int m = 10;
  int q = 9;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> variants{"aho", "nt", "hkm", "disc"};
  RunConfig base;
};

/// Runs every variant on every seed. A failing instance becomes a row with
/// success = false; generation errors become a row with status
/// "generation_failed".
BenchReport runBench(const BenchSpec& spec, std::ostream* progress = nullptr);

Instance generateInstance(Family family, int m, int q, std::uint64_t seed);

void writeBenchRowsCsv(const BenchReport& report, std::ostream& out);
void writeBenchTable(const BenchReport& report, std::ostream& out);
nlohmann::json benchJson(const BenchReport& report);

}  // namespace sisdp
