// sisdp: instance generation, single solves, and the benchmark grid.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sisdp/bench.hpp"

using namespace sisdp;

namespace {

constexpr int kExitSolverFailure = 1;
constexpr int kExitBadInput = 2;

struct ConfigFlags {
  std::string method = "path";
  std::string scaling = "nt";
  RunConfig cfg;
};

void addConfigFlags(CLI::App* app, ConfigFlags& f, bool withMethod) {
  if (withMethod) {
    app->add_option("--method", f.method, "path or disc")
        ->check(CLI::IsMember({"path", "disc"}))
        ->capture_default_str();
    app->add_option("--scaling", f.scaling,
                    "aho, nt or hkm (inner scaling for disc)")
        ->check(CLI::IsMember({"aho", "nt", "hkm"}))
        ->capture_default_str();
  }
  RunConfig& c = f.cfg;
  app->add_option("--mu0", c.mu0, "initial barrier parameter")
      ->capture_default_str();
  app->add_option("--beta", c.beta)->capture_default_str();
  app->add_option_function<double>(
      "--gamma1", [&c](double v) { c.gamma1 = v; },
      "neighbourhood constant (default sqrt(m(m+1)/2))");
  app->add_option("--gamma2", c.gamma2)->capture_default_str();
  app->add_option("--c", c.c)->capture_default_str();
  app->add_option("--alpha", c.alpha)->capture_default_str();
  app->add_option("--delta-step", c.deltaStep, "fraction-to-boundary factor")
      ->capture_default_str();
  app->add_option("--grid-n", c.gridN, "index-set grid intervals")
      ->capture_default_str();
  app->add_option("--delta-red", c.deltaRed, "local-maximizer radius")
      ->capture_default_str();
  app->add_option("--theta", c.theta, "exchange violation threshold")
      ->capture_default_str();
  app->add_option("--tol-r0", c.tolR0)->capture_default_str();
  app->add_option("--mu-min", c.muMin)->capture_default_str();
  app->add_option("--time-limit", c.timeLimit,
                  "seconds per solve, 0 for none")
      ->capture_default_str();
}

RunConfig finish(const ConfigFlags& f) {
  RunConfig c = f.cfg;
  c.method = parseMethod(f.method);
  c.scaling = parseScaling(f.scaling);
  return c;
}

// "" -> none, "3" -> {3}, "1:10" -> 1..10, "1,4,7" -> list; ranges and lists
// may be mixed.
std::vector<std::uint64_t> parseSeeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        const auto a = std::stoull(item.substr(0, colon));
        const auto b = std::stoull(item.substr(colon + 1));
        for (auto k = a; k <= b; ++k) out.push_back(k);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("--seeds: cannot parse '" + item + "'");
    }
  }
  return out;
}

std::ofstream openOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

void writeOutputs(const RunOutcome& o, const std::string& trace,
                  const std::string& summary, const std::string& rounds) {
  if (!trace.empty()) {
    auto out = openOut(trace);
    writeTraceCsv(o.trace, out);
  }
  if (!rounds.empty()) {
    auto out = openOut(rounds);
    writeRoundsCsv(o.exchangeRounds, out);
  }
  if (!summary.empty()) {
    auto out = openOut(summary);
    out << summaryJson(o).dump(2) << '\n';
  }
}

int cmdGenerate(const std::string& family, int m, int q, int count,
                std::uint64_t seed, const std::string& dir) {
  const Family fam = parseFamily(family);
  std::filesystem::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    const Instance inst = generateInstance(fam, m, q, s);
    const std::string path = (std::filesystem::path(dir) /
                              (familyName(fam) + "_m" + std::to_string(m) +
                               "_seed" + std::to_string(s) + ".json"))
                                 .string();
    saveInstance(inst, path);
    std::cout << path << '\n';
  }
  return 0;
}

int cmdSolve(const std::string& problem, const ConfigFlags& flags,
             const std::string& trace, const std::string& summary,
             const std::string& rounds) {
  const RunConfig cfg = finish(flags);
  const Instance inst = loadInstance(problem);
  const RunOutcome o = runInstance(inst, cfg);
  writeOutputs(o, trace, summary, rounds);
  std::cout << summaryJson(o).dump(2) << '\n';
  return o.success ? 0 : kExitSolverFailure;
}

int cmdBench(const std::string& family, int m, int q, const std::string& seeds,
             const std::string& variants, const ConfigFlags& flags,
             const std::string& csv, const std::string& json, bool quiet) {
  BenchSpec spec;
  spec.family = parseFamily(family);
  spec.m = m;
  spec.q = q;
  spec.seeds = parseSeeds(seeds);
  spec.base = finish(flags);
  spec.base.validate();
  spec.variants.clear();
  std::stringstream ss(variants);
  std::string v;
  while (std::getline(ss, v, ',')) {
    if (v.empty()) continue;
    if (v != "disc") parseScaling(v);
    spec.variants.push_back(v);
  }
  const BenchReport report = runBench(spec, quiet ? nullptr : &std::cerr);
  writeBenchTable(report, std::cout);
  if (!csv.empty()) {
    auto out = openOut(csv);
    writeBenchRowsCsv(report, out);
  }
  if (!json.empty()) {
    auto out = openOut(json);
    out << benchJson(report).dump(2) << '\n';
  }
  return 0;
}

int cmdCompare(const std::string& problem, const ConfigFlags& flags) {
  const Instance inst = loadInstance(problem);
  const RunConfig base = finish(flags);
  BenchReport report;
  for (const std::string v : {"aho", "nt", "hkm", "disc"}) {
    RunConfig cfg = base;
    if (v == "disc") {
      cfg.method = Method::Disc;
    } else {
      cfg.method = Method::Path;
      cfg.scaling = parseScaling(v);
    }
    report.rows.push_back(toBenchRow(runInstance(inst, cfg), cfg.seed));
  }
  writeBenchTable(report, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path-following solver for semi-infinite SDPs"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write random test instances");
  std::string genFamily = "linear";
  int genM = 10, genQ = 9, genCount = 10;
  std::uint64_t genSeed = 1;
  std::string genDir = ".";
  gen->add_option("--family", genFamily, "linear or nonlinear")
      ->capture_default_str();
  gen->add_option("--m", genM)->capture_default_str();
  gen->add_option("--q", genQ, "polynomial degree (linear)")
      ->capture_default_str();
  gen->add_option("--count", genCount)->capture_default_str();
  gen->add_option("--seed", genSeed, "first seed; files use seed..seed+count-1")
      ->capture_default_str();
  gen->add_option("--out", genDir, "output directory")->capture_default_str();

  // solve
  auto* solve = app.add_subcommand("solve", "solve one problem file");
  ConfigFlags solveFlags;
  std::string solveProblem, trace, summary, rounds;
  solve->add_option("--problem", solveProblem, "problem JSON")->required();
  addConfigFlags(solve, solveFlags, true);
  solve->add_option("--seed", solveFlags.cfg.seed)->capture_default_str();
  solve->add_option("--trace", trace, "per-iteration CSV");
  solve->add_option("--summary", summary, "summary JSON");
  solve->add_option("--rounds", rounds, "exchange rounds CSV (disc)");

  // bench
  auto* bench = app.add_subcommand("bench", "run the method grid over seeds");
  ConfigFlags benchFlags;
  std::string benchFamily = "linear", seeds = "1:10",
              variants = "aho,nt,hkm,disc", benchCsv, benchJsonPath;
  int benchM = 10, benchQ = 9;
  bool quiet = false;
  bench->add_option("--family", benchFamily)->capture_default_str();
  bench->add_option("--m", benchM)->capture_default_str();
  bench->add_option("--q", benchQ)->capture_default_str();
  bench->add_option("--seeds", seeds, "e.g. 1:10 or 1,3,5; empty for none")
      ->capture_default_str();
  bench->add_option("--variants", variants)->capture_default_str();
  addConfigFlags(bench, benchFlags, false);
  bench->add_option("--csv", benchCsv, "per-run rows");
  bench->add_option("--json", benchJsonPath, "rows and aggregates");
  bench->add_flag("--quiet", quiet, "no per-run progress on stderr");

  // compare
  auto* compare =
      app.add_subcommand("compare", "all methods on one problem file");
  ConfigFlags cmpFlags;
  std::string cmpProblem;
  compare->add_option("--problem", cmpProblem, "problem JSON")->required();
  addConfigFlags(compare, cmpFlags, false);
  compare->add_option("--seed", cmpFlags.cfg.seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmdGenerate(genFamily, genM, genQ, genCount, genSeed,
                                 genDir);
    if (*solve) return cmdSolve(solveProblem, solveFlags, trace, summary,
                                rounds);
    if (*bench) {
      return cmdBench(benchFamily, benchM, benchQ, seeds, variants, benchFlags,
                      benchCsv, benchJsonPath, quiet);
    }
    if (*compare) return cmdCompare(cmpProblem, cmpFlags);
  } catch (const ProblemFormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  }
  return 0;
}
