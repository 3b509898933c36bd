#include <set>
#include <sstream>

#include "support.hpp"

#include "sisdp/exchange.hpp"
#include "sisdp/families.hpp"

using namespace sisdp;
using namespace testing;

namespace {

std::shared_ptr<LambdaConstraint> shifted(double shift) {
  auto g = std::make_shared<LambdaConstraint>();
  g->g = [shift](const Vector& x, double t) { return x(0) + shift + t; };
  g->gx = [](const Vector&, double) { return Vector::Ones(1); };
  g->gt = [](const Vector&, double) { return 1.0; };
  return g;
}

// x₀ − 1 + sin(9πτ) + 0.3τ: five interior peaks of unequal height
std::shared_ptr<LambdaConstraint> multimodal() {
  const double w = 9 * M_PI;
  auto g = std::make_shared<LambdaConstraint>();
  g->g = [w](const Vector& x, double t) { return x(0) - 1 + std::sin(w * t) + 0.3 * t; };
  g->gx = [](const Vector&, double) { return Vector::Ones(1); };
  g->gt = [w](const Vector&, double t) { return w * std::cos(w * t) + 0.3; };
  g->gtt = [w](const Vector&, double t) { return -w * w * std::sin(w * t); };
  return g;
}

// Dense argmax on 10⁵ points, then ternary search between the neighbours.
double denseArgmax(const std::function<double(double)>& g) {
  const int n = 100000;
  const double h = 1.0 / (n - 1);
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (g(i * h) > g(best * h)) best = i;
  double lo = std::max(0.0, (best - 1) * h), hi = std::min(1.0, (best + 1) * h);
  for (int it = 0; it < 200; ++it) {
    const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
    if (g(a) < g(b)) lo = a;
    else hi = b;
  }
  return 0.5 * (lo + hi);
}

// min x₀ s.t. F(x) = x₀ ⪰ 0 and g ≤ 0
SisdpProblem toyWith(std::shared_ptr<const IndexedConstraint> g) {
  return SisdpProblem(std::make_shared<LinearObjective>(Vector::Ones(1)), std::move(g),
                      {SymMatrix::zero(1), SymMatrix::identity(1)}, {0.0, 1.0});
}

void checkExchange(const SisdpProblem& p, const Vector& x0, int m) {
  ExchangeOptions opts;
  const ExchangeResult r = solveExchange(p, x0, Schedule::defaults(m), opts);
  REQUIRE(r.success);
  CHECK(r.certifiedViolation <= opts.theta + 1e-8);
  CHECK(denseGridViolation(p, r.x()) == r.certifiedViolation);
  std::set<double> seen(r.indices.begin(), r.indices.end());
  CHECK(seen.size() == r.indices.size());
  CHECK(r.indices.size() == r.added.size() + 2);
  CHECK(r.rounds.size() == r.added.size() + 1);
  for (double t : r.indices) {
    CHECK(t >= p.indexSet().lo);
    CHECK(t <= p.indexSet().hi);
  }
  for (std::size_t i = 0; i < r.rounds.size(); ++i) {
    CHECK(r.rounds[i].round == static_cast<int>(i));
    CHECK(r.rounds[i].nIndices == static_cast<int>(i) + 2);
  }
}

}  // namespace

TEST_CASE("most violated index") {
  const SisdpProblem p = scalarProblem(shifted(-0.3), 1);
  CHECK_THROWS_AS(mostViolated(p, Vector::Zero(1), 0.0), std::invalid_argument);

  const auto t = mostViolated(p, Vector::Zero(1), 1e-6);
  REQUIRE(t);
  CHECK(*t == doctest::Approx(1.0));

  // strictly feasible
  CHECK_FALSE(mostViolated(p, Vector::Constant(1, -2.0), 1e-6));
}

TEST_CASE("most violated index agrees with a dense oracle") {
  const SisdpProblem p = scalarProblem(multimodal(), 1);
  forAll(20, 501, [&](Rng& rng, int, std::string& why) {
    const Vector x = Vector::Constant(1, rng.uniform(0.5, 1.5));
    const auto t = mostViolated(p, x, 1e-6);
    if (!t) {
      why = "no violation reported";
      return false;
    }
    const double oracle = denseArgmax([&](double s) { return p.constraint().value(x, s); });
    why = describe(std::abs(*t - oracle), 1e-6);
    return std::abs(*t - oracle) <= 1e-6;
  });
}

TEST_CASE("inactive constraint takes one round") {
  const SisdpProblem p = toyWith(shifted(-5.0));
  ExchangeOptions opts;
  const ExchangeResult r = solveExchange(p, Vector::Ones(1), Schedule::defaults(1), opts);
  REQUIRE(r.success);
  CHECK(r.rounds.size() == 1);
  CHECK(r.added.empty());
  CHECK(r.finalR0 <= 1e-8);
}

TEST_CASE("exchange on a linear instance") {
  const auto inst = generateLinearInstance(4, 4, 2);
  checkExchange(buildProblem(inst), familyStart(Family::LinearEig, 4), 4);
}

TEST_CASE("exchange on a nonlinear instance") {
  const auto inst = generateNonlinearInstance(3, 4);
  checkExchange(buildProblem(inst), familyStart(Family::NonlinearQuartic, 3), 3);
}

TEST_CASE("rounds csv") {
  std::vector<ExchangeRound> rounds(2);
  rounds[1].round = 1;
  rounds[1].nIndices = 3;
  rounds[1].maxViolation = 0.25;
  std::ostringstream s;
  writeRoundsCsv(rounds, s);
  std::istringstream in(s.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "round,n_indices,inner_iters,max_violation,wall_ms");
  int n = 0;
  while (std::getline(in, line)) ++n;
  CHECK(n == 2);
  CHECK(s.str().find("1,3,0,2.50000000000000000e-01,") != std::string::npos);
}

TEST_CASE("exchange continues past an inner solve that stalls at the mu floor") {
  // seed 5 has inner solves ending just above the R_0 tolerance
  const auto inst = generateLinearInstance(10, 9, 5);
  const SisdpProblem p = buildProblem(inst);
  ExchangeOptions opts;
  const ExchangeResult r = solveExchange(p, familyStart(Family::LinearEig, 10), Schedule::defaults(10), opts);
  bool stalled = false;
  for (const auto& row : r.rounds) stalled = stalled || row.innerStatus != SolveStatus::Converged;
  CHECK(stalled);
  CHECK(r.success);
  CHECK(r.certifiedViolation <= opts.theta + 1e-8);
}
