#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sisdp/families.hpp"
#include "sisdp/reduction.hpp"

using namespace sisdp;
using namespace testing;

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Uniform point of [-1,1]^n.
Vector randomPoint(Rng& rng, const SisdpProblem& p) {
  return rng.vector(p.n(), -1.0, 1.0);
}

struct FdReport {
  double worst = 0.0;
  std::string what;
  int interior = 0;
  void add(double e, const std::string& w) {
    if (e > worst) {
      worst = e;
      what = w;
    }
  }
};

// Analytic derivatives of f and g against central differences at one point.
void checkOracles(const SisdpProblem& p, const Vector& x, double tau,
                  FdReport& r) {
  const auto& f = p.objective();
  r.add(relErr(f.gradient(x), fdGradient([&](const Vector& z) { return f.value(z); }, x)),
        "grad f");
  r.add(relErr(f.hessian(x),
               fdJacobian([&](const Vector& z) { return f.gradient(z); }, x)),
        "hess f");

  const auto& g = p.constraint();
  r.add(relErr(g.gradX(x, tau),
               fdGradient([&](const Vector& z) { return g.value(z, tau); }, x)),
        "grad_x g");
  r.add(relErr(g.hessXX(x, tau),
               fdJacobian([&](const Vector& z) { return g.gradX(z, tau); }, x)),
        "hess_xx g");
  const double h = 1e-6;
  const double t0 = std::clamp(tau, h, 1.0 - h);
  auto scalarRel = [](double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::abs(b));
  };
  r.add(scalarRel(g.dTau(x, t0),
                  (g.value(x, t0 + h) - g.value(x, t0 - h)) / (2 * h)),
        "dg/dtau");
  r.add(scalarRel(g.d2Tau(x, t0),
                  (g.dTau(x, t0 + h) - g.dTau(x, t0 - h)) / (2 * h)),
        "d2g/dtau2");
  r.add(relErr(g.gradXdTau(x, t0),
               fdGradient([&](const Vector& z) { return g.dTau(z, t0); }, x)),
        "grad_x dg/dtau");
}

// The locally followed maximum near τ₀: refine from τ₀ at x.
RefinedPoint follow(const SisdpProblem& p, const Vector& x, double tau0) {
  return refineMaximizer(p.constraint(), x, tau0, p.indexSet().lo,
                         p.indexSet().hi, 0.01);
}

// Reduced derivatives of every maximizer at x against differences of the
// followed maximum.
void checkReduced(const SisdpProblem& p, const Vector& x, FdReport& r) {
  const ReducedModel model = detectMaximizers(p, x);
  for (const auto& mx : model.points) {
    if (mx.kind != MaximizerKind::Interior) {
      r.add(relErr(mx.grad, p.constraint().gradX(x, mx.tau)), "boundary grad");
      continue;
    }
    // keep clear of nearly degenerate peaks, where differences are unstable
    if (p.constraint().d2Tau(x, mx.tau) > -1e-2) continue;
    ++r.interior;
    auto tauAt = [&](const Vector& z) { return follow(p, z, mx.tau).tau; };
    auto ghat = [&](const Vector& z) { return follow(p, z, mx.tau).value; };
    auto gradAt = [&](const Vector& z) {
      const RefinedPoint q = follow(p, z, mx.tau);
      return implicitDerivatives(p, z, q.tau, q.kind).grad;
    };
    const double h = 1e-5;
    r.add(relErr(mx.tauGrad, fdGradient(tauAt, x, h)), "grad tau_i");
    r.add(relErr(mx.grad, fdGradient(ghat, x, h)), "grad g_hat");
    r.add(relErr(mx.hess, fdJacobian(gradAt, x, h)), "hess g_hat");
    r.add((mx.hess - mx.hess.transpose()).norm(), "hess g_hat symmetry");
  }
}

}  // namespace

TEST_CASE("symmetric vectorization") {
  const Vector x = vectorizeSym(SymMatrix::identity(2));
  CHECK(x(0) == 1.0);
  CHECK(x(1) == 0.0);
  CHECK(x(2) == 1.0);
  const auto basis = symBasis(2);
  CHECK((basis[0] - diag({1, 0})).frobeniusNorm() == 0.0);
  CHECK((basis[1] - sym2(0, 1, 0)).frobeniusNorm() == 0.0);
  CHECK((basis[2] - diag({0, 1})).frobeniusNorm() == 0.0);

  const Vector y = vectorizeSym(sym2(1, 2, 3));
  CHECK(y(0) == 1.0);
  CHECK(y(1) == 2.0);
  CHECK(y(2) == 3.0);

  Rng rng(2);
  for (int m = 1; m <= 6; ++m) {
    const SymMatrix a = rng.sym(m);
    CHECK((unvectorizeSym(vectorizeSym(a), m) - a).frobeniusNorm() == 0.0);
    // Σ xᵢFᵢ = X
    const Vector v = vectorizeSym(a);
    SymMatrix s(m);
    const auto b = symBasis(m);
    for (int i = 0; i < v.size(); ++i) s.axpy(v(i), b[i]);
    CHECK((s - a).frobeniusNorm() <= 1e-15);
  }
}

TEST_CASE("one-dimensional linear instance is pinned by the trace row") {
  LinearEigInstance inst;
  inst.m = 1;
  inst.q = 0;
  inst.a0 = SymMatrix::identity(1);
  inst.coeffs = {SymMatrix::identity(1)};
  const SisdpProblem p = buildLinearEig(inst);
  REQUIRE(p.n() == 1);
  Vector x(1);
  x << 0.3;
  CHECK(p.objective().value(x) == doctest::Approx(-0.3));
  CHECK(p.constraint().value(x, 0.7) == doctest::Approx(-0.3));
  CHECK(p.F(x)(0, 0) == doctest::Approx(0.3));
  REQUIRE(p.numEqualities() == 1);
  CHECK(p.equalityMatrix()(0, 0) == 1.0);
  CHECK(p.equalityRhs()(0) == 1.0);
  CHECK(p.objective().hessian(x).norm() == 0.0);
}

TEST_CASE("linear family: constant gradient, zero Hessians, affine g") {
  const SisdpProblem p = buildLinearEig(generateLinearInstance(3, 4, 7));
  Rng rng(8);
  const Vector a = randomPoint(rng, p), b = randomPoint(rng, p);
  CHECK((p.objective().gradient(a) - p.objective().gradient(b)).norm() == 0.0);
  CHECK(p.objective().hessian(a).norm() == 0.0);
  for (double t : {0.0, 0.3, 1.0}) CHECK(p.constraint().hessXX(a, t).norm() == 0.0);
}

TEST_CASE("nonlinear family at the origin") {
  const auto inst = generateNonlinearInstance(4, 3);
  const SisdpProblem p = buildNonlinearQuartic(inst);
  const Vector x0 = Vector::Zero(p.n());
  CHECK(p.objective().value(x0) == 0.0);
  CHECK((p.objective().gradient(x0) - inst.c).norm() == 0.0);
  // F(0) = κI
  CHECK((p.F(x0) - inst.kappa * SymMatrix::identity(4)).frobeniusNorm() <= 1e-15);
  const int n = p.n();
  for (int k = 0; k <= 1000; ++k) {
    const double t = k / 1000.0;
    double h = -std::sin(9 * M_PI * t) - 2.0;
    for (int i = 1; i <= n; ++i) h -= std::pow(t, 2 * i);
    REQUIRE(p.constraint().value(x0, t) == doctest::Approx(h).epsilon(1e-12));
    REQUIRE(h < 0.0);
  }
}

TEST_CASE("quartic objective with no quartic term is the plain quadratic") {
  const int n = 3;
  QuarticObjective f(Matrix::Identity(n, n), Vector::Zero(n), 0.0);
  Rng rng(4);
  const Vector x = rng.vector(n);
  CHECK(f.value(x) == doctest::Approx(0.5 * x.squaredNorm()));
  CHECK((f.hessian(x) - Matrix::Identity(n, n)).norm() == 0.0);
}

TEST_CASE("property: oracle derivatives pass central differences, 50 points per family") {
  for (Family fam : {Family::LinearEig, Family::NonlinearQuartic}) {
    const Instance inst = fam == Family::LinearEig
                              ? Instance(generateLinearInstance(4, 9, 21))
                              : Instance(generateNonlinearInstance(4, 21));
    const SisdpProblem p = buildProblem(inst);
    FdReport report;
    Rng rng(99);
    for (int k = 0; k < 50; ++k) {
      const Vector x = randomPoint(rng, p);
      checkOracles(p, x, rng.uniform(0.0, 1.0), report);
    }
    INFO(familyName(fam) << ": worst " << report.what);
    CHECK(report.worst <= 1e-5);
  }
}

TEST_CASE("property: reduced constraint derivatives pass central differences, 50 points per family") {
  for (Family fam : {Family::LinearEig, Family::NonlinearQuartic}) {
    const Instance inst = fam == Family::LinearEig
                              ? Instance(generateLinearInstance(3, 9, 5))
                              : Instance(generateNonlinearInstance(3, 5));
    const SisdpProblem p = buildProblem(inst);
    FdReport report;
    Rng rng(123);
    for (int k = 0; k < 50; ++k) checkReduced(p, randomPoint(rng, p), report);
    INFO(familyName(fam) << ": worst " << report.what << ", "
                         << report.interior << " interior maximizers");
    CHECK(report.interior >= 10);
    CHECK(report.worst <= 1e-5);
  }
}

TEST_CASE("generator is deterministic per seed") {
  const auto a = toJson(generateLinearInstance(5, 9, 42)).dump();
  const auto b = toJson(generateLinearInstance(5, 9, 42)).dump();
  CHECK(a == b);
  CHECK(a != toJson(generateLinearInstance(5, 9, 43)).dump());
  CHECK(toJson(generateNonlinearInstance(5, 42)).dump() ==
        toJson(generateNonlinearInstance(5, 42)).dump());

  const auto dir = std::filesystem::temp_directory_path() / "sisdp_gen_test";
  std::filesystem::create_directories(dir);
  saveInstance(generateLinearInstance(4, 9, 1), (dir / "a.json").string());
  saveInstance(generateLinearInstance(4, 9, 1), (dir / "b.json").string());
  CHECK(readFile((dir / "a.json").string()) == readFile((dir / "b.json").string()));
}

TEST_CASE("accepted linear instances violate the constraint at the relaxed optimum") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const LinearEigInstance inst = generateLinearInstance(10, 9, seed);
    CHECK(inst.m == 10);
    CHECK(inst.q == 9);
    CHECK(inst.coeffs.size() == 10);
    // oracle: top eigenvector of A₀ from a general eigensolver
    Eigen::SelfAdjointEigenSolver<Matrix> es(inst.a0.dense());
    const Vector v = es.eigenvectors().col(inst.m - 1);
    const SymMatrix xr = SymMatrix::symmetrize(v * v.transpose());
    double worst = 1e300;
    for (int k = 0; k <= 20; ++k) worst = std::min(worst, inner(inst.a(k / 20.0), xr));
    CHECK(worst <= -1e-3);
  }
}

TEST_CASE("nonlinear instances draw entries from [-1, 1] with the standard weights") {
  const auto inst = generateNonlinearInstance(10, 1);
  CHECK(inst.M.rows() == 55);
  CHECK(inst.M.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(inst.c.cwiseAbs().maxCoeff() <= 1.0);
  CHECK((inst.M - inst.M.transpose()).norm() == 0.0);
  CHECK(inst.omega == 0.01);
  CHECK(inst.kappa == 0.01);
}

TEST_CASE("problem JSON round trip") {
  for (const Instance& inst : {Instance(generateLinearInstance(3, 2, 9)),
                               Instance(generateNonlinearInstance(3, 9))}) {
    const auto j = toJson(inst);
    CHECK(toJson(instanceFromJson(j)).dump() == j.dump());
  }
}

TEST_CASE("malformed problem files name the offending field") {
  auto errorFor = [](const nlohmann::json& j) -> std::string {
    try {
      instanceFromJson(j);
    } catch (const ProblemFormatError& e) {
      return e.what();
    }
    return "";
  };
  nlohmann::json good = toJson(Instance(generateLinearInstance(2, 1, 1)));

  auto j = good;
  j.erase("A0");
  CHECK(errorFor(j).find("A0") != std::string::npos);

  j = good;
  j["m"] = "two";
  CHECK(errorFor(j).find("'m'") != std::string::npos);

  j = good;
  j["coeffs"][0][1][0] = "x";
  CHECK(errorFor(j).find("coeffs[0][1][0]") != std::string::npos);

  j = good;
  j["family"] = "quadratic";
  CHECK(errorFor(j).find("quadratic") != std::string::npos);

  auto nl = toJson(Instance(generateNonlinearInstance(2, 1)));
  nl["omega"] = -1.0;
  CHECK(errorFor(nl).find("omega") != std::string::npos);
  nl = toJson(Instance(generateNonlinearInstance(2, 1)));
  nl["c"].erase(0);
  CHECK(errorFor(nl).find("'c'") != std::string::npos);
}
