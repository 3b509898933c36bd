#include "sisdp/families.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace sisdp {

SymMatrix LinearEigInstance::a(double tau) const {
  SymMatrix out(m);
  double p = 1.0;
  for (const auto& cl : coeffs) {
    out.axpy(p, cl);
    p *= tau;
  }
  return out;
}

Family familyOf(const Instance& inst) {
  return std::holds_alternative<LinearEigInstance>(inst)
             ? Family::LinearEig
             : Family::NonlinearQuartic;
}

std::string familyName(Family f) {
  return f == Family::LinearEig ? "linear_eig" : "nonlinear_quartic";
}

Family parseFamily(const std::string& name) {
  if (name == "linear_eig" || name == "linear") return Family::LinearEig;
  if (name == "nonlinear_quartic" || name == "nonlinear") {
    return Family::NonlinearQuartic;
  }
  throw ProblemFormatError("unknown family '" + name + "'");
}

SisdpProblem buildLinearEig(const LinearEigInstance& inst) {
  const int m = inst.m;
  auto basis = symBasis(m);
  const int n = static_cast<int>(basis.size());

  Vector c(n);
  Matrix poly(n, inst.q + 1);
  Vector trace_row(n);
  for (int i = 0; i < n; ++i) {
    c(i) = -inner(inst.a0, basis[i]);
    for (int l = 0; l <= inst.q; ++l) poly(i, l) = -inner(inst.coeffs[l], basis[i]);
    trace_row(i) = basis[i].trace();
  }

  std::vector<SymMatrix> affine;
  affine.reserve(n + 1);
  affine.push_back(SymMatrix::zero(m));
  for (auto& b : basis) affine.push_back(std::move(b));

  return SisdpProblem(
      std::make_shared<LinearObjective>(std::move(c)),
      std::make_shared<AffinePolynomialConstraint>(std::move(poly), nullptr),
      std::move(affine), inst.index_set, {LinearEquality{trace_row, 1.0}});
}

SisdpProblem buildNonlinearQuartic(const NonlinearQuarticInstance& inst) {
  const int m = inst.m;
  auto basis = symBasis(m);
  const int n = static_cast<int>(basis.size());

  auto offset = [n](double tau) {
    // h(τ) = −Σ τ^{2i} − sin(9πτ) − 2
    ScalarJet h;
    const double w = 9.0 * M_PI;
    h.value = -std::sin(w * tau) - 2.0;
    h.d1 = -w * std::cos(w * tau);
    h.d2 = w * w * std::sin(w * tau);
    const double t2 = tau * tau;
    double p = 1.0;  // τ^{2i-2}
    for (int i = 1; i <= n; ++i) {
      const double e = 2.0 * i;
      h.value -= p * t2;
      h.d1 -= e * p * tau;
      h.d2 -= e * (e - 1.0) * p;
      p *= t2;
    }
    return h;
  };

  std::vector<SymMatrix> affine;
  affine.reserve(n + 1);
  affine.push_back(inst.kappa * SymMatrix::identity(m));
  for (auto& b : basis) affine.push_back(std::move(b));

  return SisdpProblem(
      std::make_shared<QuarticObjective>(inst.M, inst.c, inst.omega),
      std::make_shared<AffinePolynomialConstraint>(Matrix::Identity(n, n),
                                                   offset),
      std::move(affine), inst.index_set);
}

SisdpProblem buildProblem(const Instance& inst) {
  return std::visit(
      [](const auto& i) -> SisdpProblem {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, LinearEigInstance>) {
          return buildLinearEig(i);
        } else {
          return buildNonlinearQuartic(i);
        }
      },
      inst);
}

SymMatrix relaxedLinearOptimum(const LinearEigInstance& inst) {
  const auto e = eig(inst.a0);
  const Vector v = e.vectors.col(inst.m - 1);
  return SymMatrix::symmetrize(v * v.transpose());
}

double gridMinimumLoad(const LinearEigInstance& inst, const SymMatrix& x) {
  const auto& t = inst.index_set;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 20; ++i) {
    const double tau = t.lo + i * (t.hi - t.lo) / 20.0;
    best = std::min(best, inner(inst.a(tau), x));
  }
  return best;
}

namespace {

SymMatrix uniformSym(int m, std::mt19937_64& rng,
                     std::uniform_real_distribution<double>& u) {
  SymMatrix s(m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) s.set(i, j, u(rng));
  }
  return s;
}

}  // namespace

LinearEigInstance generateLinearInstance(int m, int q, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("generateLinearInstance: m < 2");
  if (q < 0) throw std::invalid_argument("generateLinearInstance: q < 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    LinearEigInstance inst;
    inst.m = m;
    inst.q = q;
    inst.a0 = uniformSym(m, rng, u);
    for (int l = 0; l <= q; ++l) inst.coeffs.push_back(uniformSym(m, rng, u));
    if (gridMinimumLoad(inst, relaxedLinearOptimum(inst)) <= -1e-3) {
      return inst;
    }
  }
  throw GenerationError("generateLinearInstance: no accepted instance after "
                        "1000 draws");
}

NonlinearQuarticInstance generateNonlinearInstance(int m, std::uint64_t seed,
                                                   double omega,
                                                   double kappa) {
  if (m < 1) throw std::invalid_argument("generateNonlinearInstance: m < 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  NonlinearQuarticInstance inst;
  inst.m = m;
  const int n = svecLength(m);
  inst.M = uniformSym(n, rng, u).dense();
  inst.c.resize(n);
  for (int i = 0; i < n; ++i) inst.c(i) = u(rng);
  inst.omega = omega;
  inst.kappa = kappa;
  return inst;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

json matrixJson(const Matrix& a) {
  json rows = json::array();
  for (int i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw ProblemFormatError(std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) {
    throw ProblemFormatError("field '" + where + "' must be a number");
  }
  return j.get<double>();
}

int positiveInt(const json& j, const char* name, int min_value) {
  const json& v = field(j, name);
  if (!v.is_number_integer() || v.get<long long>() < min_value) {
    throw ProblemFormatError(std::string("field '") + name +
                             "' must be an integer >= " +
                             std::to_string(min_value));
  }
  return v.get<int>();
}

Matrix denseMatrix(const json& j, const std::string& name, int rows,
                   int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    throw ProblemFormatError("field '" + name + "' must have " +
                             std::to_string(rows) + " rows");
  }
  Matrix a(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw ProblemFormatError("field '" + name + "' row " +
                               std::to_string(i) + " must have " +
                               std::to_string(cols) + " entries");
    }
    for (int k = 0; k < cols; ++k) {
      a(i, k) = number(row[k], name + "[" + std::to_string(i) + "][" +
                                   std::to_string(k) + "]");
    }
  }
  return a;
}

SymMatrix symmetricMatrix(const json& j, const std::string& name, int dim) {
  const Matrix a = denseMatrix(j, name, dim, dim);
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ProblemFormatError("field '" + name + "' is not symmetric");
  }
  return SymMatrix::fromUpper(a);
}

Interval interval(const json& j) {
  if (!j.contains("T")) return {0.0, 1.0};
  const json& t = j.at("T");
  if (!t.is_array() || t.size() != 2) {
    throw ProblemFormatError("field 'T' must be [T_min, T_max]");
  }
  Interval out{number(t[0], "T[0]"), number(t[1], "T[1]")};
  if (!(out.lo < out.hi)) {
    throw ProblemFormatError("field 'T' must satisfy T_min < T_max");
  }
  return out;
}

}  // namespace

nlohmann::json toJson(const Instance& inst) {
  json j;
  if (const auto* lin = std::get_if<LinearEigInstance>(&inst)) {
    j["family"] = "linear_eig";
    j["m"] = lin->m;
    j["q"] = lin->q;
    j["A0"] = matrixJson(lin->a0.dense());
    json coeffs = json::array();
    for (int i = 0; i < lin->m; ++i) {
      json row = json::array();
      for (int k = 0; k < lin->m; ++k) {
        json poly = json::array();
        for (int l = 0; l <= lin->q; ++l) poly.push_back(lin->coeffs[l](i, k));
        row.push_back(std::move(poly));
      }
      coeffs.push_back(std::move(row));
    }
    j["coeffs"] = std::move(coeffs);
    j["T"] = {lin->index_set.lo, lin->index_set.hi};
  } else {
    const auto& nl = std::get<NonlinearQuarticInstance>(inst);
    j["family"] = "nonlinear_quartic";
    j["m"] = nl.m;
    j["M"] = matrixJson(nl.M);
    j["c"] = std::vector<double>(nl.c.data(), nl.c.data() + nl.c.size());
    j["omega"] = nl.omega;
    j["kappa"] = nl.kappa;
    j["T"] = {nl.index_set.lo, nl.index_set.hi};
  }
  return j;
}

Instance instanceFromJson(const nlohmann::json& j) {
  const json& fam = field(j, "family");
  if (!fam.is_string()) {
    throw ProblemFormatError("field 'family' must be a string");
  }
  const Family family = parseFamily(fam.get<std::string>());
  const int m = positiveInt(j, "m", 1);

  if (family == Family::LinearEig) {
    LinearEigInstance inst;
    inst.m = m;
    inst.q = positiveInt(j, "q", 0);
    inst.a0 = symmetricMatrix(field(j, "A0"), "A0", m);
    const json& coeffs = field(j, "coeffs");
    if (!coeffs.is_array() || static_cast<int>(coeffs.size()) != m) {
      throw ProblemFormatError("field 'coeffs' must be an m x m x (q+1) array");
    }
    Matrix per_l = Matrix::Zero(m, m);
    std::vector<Matrix> dense(inst.q + 1, per_l);
    for (int i = 0; i < m; ++i) {
      const json& row = coeffs[i];
      if (!row.is_array() || static_cast<int>(row.size()) != m) {
        throw ProblemFormatError("field 'coeffs[" + std::to_string(i) +
                                 "]' must have m entries");
      }
      for (int k = 0; k < m; ++k) {
        const json& poly = row[k];
        const std::string where =
            "coeffs[" + std::to_string(i) + "][" + std::to_string(k) + "]";
        if (!poly.is_array() || static_cast<int>(poly.size()) != inst.q + 1) {
          throw ProblemFormatError("field '" + where + "' must have q+1 entries");
        }
        for (int l = 0; l <= inst.q; ++l) {
          dense[l](i, k) = number(poly[l], where + "[" + std::to_string(l) + "]");
        }
      }
    }
    for (int l = 0; l <= inst.q; ++l) {
      if ((dense[l] - dense[l].transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ProblemFormatError("field 'coeffs' is not symmetric in (i,j) at l=" +
                                 std::to_string(l));
      }
      inst.coeffs.push_back(SymMatrix::fromUpper(dense[l]));
    }
    inst.index_set = interval(j);
    return inst;
  }

  NonlinearQuarticInstance inst;
  inst.m = m;
  const int n = svecLength(m);
  inst.M = symmetricMatrix(field(j, "M"), "M", n).dense();
  const json& c = field(j, "c");
  if (!c.is_array() || static_cast<int>(c.size()) != n) {
    throw ProblemFormatError("field 'c' must have m(m+1)/2 entries");
  }
  inst.c.resize(n);
  for (int i = 0; i < n; ++i) inst.c(i) = number(c[i], "c[" + std::to_string(i) + "]");
  inst.omega = number(field(j, "omega"), "omega");
  inst.kappa = number(field(j, "kappa"), "kappa");
  if (!(inst.omega > 0.0)) throw ProblemFormatError("field 'omega' must be > 0");
  if (!(inst.kappa > 0.0)) throw ProblemFormatError("field 'kappa' must be > 0");
  inst.index_set = interval(j);
  return inst;
}

Instance loadInstance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ProblemFormatError(std::string("malformed JSON: ") + e.what());
  }
  return instanceFromJson(j);
}

void saveInstance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << toJson(inst).dump(1) << '\n';
}

}  // namespace sisdp
