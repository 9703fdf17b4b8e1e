#include "jacobi/serialize.hpp"

#include <cmath>

namespace jacobi::serialize {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

}  // namespace

Real real_from_json(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const Real x = j.get<Real>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

Json to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v[i]));
  return out;
}

Json to_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Complex complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {real_from_json(j, path), 0.0};
  if (!j.is_array() || j.size() != 2) fail(path, "expected [re, im]");
  return {real_from_json(j[0], path + "[0]"), real_from_json(j[1], path + "[1]")};
}

CVector vector_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of [re, im] pairs");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

CMatrix matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  CMatrix m(rows, rows);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    const CVector row = vector_from_json(j[i], rp);
    if (row.size() != rows) fail(rp, "expected " + std::to_string(rows) + " entries (square matrix)");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

Json to_json(const algebra::ComplexCoefficients& c) {
  return Json{{"eps_a_re", c.eps_a.real()},
              {"eps_a_im", c.eps_a.imag()},
              {"eps_0", c.eps_0},
              {"eps_plus_re", c.eps_plus.real()},
              {"eps_plus_im", c.eps_plus.imag()}};
}

algebra::ComplexCoefficients complex_coefficients_from_json(const Json& j, const std::string& path) {
  algebra::ComplexCoefficients c;
  c.eps_a = {real_from_json(field(j, "eps_a_re", path), path + ".eps_a_re"),
             real_from_json(field(j, "eps_a_im", path), path + ".eps_a_im")};
  c.eps_0 = real_from_json(field(j, "eps_0", path), path + ".eps_0");
  c.eps_plus = {real_from_json(field(j, "eps_plus_re", path), path + ".eps_plus_re"),
                real_from_json(field(j, "eps_plus_im", path), path + ".eps_plus_im")};
  return c;
}

Json to_json(const algebra::RealCoefficients& c) {
  return Json{{"nu1", c.nu1}, {"nu2", c.nu2}, {"veps0", c.veps0}, {"veps1", c.veps1}, {"veps2", c.veps2}};
}

algebra::RealCoefficients real_coefficients_from_json(const Json& j, const std::string& path) {
  algebra::RealCoefficients c;
  c.nu1 = real_from_json(field(j, "nu1", path), path + ".nu1");
  c.nu2 = real_from_json(field(j, "nu2", path), path + ".nu2");
  c.veps0 = real_from_json(field(j, "veps0", path), path + ".veps0");
  c.veps1 = real_from_json(field(j, "veps1", path), path + ".veps1");
  c.veps2 = real_from_json(field(j, "veps2", path), path + ".veps2");
  return c;
}

Json to_json(const algebra::BallCoefficients& c) {
  return Json{{"n", c.n()}, {"eps", to_json(c.eps())}, {"eps0", to_json(c.eps0())}, {"eps_plus", to_json(c.eps_plus())}};
}

algebra::BallCoefficients ball_coefficients_from_json(const Json& j, const std::string& path) {
  const Json& jn = field(j, "n", path);
  if (!jn.is_number_integer() || jn.get<long>() < 1) fail(path + ".n", "expected a positive integer");
  const auto n = static_cast<Eigen::Index>(jn.get<long>());
  CVector eps = vector_from_json(field(j, "eps", path), path + ".eps");
  CMatrix eps0 = matrix_from_json(field(j, "eps0", path), path + ".eps0");
  CMatrix eps_plus = matrix_from_json(field(j, "eps_plus", path), path + ".eps_plus");
  if (eps.size() != n) fail(path + ".eps", "expected " + std::to_string(n) + " entries");
  if (eps0.rows() != n) fail(path + ".eps0", "expected an n x n matrix");
  if (eps_plus.rows() != n) fail(path + ".eps_plus", "expected an n x n matrix");
  try {
    return algebra::BallCoefficients(std::move(eps), std::move(eps0), std::move(eps_plus));
  } catch (const DomainError& e) {
    fail(path, e.what());
  }
}

Json to_json(const geometry::JacobiPoint& p) { return Json{{"z", to_json(p.z)}, {"W", to_json(p.W.W())}}; }

Json to_json(const geometry::FCPoint& p) { return Json{{"eta", to_json(p.eta)}, {"W", to_json(p.W.W())}}; }

}  // namespace jacobi::serialize
