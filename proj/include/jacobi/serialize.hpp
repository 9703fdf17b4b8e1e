#pragma once

#include <string>

#include <json.hpp>

#include "jacobi/algebra.hpp"
#include "jacobi/geometry.hpp"

/// JSON forms of coefficients and points.
///
/// Complex numbers are [re, im] pairs, vectors are arrays of pairs and
/// matrices are row-major arrays of rows of pairs. Readers take the JSON path
/// of the value so that errors name the offending field.
namespace jacobi::serialize {

using Json = nlohmann::json;

Json to_json(Complex c);
Json to_json(const CVector& v);
Json to_json(const CMatrix& m);

Complex complex_from_json(const Json& j, const std::string& path);
CVector vector_from_json(const Json& j, const std::string& path);
CMatrix matrix_from_json(const Json& j, const std::string& path);
Real real_from_json(const Json& j, const std::string& path);

/// {"eps_a_re", "eps_a_im", "eps_0", "eps_plus_re", "eps_plus_im"}
Json to_json(const algebra::ComplexCoefficients& c);
algebra::ComplexCoefficients complex_coefficients_from_json(const Json& j, const std::string& path);

/// {"nu1", "nu2", "veps0", "veps1", "veps2"}
Json to_json(const algebra::RealCoefficients& c);
algebra::RealCoefficients real_coefficients_from_json(const Json& j, const std::string& path);

/// {"n", "eps": [...], "eps0": [[...]], "eps_plus": [[...]]}
Json to_json(const algebra::BallCoefficients& c);
algebra::BallCoefficients ball_coefficients_from_json(const Json& j, const std::string& path);

/// {"z": [...], "W": [[...]]}
Json to_json(const geometry::JacobiPoint& p);
/// {"eta": [...], "W": [[...]]}
Json to_json(const geometry::FCPoint& p);

}  // namespace jacobi::serialize
