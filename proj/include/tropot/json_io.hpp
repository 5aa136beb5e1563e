#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tropot/crossdim.hpp"
#include "tropot/matrix.hpp"
#include "tropot/measure.hpp"
#include "tropot/polycell.hpp"
#include "tropot/rational.hpp"
#include "tropot/simple_projection.hpp"

namespace tropot {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent input data.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integers as JSON numbers, everything else as a "p/q" string.
Json rational_to_json(const Rational& r);
/// Accepts numbers, integer strings, decimals and "p/q".
Rational rational_from_json(const Json& j);

/// {"dim": n, "points": [[...], ...]}
Json points_to_json(const std::vector<Point<double>>& points);
std::vector<Point<double>> points_from_json(const Json& j);

/// {"dim": n, "points": [...], "weights": [...]}; weights default to uniform.
Json measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const Json& j);

/// {"m": rows, "n": cols, "entries": [[number | "-inf", ...], ...]}
Json matrix_to_json(const Matrix<Rational>& m);
Json matrix_to_json(const Matrix<double>& m);
Matrix<Rational> matrix_from_json(const Json& j);

/// {"m", "n", "J": {"1": [cols...], ...}, "offsets": {"i,j": value}}, all
/// indices 1-based.
Json projection_to_json(const SimpleProjection<double>& p);
SimpleProjection<double> projection_from_json(const Json& j);

/// rational_to_json, or a plain double when `exact` is false.
Json number_to_json(const Rational& r, bool exact);

/// H-representation with 1-based coordinates.
Json cell_to_json(const PolyCell& cell, bool exact = true);

Json coupling_to_json(const Coupling& pi);

/// The distance report: values, projection, certificate gap and search stats.
Json result_to_json(const CrossDimResult& r);

Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline; "-" writes to stdout.
void write_json(const Json& j, const std::filesystem::path& path);

}  // namespace tropot
