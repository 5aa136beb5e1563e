#include "tropot/json_io.hpp"

#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace tropot {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InputError(message);
}

std::size_t size_field(const Json& j, const char* key) {
  require(j.is_object() && j.contains(key), std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0),
          std::string("field '") + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

double finite_number(const Json& v, const std::string& what) {
  require(v.is_number(), what + " must be a number");
  const double x = v.get<double>();
  require(std::isfinite(x), what + " must be finite");
  return x;
}

std::vector<double> number_row(const Json& row, std::size_t dim, const std::string& what) {
  require(row.is_array(), what + " must be an array");
  require(row.size() == dim, what + " has " + std::to_string(row.size()) +
                                 " coordinates, expected " + std::to_string(dim));
  std::vector<double> out;
  for (const auto& v : row) out.push_back(finite_number(v, what));
  return out;
}

Json constraints_to_json(const std::vector<DifferenceConstraint>& cs, bool exact) {
  Json out = Json::array();
  for (const auto& c : cs) {
    out.push_back({{"upper", c.upper + 1}, {"lower", c.lower + 1}, {"bound", number_to_json(c.bound, exact)}});
  }
  return out;
}

template <class T>
Json matrix_json(const Matrix<T>& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto& e = m(i, j);
      if (e.is_neg_inf()) {
        row.push_back("-inf");
      } else if constexpr (is_exact_v<T>) {
        row.push_back(rational_to_json(e.value()));
      } else {
        row.push_back(e.value());
      }
    }
    rows.push_back(std::move(row));
  }
  return {{"m", m.rows()}, {"n", m.cols()}, {"entries", std::move(rows)}};
}

}  // namespace

Json rational_to_json(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(r) == 1) {
    const auto& num = numerator(r);
    if (num <= std::numeric_limits<long long>::max() && num >= std::numeric_limits<long long>::min()) {
      return num.convert_to<long long>();
    }
  }
  return to_string(r);
}

Rational rational_from_json(const Json& j) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_float()) {
      require(std::isfinite(j.get<double>()), "non-finite number");
      // The shortest round-trip text, so 0.1 reads as 1/10.
      return parse_rational(j.dump());
    }
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  throw InputError("expected a number or a rational string, got " + j.dump());
}

Json points_to_json(const std::vector<Point<double>>& points) {
  require(!points.empty(), "empty point list");
  Json rows = Json::array();
  for (const auto& x : points) rows.push_back(x.coords());
  return {{"dim", points.front().dim()}, {"points", std::move(rows)}};
}

std::vector<Point<double>> points_from_json(const Json& j) {
  const std::size_t dim = size_field(j, "dim");
  require(dim >= 1, "'dim' must be positive");
  require(j.contains("points") && j.at("points").is_array(), "missing array 'points'");
  std::vector<Point<double>> out;
  for (std::size_t k = 0; k < j.at("points").size(); ++k) {
    out.push_back(Point<double>::canonical(
        number_row(j.at("points")[k], dim, "point " + std::to_string(k + 1))));
  }
  require(!out.empty(), "'points' is empty");
  return out;
}

Json measure_to_json(const DiscreteMeasure& mu) {
  Json out = points_to_json(mu.support());
  out["weights"] = mu.weights();
  return out;
}

DiscreteMeasure measure_from_json(const Json& j) {
  auto points = points_from_json(j);
  if (!j.contains("weights")) return DiscreteMeasure::uniform(std::move(points));
  const auto weights = number_row(j.at("weights"), points.size(), "'weights'");
  try {
    return DiscreteMeasure(std::move(points), weights);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

Json matrix_to_json(const Matrix<Rational>& m) { return matrix_json(m); }
Json matrix_to_json(const Matrix<double>& m) { return matrix_json(m); }

Matrix<Rational> matrix_from_json(const Json& j) {
  const std::size_t rows = size_field(j, "m"), cols = size_field(j, "n");
  require(j.contains("entries") && j.at("entries").is_array(), "missing array 'entries'");
  const auto& e = j.at("entries");
  require(e.size() == rows, "'entries' has " + std::to_string(e.size()) + " rows, expected " +
                                std::to_string(rows));
  std::vector<Extended<Rational>> entries;
  for (std::size_t i = 0; i < rows; ++i) {
    require(e[i].is_array() && e[i].size() == cols,
            "row " + std::to_string(i + 1) + " must have " + std::to_string(cols) + " entries");
    for (const auto& v : e[i]) {
      if (v.is_string() && v.get<std::string>() == "-inf") {
        entries.push_back(Extended<Rational>::neg_inf());
      } else {
        entries.emplace_back(rational_from_json(v));
      }
    }
  }
  try {
    return Matrix<Rational>(rows, cols, std::move(entries));
  } catch (const std::invalid_argument& ex) {
    throw InputError(ex.what());
  }
}

Json projection_to_json(const SimpleProjection<double>& p) {
  Json blocks = Json::object(), offsets = Json::object();
  const auto b = p.blocks();
  for (std::size_t i = 0; i < b.size(); ++i) {
    Json cols = Json::array();
    for (auto c : b[i]) cols.push_back(c + 1);
    blocks[std::to_string(i + 1)] = std::move(cols);
  }
  for (std::size_t j = 0; j < p.cols(); ++j) {
    if (const auto& c = p.columns()[j]) {
      offsets[std::to_string(c->row + 1) + "," + std::to_string(j + 1)] = c->offset;
    }
  }
  return {{"m", p.rows()}, {"n", p.cols()}, {"J", std::move(blocks)}, {"offsets", std::move(offsets)}};
}

SimpleProjection<double> projection_from_json(const Json& j) {
  const std::size_t rows = size_field(j, "m"), cols = size_field(j, "n");
  require(j.contains("J") && j.at("J").is_object(), "missing object 'J'");
  std::vector<std::optional<SimpleProjection<double>::Entry>> columns(cols);
  for (const auto& [key, list] : j.at("J").items()) {
    std::size_t row = 0;
    try {
      row = std::stoul(key);
    } catch (const std::exception&) {
      throw InputError("bad block key '" + key + "'");
    }
    require(row >= 1 && row <= rows, "block key '" + key + "' out of range");
    require(list.is_array(), "block " + key + " must be an array");
    for (const auto& c : list) {
      require(c.is_number_unsigned() && c.get<std::size_t>() >= 1 && c.get<std::size_t>() <= cols,
              "block " + key + " has a bad column index " + c.dump());
      const std::size_t col = c.get<std::size_t>() - 1;
      require(!columns[col], "column " + c.dump() + " appears in two blocks");
      double offset = 0;
      const std::string okey = key + "," + c.dump();
      if (j.contains("offsets") && j.at("offsets").contains(okey)) {
        offset = finite_number(j.at("offsets").at(okey), "offset " + okey);
      }
      columns[col] = SimpleProjection<double>::Entry{row - 1, offset};
    }
  }
  try {
    return SimpleProjection<double>(rows, std::move(columns));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

Json number_to_json(const Rational& r, bool exact) {
  return exact ? rational_to_json(r) : Json(to_double(r));
}

Json cell_to_json(const PolyCell& cell, bool exact) {
  Json out{{"ambient", cell.ambient},
           {"label", cell.label.to_string()},
           {"empty", cell.empty || !is_feasible(cell)}};
  if (!out["empty"].get<bool>()) {
    out["dim"] = cell_dim(cell);
    Json point = Json::array();
    const auto x = interior_point(cell);
    for (const auto& c : x.coords()) point.push_back(number_to_json(c, exact));
    out["interior_point"] = std::move(point);
  }
  out["equalities"] = constraints_to_json(cell.equalities, exact);
  out["inequalities"] = constraints_to_json(cell.inequalities, exact);
  return out;
}

Json coupling_to_json(const Coupling& pi) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < pi.rows; ++i) {
    rows.push_back(std::vector<double>(pi.mass.begin() + static_cast<std::ptrdiff_t>(i * pi.cols),
                                       pi.mass.begin() + static_cast<std::ptrdiff_t>((i + 1) * pi.cols)));
  }
  return rows;
}

Json result_to_json(const CrossDimResult& r) {
  Json out{{"w_minus", r.w_minus}};
  out["w_plus"] = r.w_plus ? Json(*r.w_plus) : Json(nullptr);
  out["projection"] = r.projection ? projection_to_json(*r.projection) : Json(nullptr);
  out["certificate_gap"] = r.certificate ? Json(r.certificate->gap) : Json(nullptr);
  out["pushforward_matches"] = r.certificate ? Json(r.certificate->pushforward_matches) : Json(nullptr);
  out["structures_explored"] = r.structures_explored;
  out["structure_count"] = r.structure_count;
  out["exhaustive"] = r.exhaustive;
  out["budget_exhausted"] = r.budget_exhausted;
  out["seed"] = r.seed;
  out["p"] = r.p;
  out["epsilon"] = r.epsilon;
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_json(const Json& j, const std::filesystem::path& path) {
  const std::string text = j.dump(2) + "\n";
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace tropot
