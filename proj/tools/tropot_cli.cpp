#include <CLI11.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "tropot/crossdim.hpp"
#include "tropot/fibre.hpp"
#include "tropot/json_io.hpp"
#include "tropot/tree.hpp"
#include "tropot/verify.hpp"
#include "tropot/version.hpp"

using namespace tropot;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kVerification = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::vector<std::string> inputs;
  std::string matrix;
  std::string points;
  std::string measure;
  std::string manifest;
  std::string out = "-";
  std::string csv;
  std::string mode = "rational";
  std::string search = "auto";
  std::string missing_length = "zero";
  double p = 2;
  std::uint64_t seed = 0;
  std::size_t max_structures = ProjectionSearchSpec{}.max_structures;
  std::size_t restarts = ProjectionSearchSpec{}.restarts;
  std::size_t iterations = ProjectionSearchSpec{}.iterations;
  std::size_t threads = 1;
  std::size_t trials = 100;
  double box = 10;
};

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

bool exact_mode(const Options& o) { return o.mode == "rational"; }

Json input_entry(const std::string& path) {
  return {{"path", path}, {"fnv1a", hex(fnv1a(read_text_file(path)))}};
}

/// The recorded configuration; its hash identifies the run.
Json config_json(const Options& o) {
  Json c{{"command", o.command}, {"seed", o.seed}, {"mode", o.mode}};
  Json inputs = Json::array();
  for (const auto& path : o.inputs) inputs.push_back(input_entry(path));
  for (const auto* path : {&o.matrix, &o.points, &o.measure, &o.manifest}) {
    if (!path->empty()) inputs.push_back(input_entry(*path));
  }
  c["inputs"] = std::move(inputs);
  if (o.command == "distance") {
    c["p"] = o.p;
    c["search"] = o.search;
    c["max_structures"] = o.max_structures;
    c["restarts"] = o.restarts;
    c["iterations"] = o.iterations;
    c["threads"] = o.threads;
  }
  if (o.command == "verify") c["trials"] = o.trials;
  if (o.command == "trees2measure" || o.command == "distance") c["missing_length"] = o.missing_length;
  if (!o.csv.empty()) c["box"] = o.box;
  return c;
}

Json envelope(const Options& o) {
  const Json config = config_json(o);
  return {{"tool", "tropot-cli"},
          {"version", kVersion},
          {"command", o.command},
          {"seed", o.seed},
          {"config_hash", hex(fnv1a(config.dump()))},
          {"config", config}};
}

void emit(const Options& o, Json payload) {
  Json out = envelope(o);
  for (auto& [key, value] : payload.items()) out[key] = std::move(value);
  write_json(out, o.out);
}

NewickOptions newick_options(const Options& o) {
  return {o.missing_length == "reject" ? MissingLength::reject : MissingLength::zero};
}

bool looks_like_newick(const std::string& path, const std::string& text) {
  for (const char* ext : {".nwk", ".newick", ".tre", ".tree", ".trees"}) {
    if (path.size() >= std::strlen(ext) && path.compare(path.size() - std::strlen(ext), std::string::npos, ext) == 0) {
      return true;
    }
  }
  const auto first = text.find_first_not_of(" \t\r\n");
  return first != std::string::npos && (text[first] == '(' || text[first] == '[');
}

DiscreteMeasure load_measure(const std::string& path, const Options& o) {
  const std::string text = read_text_file(path);
  if (looks_like_newick(path, text)) return cohort_measure(parse_newick_lines(text, newick_options(o)));
  try {
    return measure_from_json(Json::parse(text));
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::vector<Point<Rational>> load_exact_points(const std::string& path) {
  const Json j = read_json_file(path);
  const auto dim = points_from_json(j).front().dim();  // validates shape
  std::vector<Point<Rational>> out;
  for (const auto& row : j.at("points")) {
    std::vector<Rational> c;
    for (const auto& v : row) c.push_back(rational_from_json(v));
    out.push_back(Point<Rational>::canonical(std::move(c)));
  }
  if (out.front().dim() != dim) throw InputError("inconsistent point dimensions");
  return out;
}

Json point_json(const Point<Rational>& x, bool exact) {
  Json out = Json::array();
  for (const auto& c : x.coords()) out.push_back(number_to_json(c, exact));
  return out;
}

std::string csv_number(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

/// Polygon vertices of 2-dimensional cells in (x2 - x1, x3 - x1) coordinates.
void write_cell_csv(const Options& o, const std::vector<std::pair<std::string, const PolyCell*>>& cells) {
  if (o.csv.empty()) return;
  std::string text = "group,cell,label,dim,vertex,x,y\n";
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& [group, cell] = cells[k];
    if (cell->ambient != 3) throw UsageError("--csv needs cells in TPT^3 (n = 3)");
    const auto polygon = polygon_2d(*cell, o.box);
    for (std::size_t v = 0; v < polygon.size(); ++v) {
      text += group + "," + std::to_string(k + 1) + ",\"" + cell->label.to_string() + "\"," +
              std::to_string(cell_dim(*cell)) + "," + std::to_string(v + 1) + "," +
              csv_number(polygon[v].first) + "," + csv_number(polygon[v].second) + "\n";
    }
  }
  write_text(o.csv, text);
}

ProjectionSearchSpec search_spec(const Options& o) {
  ProjectionSearchSpec spec;
  spec.mode = o.search == "exhaustive" ? StructureMode::exhaustive
              : o.search == "local"    ? StructureMode::local_search
                                       : StructureMode::automatic;
  spec.max_structures = o.max_structures;
  spec.restarts = o.restarts;
  spec.iterations = o.iterations;
  spec.seed = o.seed;
  spec.threads = o.threads;
  return spec;
}

int cmd_distance(const Options& o) {
  if (o.inputs.size() != 2) throw UsageError("distance needs exactly two inputs");
  auto mu = load_measure(o.inputs[0], o), nu = load_measure(o.inputs[1], o);
  if (mu.dim() == nu.dim()) {
    throw UsageError("inputs have equal ambient dimension " + std::to_string(mu.dim()) +
                     "; the distance compares measures on tori of different dimensions");
  }
  const bool swapped = mu.dim() > nu.dim();
  if (swapped) std::swap(mu, nu);
  const auto r = w_plus(mu, nu, o.p, search_spec(o));
  Json payload = result_to_json(r);
  payload["lower"] = {{"input", swapped ? 2 : 1}, {"dim", mu.dim()}, {"atoms", mu.size()}};
  payload["upper"] = {{"input", swapped ? 1 : 2}, {"dim", nu.dim()}, {"atoms", nu.size()}};
  payload["cost_pi_m"] = r.certificate->cost_pi_m;
  payload["cost_pi_n"] = r.certificate->cost_pi_n;
  const bool integer_p = o.p == std::floor(o.p) && o.p <= 4;
  if (exact_mode(o) && integer_p && r.beta) {
    payload["w_minus_cost_exact"] =
        rational_to_json(transport_cost_exact(mu, *r.beta, static_cast<unsigned>(o.p)));
  }
  const bool certified = r.certificate->gap <= 1e-9 && r.certificate->pushforward_matches;
  payload["certified"] = certified;
  emit(o, std::move(payload));
  return certified ? kOk : kVerification;
}

int cmd_verify(const Options& o) {
  const auto report = run_verify(o.trials, o.seed);
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json entry{{"name", c.name}, {"property", c.property}, {"trials", c.trials}, {"passed", c.passed}};
    if (!c.ok()) entry["first_failure"] = c.first_failure;
    checks.push_back(std::move(entry));
  }
  emit(o, {{"trials", report.trials}, {"all_passed", report.ok()}, {"checks", std::move(checks)}});
  return report.ok() ? kOk : kVerification;
}

Matrix<Rational> load_matrix(const Options& o) {
  if (o.matrix.empty()) throw UsageError("--matrix is required");
  return matrix_from_json(read_json_file(o.matrix));
}

int cmd_fibre(const Options& o) {
  const auto m = load_matrix(o);
  if (o.points.empty()) throw UsageError("--points is required");
  const auto targets = load_exact_points(o.points);
  if (targets.front().dim() != m.rows()) throw InputError("target points must have m coordinates");
  std::vector<FibreComplex> fibres;
  for (const auto& y : targets) fibres.push_back(fibre_at(m, y));
  Json list = Json::array();
  std::vector<std::pair<std::string, const PolyCell*>> csv;
  for (std::size_t k = 0; k < fibres.size(); ++k) {
    Json cells = Json::array();
    for (const auto& c : fibres[k].cells) {
      cells.push_back(cell_to_json(c, exact_mode(o)));
      csv.emplace_back(std::to_string(k + 1), &c);
    }
    list.push_back({{"target", point_json(fibres[k].target, exact_mode(o))},
                    {"cells", std::move(cells)}});
  }
  write_cell_csv(o, csv);
  emit(o, {{"matrix", matrix_to_json(m)},
           {"simple", is_simple_projection(m)},
           {"expected_dim", m.cols() - m.rows()},
           {"fibres", std::move(list)}});
  return kOk;
}

int cmd_typecells(const Options& o) {
  const auto m = load_matrix(o);
  const auto cells = partition_type_cells(m);
  Json list = Json::array();
  std::size_t maximal = 0;
  std::vector<std::pair<std::string, const PolyCell*>> csv;
  for (const auto& c : cells) {
    list.push_back(cell_to_json(c, exact_mode(o)));
    if (cell_dim(c) + 1 == m.cols()) ++maximal;
    csv.emplace_back("type", &c);
  }
  write_cell_csv(o, csv);
  emit(o, {{"matrix", matrix_to_json(m)}, {"maximal_cells", maximal}, {"cells", std::move(list)}});
  return kOk;
}

int cmd_project(const Options& o) {
  const auto m = load_matrix(o);
  Json payload{{"matrix", matrix_to_json(m)},
               {"surjective", is_surjective(m)},
               {"simple", is_simple_projection(m)}};
  std::vector<Point<Rational>> vertices;
  if (m.all_finite()) {
    vertices = image_vertices(m).generators();
    Json list = Json::array();
    for (const auto& v : vertices) list.push_back(point_json(v, exact_mode(o)));
    payload["image_vertices"] = std::move(list);
  }
  if (payload["simple"].get<bool>() && m.cols() > m.rows()) {
    payload["projection"] = projection_to_json(SimpleProjection<Rational>::from_matrix(m).convert<double>());
  }
  if (!o.points.empty()) {
    const auto xs = load_exact_points(o.points);
    if (xs.front().dim() != m.cols()) throw InputError("points must have n coordinates");
    Json images = Json::array();
    for (const auto& x : xs) {
      images.push_back({{"point", point_json(x, exact_mode(o))},
                        {"image", point_json(apply(m, x), exact_mode(o))},
                        {"type", type_of(m, x).to_string()}});
    }
    payload["images"] = std::move(images);
  }
  if (!o.measure.empty()) {
    const auto nu = load_measure(o.measure, o);
    payload["pushforward"] = measure_to_json(pushforward(m.convert<double>(), nu).measure);
  }
  if (!o.csv.empty()) {
    if (m.rows() != 3) throw UsageError("--csv needs a matrix with 3 rows");
    if (vertices.empty()) throw UsageError("--csv needs a finite matrix");
    std::string text = "kind,index,x,y\n";
    for (std::size_t k = 0; k < vertices.size(); ++k) {
      const auto q = vertices[k].quotient_coords();
      text += "vertex," + std::to_string(k + 1) + "," + to_string(q[0]) + "," + to_string(q[1]) + "\n";
    }
    write_text(o.csv, text);
  }
  emit(o, std::move(payload));
  return kOk;
}

Json cohort_json(const std::vector<std::string>& files, const std::filesystem::path& base,
                 const Options& o) {
  std::vector<PhyloTree> trees;
  for (const auto& f : files) {
    auto batch = parse_newick_lines(read_text_file(base / f), newick_options(o));
    for (auto& t : batch) trees.push_back(std::move(t));
  }
  if (trees.empty()) throw InputError("no trees found");
  const auto mu = cohort_measure(trees);
  Json out = measure_to_json(mu);
  out["trees"] = trees.size();
  out["leaves"] = trees.front().leaf_labels();
  return out;
}

int cmd_trees2measure(const Options& o) {
  if (o.manifest.empty()) {
    if (o.inputs.empty()) throw UsageError("trees2measure needs Newick files or --manifest");
    emit(o, cohort_json(o.inputs, {}, o));
    return kOk;
  }
  const Json manifest = read_json_file(o.manifest);
  if (!manifest.contains("cohorts") || !manifest.at("cohorts").is_array()) {
    throw InputError("manifest needs an array 'cohorts'");
  }
  const auto base = std::filesystem::path(o.manifest).parent_path();
  Json cohorts = Json::array();
  for (const auto& c : manifest.at("cohorts")) {
    if (!c.contains("label") || !c.at("label").is_string() || !c.contains("files") ||
        !c.at("files").is_array()) {
      throw InputError("each cohort needs a string 'label' and an array 'files'");
    }
    std::vector<std::string> files;
    for (const auto& f : c.at("files")) {
      if (!f.is_string()) throw InputError("cohort files must be strings");
      files.push_back(f.get<std::string>());
    }
    Json entry{{"label", c.at("label")}, {"files", files}};
    Json cohort = cohort_json(files, base, o);
    for (auto& [key, value] : cohort.items()) entry[key] = std::move(value);
    cohorts.push_back(std::move(entry));
  }
  emit(o, {{"cohorts", std::move(cohorts)}});
  return kOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Random seed recorded in the output")->capture_default_str();
  sub->add_option("--out", o.out, "Output JSON path, - for stdout")->capture_default_str();
  sub->add_option("--mode", o.mode, "Arithmetic for reported values")
      ->check(CLI::IsMember({"rational", "float"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Tropical optimal transport across dimensions"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  auto* distance = app.add_subcommand("distance", "W- and W+ between measures of different dimension");
  distance->add_option("inputs", o.inputs, "Two measure JSON or Newick files")->required()->expected(2);
  distance->add_option("--p", o.p, "Wasserstein exponent (>= 1)")->check(CLI::Range(1.0, 1e6))->capture_default_str();
  distance->add_option("--search", o.search, "Structure search")
      ->check(CLI::IsMember({"auto", "exhaustive", "local"}))
      ->capture_default_str();
  distance->add_option("--max-structures", o.max_structures, "Structure budget")->capture_default_str();
  distance->add_option("--restarts", o.restarts, "Offset restarts per structure")->capture_default_str();
  distance->add_option("--iterations", o.iterations, "Descent sweeps per start")->capture_default_str();
  distance->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  distance->add_option("--missing-length", o.missing_length, "Newick edges without a length")
      ->check(CLI::IsMember({"zero", "reject"}))
      ->capture_default_str();
  add_common(distance, o);

  auto* verify = app.add_subcommand("verify", "Randomized property suites");
  verify->add_option("--trials", o.trials, "Trials per suite")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(verify, o);

  auto* fibre = app.add_subcommand("fibre", "Maximal cells of fibres over target points");
  fibre->add_option("--matrix", o.matrix, "Matrix JSON")->required();
  fibre->add_option("--points", o.points, "Target points JSON")->required();
  fibre->add_option("--csv", o.csv, "Polygon CSV (n = 3)");
  fibre->add_option("--box", o.box, "Clipping box for CSV polygons")->capture_default_str();
  add_common(fibre, o);

  auto* typecells = app.add_subcommand("typecells", "Cells of the type decomposition");
  typecells->add_option("--matrix", o.matrix, "Matrix JSON")->required();
  typecells->add_option("--csv", o.csv, "Polygon CSV (n = 3)");
  typecells->add_option("--box", o.box, "Clipping box for CSV polygons")->capture_default_str();
  add_common(typecells, o);

  auto* project = app.add_subcommand("project", "Image, point images and pushforward measures");
  project->add_option("--matrix", o.matrix, "Matrix JSON")->required();
  project->add_option("--points", o.points, "Points JSON to map");
  project->add_option("--measure", o.measure, "Measure JSON or Newick file to push forward");
  project->add_option("--csv", o.csv, "Image vertex CSV (m = 3)");
  add_common(project, o);

  auto* trees = app.add_subcommand("trees2measure", "Cophenetic measures of tree cohorts");
  trees->add_option("files", o.inputs, "Newick files, one tree per line");
  trees->add_option("--manifest", o.manifest, "Batch manifest JSON");
  trees->add_option("--missing-length", o.missing_length, "Edges without a length")
      ->check(CLI::IsMember({"zero", "reject"}))
      ->capture_default_str();
  add_common(trees, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kOk : kUsage;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    if (o.command == "distance") return cmd_distance(o);
    if (o.command == "verify") return cmd_verify(o);
    if (o.command == "fibre") return cmd_fibre(o);
    if (o.command == "typecells") return cmd_typecells(o);
    if (o.command == "project") return cmd_project(o);
    return cmd_trees2measure(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const NewickError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const Json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
}
