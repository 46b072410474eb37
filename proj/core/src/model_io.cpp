#include "mql/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mql {

namespace {

using nlohmann::ordered_json;

Rational rational_field(const ordered_json& v, const std::string& where) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  throw parse_error(where + ": expected a rational as a string (\"1/2\", \"0.25\") or an integer");
}

SpaceSpec parse_space(const ordered_json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type")) {
    throw parse_error(where + ": expected an object with a \"type\" field");
  }
  std::string type = j.at("type").get<std::string>();
  if (type == "finite_set") {
    if (!j.contains("labels") || !j.at("labels").is_array()) {
      throw parse_error(where + ".labels: expected an array of labels");
    }
    FiniteSetSpace fs;
    for (const auto& l : j.at("labels")) fs.labels.push_back(l.get<std::string>());
    return fs;
  }
  if (type == "interval_grid") {
    IntervalGridSpace grid;
    if (!j.contains("lower") || !j.contains("upper") || !j.contains("points")) {
      throw parse_error(where + ": interval_grid needs lower, upper, points");
    }
    grid.lower = rational_field(j.at("lower"), where + ".lower");
    grid.upper = rational_field(j.at("upper"), where + ".upper");
    grid.points = j.at("points").get<int>();
    std::string mode = j.value("interior_mode", std::string("continuum"));
    if (mode == "continuum") {
      grid.interior_mode = InteriorMode::Continuum;
    } else if (mode == "discrete") {
      grid.interior_mode = InteriorMode::Discrete;
    } else {
      throw parse_error(where + ".interior_mode: expected \"discrete\" or \"continuum\"");
    }
    return grid;
  }
  throw parse_error(where + ".type: unknown space type '" + type + "'");
}

MarkovModel parse_finite_kernel(const ordered_json& j) {
  FiniteKernel kernel;
  if (!j.contains("states") || !j.at("states").is_array()) {
    throw parse_error("states: expected an array of labels");
  }
  for (const auto& s : j.at("states")) kernel.states.push_back(s.get<std::string>());
  if (!j.contains("kernel") || !j.at("kernel").is_array()) {
    throw parse_error("kernel: expected a row-major array of rows");
  }
  int n = static_cast<int>(kernel.states.size());
  const auto& rows = j.at("kernel");
  if (static_cast<int>(rows.size()) != n) {
    throw parse_error("kernel: expected " + std::to_string(n) + " rows, found " +
                      std::to_string(rows.size()));
  }
  kernel.kernel.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw parse_error("kernel[" + std::to_string(i) + "]: expected " + std::to_string(n) +
                        " entries");
    }
    for (int k = 0; k < n; ++k) {
      kernel.kernel[static_cast<std::size_t>(i)].push_back(rational_field(
          row[static_cast<std::size_t>(k)],
          "kernel[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
    }
  }
  if (j.value("transpose", false)) {
    // input was row-stochastic; store the column-stochastic transpose
    for (int i = 0; i < n; ++i) {
      for (int k = i + 1; k < n; ++k) {
        std::swap(kernel.kernel[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                  kernel.kernel[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
      }
    }
  }
  kernel.validate();
  return kernel;
}

MarkovModel parse_map_system(const ordered_json& j) {
  MapSystem system;
  if (!j.contains("space")) throw parse_error("map_system: missing \"space\"");
  system.space = parse_space(j.at("space"), "space");
  if (!j.contains("maps") || !j.at("maps").is_array() || j.at("maps").empty()) {
    throw parse_error("maps: expected a nonempty array");
  }
  const bool finite = std::holds_alternative<FiniteSetSpace>(system.space);
  std::size_t index = 0;
  for (const auto& m : j.at("maps")) {
    std::string where = "maps[" + std::to_string(index) + "]";
    if (finite) {
      if (!m.contains("table") || !m.at("table").is_array()) {
        throw parse_error(where + ": finite-set maps need a \"table\" array of labels");
      }
      const auto& labels = std::get<FiniteSetSpace>(system.space).labels;
      TableMap table;
      for (const auto& target : m.at("table")) {
        std::string label = target.get<std::string>();
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) {
          throw parse_error(where + ".table: unknown label '" + label + "'");
        }
        table.image.push_back(static_cast<int>(it - labels.begin()));
      }
      system.maps.emplace_back(std::move(table));
    } else {
      if (!m.contains("slope") || !m.contains("intercept")) {
        throw parse_error(where + ": interval maps need \"slope\" and \"intercept\"");
      }
      system.maps.emplace_back(AffineMap{rational_field(m.at("slope"), where + ".slope"),
                                         rational_field(m.at("intercept"), where + ".intercept")});
    }
    ++index;
  }
  if (j.contains("weights")) {
    std::size_t wi = 0;
    for (const auto& w : j.at("weights")) {
      system.weights.push_back(rational_field(w, "weights[" + std::to_string(wi++) + "]"));
    }
  } else {
    system.weights = uniform_weights(static_cast<int>(system.maps.size()));
  }
  system.validate();
  return system;
}

MarkovModel parse_uniform(const ordered_json& j) {
  UniformKernelModel model;
  if (!j.contains("space")) throw parse_error("uniform: missing \"space\"");
  model.space = parse_space(j.at("space"), "space");
  model.validate();
  return model;
}

Quiver parse_quiver(const ordered_json& j) {
  Quiver q;
  if (!j.contains("vertices") || !j.at("vertices").is_array() || j.at("vertices").empty()) {
    throw parse_error("vertices: expected a nonempty array of labels");
  }
  for (const auto& v : j.at("vertices")) q.vertices.push_back(v.get<std::string>());
  std::string mode = j.value("interior_mode", std::string("discrete"));
  q.interior_mode = mode == "continuum" ? InteriorMode::Continuum : InteriorMode::Discrete;
  if (!j.contains("edges") || !j.at("edges").is_array()) {
    throw parse_error("edges: expected an array");
  }
  std::size_t index = 0;
  for (const auto& e : j.at("edges")) {
    std::string where = "edges[" + std::to_string(index) + "]";
    if (!e.contains("source") || !e.contains("range") || !e.contains("weight")) {
      throw parse_error(where + ": edges need source, range, weight");
    }
    QuiverEdge edge;
    edge.id = e.value("id", std::string());
    edge.source = q.vertex_index(e.at("source").get<std::string>());
    edge.range = q.vertex_index(e.at("range").get<std::string>());
    edge.weight = rational_field(e.at("weight"), where + ".weight");
    q.edges.push_back(std::move(edge));
    ++index;
  }
  q.validate();
  return q;
}

ordered_json space_json(const SpaceSpec& space) {
  ordered_json j;
  if (const auto* fs = std::get_if<FiniteSetSpace>(&space)) {
    j["type"] = "finite_set";
    j["labels"] = fs->labels;
    return j;
  }
  const auto& grid = std::get<IntervalGridSpace>(space);
  j["type"] = "interval_grid";
  j["lower"] = grid.lower.to_string();
  j["upper"] = grid.upper.to_string();
  j["points"] = grid.points;
  j["interior_mode"] = grid.interior_mode == InteriorMode::Continuum ? "continuum" : "discrete";
  return j;
}

}  // namespace

ParsedInput parse_model_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("kind")) {
      throw parse_error("model file needs an object with a \"kind\" field");
    }
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "finite_kernel") return ParsedInput(MarkovModel(parse_finite_kernel(j)));
    if (kind == "map_system") return ParsedInput(MarkovModel(parse_map_system(j)));
    if (kind == "uniform") return ParsedInput(MarkovModel(parse_uniform(j)));
    if (kind == "quiver") return ParsedInput(parse_quiver(j));
    throw parse_error("unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("malformed model file: ") + e.what());
  }
}

ParsedInput parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model_text(buffer.str());
}

std::string serialize_model(const MarkovModel& model) {
  ordered_json j;
  if (const auto* fk = std::get_if<FiniteKernel>(&model)) {
    j["kind"] = "finite_kernel";
    j["states"] = fk->states;
    ordered_json rows = ordered_json::array();
    for (const auto& row : fk->kernel) {
      ordered_json r = ordered_json::array();
      for (const auto& e : row) r.push_back(e.to_string());
      rows.push_back(std::move(r));
    }
    j["kernel"] = std::move(rows);
  } else if (const auto* ms = std::get_if<MapSystem>(&model)) {
    j["kind"] = "map_system";
    j["space"] = space_json(ms->space);
    ordered_json maps = ordered_json::array();
    for (const auto& pm : ms->maps) {
      ordered_json m;
      if (const auto* affine = std::get_if<AffineMap>(&pm)) {
        m["slope"] = affine->slope.to_string();
        m["intercept"] = affine->intercept.to_string();
      } else {
        const auto& labels = std::get<FiniteSetSpace>(ms->space).labels;
        ordered_json table = ordered_json::array();
        for (int target : std::get<TableMap>(pm).image) {
          table.push_back(labels[static_cast<std::size_t>(target)]);
        }
        m["table"] = std::move(table);
      }
      maps.push_back(std::move(m));
    }
    j["maps"] = std::move(maps);
    ordered_json weights = ordered_json::array();
    for (const auto& w : ms->weights) weights.push_back(w.to_string());
    j["weights"] = std::move(weights);
  } else {
    j["kind"] = "uniform";
    j["space"] = space_json(std::get<UniformKernelModel>(model).space);
  }
  return j.dump(2) + "\n";
}

std::string serialize_quiver(const Quiver& q) {
  ordered_json j;
  j["kind"] = "quiver";
  j["vertices"] = q.vertices;
  j["interior_mode"] = q.interior_mode == InteriorMode::Continuum ? "continuum" : "discrete";
  ordered_json edges = ordered_json::array();
  for (int e = 0; e < q.edge_count(); ++e) {
    const auto& edge = q.edges[static_cast<std::size_t>(e)];
    ordered_json ej;
    if (!edge.id.empty()) ej["id"] = edge.id;
    ej["source"] = q.vertices[static_cast<std::size_t>(edge.source)];
    ej["range"] = q.vertices[static_cast<std::size_t>(edge.range)];
    ej["weight"] = edge.weight.to_string();
    edges.push_back(std::move(ej));
  }
  j["edges"] = std::move(edges);
  return j.dump(2) + "\n";
}

}  // namespace mql
