#include "config.hpp"

#include <cmath>
#include <fstream>
#include <variant>

#include <fmt/format.h>

#include "ipmdro/error.hpp"

namespace ipmdro::cli {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& message) { raise(ErrorCode::ConfigError, message); }

double number(const json& value, const std::string& where) {
  if (!value.is_number()) config_error(where + " must be a number");
  const double out = value.get<double>();
  if (!std::isfinite(out)) config_error(where + " must be finite");
  return out;
}

std::vector<double> numbers(const json& value, const std::string& where) {
  if (!value.is_array()) config_error(where + " must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(number(value[i], fmt::format("{}[{}]", where, i)));
  return out;
}

std::string text(const json& value, const std::string& where) {
  if (!value.is_string()) config_error(where + " must be a string");
  return value.get<std::string>();
}

std::size_t count(const json& value, const std::string& where) {
  if (!value.is_number_integer() || value.get<long long>() < 0) config_error(where + " must be a nonnegative integer");
  return value.get<std::size_t>();
}

bool flag(const json& value, const std::string& where) {
  if (!value.is_boolean()) config_error(where + " must be true or false");
  return value.get<bool>();
}

void reject_unknown(const json& object, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) config_error(fmt::format("unknown key '{}' in {}", key, where));
  }
}

GridSpec parse_grid(const json& value, const std::string& where) {
  if (!value.is_object()) config_error(where + " must be an object with from, to and count");
  reject_unknown(value, {"from", "to", "count"}, where);
  if (!value.contains("from") || !value.contains("to") || !value.contains("count")) {
    config_error(where + " needs from, to and count");
  }
  GridSpec grid{number(value["from"], where + ".from"), number(value["to"], where + ".to"),
                count(value["count"], where + ".count")};
  if (grid.count < 1) config_error(where + ".count must be positive");
  if (grid.count > 1 && !(grid.to > grid.from)) config_error(where + " needs from < to");
  return grid;
}

json grid_json(const GridSpec& grid) {
  return json{{"from", grid.from}, {"to", grid.to}, {"count", grid.count}};
}

SpaceSpec parse_space(const json& value) {
  if (!value.is_object()) config_error("space must be an object");
  reject_unknown(value, {"points", "grid", "coordinates", "metric", "graph"}, "space");
  SpaceSpec out;
  if (value.contains("grid")) {
    if (value.contains("points") || value.contains("coordinates") || value.contains("metric")) {
      config_error("space.grid cannot be combined with points, coordinates or metric");
    }
    out.grid = parse_grid(value["grid"], "space.grid");
  } else {
    if (!value.contains("points") || !value["points"].is_array() || value["points"].empty()) {
      config_error("space.points must be a nonempty array of labels");
    }
    for (std::size_t i = 0; i < value["points"].size(); ++i) {
      out.points.push_back(text(value["points"][i], fmt::format("space.points[{}]", i)));
    }
  }
  const std::size_t n = out.grid ? out.grid->count : out.points.size();
  if (value.contains("coordinates")) {
    out.coordinates = numbers(value["coordinates"], "space.coordinates");
    if (out.coordinates->size() != n) {
      config_error(fmt::format("space.coordinates has {} entries, expected {}", out.coordinates->size(), n));
    }
  }
  if (value.contains("metric")) {
    if (out.coordinates) config_error("space.metric and space.coordinates are mutually exclusive");
    const json& rows = value["metric"];
    if (!rows.is_array() || rows.size() != n) {
      config_error(fmt::format("space.metric must have {} rows", n));
    }
    std::vector<std::vector<double>> metric;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string where = fmt::format("space.metric row {}", i);
      if (!rows[i].is_array() || rows[i].size() != n) {
        config_error(fmt::format("{} has {} entries, expected {}", where,
                                 rows[i].is_array() ? rows[i].size() : 0, n));
      }
      metric.push_back(numbers(rows[i], where));
    }
    out.metric = std::move(metric);
  }
  if (value.contains("graph")) {
    const json& edges = value["graph"];
    if (!edges.is_array()) config_error("space.graph must be an array of [from, to, weight] triples");
    std::vector<Edge> graph;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const std::string where = fmt::format("space.graph[{}]", k);
      if (!edges[k].is_array() || (edges[k].size() != 2 && edges[k].size() != 3)) {
        config_error(where + " must be [from, to] or [from, to, weight]");
      }
      Edge e{count(edges[k][0], where + "[0]"), count(edges[k][1], where + "[1]"),
             edges[k].size() == 3 ? number(edges[k][2], where + "[2]") : 1.0};
      graph.push_back(e);
    }
    out.graph = std::move(graph);
  }
  return out;
}

DistributionSpec parse_distribution(const json& value, const std::string& where) {
  DistributionSpec out;
  if (value.is_array()) {
    out.weights = numbers(value, where);
  } else if (value.is_string() && value.get<std::string>() == "uniform") {
    out.kind = DistributionSpec::Kind::Uniform;
  } else if (value.is_object() && value.size() == 1 && value.contains("discretized_normal")) {
    out.kind = DistributionSpec::Kind::DiscretizedNormal;
    out.sigma = number(value["discretized_normal"], where + ".discretized_normal");
    if (!(out.sigma > 0.0)) config_error(where + ".discretized_normal must be positive");
  } else {
    config_error(where + " must be a weight array, \"uniform\" or {\"discretized_normal\": sigma}");
  }
  return out;
}

json distribution_json(const DistributionSpec& d) {
  switch (d.kind) {
    case DistributionSpec::Kind::Weights: return json(d.weights);
    case DistributionSpec::Kind::Uniform: return json("uniform");
    case DistributionSpec::Kind::DiscretizedNormal: return json{{"discretized_normal", d.sigma}};
  }
  return json();
}

std::vector<std::vector<double>> parse_matrix(const json& value, const std::string& where) {
  if (!value.is_array()) config_error(where + " must be an array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(numbers(value[i], fmt::format("{} row {}", where, i)));
  return out;
}

ClassSpec parse_class(const json& value) {
  if (!value.is_object()) config_error("class must be an object");
  reject_unknown(value,
                 {"variant", "members", "symmetrize", "augment_unit_vectors", "gram", "bandwidth", "mu",
                  "allow_zero_mass", "discretize"},
                 "class");
  if (!value.contains("variant")) config_error("class.variant is required");
  ClassSpec out;
  out.variant = text(value["variant"], "class.variant");
  static const std::vector<std::string> variants{"explicit", "lipschitz", "sup_norm", "rkhs",
                                                 "fisher",   "sobolev",   "dudley"};
  if (std::find(variants.begin(), variants.end(), out.variant) == variants.end()) {
    config_error(fmt::format("class.variant '{}' is not one of explicit, lipschitz, sup_norm, rkhs, fisher, "
                             "sobolev, dudley",
                             out.variant));
  }
  if (value.contains("members")) {
    const json& members = value["members"];
    if (!members.is_array()) config_error("class.members must be an array");
    for (std::size_t k = 0; k < members.size(); ++k) {
      const std::string where = fmt::format("class.members[{}]", k);
      MemberSpec m;
      if (members[k].is_string()) {
        m.name = members[k].get<std::string>();
      } else {
        m.values = numbers(members[k], where);
      }
      out.members.push_back(std::move(m));
    }
  }
  if (value.contains("symmetrize")) out.symmetrize = flag(value["symmetrize"], "class.symmetrize");
  if (value.contains("augment_unit_vectors")) {
    out.augment_unit_vectors = flag(value["augment_unit_vectors"], "class.augment_unit_vectors");
  }
  if (value.contains("gram")) out.gram = parse_matrix(value["gram"], "class.gram");
  if (value.contains("bandwidth")) {
    out.bandwidth = number(value["bandwidth"], "class.bandwidth");
    if (!(*out.bandwidth > 0.0)) config_error("class.bandwidth must be positive");
  }
  if (value.contains("mu")) out.mu = text(value["mu"], "class.mu");
  if (value.contains("allow_zero_mass")) out.allow_zero_mass = flag(value["allow_zero_mass"], "class.allow_zero_mass");
  if (value.contains("discretize")) out.discretize = count(value["discretize"], "class.discretize");
  if (out.variant == "explicit" && out.members.empty() && !out.augment_unit_vectors) {
    config_error("class.members must list at least one function for an explicit class");
  }
  if (out.variant == "rkhs" && out.gram.has_value() == out.bandwidth.has_value()) {
    config_error("class rkhs needs exactly one of gram and bandwidth");
  }
  return out;
}

json class_json(const ClassSpec& c) {
  json out{{"variant", c.variant}};
  if (!c.members.empty()) {
    json members = json::array();
    for (const MemberSpec& m : c.members) members.push_back(m.name ? json(*m.name) : json(m.values));
    out["members"] = members;
  }
  if (c.symmetrize) out["symmetrize"] = true;
  if (c.augment_unit_vectors) out["augment_unit_vectors"] = true;
  if (c.gram) out["gram"] = *c.gram;
  if (c.bandwidth) out["bandwidth"] = *c.bandwidth;
  if (c.variant == "fisher" || c.variant == "sobolev") {
    out["mu"] = c.mu;
    if (c.allow_zero_mass) out["allow_zero_mass"] = true;
  }
  if (c.discretize) out["discretize"] = *c.discretize;
  return out;
}

using TolField = std::variant<double Tolerances::*, int Tolerances::*, long Tolerances::*>;

const std::map<std::string, TolField>& tolerance_fields() {
  static const std::map<std::string, TolField> fields{
      {"metric_triangle", &Tolerances::metric_triangle},
      {"distribution_sum", &Tolerances::distribution_sum},
      {"gram_min_eigenvalue", &Tolerances::gram_min_eigenvalue},
      {"zeta_homogeneity", &Tolerances::zeta_homogeneity},
      {"zeta_homogeneity_samples", &Tolerances::zeta_homogeneity_samples},
      {"lp_feasibility", &Tolerances::lp_feasibility},
      {"lp_optimality", &Tolerances::lp_optimality},
      {"lp_ratio_pivot", &Tolerances::lp_ratio_pivot},
      {"lp_breakdown_pivot", &Tolerances::lp_breakdown_pivot},
      {"lp_phase1", &Tolerances::lp_phase1},
      {"lp_complementarity", &Tolerances::lp_complementarity},
      {"lp_duality_gap", &Tolerances::lp_duality_gap},
      {"lp_refactor_interval", &Tolerances::lp_refactor_interval},
      {"lp_max_iterations", &Tolerances::lp_max_iterations},
      {"pinv_cutoff", &Tolerances::pinv_cutoff},
      {"concavity", &Tolerances::concavity},
      {"power_iterations", &Tolerances::power_iterations},
      {"qp_tolerance", &Tolerances::qp_tolerance},
      {"qp_max_iterations", &Tolerances::qp_max_iterations},
      {"bisection_iterations", &Tolerances::bisection_iterations},
      {"cutting_plane_gap", &Tolerances::cutting_plane_gap},
      {"cutting_plane_max_iterations", &Tolerances::cutting_plane_max_iterations},
      {"column_generation", &Tolerances::column_generation},
      {"column_generation_max_rounds", &Tolerances::column_generation_max_rounds},
      {"ball_feasibility", &Tolerances::ball_feasibility},
      {"alignment_exact", &Tolerances::alignment_exact},
      {"alignment_iterative", &Tolerances::alignment_iterative},
      {"domain_margin", &Tolerances::domain_margin},
  };
  return fields;
}

std::vector<double> parse_epsilon(const json& value) {
  if (value.is_number()) return {number(value, "epsilon")};
  if (value.is_array()) return numbers(value, "epsilon");
  if (value.is_object()) return parse_grid(value, "epsilon").values();
  config_error("epsilon must be a number, an array or {from, to, count}");
}

std::vector<std::string> parse_names(const json& value, const std::string& where) {
  std::vector<std::string> out;
  if (value.is_string()) {
    out.push_back(value.get<std::string>());
    return out;
  }
  if (!value.is_array()) config_error(where + " must be a string or an array of strings");
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(text(value[i], fmt::format("{}[{}]", where, i)));
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows, std::size_t n, const std::string& where) {
  if (rows.size() != n) config_error(fmt::format("{} must have {} rows", where, n));
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      config_error(fmt::format("{} row {} has {} entries, expected {}", where, i, rows[i].size(), n));
    }
    for (std::size_t j = 0; j < n; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return out;
}

}  // namespace

std::vector<double> GridSpec::values() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(count == 1 ? from : from + (to - from) * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  return out;
}

ProblemConfig parse_config(const json& doc) {
  if (!doc.is_object()) config_error("configuration must be a JSON object");
  reject_unknown(doc,
                 {"schema_version", "space", "distributions", "functions", "class", "epsilon", "divergence",
                  "discriminators", "samples", "seed", "tolerances"},
                 "configuration");
  ProblemConfig out;
  if (!doc.contains("schema_version")) config_error("schema_version is required");
  if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion) {
    config_error(fmt::format("schema_version must be {}", kSchemaVersion));
  }
  if (!doc.contains("space")) config_error("space is required");
  out.space = parse_space(doc["space"]);
  if (doc.contains("distributions")) {
    if (!doc["distributions"].is_object()) config_error("distributions must be an object");
    for (const auto& [name, value] : doc["distributions"].items()) {
      out.distributions[name] = parse_distribution(value, "distributions." + name);
    }
  }
  if (doc.contains("functions")) {
    if (!doc["functions"].is_object()) config_error("functions must be an object");
    for (const auto& [name, value] : doc["functions"].items()) {
      out.functions[name] = numbers(value, "functions." + name);
    }
  }
  if (doc.contains("class")) out.cls = parse_class(doc["class"]);
  if (doc.contains("epsilon")) out.epsilon = parse_epsilon(doc["epsilon"]);
  if (doc.contains("divergence")) out.divergences = parse_names(doc["divergence"], "divergence");
  if (doc.contains("discriminators")) out.discriminators = parse_names(doc["discriminators"], "discriminators");
  if (doc.contains("samples")) out.samples = count(doc["samples"], "samples");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) config_error("seed must be a nonnegative integer");
    out.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("tolerances")) {
    if (!doc["tolerances"].is_object()) config_error("tolerances must be an object");
    for (const auto& [name, value] : doc["tolerances"].items()) {
      if (tolerance_fields().count(name) == 0) config_error(fmt::format("unknown tolerance '{}'", name));
      out.tolerances[name] = number(value, "tolerances." + name);
    }
  }
  return out;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open configuration file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    config_error(fmt::format("{} is not valid JSON: {}", path, e.what()));
  }
  return parse_config(doc);
}

json to_json(const ProblemConfig& config) {
  json out;
  out["schema_version"] = config.schema_version;
  json space;
  if (config.space.grid) {
    space["grid"] = grid_json(*config.space.grid);
  } else {
    space["points"] = config.space.points;
  }
  if (config.space.coordinates) space["coordinates"] = *config.space.coordinates;
  if (config.space.metric) space["metric"] = *config.space.metric;
  if (config.space.graph) {
    json edges = json::array();
    for (const Edge& e : *config.space.graph) edges.push_back(json{e.from, e.to, e.weight});
    space["graph"] = edges;
  }
  out["space"] = space;
  if (!config.distributions.empty()) {
    json d = json::object();
    for (const auto& [name, spec] : config.distributions) d[name] = distribution_json(spec);
    out["distributions"] = d;
  }
  if (!config.functions.empty()) {
    json f = json::object();
    for (const auto& [name, values] : config.functions) f[name] = values;
    out["functions"] = f;
  }
  if (config.cls) out["class"] = class_json(*config.cls);
  if (!config.epsilon.empty()) out["epsilon"] = config.epsilon;
  if (!config.divergences.empty()) out["divergence"] = config.divergences;
  if (!config.discriminators.empty()) out["discriminators"] = config.discriminators;
  out["samples"] = config.samples;
  out["seed"] = config.seed;
  if (!config.tolerances.empty()) {
    json t = json::object();
    for (const auto& [name, value] : config.tolerances) t[name] = value;
    out["tolerances"] = t;
  }
  return out;
}

const DiscreteDistribution& Problem::distribution(const std::string& name) const {
  const auto it = distributions.find(name);
  if (it == distributions.end()) config_error(fmt::format("distribution '{}' is not defined", name));
  return it->second;
}

const FunctionVec& Problem::function(const std::string& name) const {
  const auto it = functions.find(name);
  if (it == functions.end()) config_error(fmt::format("function '{}' is not defined", name));
  return it->second;
}

Problem build_problem(const ProblemConfig& config) {
  Problem out;
  for (const auto& [name, value] : config.tolerances) {
    std::visit(
        [&, v = value](auto field) {
          using T = std::remove_reference_t<decltype(out.tolerances.*field)>;
          out.tolerances.*field = static_cast<T>(v);
        },
        tolerance_fields().at(name));
  }
  std::vector<double> coordinates;
  if (config.space.grid) {
    coordinates = config.space.grid->values();
  } else if (config.space.coordinates) {
    coordinates = *config.space.coordinates;
  }
  const std::size_t n = config.space.grid ? config.space.grid->count : config.space.points.size();
  std::vector<std::string> labels = config.space.points;
  if (config.space.grid) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(fmt::format("t{}", i));
  }
  std::optional<Matrix> metric;
  if (!coordinates.empty()) {
    metric = Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        (*metric)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::abs(coordinates[i] - coordinates[j]);
      }
    }
  } else if (config.space.metric) {
    metric = to_matrix(*config.space.metric, n, "space.metric");
  }
  out.space = SampleSpace::make(labels, metric, config.space.graph, out.tolerances);

  for (const auto& [name, spec] : config.distributions) {
    switch (spec.kind) {
      case DistributionSpec::Kind::Weights:
        if (spec.weights.size() != n) {
          config_error(fmt::format("distributions.{} has {} weights, expected {}", name, spec.weights.size(), n));
        }
        out.distributions.emplace(name, DiscreteDistribution::make(out.space, to_vector(spec.weights), out.tolerances));
        break;
      case DistributionSpec::Kind::Uniform:
        out.distributions.emplace(name, DiscreteDistribution::uniform(out.space));
        break;
      case DistributionSpec::Kind::DiscretizedNormal: {
        if (coordinates.empty()) config_error(fmt::format("distributions.{} needs grid or coordinates", name));
        Vector w(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
          const double t = coordinates[i] / spec.sigma;
          w(static_cast<Eigen::Index>(i)) = std::exp(-0.5 * t * t);
        }
        out.distributions.emplace(name, DiscreteDistribution::normalized(out.space, w));
        break;
      }
    }
  }
  for (const auto& [name, values] : config.functions) {
    if (values.size() != n) {
      config_error(fmt::format("functions.{} has {} values, expected {}", name, values.size(), n));
    }
    out.functions.emplace(name, FunctionVec(out.space, to_vector(values)));
  }
  return out;
}

FunctionClass build_class(const ProblemConfig& config, const Problem& problem) {
  if (!config.cls) config_error("class is required for this subcommand");
  const ClassSpec& spec = *config.cls;
  const SpacePtr& space = problem.space;
  const auto n = static_cast<Eigen::Index>(space->size());
  const Tolerances& tol = problem.tolerances;
  auto base = [&]() -> FunctionClass {
    if (spec.variant == "explicit") {
      std::vector<Vector> columns;
      for (std::size_t k = 0; k < spec.members.size(); ++k) {
        const MemberSpec& m = spec.members[k];
        if (m.name) {
          columns.push_back(problem.function(*m.name).values());
        } else {
          if (static_cast<Eigen::Index>(m.values.size()) != n) {
            config_error(fmt::format("class.members[{}] has {} values, expected {}", k, m.values.size(), n));
          }
          columns.push_back(to_vector(m.values));
        }
      }
      if (spec.augment_unit_vectors) {
        for (Eigen::Index i = 0; i < n; ++i) {
          columns.push_back(Vector::Unit(n, i));
          columns.push_back(-Vector::Unit(n, i));
        }
      }
      Matrix members(n, static_cast<Eigen::Index>(columns.size()));
      for (std::size_t k = 0; k < columns.size(); ++k) members.col(static_cast<Eigen::Index>(k)) = columns[k];
      FunctionClass cls = FunctionClass::explicit_set(space, std::move(members));
      return spec.symmetrize ? symmetrize_class(cls).cls : cls;
    }
    if (spec.variant == "lipschitz") return FunctionClass::lipschitz_ball(space);
    if (spec.variant == "sup_norm") return FunctionClass::sup_norm_ball(space);
    if (spec.variant == "dudley") return FunctionClass::dudley_ball(space);
    if (spec.variant == "rkhs") {
      const Matrix gram = spec.gram ? to_matrix(*spec.gram, space->size(), "class.gram")
                                    : gaussian_gram(*space, *spec.bandwidth);
      return FunctionClass::rkhs_ball(space, gram, tol);
    }
    if (spec.variant == "fisher") {
      return FunctionClass::fisher_ball(problem.distribution(spec.mu), spec.allow_zero_mass, tol);
    }
    if (spec.variant == "sobolev") {
      return FunctionClass::sobolev_ball(problem.distribution(spec.mu), spec.allow_zero_mass, tol);
    }
    config_error("unknown class variant " + spec.variant);
  }();
  if (spec.discretize) {
    if (!base.is_structured()) config_error("class.discretize applies to structured classes only");
    return discretize_structured_class(base, *spec.discretize, config.seed);
  }
  return base;
}

Matrix gaussian_gram(const SampleSpace& space, double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::InvalidArgument, "kernel bandwidth must be positive");
  const Matrix& c = space.metric();
  return (-(c.array().square()) / (2.0 * sigma * sigma)).exp().matrix();
}

}  // namespace ipmdro::cli
