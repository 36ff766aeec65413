#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipmdro/function_class.hpp"
#include "ipmdro/space.hpp"
#include "ipmdro/tolerances.hpp"

namespace ipmdro::cli {

inline constexpr int kSchemaVersion = 1;

struct GridSpec {
  double from = 0.0;
  double to = 1.0;
  std::size_t count = 2;

  [[nodiscard]] std::vector<double> values() const;
};

struct SpaceSpec {
  std::vector<std::string> points;
  std::optional<GridSpec> grid;  // points on a line, labelled t0, t1, ...
  std::optional<std::vector<double>> coordinates;
  std::optional<std::vector<std::vector<double>>> metric;
  std::optional<std::vector<Edge>> graph;
};

struct DistributionSpec {
  enum class Kind { Weights, Uniform, DiscretizedNormal };
  Kind kind = Kind::Weights;
  std::vector<double> weights;
  double sigma = 1.0;  // DiscretizedNormal: weight proportional to exp(-t^2 / (2 sigma^2))
};

/// A member of an explicit set: either a named function or inline values.
struct MemberSpec {
  std::optional<std::string> name;
  std::vector<double> values;
};

struct ClassSpec {
  std::string variant;
  std::vector<MemberSpec> members;           // explicit
  bool symmetrize = false;                   // explicit: close under negation
  bool augment_unit_vectors = false;         // explicit: add +-e_i
  std::optional<std::vector<std::vector<double>>> gram;  // rkhs
  std::optional<double> bandwidth;           // rkhs: Gaussian kernel on the metric
  std::string mu = "P";                      // fisher, sobolev
  bool allow_zero_mass = false;              // fisher, sobolev
  std::optional<std::size_t> discretize;     // structured: replace by an explicit sample of this size
};

struct ProblemConfig {
  int schema_version = kSchemaVersion;
  SpaceSpec space;
  std::map<std::string, DistributionSpec> distributions;
  std::map<std::string, std::vector<double>> functions;
  std::optional<ClassSpec> cls;
  std::vector<double> epsilon;
  std::vector<std::string> divergences;
  std::vector<std::string> discriminators;
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;
};

/// Throws Error(ConfigError) with a message naming the offending field.
ProblemConfig parse_config(const nlohmann::ordered_json& doc);
ProblemConfig load_config(const std::string& path);
nlohmann::ordered_json to_json(const ProblemConfig& config);

/// Materialized objects of a configuration.
struct Problem {
  SpacePtr space;
  std::map<std::string, DiscreteDistribution> distributions;
  std::map<std::string, FunctionVec> functions;
  Tolerances tolerances;

  [[nodiscard]] const DiscreteDistribution& distribution(const std::string& name) const;
  [[nodiscard]] const FunctionVec& function(const std::string& name) const;
};

Problem build_problem(const ProblemConfig& config);
FunctionClass build_class(const ProblemConfig& config, const Problem& problem);

/// K_ij = exp(-c(i, j)^2 / (2 sigma^2)) from the metric of the space.
Matrix gaussian_gram(const SampleSpace& space, double sigma);

}  // namespace ipmdro::cli
