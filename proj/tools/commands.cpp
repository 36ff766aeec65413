#include "commands.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "ipmdro/critic.hpp"
#include "ipmdro/dro.hpp"
#include "ipmdro/error.hpp"
#include "ipmdro/gan.hpp"
#include "ipmdro/ipm.hpp"
#include "ipmdro/penalties.hpp"

namespace ipmdro::cli {
namespace {

using json = nlohmann::ordered_json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

void require_epsilon(const ProblemConfig& config) {
  require(!config.epsilon.empty(), ErrorCode::ConfigError, "epsilon is required for this subcommand");
}

std::vector<std::string> function_names(const ProblemConfig& config) {
  std::vector<std::string> out;
  for (const auto& [name, values] : config.functions) out.push_back(name);
  require(!out.empty(), ErrorCode::ConfigError, "functions must define at least one function");
  return out;
}

double threshold(const RunOptions& options, bool exact) {
  if (options.tol) return *options.tol;
  return exact ? 1e-6 : 5e-4;
}

void describe(Report& report, const ProblemConfig& config, const FunctionClass* cls) {
  report.set_meta("schema_version", kSchemaVersion);
  report.set_meta("seed", config.seed);
  if (cls != nullptr) report.set_meta("class", std::string(cls->name()));
}

Report cmd_ipm(const ProblemConfig& config, const Problem& problem) {
  const FunctionClass cls = build_class(config, problem);
  Report report("ipm", {"from", "to", "value"});
  describe(report, config, &cls);
  for (const auto& [from, to] : {std::pair<std::string, std::string>{"Q", "P"}, {"P", "Q"}}) {
    const IpmValue d = ipm_distance(cls, problem.distribution(from), problem.distribution(to), problem.tolerances);
    json detail = json::object();
    if (d.witness) detail["witness"] = vector_json(*d.witness);
    if (d.transport_plan) {
      json plan = json::array();
      for (Eigen::Index i = 0; i < d.transport_plan->rows(); ++i) plan.push_back(vector_json(d.transport_plan->row(i)));
      detail["transport_plan"] = plan;
    }
    report.add_row({from, to, d.value}, detail);
  }
  return report;
}

Report cmd_penalty(const ProblemConfig& config, const Problem& problem) {
  require_epsilon(config);
  const FunctionClass cls = build_class(config, problem);
  const DiscreteDistribution& p = problem.distribution("P");
  Report report("penalty", {"function", "eps", "theta", "centered_theta", "b_star", "j", "lambda", "lambda_lower",
                            "lambda_exact"});
  describe(report, config, &cls);
  for (const std::string& name : function_names(config)) {
    const FunctionVec& h = problem.function(name);
    const PenaltyValue gauge = theta(cls, h, problem.tolerances);
    const CenteredPenalty centered = centered_theta(cls, h, problem.tolerances);
    const PenaltyValue j = j_penalty(p, h);
    for (double eps : config.epsilon) {
      const PenaltyValue lambda = lambda_penalty(p, cls, eps, h, problem.tolerances);
      json detail = json::object();
      if (lambda.decomposition) {
        detail["h1"] = vector_json(lambda.decomposition->h1);
        detail["h2"] = vector_json(lambda.decomposition->h2);
      }
      report.add_row({name, eps, gauge.value, centered.penalty.value, centered.b_star, j.value, lambda.value,
                      lambda.lower_bound, lambda.exact},
                     detail);
    }
  }
  return report;
}

Report cmd_dro(const ProblemConfig& config, const Problem& problem) {
  require_epsilon(config);
  const FunctionClass cls = build_class(config, problem);
  const DiscreteDistribution& p = problem.distribution("P");
  Report report("dro-sup", {"function", "eps", "value", "e_p_h", "gap_estimate", "method"});
  describe(report, config, &cls);
  for (const std::string& name : function_names(config)) {
    const FunctionVec& h = problem.function(name);
    for (double eps : config.epsilon) {
      const DroResult r = worst_case_expectation(p, cls, eps, h, problem.tolerances);
      report.add_row({name, eps, r.value, expectation(p, h), r.gap_estimate, std::string(to_string(r.method))},
                     json{{"worst_q", vector_json(r.worst_q.weights())}});
    }
  }
  return report;
}

Report cmd_identity(const ProblemConfig& config, const Problem& problem, const RunOptions& options) {
  require_epsilon(config);
  const FunctionClass cls = build_class(config, problem);
  const DiscreteDistribution& p = problem.distribution("P");
  Report report("verify-identity", {"function", "eps", "lhs", "e_p_h", "lambda", "rhs", "residual", "lhs_gap",
                                    "lambda_gap", "exact", "pass"});
  describe(report, config, &cls);
  for (const std::string& name : function_names(config)) {
    const FunctionVec& h = problem.function(name);
    for (double eps : config.epsilon) {
      const IdentityReport r = verify_identity(p, cls, eps, h, problem.tolerances);
      const bool pass = r.residual <= threshold(options, r.exact);
      report.add_row({name, eps, r.lhs, r.e_p_h, r.lambda_value, r.e_p_h + r.lambda_value, r.residual, r.lhs_gap,
                      r.lambda_gap, r.exact, pass});
    }
  }
  return report;
}

Report cmd_tightness(const ProblemConfig& config, const Problem& problem, const RunOptions& options) {
  require_epsilon(config);
  const FunctionClass cls = build_class(config, problem);
  const DiscreteDistribution& p = problem.distribution("P");
  Report report("tightness", {"eps", "samples", "max_bound_violation", "max_subadditivity_violation", "pass"});
  describe(report, config, &cls);
  const double limit = options.tol.value_or(1e-8);
  for (double eps : config.epsilon) {
    const TightnessReport r = tightness_report(p, cls, eps, config.samples, config.seed, problem.tolerances);
    report.add_row({eps, static_cast<long long>(r.samples), r.max_bound_violation, r.max_subadditivity_violation,
                    r.max_bound_violation <= limit && r.max_subadditivity_violation <= limit});
  }
  return report;
}

Report cmd_critic(const ProblemConfig& config, const Problem& problem, const RunOptions& options) {
  require_epsilon(config);
  const FunctionClass cls = build_class(config, problem);
  const DiscreteDistribution& p = problem.distribution("P");
  const bool has_mu = config.distributions.count("mu") > 0;
  const DiscreteDistribution& mu = has_mu ? problem.distribution("mu") : p;
  Report report("critic-check", {"function", "eps", "lambda", "eps_theta", "gap", "aligned", "witness_ball_violation",
                                 "witness_residual", "critic_loss", "mu_distance", "critic_bounded", "two_sided",
                                 "sup_residual", "inf_residual"});
  describe(report, config, &cls);
  const bool even = cls.is_even();
  for (const std::string& name : function_names(config)) {
    const FunctionVec& h = problem.function(name);
    for (double eps : config.epsilon) {
      const AlignmentReport a = check_alignment(p, cls, eps, h, problem.tolerances);
      const double loss = critic_loss(p, mu, eps, cls, h, problem.tolerances);
      const CriticInfimum inf = critic_infimum(p, mu, eps, cls, problem.tolerances);
      std::string two_sided = "skipped: not aligned";
      double sup_residual = kNaN;
      double inf_residual = kNaN;
      json detail = json::object();
      if (a.witness_mu) detail["witness_mu"] = vector_json(a.witness_mu->weights());
      if (inf.ray) detail["unbounded_ray"] = vector_json(*inf.ray);
      if (!even) {
        two_sided = "skipped: class not even";
      } else if (a.aligned && a.witness_mu) {
        const TwoSidedReport t = two_sided_check(p, *a.witness_mu, cls, eps, h, problem.tolerances);
        sup_residual = t.sup_residual;
        inf_residual = t.inf_residual;
        const bool ok = std::max(sup_residual, inf_residual) <= threshold(options, a.exact);
        two_sided = ok ? "pass" : "fail";
      }
      report.add_row({name, eps, a.lambda_value, a.eps_theta, a.gap, a.aligned, a.witness_ball_violation,
                      a.witness_residual, loss, inf.distance, inf.bounded, two_sided, sup_residual, inf_residual},
                     detail);
    }
  }
  return report;
}

Report cmd_gan(const ProblemConfig& config, const Problem& problem, const RunOptions& options) {
  require_epsilon(config);
  require(!config.discriminators.empty(), ErrorCode::ConfigError, "discriminators must list at least one function");
  require(!config.divergences.empty(), ErrorCode::ConfigError, "divergence is required for gan-bound");
  const DiscreteDistribution& p = problem.distribution("P");
  const DiscreteDistribution& mu = problem.distribution("mu");
  std::vector<FunctionVec> members;
  for (const std::string& name : config.discriminators) members.push_back(problem.function(name));
  const FunctionClass discriminators = FunctionClass::explicit_set(members);
  // Without a class the ball is built from the discriminators themselves.
  const FunctionClass cls = config.cls ? build_class(config, problem) : symmetrize_class(discriminators).cls;
  Report report("gan-bound", {"divergence", "eps", "robust", "plain", "cap", "slack", "pass"});
  describe(report, config, &cls);
  for (const std::string& name : config.divergences) {
    const FDivergence div = f_divergence_catalog(name);
    for (double eps : config.epsilon) {
      const GanBoundReport r = gan_bound_check(div, discriminators, cls, eps, mu, p, problem.tolerances);
      report.add_row({name, eps, r.robust, r.plain, r.cap, r.slack, r.slack >= -options.tol.value_or(1e-7)});
    }
  }
  return report;
}

Report cmd_repro_sin(const ProblemConfig& config, const Problem& problem, const RunOptions& options) {
  require_epsilon(config);
  const SpacePtr& space = problem.space;
  require(space->is_line_metric(), ErrorCode::ConfigError, "repro-sin needs points on a line");
  const FunctionClass cls = FunctionClass::lipschitz_ball(space);
  const DiscreteDistribution& p = problem.distribution("P");
  const FunctionVec& h1 = problem.function("h1");
  const FunctionVec& h2 = problem.function("h2");
  const FunctionVec h = h1 + h2;
  Report report("repro-sin", {"eps", "e_p_h", "eps_lip", "lambda_lp", "lambda_decomposition", "worst_case",
                              "strict_gap", "pass"});
  describe(report, config, &cls);
  const double lip = lipschitz_constant(*space, h.values());
  for (double eps : config.epsilon) {
    const PenaltyValue lambda = lambda_penalty(p, cls, eps, h, problem.tolerances);
    const double split = j_penalty(p, h1).value + eps * lipschitz_constant(*space, h2.values());
    const DroResult worst = worst_case_expectation(p, cls, eps, h, problem.tolerances);
    const double slack = options.tol.value_or(1e-7);
    const bool pass = lambda.value <= split + slack && lambda.value < eps * lip &&
                      std::abs(worst.value - expectation(p, h) - lambda.value) <= threshold(options, true);
    report.add_row({eps, expectation(p, h), eps * lip, lambda.value, split, worst.value, eps * lip - lambda.value,
                    pass});
  }
  return report;
}

Report cmd_sweep(const ProblemConfig& config, const Problem& problem, const RunOptions& options) {
  require_epsilon(config);
  const FunctionClass cls = build_class(config, problem);
  const DiscreteDistribution& p = problem.distribution("P");
  const std::vector<std::string> names = function_names(config);
  const std::string name = config.functions.count("h") > 0 ? std::string("h") : names.front();
  const FunctionVec& h = problem.function(name);
  Report report("sweep-eps", {"eps", "lhs", "e_p_h", "lambda", "residual", "bound_rhs", "bound_slack",
                              "monotone", "pass"});
  describe(report, config, &cls);
  report.set_meta("function", name);
  double previous = -std::numeric_limits<double>::infinity();
  for (double eps : config.epsilon) {
    const IdentityReport r = verify_identity(p, cls, eps, h, problem.tolerances);
    const BoundReport b = corollary_bound(p, cls, eps, h, problem.tolerances);
    const bool monotone = r.lhs >= previous - 1e-9;
    previous = std::max(previous, r.lhs);
    const bool pass = r.residual <= threshold(options, r.exact) && b.slack >= -1e-7 && monotone;
    report.add_row({eps, r.lhs, r.e_p_h, r.lambda_value, r.residual, b.rhs, b.slack, monotone, pass});
  }
  return report;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"ipm",          "penalty",  "dro-sup",  "verify-identity", "tightness",
                                              "critic-check", "gan-bound", "repro-sin", "sweep-eps"};
  return names;
}

ProblemConfig builtin_sin_config() {
  ProblemConfig config;
  config.space.grid = GridSpec{-4.0, 4.0, 201};
  DistributionSpec normal;
  normal.kind = DistributionSpec::Kind::DiscretizedNormal;
  normal.sigma = 1.0;
  config.distributions["P"] = normal;
  config.epsilon = {1.0};
  return config;
}

Report run_subcommand(const std::string& name, const ProblemConfig& input, const RunOptions& options) {
  ProblemConfig config = input;
  if (options.seed) config.seed = *options.seed;
  if (name == "repro-sin") {
    // Default decomposition sin 2t + t on the configured coordinates.
    std::vector<double> coordinates;
    if (config.space.grid) coordinates = config.space.grid->values();
    if (config.space.coordinates) coordinates = *config.space.coordinates;
    require(!coordinates.empty(), ErrorCode::ConfigError, "repro-sin needs space.grid or space.coordinates");
    if (config.functions.count("h1") == 0 && config.functions.count("h2") == 0) {
      for (double t : coordinates) {
        config.functions["h1"].push_back(std::sin(2.0 * t));
        config.functions["h2"].push_back(t);
      }
    }
    if (config.distributions.count("P") == 0) {
      DistributionSpec normal;
      normal.kind = DistributionSpec::Kind::DiscretizedNormal;
      config.distributions["P"] = normal;
    }
  }
  const Problem problem = build_problem(config);
  if (name == "ipm") return cmd_ipm(config, problem);
  if (name == "penalty") return cmd_penalty(config, problem);
  if (name == "dro-sup") return cmd_dro(config, problem);
  if (name == "verify-identity") return cmd_identity(config, problem, options);
  if (name == "tightness") return cmd_tightness(config, problem, options);
  if (name == "critic-check") return cmd_critic(config, problem, options);
  if (name == "gan-bound") return cmd_gan(config, problem, options);
  if (name == "repro-sin") return cmd_repro_sin(config, problem, options);
  if (name == "sweep-eps") return cmd_sweep(config, problem, options);
  raise(ErrorCode::ConfigError, "unknown subcommand " + name);
}

int run(const std::string& name, const RunOptions& options, std::ostream& err) {
  try {
    ProblemConfig config;
    if (options.config_path) {
      config = load_config(*options.config_path);
    } else if (name == "repro-sin") {
      config = builtin_sin_config();
    } else {
      raise(ErrorCode::ConfigError, "--config is required for " + name);
    }
    const Report report = run_subcommand(name, config, options);
    report.write(options.out_dir);
    return kExitOk;
  } catch (const Error& e) {
    err << "ipmdro " << name << ": " << e.what() << "\n";
    return e.code() == ErrorCode::NumericalBreakdown ? kExitNumerical : kExitValidation;
  } catch (const std::exception& e) {
    err << "ipmdro " << name << ": " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace ipmdro::cli
