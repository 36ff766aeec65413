#include "ipmdro/gan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipmdro/dro.hpp"
#include "ipmdro/error.hpp"
#include "ipmdro/penalties.hpp"

namespace ipmdro {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double x_log_x(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

void check_discriminators(const FDivergence& div, const FunctionClass& discriminators, const Tolerances& tol) {
  const Matrix& members = discriminators.members();
  require(members.cols() > 0, ErrorCode::InvalidArgument, "discriminator set must be nonempty");
  for (Eigen::Index k = 0; k < members.cols(); ++k) {
    for (Eigen::Index i = 0; i < members.rows(); ++i) {
      require(div.in_domain(members(i, k), tol.domain_margin), ErrorCode::DiscriminatorOutOfDomain,
              "discriminator " + std::to_string(k) + " leaves the conjugate domain of " + div.name +
                  " at point " + std::to_string(i));
    }
  }
}

double conjugate_mean(const FDivergence& div, const DiscreteDistribution& mu, const Vector& h) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (mu[i] != 0.0) total += mu[i] * div.f_conj(h(i));
  }
  return total;
}

}  // namespace

bool FDivergence::in_domain(double y, double margin) const {
  if (!std::isfinite(y)) return false;
  if (lo_open ? y < conj_lo + margin : y < conj_lo) return false;
  if (hi_open ? y > conj_hi - margin : y > conj_hi) return false;
  return true;
}

const std::vector<std::string>& f_divergence_names() {
  static const std::vector<std::string> names{"kl", "reverse_kl", "js_gan", "chi2", "tv", "ipm_indicator"};
  return names;
}

FDivergence f_divergence_catalog(std::string_view name) {
  FDivergence d;
  d.name = std::string(name);
  if (name == "kl") {
    d.f = x_log_x;
    d.f_conj = [](double y) { return std::exp(y - 1.0); };
  } else if (name == "reverse_kl") {
    d.f = [](double t) { return t > 0.0 ? -std::log(t) : kInf; };
    d.f_conj = [](double y) { return -1.0 - std::log(-y); };
    d.conj_hi = 0.0;
    d.hi_open = true;
  } else if (name == "js_gan") {
    d.f = [](double t) { return x_log_x(t) - (t + 1.0) * std::log((t + 1.0) / 2.0); };
    d.f_conj = [](double y) { return -std::log(2.0 - std::exp(y)); };
    d.conj_hi = std::log(2.0);
    d.hi_open = true;
  } else if (name == "chi2") {
    d.f = [](double t) { return (t - 1.0) * (t - 1.0); };
    d.f_conj = [](double y) { return 0.25 * y * y + y; };
  } else if (name == "tv") {
    d.f = [](double t) { return std::abs(t - 1.0); };
    d.f_conj = [](double y) { return y; };
    d.conj_lo = -1.0;
    d.conj_hi = 1.0;
  } else if (name == "ipm_indicator") {
    d.f = [](double t) { return t == 1.0 ? 0.0 : kInf; };
    d.f_conj = [](double y) { return y; };
  } else {
    raise(ErrorCode::UnknownDivergence, "unknown divergence '" + std::string(name) + "'");
  }
  return d;
}

FenchelYoungReport fenchel_young_check(const FDivergence& div, int grid) {
  require(grid >= 2, ErrorCode::InvalidArgument, "grid needs at least two points");
  FenchelYoungReport out;
  out.normalization_error = std::abs(div.f(1.0));
  const double margin = 1e-3;
  const double lo = std::isfinite(div.conj_lo) ? div.conj_lo + (div.lo_open ? margin : 0.0) : -3.0;
  const double hi = std::isfinite(div.conj_hi) ? div.conj_hi - (div.hi_open ? margin : 0.0) : 3.0;
  for (int i = 0; i < grid; ++i) {
    const double x = 4.0 * (i + 1) / grid;
    const double fx = div.f(x);
    for (int j = 0; j < grid; ++j) {
      const double y = lo + (hi - lo) * j / (grid - 1);
      if (std::isinf(fx)) continue;
      out.max_violation = std::max(out.max_violation, x * y - fx - div.f_conj(y));
    }
  }
  return out;
}

GanValue gan_objective(const FDivergence& div, const FunctionClass& discriminators,
                       const DiscreteDistribution& mu, const DiscreteDistribution& p, const Tolerances& tol) {
  require_same_space(mu.space(), p.space(), "gan_objective");
  require_same_space(discriminators.space(), p.space(), "gan_objective");
  check_discriminators(div, discriminators, tol);
  const Matrix& members = discriminators.members();
  GanValue out;
  out.value = -kInf;
  for (Eigen::Index k = 0; k < members.cols(); ++k) {
    const Vector h = members.col(k);
    const double value = p.weights().dot(h) - conjugate_mean(div, mu, h);
    if (value > out.value) {
      out.value = value;
      out.best_discriminator = static_cast<std::size_t>(k);
    }
  }
  return out;
}

GanValue robust_gan_sup(const FDivergence& div, const FunctionClass& discriminators, const FunctionClass& cls,
                        double eps, const DiscreteDistribution& mu, const DiscreteDistribution& p,
                        const Tolerances& tol) {
  require(eps > 0.0, ErrorCode::EpsNonPositive, "robust_gan_sup needs eps > 0");
  require_same_space(mu.space(), p.space(), "robust_gan_sup");
  require_same_space(discriminators.space(), p.space(), "robust_gan_sup");
  check_discriminators(div, discriminators, tol);
  const Matrix& members = discriminators.members();
  GanValue out;
  out.value = -kInf;
  for (Eigen::Index k = 0; k < members.cols(); ++k) {
    const FunctionVec h(p.space(), members.col(k));
    const double worst = worst_case_expectation(p, cls, eps, h, tol).value;
    const double value = worst - conjugate_mean(div, mu, h.values());
    if (value > out.value) {
      out.value = value;
      out.best_discriminator = static_cast<std::size_t>(k);
    }
  }
  return out;
}

GanBoundReport gan_bound_check(const FDivergence& div, const FunctionClass& discriminators,
                               const FunctionClass& cls, double eps, const DiscreteDistribution& mu,
                               const DiscreteDistribution& p, const Tolerances& tol) {
  GanBoundReport out;
  out.robust = robust_gan_sup(div, discriminators, cls, eps, mu, p, tol).value;
  out.plain = gan_objective(div, discriminators, mu, p, tol).value;
  const Matrix& members = discriminators.members();
  double largest = 0.0;
  for (Eigen::Index k = 0; k < members.cols(); ++k) {
    largest = std::max(largest, theta(cls, FunctionVec(p.space(), members.col(k)), tol).value);
  }
  out.cap = eps * largest;
  out.slack = out.plain + out.cap - out.robust;
  return out;
}

}  // namespace ipmdro
