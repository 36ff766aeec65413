#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ipmdro/function_class.hpp"
#include "ipmdro/space.hpp"
#include "ipmdro/tolerances.hpp"

namespace ipmdro {

/// A convex generator f with f(1) = 0 and its conjugate f*(y) = sup_x xy - f(x).
struct FDivergence {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> f_conj;
  /// Domain of f*; infinite ends are unbounded.
  double conj_lo = -std::numeric_limits<double>::infinity();
  double conj_hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;

  /// Whether y lies in dom f*, keeping `margin` away from open endpoints.
  [[nodiscard]] bool in_domain(double y, double margin) const;
};

/// Names accepted by f_divergence_catalog.
const std::vector<std::string>& f_divergence_names();

/// kl, reverse_kl, js_gan, chi2, tv or ipm_indicator. Throws UnknownDivergence.
FDivergence f_divergence_catalog(std::string_view name);

struct FenchelYoungReport {
  double normalization_error = 0.0;  // |f(1)|
  double max_violation = 0.0;        // max of xy - f(x) - f*(y) on the grid, clipped at zero
};

/// Checks f(1) = 0 and f(x) + f*(y) >= xy on a grid of x in (0, 4] and y in dom f*.
FenchelYoungReport fenchel_young_check(const FDivergence& div, int grid = 32);

struct GanValue {
  double value = 0.0;
  std::size_t best_discriminator = 0;
};

/// max_{h in H} E_P[h] - E_mu[f*(h)] over an explicit discriminator set.
/// Throws DiscriminatorOutOfDomain when a member leaves dom f*.
GanValue gan_objective(const FDivergence& div, const FunctionClass& discriminators,
                       const DiscreteDistribution& mu, const DiscreteDistribution& p,
                       const Tolerances& tol = default_tolerances());

/// max_{h in H} sup_{Q in B(P)} E_Q[h] - E_mu[f*(h)].
GanValue robust_gan_sup(const FDivergence& div, const FunctionClass& discriminators, const FunctionClass& cls,
                        double eps, const DiscreteDistribution& mu, const DiscreteDistribution& p,
                        const Tolerances& tol = default_tolerances());

struct GanBoundReport {
  double robust = 0.0;
  double plain = 0.0;
  /// eps max_{h in H} Theta(h).
  double cap = 0.0;
  /// plain + cap - robust.
  double slack = 0.0;
};

GanBoundReport gan_bound_check(const FDivergence& div, const FunctionClass& discriminators,
                               const FunctionClass& cls, double eps, const DiscreteDistribution& mu,
                               const DiscreteDistribution& p, const Tolerances& tol = default_tolerances());

}  // namespace ipmdro
