#pragma once

namespace ipmdro {

/// Numerical thresholds shared by every module. Acceptance tests read the same
/// record, so a threshold is changed in exactly one place.
struct Tolerances {
  // Input validation.
  double metric_triangle = 1e-12;
  double distribution_sum = 1e-12;
  double gram_min_eigenvalue = 1e-10;
  double zeta_homogeneity = 1e-9;
  int zeta_homogeneity_samples = 16;

  // Dense simplex.
  double lp_feasibility = 1e-9;
  double lp_optimality = 1e-9;
  double lp_ratio_pivot = 1e-9;
  double lp_breakdown_pivot = 1e-11;
  double lp_phase1 = 1e-9;
  double lp_complementarity = 1e-7;
  double lp_duality_gap = 1e-7;
  int lp_refactor_interval = 50;
  long lp_max_iterations = 200000;

  // Spectral cutoffs.
  double pinv_cutoff = 1e-10;
  double concavity = 1e-10;
  int power_iterations = 64;

  // Iterative paths.
  double qp_tolerance = 1e-11;
  long qp_max_iterations = 20000;
  int bisection_iterations = 60;
  double cutting_plane_gap = 1e-8;
  int cutting_plane_max_iterations = 3000;
  double column_generation = 1e-7;
  int column_generation_max_rounds = 500;

  // Verification thresholds.
  double ball_feasibility = 1e-7;
  double alignment_exact = 1e-6;
  double alignment_iterative = 5e-4;
  double domain_margin = 1e-9;
};

const Tolerances& default_tolerances() noexcept;

}  // namespace ipmdro
