#include "ipmdro/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "ipmdro/error.hpp"

namespace ipmdro::lp {
namespace {

enum class ColumnKind : unsigned char { Structural, Slack, Artificial };

// Equality form  min cost' z  s.t.  a z = b, z >= 0, b >= 0.
struct StandardForm {
  Matrix a;
  Vector b;
  Vector cost;
  std::vector<ColumnKind> kind;
  std::vector<Eigen::Index> source;  // original variable of a structural column
  std::vector<double> sign;          // x_source += sign * z
  Vector shift;                      // x = shift + sum sign * z
  std::vector<double> row_sign;
  Eigen::Index eq_rows = 0;
  Eigen::Index ub_rows = 0;
  std::vector<Eigen::Index> initial_basis;
  bool trivially_infeasible = false;
};

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

void validate(const LpProblem& p) {
  const Eigen::Index n = p.num_variables();
  const auto check = [](bool ok, const std::string& what) {
    require(ok, ErrorCode::DimensionMismatch, what);
  };
  check(p.eq_matrix.rows() == p.eq_rhs.size(), "equality rows and rhs differ in length");
  check(p.ub_matrix.rows() == p.ub_rhs.size(), "inequality rows and rhs differ in length");
  check(p.eq_matrix.rows() == 0 || p.eq_matrix.cols() == n, "equality matrix has the wrong width");
  check(p.ub_matrix.rows() == 0 || p.ub_matrix.cols() == n, "inequality matrix has the wrong width");
  check(p.bounds.empty() || static_cast<Eigen::Index>(p.bounds.size()) == n,
        "bounds must be empty or one per variable");
  require(n <= 5000 && p.eq_rhs.size() + p.ub_rhs.size() <= 5000, ErrorCode::InvalidArgument,
          "dense solver is limited to 5000 variables and 5000 constraints");
  require(p.objective.allFinite() && p.eq_matrix.allFinite() && p.eq_rhs.allFinite() &&
              p.ub_matrix.allFinite() && p.ub_rhs.allFinite(),
          ErrorCode::NonFiniteValue, "LP data must be finite");
  for (const VariableBound& vb : p.bounds) {
    require(!std::isnan(vb.lower) && !std::isnan(vb.upper) && vb.lower != kInfinity &&
                vb.upper != -kInfinity,
            ErrorCode::InvalidArgument, "invalid variable bound");
  }
}

VariableBound bound_of(const LpProblem& p, Eigen::Index j) {
  return p.bounds.empty() ? VariableBound{} : p.bounds[static_cast<std::size_t>(j)];
}

StandardForm to_standard_form(const LpProblem& p) {
  StandardForm sf;
  const Eigen::Index n = p.num_variables();
  sf.shift = Vector::Zero(n);

  std::vector<Eigen::Index> bounded_cols;  // structural columns with a finite range
  std::vector<double> ranges;
  for (Eigen::Index j = 0; j < n; ++j) {
    const VariableBound vb = bound_of(p, j);
    if (vb.lower > vb.upper) sf.trivially_infeasible = true;
    if (std::isfinite(vb.lower)) {
      sf.shift(j) = vb.lower;
      sf.source.push_back(j);
      sf.sign.push_back(1.0);
      if (std::isfinite(vb.upper)) {
        bounded_cols.push_back(static_cast<Eigen::Index>(sf.source.size()) - 1);
        ranges.push_back(vb.upper - vb.lower);
      }
    } else if (std::isfinite(vb.upper)) {
      sf.shift(j) = vb.upper;
      sf.source.push_back(j);
      sf.sign.push_back(-1.0);
    } else {
      sf.source.push_back(j);
      sf.sign.push_back(1.0);
      sf.source.push_back(j);
      sf.sign.push_back(-1.0);
    }
  }

  const auto structural = static_cast<Eigen::Index>(sf.source.size());
  sf.eq_rows = p.eq_rhs.size();
  sf.ub_rows = p.ub_rhs.size();
  const auto bound_rows = static_cast<Eigen::Index>(bounded_cols.size());
  const Eigen::Index m = sf.eq_rows + sf.ub_rows + bound_rows;
  const Eigen::Index slacks = sf.ub_rows + bound_rows;

  Matrix rows = Matrix::Zero(m, structural + slacks);
  Vector rhs(m);
  for (Eigen::Index c = 0; c < structural; ++c) {
    const Eigen::Index j = sf.source[static_cast<std::size_t>(c)];
    const double s = sf.sign[static_cast<std::size_t>(c)];
    if (sf.eq_rows > 0) rows.block(0, c, sf.eq_rows, 1) = s * p.eq_matrix.col(j);
    if (sf.ub_rows > 0) rows.block(sf.eq_rows, c, sf.ub_rows, 1) = s * p.ub_matrix.col(j);
  }
  if (sf.eq_rows > 0) rhs.head(sf.eq_rows) = p.eq_rhs - p.eq_matrix * sf.shift;
  if (sf.ub_rows > 0) rhs.segment(sf.eq_rows, sf.ub_rows) = p.ub_rhs - p.ub_matrix * sf.shift;
  for (Eigen::Index k = 0; k < bound_rows; ++k) {
    const Eigen::Index r = sf.eq_rows + sf.ub_rows + k;
    rows(r, bounded_cols[static_cast<std::size_t>(k)]) = 1.0;
    rhs(r) = ranges[static_cast<std::size_t>(k)];
  }
  for (Eigen::Index k = 0; k < slacks; ++k) rows(sf.eq_rows + k, structural + k) = 1.0;

  sf.row_sign.assign(static_cast<std::size_t>(m), 1.0);
  std::vector<Eigen::Index> needs_artificial;
  sf.initial_basis.assign(static_cast<std::size_t>(m), -1);
  for (Eigen::Index r = 0; r < m; ++r) {
    if (rhs(r) < 0.0) {
      rows.row(r) *= -1.0;
      rhs(r) = -rhs(r);
      sf.row_sign[static_cast<std::size_t>(r)] = -1.0;
    }
    const bool has_slack = r >= sf.eq_rows;
    if (has_slack && sf.row_sign[static_cast<std::size_t>(r)] > 0.0) {
      sf.initial_basis[static_cast<std::size_t>(r)] = structural + (r - sf.eq_rows);
    } else {
      needs_artificial.push_back(r);
    }
  }

  const auto artificials = static_cast<Eigen::Index>(needs_artificial.size());
  const Eigen::Index total = structural + slacks + artificials;
  sf.a = Matrix::Zero(m, total);
  sf.a.leftCols(structural + slacks) = rows;
  for (Eigen::Index k = 0; k < artificials; ++k) {
    const Eigen::Index r = needs_artificial[static_cast<std::size_t>(k)];
    sf.a(r, structural + slacks + k) = 1.0;
    sf.initial_basis[static_cast<std::size_t>(r)] = structural + slacks + k;
  }
  sf.b = rhs;

  sf.kind.assign(static_cast<std::size_t>(total), ColumnKind::Structural);
  for (Eigen::Index k = 0; k < slacks; ++k) sf.kind[static_cast<std::size_t>(structural + k)] = ColumnKind::Slack;
  for (Eigen::Index k = 0; k < artificials; ++k) {
    sf.kind[static_cast<std::size_t>(structural + slacks + k)] = ColumnKind::Artificial;
  }

  // Maximization of c'x becomes minimization of -c'x in z.
  sf.cost = Vector::Zero(total);
  for (Eigen::Index c = 0; c < structural; ++c) {
    sf.cost(c) = -p.objective(sf.source[static_cast<std::size_t>(c)]) * sf.sign[static_cast<std::size_t>(c)];
  }
  return sf;
}

class RevisedSimplex {
 public:
  enum class Outcome { Optimal, Unbounded };

  RevisedSimplex(const Matrix& a, const Vector& b, std::vector<Eigen::Index> basis, const Tolerances& tol)
      : a_(a), b_(b), basis_(std::move(basis)), tol_(tol) {
    position_.assign(static_cast<std::size_t>(a_.cols()), -1);
    for (std::size_t r = 0; r < basis_.size(); ++r) position_[static_cast<std::size_t>(basis_[r])] = static_cast<Eigen::Index>(r);
    refactor();
  }

  Outcome optimize(const Vector& cost, const std::vector<char>& allowed) {
    const double scale = std::max(1.0, inf_norm(cost));
    const Eigen::Index m = a_.rows();
    Vector cb(m);
    while (true) {
      require(iterations_ < tol_.lp_max_iterations, ErrorCode::NumericalBreakdown,
              "simplex iteration limit reached");
      for (Eigen::Index r = 0; r < m; ++r) cb(r) = cost(basis_[static_cast<std::size_t>(r)]);
      const Vector y = binv_.transpose() * cb;

      // Bland: the lowest-index improving column enters.
      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < a_.cols(); ++j) {
        if (position_[static_cast<std::size_t>(j)] >= 0 || !allowed[static_cast<std::size_t>(j)]) continue;
        const double reduced = cost(j) - y.dot(a_.col(j));
        if (reduced < -tol_.lp_optimality * scale) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return Outcome::Optimal;

      const Vector alpha = binv_ * a_.col(entering);
      Eigen::Index leaving = -1;
      double best = kInfinity;
      for (Eigen::Index r = 0; r < m; ++r) {
        if (alpha(r) <= tol_.lp_ratio_pivot) continue;
        const double ratio = std::max(xb_(r), 0.0) / alpha(r);
        const double tie = 1e-12 * (1.0 + std::min(best, ratio));
        if (leaving < 0 || ratio < best - tie) {
          leaving = r;
          best = ratio;
        } else if (ratio <= best + tie &&
                   basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leaving)]) {
          leaving = r;
          best = std::min(best, ratio);
        }
      }
      if (leaving < 0) return Outcome::Unbounded;
      pivot(entering, leaving, alpha);
    }
  }

  // Swaps basic artificial columns for structural or slack columns where the
  // row allows it; rows where no such column has a nonzero entry are
  // redundant and keep their (zero-valued) artificial.
  void drive_out(const std::vector<ColumnKind>& kind) {
    for (Eigen::Index r = 0; r < a_.rows(); ++r) {
      if (kind[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] != ColumnKind::Artificial) continue;
      const Vector row = a_.transpose() * binv_.row(r).transpose();
      for (Eigen::Index j = 0; j < a_.cols(); ++j) {
        if (position_[static_cast<std::size_t>(j)] >= 0 || kind[static_cast<std::size_t>(j)] == ColumnKind::Artificial) continue;
        if (std::abs(row(j)) > tol_.lp_ratio_pivot) {
          const Vector alpha = binv_ * a_.col(j);
          pivot(j, r, alpha);
          break;
        }
      }
    }
  }

  void refactor() {
    const Eigen::Index m = a_.rows();
    since_refactor_ = 0;
    if (m == 0) {
      binv_.resize(0, 0);
      xb_.resize(0);
      return;
    }
    Matrix basis_matrix(m, m);
    for (Eigen::Index r = 0; r < m; ++r) basis_matrix.col(r) = a_.col(basis_[static_cast<std::size_t>(r)]);
    Eigen::PartialPivLU<Matrix> lu(basis_matrix);
    const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double scale = std::max(1.0, basis_matrix.cwiseAbs().maxCoeff());
    require(pivots.minCoeff() >= tol_.lp_breakdown_pivot * scale, ErrorCode::NumericalBreakdown,
            "basis matrix is numerically singular");
    binv_ = lu.inverse();
    xb_ = binv_ * b_;
  }

  [[nodiscard]] Vector duals(const Vector& cost) const {
    Vector cb(a_.rows());
    for (Eigen::Index r = 0; r < a_.rows(); ++r) cb(r) = cost(basis_[static_cast<std::size_t>(r)]);
    return binv_.transpose() * cb;
  }

  [[nodiscard]] const Vector& basic_values() const noexcept { return xb_; }
  [[nodiscard]] const std::vector<Eigen::Index>& basis() const noexcept { return basis_; }
  [[nodiscard]] long iterations() const noexcept { return iterations_; }

 private:
  void pivot(Eigen::Index entering, Eigen::Index leaving, const Vector& alpha) {
    const double theta = std::max(xb_(leaving), 0.0) / alpha(leaving);
    xb_ -= theta * alpha;
    xb_(leaving) = theta;
    const Eigen::RowVectorXd pivot_row = binv_.row(leaving) / alpha(leaving);
    binv_.noalias() -= alpha * pivot_row;
    binv_.row(leaving) = pivot_row;
    position_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leaving)])] = -1;
    basis_[static_cast<std::size_t>(leaving)] = entering;
    position_[static_cast<std::size_t>(entering)] = leaving;
    ++iterations_;
    if (++since_refactor_ >= tol_.lp_refactor_interval) refactor();
  }

  const Matrix& a_;
  const Vector& b_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> position_;
  const Tolerances& tol_;
  Matrix binv_;
  Vector xb_;
  long iterations_ = 0;
  int since_refactor_ = 0;
};

}  // namespace

std::string_view to_string(LpStatus status) noexcept {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

LpSolution solve_lp(const LpProblem& problem, const Tolerances& tol) {
  validate(problem);
  LpSolution out;
  out.eq_duals = Vector::Zero(problem.eq_rhs.size());
  out.ub_duals = Vector::Zero(problem.ub_rhs.size());
  const StandardForm sf = to_standard_form(problem);
  if (sf.trivially_infeasible) {
    out.status = LpStatus::Infeasible;
    return out;
  }

  const auto total = static_cast<std::size_t>(sf.a.cols());
  RevisedSimplex simplex(sf.a, sf.b, sf.initial_basis, tol);

  Vector phase1_cost = Vector::Zero(sf.a.cols());
  bool has_artificial = false;
  for (std::size_t j = 0; j < total; ++j) {
    if (sf.kind[j] == ColumnKind::Artificial) {
      phase1_cost(static_cast<Eigen::Index>(j)) = 1.0;
      has_artificial = true;
    }
  }
  if (has_artificial) {
    const std::vector<char> everything(total, 1);
    simplex.optimize(phase1_cost, everything);
    double infeasibility = 0.0;
    const auto& basis = simplex.basis();
    for (std::size_t r = 0; r < basis.size(); ++r) {
      if (sf.kind[static_cast<std::size_t>(basis[r])] == ColumnKind::Artificial) {
        infeasibility += std::max(simplex.basic_values()(static_cast<Eigen::Index>(r)), 0.0);
      }
    }
    if (infeasibility > tol.lp_phase1 * (1.0 + inf_norm(sf.b))) {
      out.status = LpStatus::Infeasible;
      out.iterations = simplex.iterations();
      return out;
    }
    simplex.drive_out(sf.kind);
  }

  std::vector<char> allowed(total, 1);
  for (std::size_t j = 0; j < total; ++j) allowed[j] = sf.kind[j] != ColumnKind::Artificial;
  const auto outcome = simplex.optimize(sf.cost, allowed);
  out.iterations = simplex.iterations();
  if (outcome == RevisedSimplex::Outcome::Unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  simplex.refactor();
  const Vector& xb = simplex.basic_values();
  require(xb.size() == 0 || xb.minCoeff() >= -tol.lp_feasibility * (1.0 + inf_norm(sf.b)),
          ErrorCode::NumericalBreakdown, "basic solution lost feasibility after refactorization");
  Vector z = Vector::Zero(sf.a.cols());
  for (std::size_t r = 0; r < simplex.basis().size(); ++r) {
    z(simplex.basis()[r]) = std::max(xb(static_cast<Eigen::Index>(r)), 0.0);
  }
  out.primal = sf.shift;
  for (std::size_t c = 0; c < sf.source.size(); ++c) {
    out.primal(sf.source[c]) += sf.sign[c] * z(static_cast<Eigen::Index>(c));
  }
  out.objective = problem.objective.dot(out.primal);

  const Vector y = simplex.duals(sf.cost);
  for (Eigen::Index r = 0; r < sf.eq_rows; ++r) {
    out.eq_duals(r) = -sf.row_sign[static_cast<std::size_t>(r)] * y(r);
  }
  for (Eigen::Index r = 0; r < sf.ub_rows; ++r) {
    const Eigen::Index row = sf.eq_rows + r;
    out.ub_duals(r) = -sf.row_sign[static_cast<std::size_t>(row)] * y(row);
  }
  out.status = LpStatus::Optimal;

  const LpCertificate cert = certify(problem, out);
  require(cert.holds(problem, out, tol), ErrorCode::NumericalBreakdown,
          "optimal basis failed its certificate (residual " + std::to_string(cert.primal_residual) +
              ", gap " + std::to_string(cert.duality_gap) + ")");
  return out;
}

LpCertificate certify(const LpProblem& p, const LpSolution& s) {
  LpCertificate cert;
  const Vector& x = s.primal;
  const Eigen::Index n = p.num_variables();

  Vector reduced = p.objective;
  cert.dual_objective = 0.0;
  if (p.eq_rhs.size() > 0) {
    const Vector r = p.eq_matrix * x - p.eq_rhs;
    cert.primal_residual = std::max(cert.primal_residual, inf_norm(r));
    reduced -= p.eq_matrix.transpose() * s.eq_duals;
    cert.dual_objective += p.eq_rhs.dot(s.eq_duals);
  }
  if (p.ub_rhs.size() > 0) {
    const Vector slack = p.ub_rhs - p.ub_matrix * x;
    for (Eigen::Index r = 0; r < slack.size(); ++r) {
      cert.primal_residual = std::max(cert.primal_residual, -slack(r));
      cert.dual_infeasibility = std::max(cert.dual_infeasibility, -s.ub_duals(r));
      cert.complementarity = std::max(cert.complementarity, std::abs(s.ub_duals(r) * slack(r)));
    }
    reduced -= p.ub_matrix.transpose() * s.ub_duals;
    cert.dual_objective += p.ub_rhs.dot(s.ub_duals);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const VariableBound vb = bound_of(p, j);
    cert.primal_residual = std::max({cert.primal_residual, vb.lower - x(j), x(j) - vb.upper});
    const double rj = reduced(j);
    if (rj > 0.0) {
      if (std::isfinite(vb.upper)) {
        cert.dual_objective += rj * vb.upper;
        cert.complementarity = std::max(cert.complementarity, std::abs(rj * (vb.upper - x(j))));
      } else {
        cert.dual_infeasibility = std::max(cert.dual_infeasibility, rj);
      }
    } else if (rj < 0.0) {
      if (std::isfinite(vb.lower)) {
        cert.dual_objective += rj * vb.lower;
        cert.complementarity = std::max(cert.complementarity, std::abs(rj * (x(j) - vb.lower)));
      } else {
        cert.dual_infeasibility = std::max(cert.dual_infeasibility, -rj);
      }
    }
  }
  cert.duality_gap = cert.dual_objective - s.objective;
  return cert;
}

bool LpCertificate::holds(const LpProblem& p, const LpSolution& s, const Tolerances& tol) const {
  const double rhs_scale = 1.0 + std::max(inf_norm(p.eq_rhs), inf_norm(p.ub_rhs));
  return primal_residual <= tol.lp_feasibility * rhs_scale &&
         dual_infeasibility <= tol.lp_complementarity &&
         complementarity <= tol.lp_complementarity &&
         std::abs(duality_gap) <= tol.lp_duality_gap * (1.0 + std::abs(s.objective));
}

Eigen::Index LpBuilder::add_variable(double lower, double upper, double cost) {
  costs_.push_back(cost);
  bounds_.push_back({lower, upper});
  return static_cast<Eigen::Index>(costs_.size()) - 1;
}

Eigen::Index LpBuilder::add_eq(Terms terms, double rhs) {
  eq_rows_.emplace_back(std::move(terms), rhs);
  return static_cast<Eigen::Index>(eq_rows_.size()) - 1;
}

Eigen::Index LpBuilder::add_le(Terms terms, double rhs) {
  ub_rows_.emplace_back(std::move(terms), rhs);
  return static_cast<Eigen::Index>(ub_rows_.size()) - 1;
}

Eigen::Index LpBuilder::add_ge(Terms terms, double rhs) {
  for (auto& term : terms) term.second = -term.second;
  return add_le(std::move(terms), -rhs);
}

LpProblem LpBuilder::build() const {
  LpProblem p;
  const Eigen::Index n = num_variables();
  p.objective = Eigen::Map<const Vector>(costs_.data(), n);
  p.bounds = bounds_;
  auto fill = [n](const std::vector<std::pair<Terms, double>>& rows, Matrix& a, Vector& b) {
    a = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), n);
    b = Vector::Zero(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (const auto& [var, coef] : rows[r].first) {
        require(var >= 0 && var < n, ErrorCode::DimensionMismatch, "LP term references a missing variable");
        a(static_cast<Eigen::Index>(r), var) += coef;
      }
      b(static_cast<Eigen::Index>(r)) = rows[r].second;
    }
  };
  fill(eq_rows_, p.eq_matrix, p.eq_rhs);
  fill(ub_rows_, p.ub_matrix, p.ub_rhs);
  return p;
}

}  // namespace ipmdro::lp
