#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace ipmdro {

/// Seeded generator with platform-independent draws. The standard
/// distributions are implementation defined, so the helpers below derive
/// uniforms and normals straight from the 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();
  std::size_t index(std::size_t n);  // uniform in [0, n)

  Eigen::VectorXd normal_vector(Eigen::Index n);
  Eigen::VectorXd uniform_vector(Eigen::Index n, double lo, double hi);
  /// Dirichlet(1,...,1) draw: uniform on the probability simplex.
  Eigen::VectorXd simplex_point(Eigen::Index n);

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ipmdro
