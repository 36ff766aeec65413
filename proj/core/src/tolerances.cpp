#include "ipmdro/tolerances.hpp"

namespace ipmdro {

const Tolerances& default_tolerances() noexcept {
  static const Tolerances defaults{};
  return defaults;
}

}  // namespace ipmdro
