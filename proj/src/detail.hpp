#pragma once

#include <cmath>
#include <string>

#include "sqent/state.hpp"

namespace sqent::detail {

inline void require_normalized_bipartite(const DensityOperator& omega, const char* what) {
  if (omega.layout().size() != 2)
    throw InvalidArgument(std::string(what) + ": expected a bipartite layout");
  if (std::abs(omega.weight() - 1.0) > 1e-10)
    throw InvalidArgument(std::string(what) + ": state must be normalized");
}

// Floor applied to eigenvalues before taking logs in analytic gradients.
inline constexpr double kLogFloor = 1e-14;

}  // namespace sqent::detail
