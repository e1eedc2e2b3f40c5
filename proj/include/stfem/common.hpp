#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace stfem {

using Index = std::int32_t;

/// Space-time coordinates (x_1, ..., x_d, t). The time coordinate sits at
/// position `spatial_dim`; unused trailing entries are zero.
using Point = std::array<double, 3>;

/// Raised when mesh data violates a structural invariant (degenerate or
/// non-conforming simplices, mismatched dof maps).
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the linear algebra layer (zero pivots, dimension mismatches).
class LinearAlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace stfem
