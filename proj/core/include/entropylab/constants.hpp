#pragma once

#include <numbers>

namespace elab {

// Ambient dimension n+1 used by the functional. PDE work is planar; the
// collapse scans pass their own dimension explicitly.
struct AmbientDimension {
  int value;

  // exponent of the heat-kernel normalisation (4πτ)^{dim/2}
  constexpr double half() const { return 0.5 * value; }
};

inline constexpr AmbientDimension kPlanar{2};

inline constexpr double kPi = std::numbers::pi;

}  // namespace elab
