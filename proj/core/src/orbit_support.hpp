#pragma once

#include <algorithm>
#include <cstddef>

#include "orbitlab/holomap.hpp"

namespace orbitlab::detail {

// Number of leading orbit points whose relative slack is above the floor.
inline std::size_t resolved_prefix(const Domain& d, const OrbitRecord& orbit, const Settings& s) {
  std::size_t n = 0;
  while (n < orbit.points.size() && resolved(d, orbit.points[n], s.resolution_floor)) ++n;
  return n;
}

// Settings whose orbit cap admits orbits of the given length.
inline Settings with_cap(const Settings& s, int length) {
  Settings out = s;
  out.orbit_cap = std::max(out.orbit_cap, length);
  return out;
}

}  // namespace orbitlab::detail
