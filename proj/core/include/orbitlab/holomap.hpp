#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "orbitlab/map_dsl.hpp"
#include "orbitlab/settings.hpp"

namespace orbitlab {

enum class Direction { forward, backward };

/// A finite orbit. Backward orbits satisfy f(points[n + 1]) = points[n] up to
/// the recorded residuals. When the orbit stops before the requested length,
/// `exit_index` is the index the failed point would have had.
struct OrbitRecord {
  Direction direction = Direction::forward;
  std::vector<Point> points;
  std::vector<double> residuals;
  std::optional<std::size_t> exit_index;
  std::string exit_reason;
  bool capped = false;

  bool complete(std::size_t n) const { return points.size() == n + 1; }
};

OrbitRecord forward_orbit(const MapDef& m, const Point& x, int n, const Settings& s = {});

/// x with f(x) = y, x in the domain. Uses the map's exact inverse when present,
/// damped Newton from `guess` otherwise.
Point invert_point(const MapDef& m, const Point& y, const Point& guess, const Settings& s = {});

/// Backward orbit warm-started at each previous point. Inversion failures end
/// the orbit and are recorded in exit_index / exit_reason.
OrbitRecord backward_orbit(const MapDef& m, const Point& x, int n, const Settings& s = {});

/// Max over the probes of |m(m^{-1}(y)) - y| using the exact inverse.
double inverse_roundtrip_error(const MapDef& m, std::span<const Point> probes);

}  // namespace orbitlab
