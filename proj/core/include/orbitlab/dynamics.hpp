#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orbitlab/holomap.hpp"

namespace orbitlab {

enum class LimitVerdict { converged, diverging, inconclusive };
std::string_view to_string(LimitVerdict v) noexcept;

/// Estimated limit of a monotone sequence of Kobayashi distances.
struct StepEstimate {
  int m = 1;
  std::vector<double> values;  // indexed by n
  double limit = 0.0;          // +inf when diverging
  LimitVerdict verdict = LimitVerdict::inconclusive;
  bool partial = false;        // fewer than n_max + 1 resolved values
  double monotonicity_defect = 0.0;
};

/// Doubling test on values[1], values[2], values[4], ...: converged when the
/// last increment is below `converged`, diverging when the last two are
/// both above `diverging` and the last is at least `persistence` times the
/// previous one (geometric convergence shrinks increments faster).
struct DoublingSummary {
  std::vector<std::size_t> indices;
  double last_increment = 0.0;
  double previous_increment = 0.0;
  LimitVerdict verdict = LimitVerdict::inconclusive;
};
DoublingSummary doubling_test(std::span<const double> values, double converged, double diverging,
                              double persistence = 0.75);

/// values[n] = k(f^{-n-m} x, f^{-n} x), n = 0..n_max (monotone increasing).
StepEstimate backward_step(const MapDef& f, const Point& x, int m, int n_max, const Settings& s = {});
/// values[n] = k(f^n x, f^{n+m} x), n = 0..n_max (monotone decreasing).
StepEstimate forward_step(const MapDef& f, const Point& x, int m, int n_max, const Settings& s = {});

/// Step estimate from an already computed orbit (either direction).
StepEstimate step_from_orbit(const Domain& d, const OrbitRecord& orbit, int m, int n_max,
                             const Settings& s = {});

/// min over 1 <= j <= m_max of k(x, f^j x) / j, an upper bound for the
/// divergence rate that decreases with m_max.
double divergence_rate(const MapDef& f, const Point& x, int m_max, const Settings& s = {});

enum class MapType { elliptic, parabolic, hyperbolic, inconclusive };
std::string_view to_string(MapType t) noexcept;
std::optional<MapType> map_type_from_string(std::string_view s) noexcept;

struct EvidenceRow {
  int m;
  double sigma;      // sigma_m (or k(x, f^m x) in forward-only mode)
  double increment;  // sigma_{2m} - sigma_m, NaN on the last row
  double slope;      // increment / m
};

struct TypeReport {
  MapType type = MapType::inconclusive;
  double rate = 0.0;  // estimated lim sigma_m / m
  std::vector<EvidenceRow> evidence;
  bool forward_only = false;
};

/// Doubling test on sigma_m at m = 1, 2, 4, ..., 2^classify_doublings.
TypeReport classify_type(const MapDef& f, const Point& x, const Settings& s = {});
/// The same test applied to an arbitrary table (sigma at m = 1, 2, 4, ...).
TypeReport classify_sequence(std::span<const double> sigma_at_doublings, const Settings& s = {});

struct DWReport {
  enum class Kind { boundary, interior, inconclusive };
  Kind kind = Kind::inconclusive;
  BoundaryPoint point;            // boundary: unit vector of the ball chart
  std::optional<Point> interior;  // interior fixed point, when found
  double dilation = 0.0;          // boundary only
  int converged_starts = 0;
  std::string diagnostics;
};
std::string_view to_string(DWReport::Kind k) noexcept;

DWReport denjoy_wolff(const MapDef& f, std::span<const Point> starts, int n, const Settings& s = {});

/// min over the approach tail of (1 - |F(z_k)|) / (1 - |z_k|) in the ball
/// chart of the map's domain.
double dilation_at(const MapDef& f, const BoundaryPoint& zeta, std::span<const Point> approach,
                   const Settings& s = {});

/// Points (1 - 2^-k) zeta, k = 1..count, of the ball chart pulled back to the
/// map's domain.
std::vector<Point> radial_approach(const Domain& d, const BoundaryPoint& zeta, int count);

}  // namespace orbitlab
