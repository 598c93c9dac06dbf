#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orbitlab/dynamics.hpp"

namespace orbitlab {

enum class Boundedness { bounded, unbounded, inconclusive };
std::string_view to_string(Boundedness b) noexcept;

struct BoundednessVerdict {
  Boundedness verdict = Boundedness::inconclusive;
  std::vector<std::size_t> indices;  // 0, 1, 2, 4, ...
  std::vector<double> series;        // value at each index
  std::optional<double> bound_estimate;
  std::string reason;
};

/// Whether k(f^-n x, f^-n y) stays bounded, judged at n = 1, 2, 4, ... <= n_max.
/// When exactly one backward orbit ends early the verdict is unbounded, when
/// both do it is inconclusive.
BoundednessVerdict equivalent(const MapDef& f, const Point& x, const Point& y, int n_max,
                              const Settings& s = {});

struct PartitionClass {
  std::vector<std::size_t> members;  // sample indices, increasing
  double mu = 0.0;                   // NaN when the rate is inconclusive
};

struct Partition {
  std::vector<Point> samples;
  std::vector<std::optional<std::size_t>> class_of;
  std::vector<PartitionClass> classes;  // ordered by first member
  std::vector<std::size_t> unresolved;
  std::vector<std::size_t> non_stable;  // backward orbit ended before n_max
  std::vector<std::vector<Boundedness>> verdicts;
  std::vector<std::string> diagnostics;
};

/// Groups samples by pairwise equivalence. Inconclusive pairs and classes that
/// would contain an unbounded pair are moved to `unresolved`.
Partition partition(const MapDef& f, std::span<const Point> samples, int n_max, const Settings& s = {});

/// exp of the classified rate (at least 1). Throws Error when the
/// classification is inconclusive.
double class_rate(const MapDef& f, const Point& x, const Settings& s = {});

/// Whether kappa(f^-n x; d f^-n v) stays bounded along the backward orbit.
BoundednessVerdict tangent_bounded(const MapDef& f, const TangentVector& t, int n_max, const Settings& s = {});

/// values[n] = k(f^-n x, f^-n y), increasing to the intrinsic distance of the
/// class. Throws Error when the points are not equivalent.
StepEstimate limit_distance(const MapDef& f, const Point& x, const Point& y, int n_max, const Settings& s = {});

}  // namespace orbitlab
