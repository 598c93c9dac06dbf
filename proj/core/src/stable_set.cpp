#include "orbitlab/stable_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "orbitlab/errors.hpp"
#include "orbit_support.hpp"

namespace orbitlab {

namespace {

using detail::resolved_prefix;
using detail::with_cap;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::size_t> doubling_indices(std::size_t last) {
  std::vector<std::size_t> out{0};
  for (std::size_t i = 1; i <= last; i *= 2) out.push_back(i);
  return out;
}

// Shared verdict on a series sampled at 0, 1, 2, 4, ...
void judge(BoundednessVerdict& v, const Settings& s) {
  const double scale = convention_factor(s.convention);
  const double cap = scale * s.distance_cap;
  for (double x : v.series) {
    if (!(x <= cap)) {
      v.verdict = Boundedness::unbounded;
      v.reason = "value exceeds the cap";
      return;
    }
  }
  if (v.series.size() < 3) {
    v.verdict = Boundedness::inconclusive;
    v.reason = "too few resolved doublings";
    return;
  }
  const double inc = std::abs(v.series.back() - v.series[v.series.size() - 2]);
  if (inc < scale * s.bounded_delta) {
    v.verdict = Boundedness::bounded;
    v.bound_estimate = v.series.back();
  } else if (inc >= scale * s.unbounded_delta) {
    v.verdict = Boundedness::unbounded;
    v.reason = "last doubling increment above threshold";
  } else {
    v.verdict = Boundedness::inconclusive;
    v.reason = "last doubling increment between thresholds";
  }
}

BoundednessVerdict verdict_from_orbits(const Domain& d, const OrbitRecord& ox, const OrbitRecord& oy, int n_max,
                                       const Settings& s) {
  BoundednessVerdict v;
  const bool ex = !ox.complete(static_cast<std::size_t>(n_max));
  const bool ey = !oy.complete(static_cast<std::size_t>(n_max));
  if (ex && ey) {
    v.reason = "both backward orbits end early";
    return v;
  }
  if (ex || ey) {
    v.verdict = Boundedness::unbounded;
    v.reason = "one backward orbit leaves the domain";
    return v;
  }
  const std::size_t usable = std::min(resolved_prefix(d, ox, s), resolved_prefix(d, oy, s));
  if (usable == 0) {
    v.reason = "start points not resolved";
    return v;
  }
  v.indices = doubling_indices(std::min<std::size_t>(static_cast<std::size_t>(n_max), usable - 1));
  for (std::size_t i : v.indices) v.series.push_back(kobayashi_distance(d, ox.points[i], oy.points[i], s.convention));
  judge(v, s);
  return v;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::string_view to_string(Boundedness b) noexcept {
  switch (b) {
    case Boundedness::bounded: return "bounded";
    case Boundedness::unbounded: return "unbounded";
    case Boundedness::inconclusive: return "inconclusive";
  }
  return "?";
}

BoundednessVerdict equivalent(const MapDef& f, const Point& x, const Point& y, int n_max, const Settings& s) {
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  const Settings local = with_cap(s, n_max);
  const OrbitRecord ox = backward_orbit(f, x, n_max, local);
  const OrbitRecord oy = backward_orbit(f, y, n_max, local);
  return verdict_from_orbits(f.domain, ox, oy, n_max, local);
}

Partition partition(const MapDef& f, std::span<const Point> samples, int n_max, const Settings& s) {
  if (samples.empty()) throw std::invalid_argument("partition needs at least one sample");
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  const Settings local = with_cap(s, n_max);
  const std::size_t n = samples.size();

  Partition out;
  out.samples.assign(samples.begin(), samples.end());
  out.class_of.assign(n, std::nullopt);
  out.verdicts.assign(n, std::vector<Boundedness>(n, Boundedness::inconclusive));

  std::vector<OrbitRecord> orbits;
  std::vector<bool> stable(n);
  for (std::size_t i = 0; i < n; ++i) {
    orbits.push_back(backward_orbit(f, samples[i], n_max, local));
    stable[i] = orbits.back().complete(static_cast<std::size_t>(n_max));
    if (!stable[i]) out.non_stable.push_back(i);
  }

  UnionFind uf(n);
  std::vector<bool> quarantined(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    out.verdicts[i][i] = stable[i] ? Boundedness::bounded : Boundedness::inconclusive;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Boundedness b = verdict_from_orbits(f.domain, orbits[i], orbits[j], n_max, local).verdict;
      out.verdicts[i][j] = out.verdicts[j][i] = b;
      if (!stable[i] || !stable[j]) continue;
      if (b == Boundedness::bounded) {
        uf.unite(i, j);
      } else if (b == Boundedness::inconclusive) {
        quarantined[i] = quarantined[j] = true;
      }
    }
  }

  // Group resolved samples by root; a class holding an unbounded pair is
  // contradictory and is quarantined whole.
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::optional<std::size_t>> group_of_root(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!stable[i] || quarantined[i]) continue;
    const std::size_t r = uf.find(i);
    if (!group_of_root[r]) {
      group_of_root[r] = groups.size();
      groups.emplace_back();
    }
    groups[*group_of_root[r]].push_back(i);
  }
  for (auto& members : groups) {
    bool conflict = false;
    for (std::size_t a = 0; a < members.size() && !conflict; ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        if (out.verdicts[members[a]][members[b]] == Boundedness::unbounded) {
          conflict = true;
          break;
        }
      }
    }
    if (conflict) {
      out.diagnostics.push_back("class with first member " + std::to_string(members.front()) +
                                " contains an unbounded pair; quarantined");
      for (std::size_t m : members) quarantined[m] = true;
      continue;
    }
    PartitionClass cls;
    cls.members = members;
    try {
      cls.mu = class_rate(f, samples[members.front()], s);
    } catch (const Error& e) {
      cls.mu = kNaN;
      out.diagnostics.push_back("class with first member " + std::to_string(members.front()) + ": " + e.what());
    }
    for (std::size_t m : members) out.class_of[m] = out.classes.size();
    out.classes.push_back(std::move(cls));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (stable[i] && quarantined[i]) out.unresolved.push_back(i);
  }
  return out;
}

double class_rate(const MapDef& f, const Point& x, const Settings& s) {
  const TypeReport rep = classify_type(f, x, s);
  if (rep.type == MapType::inconclusive) throw Error("type classification is inconclusive");
  return std::max(1.0, std::exp(rep.rate / convention_factor(s.convention)));
}

BoundednessVerdict tangent_bounded(const MapDef& f, const TangentVector& t, int n_max, const Settings& s) {
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  if (t.dir.size() != f.domain.dim) throw DomainError("tangent vector has the wrong dimension");
  const Settings local = with_cap(s, n_max);
  BoundednessVerdict v;
  const OrbitRecord orbit = backward_orbit(f, t.base, n_max, local);
  if (!orbit.complete(static_cast<std::size_t>(n_max))) {
    v.reason = "backward orbit of the base point ends at step " + std::to_string(*orbit.exit_index);
    return v;
  }
  const std::size_t usable = resolved_prefix(f.domain, orbit, local);
  if (usable == 0) {
    v.reason = "base point not resolved";
    return v;
  }
  const std::size_t last = std::min<std::size_t>(static_cast<std::size_t>(n_max), usable - 1);
  v.indices = doubling_indices(last);

  const double norm0 = t.dir.norm();
  if (norm0 == 0.0) {
    v.series.assign(v.indices.size(), 0.0);
    judge(v, local);
    return v;
  }
  // Direction kept at unit length; the true vector is exp(log_scale) * u.
  Point u = t.dir / norm0;
  double log_scale = std::log(norm0);
  std::size_t next = 0;
  for (std::size_t n = 0; n <= last; ++n) {
    if (next < v.indices.size() && v.indices[next] == n) {
      const double k = kobayashi_metric(f.domain, {orbit.points[n], u}, s.convention);
      v.series.push_back(k == 0.0 ? 0.0 : std::exp(log_scale + std::log(k)));
      ++next;
    }
    if (n == last) break;
    Point w;
    try {
      if (f.inverse) {
        w = eval_inverse_jet(f, orbit.points[n]).jacobian * u;
      } else {
        const Eigen::FullPivLU<Matrix> lu(eval_jet(f, orbit.points[n + 1]).jacobian);
        if (!lu.isInvertible()) {
          v.verdict = Boundedness::inconclusive;
          v.reason = "singular Jacobian at step " + std::to_string(n + 1);
          return v;
        }
        w = lu.solve(u);
      }
    } catch (const EvalError& e) {
      v.verdict = Boundedness::inconclusive;
      v.reason = std::string("Jacobian evaluation failed: ") + e.what();
      return v;
    }
    const double nw = w.norm();
    if (!(nw > 0.0) || !std::isfinite(nw)) {
      v.verdict = Boundedness::inconclusive;
      v.reason = "accumulated Jacobian degenerated at step " + std::to_string(n + 1);
      return v;
    }
    u = w / nw;
    log_scale += std::log(nw);
  }
  judge(v, local);
  return v;
}

StepEstimate limit_distance(const MapDef& f, const Point& x, const Point& y, int n_max, const Settings& s) {
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  const Settings local = with_cap(s, n_max);
  const OrbitRecord ox = backward_orbit(f, x, n_max, local);
  const OrbitRecord oy = backward_orbit(f, y, n_max, local);
  const BoundednessVerdict eq = verdict_from_orbits(f.domain, ox, oy, n_max, local);
  if (eq.verdict == Boundedness::unbounded) throw Error("points are not equivalent: " + eq.reason);
  if (eq.verdict == Boundedness::inconclusive && (ox.exit_index || oy.exit_index)) {
    throw Error("equivalence undecided: " + eq.reason);
  }

  StepEstimate est;
  est.m = 0;
  const std::size_t usable = std::min(resolved_prefix(f.domain, ox, local), resolved_prefix(f.domain, oy, local));
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(n_max) + 1, usable);
  est.partial = count < static_cast<std::size_t>(n_max) + 1;
  for (std::size_t n = 0; n < count; ++n) {
    est.values.push_back(kobayashi_distance(f.domain, ox.points[n], oy.points[n], s.convention));
  }
  for (std::size_t n = 0; n + 1 < est.values.size(); ++n) {
    est.monotonicity_defect = std::max(est.monotonicity_defect, est.values[n] - est.values[n + 1]);
  }
  if (est.values.empty()) {
    est.limit = kNaN;
    return est;
  }
  const double scale = convention_factor(s.convention);
  est.verdict = doubling_test(est.values, scale * s.converged_delta, scale * s.diverging_delta,
                              s.diverging_persistence)
                    .verdict;
  est.limit = est.values.back();
  return est;
}

}  // namespace orbitlab
