#include "orbitlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "orbitlab/errors.hpp"
#include "orbit_support.hpp"

namespace orbitlab {

namespace {

using detail::resolved_prefix;
using detail::with_cap;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

int floor_log2(std::size_t v) {
  int j = -1;
  while (v) {
    v >>= 1;
    ++j;
  }
  return j;
}

// Points within rounding of the boundary can report a slightly negative gap.
double chart_norm_gap(const Domain& d, const Point& p) { return std::max(0.0, ball_chart_gap(d, p)); }

std::optional<Point> fixed_point_newton(const MapDef& f, Point x, const Settings& s) {
  for (int iter = 0; iter < s.newton_max_iterations; ++iter) {
    Jet jet;
    try {
      jet = eval_jet(f, x);
    } catch (const EvalError&) {
      return std::nullopt;
    }
    const Point g = jet.value - x;
    if (g.norm() <= s.newton_tolerance * std::max(1.0, x.norm())) {
      if (contains(f.domain, x, 0.0)) return x;
      return std::nullopt;
    }
    const Matrix a = jet.jacobian - Matrix::Identity(x.size(), x.size());
    const Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible()) return std::nullopt;
    x -= lu.solve(g);
    if (!x.allFinite()) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(LimitVerdict v) noexcept {
  switch (v) {
    case LimitVerdict::converged: return "converged";
    case LimitVerdict::diverging: return "diverging";
    case LimitVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

DoublingSummary doubling_test(std::span<const double> values, double converged, double diverging,
                              double persistence) {
  DoublingSummary out;
  for (std::size_t i = 1; i < values.size(); i *= 2) out.indices.push_back(i);
  const std::size_t k = out.indices.size();
  out.last_increment = kNaN;
  out.previous_increment = kNaN;
  if (k < 2) return out;
  out.last_increment = values[out.indices[k - 1]] - values[out.indices[k - 2]];
  if (k >= 3) out.previous_increment = values[out.indices[k - 2]] - values[out.indices[k - 3]];
  const double last = std::abs(out.last_increment);
  if (last < converged) {
    out.verdict = LimitVerdict::converged;
  } else if (k >= 3) {
    const double prev = std::abs(out.previous_increment);
    if (last > diverging && prev > diverging && last >= persistence * prev) {
      out.verdict = LimitVerdict::diverging;
    }
  }
  return out;
}

StepEstimate step_from_orbit(const Domain& d, const OrbitRecord& orbit, int m, int n_max, const Settings& s) {
  if (m < 1) throw std::invalid_argument("step length m must be at least 1");
  if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
  StepEstimate est;
  est.m = m;
  const std::size_t usable = resolved_prefix(d, orbit, s);
  const auto last_n = static_cast<long>(usable) - 1 - m;
  const long count = std::min<long>(n_max, last_n) + 1;
  est.partial = count < n_max + 1;
  for (long n = 0; n < count; ++n) {
    const auto a = static_cast<std::size_t>(n);
    const auto b = static_cast<std::size_t>(n + m);
    est.values.push_back(kobayashi_distance(d, orbit.points[b], orbit.points[a], s.convention));
  }
  const bool backward = orbit.direction == Direction::backward;
  for (std::size_t n = 0; n + 1 < est.values.size(); ++n) {
    const double drop = backward ? est.values[n] - est.values[n + 1] : est.values[n + 1] - est.values[n];
    est.monotonicity_defect = std::max(est.monotonicity_defect, drop);
  }
  if (est.values.empty()) {
    est.limit = kNaN;
    return est;
  }
  const double scale = convention_factor(s.convention);
  const DoublingSummary sum =
      doubling_test(est.values, scale * s.converged_delta, scale * s.diverging_delta, s.diverging_persistence);
  est.verdict = sum.verdict;
  est.limit = est.verdict == LimitVerdict::diverging ? kInf : est.values.back();
  return est;
}

StepEstimate backward_step(const MapDef& f, const Point& x, int m, int n_max, const Settings& s) {
  const Settings local = with_cap(s, n_max + m);
  return step_from_orbit(f.domain, backward_orbit(f, x, n_max + m, local), m, n_max, local);
}

StepEstimate forward_step(const MapDef& f, const Point& x, int m, int n_max, const Settings& s) {
  const Settings local = with_cap(s, n_max + m);
  return step_from_orbit(f.domain, forward_orbit(f, x, n_max + m, local), m, n_max, local);
}

double divergence_rate(const MapDef& f, const Point& x, int m_max, const Settings& s) {
  if (m_max < 1) throw std::invalid_argument("m_max must be at least 1");
  const Settings local = with_cap(s, m_max);
  const OrbitRecord orbit = forward_orbit(f, x, m_max, local);
  const std::size_t usable = resolved_prefix(f.domain, orbit, local);
  if (usable < 2) throw Error("no resolved forward iterate to estimate the divergence rate");
  double best = kInf;
  for (std::size_t j = 1; j < usable; ++j) {
    best = std::min(best, kobayashi_distance(f.domain, orbit.points[0], orbit.points[j], s.convention) /
                              static_cast<double>(j));
  }
  return best;
}

std::string_view to_string(MapType t) noexcept {
  switch (t) {
    case MapType::elliptic: return "elliptic";
    case MapType::parabolic: return "parabolic";
    case MapType::hyperbolic: return "hyperbolic";
    case MapType::inconclusive: return "inconclusive";
  }
  return "?";
}

std::optional<MapType> map_type_from_string(std::string_view s) noexcept {
  for (auto t : {MapType::elliptic, MapType::parabolic, MapType::hyperbolic, MapType::inconclusive}) {
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

TypeReport classify_sequence(std::span<const double> sigma, const Settings& s) {
  TypeReport rep;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    const int m = 1 << j;
    const double inc = j + 1 < sigma.size() ? sigma[j + 1] - sigma[j] : kNaN;
    rep.evidence.push_back({m, sigma[j], inc, inc / m});
  }
  if (sigma.size() < 3) return rep;
  const double scale = convention_factor(s.convention);
  const std::size_t last = sigma.size() - 2;  // last row with an increment
  const double inc_last = rep.evidence[last].increment;
  const double slope_last = rep.evidence[last].slope;
  const double slope_prev = rep.evidence[last - 1].slope;
  const double inc_prev = rep.evidence[last - 1].increment;
  rep.rate = slope_last;

  double early_max = -kInf;
  for (std::size_t j = 0; j + 2 < sigma.size(); ++j) early_max = std::max(early_max, sigma[j]);
  const double late_max = std::max(sigma[sigma.size() - 1], sigma[sigma.size() - 2]);
  bool decreasing = false;
  for (std::size_t j = 0; j + 1 < sigma.size(); ++j) decreasing |= rep.evidence[j].increment < -scale * s.bounded_delta;
  if (std::abs(inc_last) < scale * s.bounded_delta || late_max <= early_max + scale * s.bounded_delta) {
    rep.type = MapType::elliptic;
    rep.rate = 0.0;
  } else if (slope_last > scale * s.rate_threshold &&
             std::abs(slope_last - slope_prev) <= s.rate_stability * slope_last) {
    rep.type = MapType::hyperbolic;
  } else if (inc_last > scale * s.bounded_delta && slope_last <= s.parabolic_decay * slope_prev && !decreasing &&
             inc_last >= s.diverging_persistence * inc_prev) {
    rep.type = MapType::parabolic;
    rep.rate = 0.0;
  } else if (!decreasing && inc_last < (1.0 - s.diverging_persistence) * inc_prev) {
    // Log-growth keeps the increment per doubling roughly constant; a
    // collapsing increment means a bounded, converging table.
    rep.type = MapType::elliptic;
    rep.rate = 0.0;
  } else if (decreasing) {
    // sigma_m is nondecreasing in m along parabolic and hyperbolic tables; a
    // drop means the steps are bounded and oscillate (rotation-like).
    rep.type = MapType::elliptic;
    rep.rate = 0.0;
  }
  return rep;
}

TypeReport classify_type(const MapDef& f, const Point& x, const Settings& s) {
  const int doublings = std::max(2, s.classify_doublings);
  const int n_max = std::max(0, s.classify_n_max);
  const int length = n_max + (1 << doublings);
  const Settings local = with_cap(s, length);

  const OrbitRecord back = backward_orbit(f, x, length, local);
  const std::size_t usable = resolved_prefix(f.domain, back, local);
  if (usable >= 5) {
    // Spend the resolved length on the range of m first, then on depth n.
    const int j_max = std::min(doublings, floor_log2(usable - 1));
    const int n = std::min<int>(n_max, static_cast<int>(usable) - 1 - (1 << j_max));
    std::vector<double> sigma;
    // The deepest value is a lower bound for sigma_m (the sequence increases in n).
    for (int j = 0; j <= j_max; ++j) sigma.push_back(step_from_orbit(f.domain, back, 1 << j, n, local).values.back());
    TypeReport rep = classify_sequence(sigma, s);
    rep.forward_only = false;
    return rep;
  }

  // Forward-only fallback: k(x, f^m x) grows like sigma_m.
  const OrbitRecord fwd = forward_orbit(f, x, 1 << doublings, local);
  const std::size_t fusable = resolved_prefix(f.domain, fwd, local);
  std::vector<double> table;
  for (std::size_t m = 1; m < fusable; m *= 2) {
    table.push_back(kobayashi_distance(f.domain, x, fwd.points[m], s.convention));
  }
  TypeReport rep = classify_sequence(table, s);
  rep.forward_only = true;
  return rep;
}

std::string_view to_string(DWReport::Kind k) noexcept {
  switch (k) {
    case DWReport::Kind::boundary: return "boundary";
    case DWReport::Kind::interior: return "interior";
    case DWReport::Kind::inconclusive: return "inconclusive";
  }
  return "?";
}

DWReport denjoy_wolff(const MapDef& f, std::span<const Point> starts, int n, const Settings& s) {
  if (starts.empty()) throw std::invalid_argument("denjoy_wolff needs at least one start point");
  if (n < 2) throw std::invalid_argument("denjoy_wolff needs at least two iterates");
  DWReport rep;
  const Domain& d = f.domain;
  if (!has_ball_chart(d.kind)) {
    rep.diagnostics = "no ball chart for " + to_string(d) + "; boundary limits are not compared";
    return rep;
  }
  const Settings local = with_cap(s, n);

  std::vector<OrbitRecord> orbits;
  int boundary = 0;
  int interior = 0;
  for (const Point& x : starts) {
    OrbitRecord orbit = forward_orbit(f, x, n, local);
    if (orbit.points.size() < 3) {
      rep.diagnostics = "forward orbit left the domain at step " +
                        std::to_string(orbit.exit_index.value_or(orbit.points.size()));
      return rep;
    }
    std::vector<double> gaps;
    for (const Point& p : orbit.points) gaps.push_back(chart_norm_gap(d, p));
    const std::size_t half = gaps.size() / 2;
    const double head_min = *std::min_element(gaps.begin(), gaps.begin() + static_cast<long>(half));
    const double tail_min = *std::min_element(gaps.begin() + static_cast<long>(half), gaps.end());
    if (gaps.back() < s.dw_boundary_gap && gaps.back() <= gaps[half]) {
      ++boundary;
    } else if (tail_min >= 0.5 * head_min && tail_min >= s.dw_boundary_gap) {
      ++interior;
    }
    orbits.push_back(std::move(orbit));
  }

  const auto count = static_cast<int>(starts.size());
  if (boundary == count) {
    std::vector<Point> limits;
    for (const OrbitRecord& o : orbits) {
      const Point c = to_ball_chart(d, o.points.back());
      limits.push_back(c / c.norm());
    }
    double spread = 0.0;
    for (std::size_t a = 0; a < limits.size(); ++a) {
      for (std::size_t b = a + 1; b < limits.size(); ++b) spread = std::max(spread, (limits[a] - limits[b]).norm());
    }
    if (spread >= s.dw_cluster_tolerance) {
      std::ostringstream msg;
      msg << "orbits approach the boundary but their limits differ by " << spread;
      rep.diagnostics = msg.str();
      return rep;
    }
    rep.kind = DWReport::Kind::boundary;
    rep.point = BoundaryPoint::unit(limits.front());
    rep.converged_starts = count;
    std::vector<Point> approach;
    for (const Point& p : orbits.front().points) {
      if (chart_norm_gap(d, p) >= s.chart_resolution) approach.push_back(p);
    }
    try {
      rep.dilation = dilation_at(f, rep.point, approach, local);
    } catch (const std::exception& e) {
      rep.dilation = kNaN;
      rep.diagnostics = std::string("dilation unavailable: ") + e.what();
    }
    return rep;
  }
  if (interior == count) {
    rep.converged_starts = count;
    if (auto fixed = fixed_point_newton(f, orbits.front().points.back(), local)) {
      rep.kind = DWReport::Kind::interior;
      rep.interior = std::move(fixed);
    } else {
      rep.diagnostics = "orbits stay away from the boundary but no interior fixed point was found";
    }
    return rep;
  }
  rep.diagnostics = std::to_string(boundary) + " of " + std::to_string(count) +
                    " orbits approach the boundary, " + std::to_string(interior) + " stay inside";
  return rep;
}

double dilation_at(const MapDef& f, const BoundaryPoint& zeta, std::span<const Point> approach, const Settings& s) {
  const Domain& d = f.domain;
  if (!has_ball_chart(d.kind)) throw DomainError("no ball chart for " + to_string(d));
  if (approach.empty()) throw std::invalid_argument("empty approach sequence");
  const Point target = boundary_to_ball(d, zeta);
  if ((to_ball_chart(d, approach.back()) - target).norm() > s.approach_radius) {
    throw Error("approach sequence does not end near the boundary point");
  }
  const std::size_t tail = std::min<std::size_t>(approach.size(), static_cast<std::size_t>(std::max(1, s.dilation_tail)));
  double best = kInf;
  for (std::size_t k = approach.size() - tail; k < approach.size(); ++k) {
    const Point& z = approach[k];
    const double gz = chart_norm_gap(d, z);
    if (!(gz >= s.chart_resolution)) continue;
    Point fz;
    try {
      fz = orbitlab::apply(f, z);
    } catch (const EvalError&) {
      continue;
    }
    if (!contains(d, fz, 0.0)) continue;
    const double gf = chart_norm_gap(d, fz);
    if (!(gf >= s.chart_resolution)) continue;
    best = std::min(best, gf / gz);
  }
  if (!std::isfinite(best)) throw Error("approach tail is beyond the numerical resolution of the chart");
  return best;
}

std::vector<Point> radial_approach(const Domain& d, const BoundaryPoint& zeta, int count) {
  if (count < 1) throw std::invalid_argument("approach count must be positive");
  const Point u = boundary_to_ball(d, zeta);
  std::vector<Point> out;
  for (int k = 1; k <= count; ++k) {
    const Point c = (1.0 - std::ldexp(1.0, -k)) * u;
    switch (d.kind) {
      case DomainKind::disc:
      case DomainKind::ball:
        out.push_back(c);
        break;
      case DomainKind::siegel:
        out.push_back(cayley_transform(CayleyDirection::to_siegel, c));
        break;
      case DomainKind::slit_plane: {
        const Complex r = (1.0 + c[0]) / (1.0 - c[0]);
        Point p(1);
        p[0] = r * r;
        out.push_back(p);
        break;
      }
      case DomainKind::polydisc:
        throw DomainError("no ball chart for " + to_string(d));
    }
  }
  return out;
}

}  // namespace orbitlab
