#include "orbitlab/holomap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orbitlab/errors.hpp"

namespace orbitlab {

namespace {

struct Inversion {
  Point x;
  double residual;
};

double residual_scale(const Point& y) { return std::max(1.0, y.norm()); }

Inversion invert_exact(const MapDef& m, const Point& y, const Settings& s) {
  Point x;
  try {
    x = apply_inverse(m, y);
  } catch (const EvalError& e) {
    throw InversionError(InversionErrorKind::evaluation, e.what());
  }
  if (!within_tolerance(m.domain, x, s.exit_tolerance)) {
    throw InversionError(InversionErrorKind::left_domain, "preimage outside " + to_string(m.domain));
  }
  double residual = 0.0;
  try {
    residual = (orbitlab::apply(m, x) - y).norm();
  } catch (const EvalError& e) {
    throw InversionError(InversionErrorKind::evaluation, e.what());
  }
  if (residual > s.inverse_check_tolerance * residual_scale(y)) {
    throw InversionError(InversionErrorKind::inverse_mismatch,
                         "exact inverse disagrees with the map (residual " + std::to_string(residual) + ")");
  }
  return {std::move(x), residual};
}

double residual_or_inf(const MapDef& m, const Point& x, const Point& y) {
  try {
    const double r = (orbitlab::apply(m, x) - y).norm();
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
  } catch (const EvalError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Damped Newton: the full step is halved until the residual decreases.
Inversion invert_newton(const MapDef& m, const Point& y, const Point& guess, const Settings& s) {
  if (guess.size() != y.size()) throw DomainError("Newton guess has the wrong dimension");
  const double tol = s.newton_tolerance * residual_scale(y);
  Point x = guess;
  double r = residual_or_inf(m, x, y);
  if (!std::isfinite(r)) {
    throw InversionError(InversionErrorKind::evaluation, "map cannot be evaluated at the Newton guess");
  }
  for (int iter = 0; iter < s.newton_max_iterations && r > tol; ++iter) {
    Jet jet;
    try {
      jet = eval_jet(m, x);
    } catch (const EvalError& e) {
      throw InversionError(InversionErrorKind::evaluation, e.what());
    }
    const Eigen::FullPivLU<Matrix> lu(jet.jacobian);
    if (!lu.isInvertible()) {
      throw InversionError(InversionErrorKind::singular_jacobian, "singular Jacobian in Newton inversion");
    }
    const Point step = lu.solve(Point(jet.value - y));
    double t = 1.0;
    bool improved = false;
    for (int h = 0; h <= s.newton_max_halvings; ++h, t *= 0.5) {
      const Point trial = x - t * step;
      const double rt = residual_or_inf(m, trial, y);
      if (rt < r) {
        x = trial;
        r = rt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (!(r <= tol)) {
    throw InversionError(InversionErrorKind::newton_diverged,
                         "Newton inversion stalled at residual " + std::to_string(r));
  }
  if (!within_tolerance(m.domain, x, s.exit_tolerance)) {
    throw InversionError(InversionErrorKind::left_domain, "preimage outside " + to_string(m.domain));
  }
  return {std::move(x), r};
}

Inversion invert(const MapDef& m, const Point& y, const Point& guess, const Settings& s) {
  return m.inverse ? invert_exact(m, y, s) : invert_newton(m, y, guess, s);
}

int clamp_length(int n, const Settings& s, bool& capped) {
  if (n < 0) throw std::invalid_argument("orbit length must be nonnegative");
  capped = n > s.orbit_cap;
  return std::min(n, s.orbit_cap);
}

void require_start(const MapDef& m, const Point& x) {
  if (x.size() != m.domain.dim) throw DomainError("start point has the wrong dimension");
  if (!contains(m.domain, x, 0.0)) throw DomainError("start point outside " + to_string(m.domain));
}

}  // namespace

OrbitRecord forward_orbit(const MapDef& m, const Point& x, int n, const Settings& s) {
  require_start(m, x);
  OrbitRecord rec;
  rec.direction = Direction::forward;
  n = clamp_length(n, s, rec.capped);
  rec.points.reserve(static_cast<std::size_t>(n) + 1);
  rec.points.push_back(x);
  for (int k = 1; k <= n; ++k) {
    Point next;
    try {
      next = orbitlab::apply(m, rec.points.back());
    } catch (const EvalError& e) {
      rec.exit_index = static_cast<std::size_t>(k);
      rec.exit_reason = e.what();
      break;
    }
    if (!within_tolerance(m.domain, next, s.exit_tolerance)) {
      rec.exit_index = static_cast<std::size_t>(k);
      rec.exit_reason = "left_domain";
      break;
    }
    rec.points.push_back(std::move(next));
  }
  return rec;
}

Point invert_point(const MapDef& m, const Point& y, const Point& guess, const Settings& s) {
  if (y.size() != m.domain.dim) throw DomainError("target point has the wrong dimension");
  if (!within_tolerance(m.domain, y, s.exit_tolerance)) {
    throw DomainError("target point outside " + to_string(m.domain));
  }
  return invert(m, y, guess, s).x;
}

OrbitRecord backward_orbit(const MapDef& m, const Point& x, int n, const Settings& s) {
  require_start(m, x);
  OrbitRecord rec;
  rec.direction = Direction::backward;
  n = clamp_length(n, s, rec.capped);
  rec.points.reserve(static_cast<std::size_t>(n) + 1);
  rec.points.push_back(x);
  rec.residuals.push_back(0.0);
  for (int k = 1; k <= n; ++k) {
    try {
      Inversion inv = invert(m, rec.points.back(), rec.points.back(), s);
      rec.points.push_back(std::move(inv.x));
      rec.residuals.push_back(inv.residual);
    } catch (const InversionError& e) {
      rec.exit_index = static_cast<std::size_t>(k);
      rec.exit_reason = to_string(e.kind());
      break;
    }
  }
  return rec;
}

double inverse_roundtrip_error(const MapDef& m, std::span<const Point> probes) {
  double worst = 0.0;
  for (const Point& y : probes) worst = std::max(worst, (orbitlab::apply(m, apply_inverse(m, y)) - y).norm());
  return worst;
}

}  // namespace orbitlab
