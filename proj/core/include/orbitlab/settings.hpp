#pragma once

namespace orbitlab {

/// Normalization of the Kobayashi distance on the disc.
///
/// `doubled` gives k(0, r) = log((1 + r) / (1 - r)); with it the divergence
/// rate of a hyperbolic map equals -log of its Denjoy-Wolff dilation and the
/// backward step along a radial orbit equals log of the boundary dilation.
/// `arctanh` halves every distance and metric value (and hence every rate).
enum class Convention { doubled, arctanh };

constexpr double convention_factor(Convention c) noexcept {
  return c == Convention::doubled ? 1.0 : 0.5;
}

/// Numerical thresholds shared by the analysis modules. Every threshold is in
/// doubled-convention distance units regardless of `convention`.
struct Settings {
  Convention convention = Convention::doubled;

  // holomap
  double newton_tolerance = 1e-12;   // relative to max(1, |target|)
  int newton_max_iterations = 50;
  int newton_max_halvings = 40;
  double inverse_check_tolerance = 1e-9;
  // A point is treated as having left the domain when its defining-function
  // slack is below -exit_tolerance * (magnitude of the defining terms).
  double exit_tolerance = 1e-13;
  int orbit_cap = 200;
  // Distance series only use orbit points whose relative slack is at least
  // this large; beyond it cancellation in the coordinates dominates.
  double resolution_floor = 1e-9;

  // monotone-limit doubling test (dynamics)
  double converged_delta = 1e-6;
  double diverging_delta = 1e-4;
  double monotone_slack = 1e-9;
  double diverging_persistence = 0.75;  // last increment vs the previous one
  double rate_threshold = 1e-6;
  double rate_stability = 0.05;   // relative agreement of successive slopes
  double parabolic_decay = 0.75;  // slope ratio below which log-growth is assumed
  int classify_doublings = 5;     // m = 1, 2, ..., 2^classify_doublings
  int classify_n_max = 64;

  // boundedness (stable_set)
  double bounded_delta = 1e-6;
  double unbounded_delta = 1e-3;
  double distance_cap = 60.0;

  // boundary behaviour (dynamics)
  int dilation_tail = 20;
  double approach_radius = 1e-3;
  double chart_resolution = 1e-9;  // smallest trusted 1 - |chart(z)|
  double dw_boundary_gap = 1e-4;
  double dw_cluster_tolerance = 1e-6;
};

}  // namespace orbitlab
