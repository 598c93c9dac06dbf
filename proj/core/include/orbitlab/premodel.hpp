#pragma once

#include <span>
#include <string>
#include <vector>

#include "orbitlab/dynamics.hpp"

namespace orbitlab {

/// (z, w) -> (z / mu, U w / sqrt(mu)) on the Siegel half-space of dimension k,
/// U diagonal with unimodular entries (k - 1 of them).
struct HyperbolicNormalForm {
  int k = 1;
  double mu = 2.0;
  std::vector<Complex> U;
};

/// The normal form as a map with exact inverse (z, w) -> (mu z, sqrt(mu) conj(U) w).
/// Throws std::invalid_argument when mu <= 1 or U is malformed.
MapDef normal_form_tau(const HyperbolicNormalForm& nf);

/// A Siegel half-space Z, an embedding g of Z into the map's domain and an
/// automorphism tau of Z meant to satisfy f o g = g o tau.
struct PreModel {
  Domain Z;
  Embedding g;
  MapDef tau;
  std::string name;
};

/// Closed form of sigma_m at a point approaching a boundary repelling point
/// with dilation lambda at angle theta:
/// log[(|e^{-2i theta} + lambda^m| + |1 - lambda^m|) / (|e^{-2i theta} + lambda^m| - |1 - lambda^m|)].
/// Evaluated as m log lambda + 2 log((|1 + e^{-2i theta} t| + 1 - t) / 2) - 2 log cos theta
/// with t = lambda^-m, which is free of cancellation and overflow.
double sigma_closed_form(double theta, double lambda, int m);

struct PreModelReport {
  double intertwining = 0.0;          // max_probe |f(g(z)) - g(tau(z))|
  std::vector<double> step_residual;  // per probe, max_m |sigma_m(g(z)) - k_Z(z, tau^m z)|
  double max_step_residual = 0.0;
  int collisions = 0;                 // probe pairs with coinciding images
  bool passed = false;
  std::vector<std::string> diagnostics;
};

struct PreModelTolerances {
  double intertwining = 1e-12;
  double step = 1e-6;
  double collision = 1e-9;
  int n_max = 4;  // backward depth used for sigma_m
};

/// Checks the intertwining diagram, the step identity for m = 1..m_max and
/// injectivity of g on the probes. Throws DomainError for probes outside Z.
PreModelReport verify_premodel(const MapDef& f, const PreModel& pm, std::span<const Point> probes, int m_max,
                               const PreModelTolerances& tol = {}, const Settings& s = {});

/// i t for nine t log-spaced over [1/4, 4].
std::vector<Point> default_premodel_probes();

/// Pre-model of the stable class through (i r^2, i r) for the shear
/// f(z, w) = (2z + i w^2, w): g(zeta) = (zeta + i r^2, i r), tau(zeta) = 2 zeta.
PreModel siegel_example_premodel(double r);

}  // namespace orbitlab
