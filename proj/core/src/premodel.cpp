#include "orbitlab/premodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "orbitlab/errors.hpp"

namespace orbitlab {

namespace {

constexpr Complex kI{0.0, 1.0};

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

MapDef normal_form_tau(const HyperbolicNormalForm& nf) {
  if (nf.k < 1) throw std::invalid_argument("normal form dimension must be positive");
  if (!(nf.mu > 1.0) || !std::isfinite(nf.mu)) throw std::invalid_argument("normal form needs mu > 1");
  if (static_cast<int>(nf.U.size()) != nf.k - 1) {
    throw std::invalid_argument("normal form needs k - 1 diagonal entries");
  }
  for (const Complex& u : nf.U) {
    if (std::abs(std::abs(u) - 1.0) > 1e-12) throw std::invalid_argument("diagonal entries must be unimodular");
  }
  const double root = std::sqrt(nf.mu);
  MapDef m;
  m.domain = Domain::siegel(nf.k);
  m.name = "normal_form(mu=" + format_real(nf.mu) + ")";
  m.params["mu"] = nf.mu;
  m.params["root_mu"] = root;
  const Expr mu = param("mu", nf.mu);
  const Expr rmu = param("root_mu", root);
  m.components.push_back(binary(Op::div, variable(0), mu));
  std::vector<Expr> inverse{binary(Op::mul, mu, variable(0))};
  for (int j = 1; j < nf.k; ++j) {
    const Complex u = nf.U[static_cast<std::size_t>(j - 1)];
    const std::string name = "u" + std::to_string(j + 1);
    m.params[name] = u;
    m.components.push_back(binary(Op::div, binary(Op::mul, param(name, u), variable(j)), rmu));
    inverse.push_back(binary(Op::mul, binary(Op::mul, rmu, literal(std::conj(u))), variable(j)));
  }
  m.inverse = std::move(inverse);
  return m;
}

double sigma_closed_form(double theta, double lambda, int m) {
  if (!(std::abs(theta) < std::numbers::pi / 2)) throw std::invalid_argument("theta must lie in (-pi/2, pi/2)");
  if (!(lambda > 1.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must exceed 1");
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  const double t = std::pow(lambda, -m);
  const double a = std::abs(1.0 + std::polar(t, -2.0 * theta));
  const double b = 1.0 - t;
  return m * std::log(lambda) + 2.0 * std::log(0.5 * (a + b)) - 2.0 * std::log(std::cos(theta));
}

std::vector<Point> default_premodel_probes() {
  std::vector<Point> out;
  for (int k = 0; k <= 8; ++k) {
    Point p(1);
    p[0] = kI * std::ldexp(1.0, -2) * std::pow(2.0, 0.5 * k);
    out.push_back(p);
  }
  return out;
}

PreModelReport verify_premodel(const MapDef& f, const PreModel& pm, std::span<const Point> probes, int m_max,
                               const PreModelTolerances& tol, const Settings& s) {
  if (pm.g.source != pm.Z || pm.tau.domain != pm.Z) throw DomainError("pre-model pieces disagree on Z");
  if (pm.g.target != f.domain) throw DomainError("pre-model embedding does not land in the map's domain");
  if (m_max < 1) throw std::invalid_argument("m_max must be at least 1");
  for (const Point& z : probes) {
    if (z.size() != pm.Z.dim || !contains(pm.Z, z)) throw DomainError("probe outside " + to_string(pm.Z));
  }

  PreModelReport rep;
  std::vector<Point> images;
  for (const Point& z : probes) {
    const Point gz = orbitlab::apply(pm.g, z);
    images.push_back(gz);
    const Point lhs = orbitlab::apply(f, gz);
    const Point rhs = orbitlab::apply(pm.g, orbitlab::apply(pm.tau, z));
    rep.intertwining = std::max(rep.intertwining, (lhs - rhs).norm());

    double worst = 0.0;
    if (!contains(f.domain, gz)) {
      worst = std::numeric_limits<double>::infinity();
      rep.diagnostics.push_back("g maps a probe outside " + to_string(f.domain));
    } else {
      Point tz = z;
      for (int m = 1; m <= m_max; ++m) {
        tz = orbitlab::apply(pm.tau, tz);
        const double model = kobayashi_distance(pm.Z, z, tz, s.convention);
        const StepEstimate est = backward_step(f, gz, m, tol.n_max, s);
        const double r = std::abs(est.limit - model);
        worst = std::isnan(r) ? std::numeric_limits<double>::infinity() : std::max(worst, r);
      }
    }
    rep.step_residual.push_back(worst);
    rep.max_step_residual = std::max(rep.max_step_residual, worst);
  }
  for (std::size_t a = 0; a < probes.size(); ++a) {
    for (std::size_t b = a + 1; b < probes.size(); ++b) {
      if ((images[a] - images[b]).norm() < tol.collision && (probes[a] - probes[b]).norm() > tol.collision) {
        ++rep.collisions;
      }
    }
  }
  rep.passed = rep.intertwining < tol.intertwining && rep.max_step_residual < tol.step && rep.collisions == 0;
  return rep;
}

PreModel siegel_example_premodel(double r) {
  PreModel pm;
  pm.Z = Domain::siegel(1);
  pm.name = "siegel_example(r=" + format_real(r) + ")";
  pm.g.source = pm.Z;
  pm.g.target = Domain::siegel(2);
  pm.g.components = {binary(Op::add, variable(0), literal(kI * (r * r))), literal(kI * r)};
  pm.tau.domain = pm.Z;
  pm.tau.name = "dilation by 2";
  pm.tau.components = {binary(Op::mul, literal(2.0), variable(0))};
  pm.tau.inverse = std::vector<Expr>{binary(Op::div, variable(0), literal(2.0))};
  return pm;
}

}  // namespace orbitlab
