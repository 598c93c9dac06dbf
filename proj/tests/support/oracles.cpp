#include "oracles.hpp"

#include <cmath>

namespace oracle {

namespace {

constexpr Complex kI{0.0, 1.0};

long double norm2(const Point& p) {
  long double s = 0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const long double re = p[j].real(), im = p[j].imag();
    s += re * re + im * im;
  }
  return s;
}

LComplex inner(const Point& a, const Point& b) {
  LComplex s = 0;
  for (Eigen::Index j = 0; j < a.size(); ++j) s += LComplex(a[j]) * std::conj(LComplex(b[j]));
  return s;
}

long double distance_from_gap(long double gap) {
  // 1 - rho^2 = gap
  const long double rho = std::sqrt(std::max<long double>(0, 1 - gap));
  return std::log((1 + rho) / (1 - rho));
}

std::uniform_real_distribution<double> unit(0.0, 1.0);

Point random_direction(std::mt19937_64& rng, int q) {
  std::normal_distribution<double> g;
  Point v(q);
  for (int j = 0; j < q; ++j) v[j] = Complex(g(rng), g(rng));
  return v / v.norm();
}

}  // namespace

long double ball_distance(const Point& a, const Point& b) {
  const long double num = (1 - norm2(a)) * (1 - norm2(b));
  const long double den = std::norm(LComplex(1) - inner(b, a));
  return distance_from_gap(num / den);
}

double disc_distance_quadrature(Complex a, Complex b, int panels) {
  const double rho = std::abs((b - a) / (1.0 - std::conj(a) * b));
  const double h = rho / panels;
  auto f = [](double t) { return 2.0 / (1.0 - t * t); };
  double s = f(0.0) + f(rho);
  for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return s * h / 3.0;
}

long double siegel_distance(const Point& p, const Point& q) {
  auto to_ball = [](const Point& x) {
    Point out(x.size());
    const Complex den = x[0] + kI;
    out[0] = (x[0] - kI) / den;
    for (Eigen::Index j = 1; j < x.size(); ++j) out[j] = 2.0 * kI * x[j] / den;
    return out;
  };
  // Use the gap formula 1 - |Psi^{-1} x|^2 = 4 (Im z - |w|^2) / |z + i|^2 so
  // the oracle stays accurate for points near the boundary.
  auto gap = [](const Point& x) {
    long double r = x[0].imag();
    for (Eigen::Index j = 1; j < x.size(); ++j) r -= std::norm(LComplex(x[j]));
    return 4 * r / std::norm(LComplex(x[0]) + LComplex(0, 1));
  };
  const Point a = to_ball(p), b = to_ball(q);
  const long double g = gap(p) * gap(q) / std::norm(LComplex(1) - inner(b, a));
  return distance_from_gap(g);
}

long double slit_distance(Complex z, Complex w) {
  const LComplex u = std::sqrt(LComplex(z));
  const LComplex v = std::sqrt(LComplex(w));
  // right half-plane -> disc: (u - 1) / (u + 1); gap 1 - |d|^2 = 4 Re u / |u + 1|^2
  const LComplex du = (u - LComplex(1)) / (u + LComplex(1));
  const LComplex dv = (v - LComplex(1)) / (v + LComplex(1));
  const long double gu = 4 * u.real() / std::norm(u + LComplex(1));
  const long double gv = 4 * v.real() / std::norm(v + LComplex(1));
  return distance_from_gap(gu * gv / std::norm(LComplex(1) - du * std::conj(dv)));
}

orbitlab::Matrix fd_jacobian(const orbitlab::MapDef& f, const Point& p, double h) {
  const auto q = p.size();
  orbitlab::Matrix J(q, q);
  for (Eigen::Index j = 0; j < q; ++j) {
    Point plus = p, minus = p;
    plus[j] += h;
    minus[j] -= h;
    J.col(j) = (orbitlab::apply(f, plus) - orbitlab::apply(f, minus)) / (2.0 * h);
  }
  return J;
}

long double sigma_naive(long double theta, long double lambda, int m) {
  const long double lm = std::pow(lambda, m);
  const long double a = std::abs(std::polar(1.0L, -2 * theta) + lm);
  const long double b = std::abs(1 - lm);
  return std::log((a + b) / (a - b));
}

Point h(double r, const Point& p) {
  Point out(2);
  out[0] = p[0] + kI * (r * r) - 2.0 * r * p[1];
  out[1] = p[1] - kI * r;
  return out;
}

Point h_inverse(double r, const Point& p) {
  Point out(2);
  out[0] = p[0] + 2.0 * r * p[1] + kI * (r * r);
  out[1] = p[1] + kI * r;
  return out;
}

Point random_ball_point(std::mt19937_64& rng, int q) {
  const double radius = 1.0 - std::pow(unit(rng), 3.0);  // biased towards the boundary
  return 0.999 * radius * random_direction(rng, q);
}

Point random_polydisc_point(std::mt19937_64& rng, int q) {
  Point p(q);
  for (int j = 0; j < q; ++j) p[j] = std::polar(0.999 * (1.0 - std::pow(unit(rng), 3.0)), 6.283185307179586 * unit(rng));
  return p;
}

Point random_siegel_point(std::mt19937_64& rng, int q) {
  std::normal_distribution<double> g;
  Point p(q);
  double w2 = 0.0;
  for (int j = 1; j < q; ++j) {
    p[j] = Complex(g(rng), g(rng));
    w2 += std::norm(p[j]);
  }
  const double slack = std::exp(4.0 * (unit(rng) - 0.5) * 2.0);  // e^-4 .. e^4
  p[0] = Complex(3.0 * g(rng), w2 + slack);
  return p;
}

Point random_slit_point(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Point p(1);
  do {
    p[0] = Complex(3.0 * g(rng), 3.0 * g(rng));
  } while (std::abs(p[0].imag()) < 1e-3 && p[0].real() <= 0.0);
  return p;
}

Point random_point(std::mt19937_64& rng, const orbitlab::Domain& d) {
  switch (d.kind) {
    case orbitlab::DomainKind::disc:
    case orbitlab::DomainKind::ball:
      return random_ball_point(rng, d.dim);
    case orbitlab::DomainKind::polydisc:
      return random_polydisc_point(rng, d.dim);
    case orbitlab::DomainKind::siegel:
      return random_siegel_point(rng, d.dim);
    case orbitlab::DomainKind::slit_plane:
      return random_slit_point(rng);
  }
  return {};
}

Point BallAutomorphism::operator()(const Point& z) const { return U * orbitlab::ball_automorphism(a, z); }

BallAutomorphism random_ball_automorphism(std::mt19937_64& rng, int q) {
  BallAutomorphism phi;
  phi.a = 0.9 * unit(rng) * random_direction(rng, q);
  std::normal_distribution<double> g;
  orbitlab::Matrix m(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) m(i, j) = Complex(g(rng), g(rng));
  phi.U = Eigen::HouseholderQR<orbitlab::Matrix>(m).householderQ();
  return phi;
}

}  // namespace oracle
