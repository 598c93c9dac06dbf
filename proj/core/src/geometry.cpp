#include "orbitlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orbitlab/errors.hpp"

namespace orbitlab {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_dim(const Domain& d, const Point& p) {
  if (p.size() != d.dim) {
    throw DomainError("dimension mismatch: " + to_string(d) + " given a point with " +
                      std::to_string(p.size()) + " coordinates");
  }
}

void require_inside(const Domain& d, const Point& p) {
  require_dim(d, p);
  if (!contains(d, p, 0.0)) throw DomainError("point outside " + to_string(d));
}

// Neumaier-compensated accumulator.
struct Accumulator {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  // Adds -a*a exactly (product split with fma).
  void subtract_square(double a) {
    const double p = a * a;
    const double e = std::fma(a, a, -p);
    add(-p);
    add(-e);
  }
  double value() const { return sum + carry; }
};

double norm2(const Point& p) { return p.squaredNorm(); }

// sum_{i<j} |a_i b_j - a_j b_i|^2 = |a|^2 |b|^2 - |<a, b>|^2
double lagrange_defect(const Point& a, const Point& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = i + 1; j < a.size(); ++j) {
      s += std::norm(a[i] * b[j] - a[j] * b[i]);
    }
  }
  return s;
}

// 2 asinh(sqrt(num / prod)) is log((1 + rho) / (1 - rho)) with
// rho^2 = num / den and 1 - rho^2 = prod / den.
double distance_from_ratio(double num, double prod) {
  num = std::max(num, 0.0);
  if (num == 0.0) return 0.0;
  return 2.0 * std::asinh(std::sqrt(num / prod));
}

double ball_distance(const Point& a, const Point& b) {
  const double num = (a - b).squaredNorm() - lagrange_defect(a, b);
  const double prod = one_minus_norm2(a) * one_minus_norm2(b);
  return distance_from_ratio(num, prod);
}

double siegel_defining(const Point& p) {
  Accumulator acc;
  acc.add(p[0].imag());
  for (Eigen::Index j = 1; j < p.size(); ++j) {
    acc.subtract_square(p[j].real());
    acc.subtract_square(p[j].imag());
  }
  return acc.value();
}

// Siegel half-space distance written so that both rho^2 and 1 - rho^2 are
// free of cancellation for nearby points.
double siegel_distance(const Point& a_in, const Point& b_in) {
  // The dilation (z, w) -> (4^k z, 2^k w) is an exact isometry; it keeps the
  // product of defining functions below from under- or overflowing.
  const double size = std::max({std::abs(a_in[0]), std::abs(b_in[0]), norm2(a_in.tail(a_in.size() - 1)),
                                norm2(b_in.tail(b_in.size() - 1))});
  const int k = size > 0.0 && std::isfinite(size) ? -std::ilogb(size) / 2 : 0;
  Point a = a_in, b = b_in;
  a[0] = std::ldexp(1.0, 2 * k) * a[0];
  b[0] = std::ldexp(1.0, 2 * k) * b[0];
  a.tail(a.size() - 1) *= std::ldexp(1.0, k);
  b.tail(b.size() - 1) *= std::ldexp(1.0, k);
  const Complex z = a[0];
  const Complex zp = b[0];
  const double x = z.real(), y = z.imag(), xp = zp.real(), yp = zp.imag();
  const Point w = a.tail(a.size() - 1);
  const Point wp = b.tail(b.size() - 1);
  const Complex s = hermitian(w, wp);
  const double num = std::norm(z - zp) / 4.0 + 0.5 * (y + yp) * (w - wp).squaredNorm() +
                     0.5 * (y - yp) * (norm2(wp) - norm2(w)) + (x - xp) * s.imag() -
                     lagrange_defect(w, wp);
  const double prod = siegel_defining(a) * siegel_defining(b);
  return distance_from_ratio(num, prod);
}

double slit_distance(const Complex& z, const Complex& zp) {
  const Complex u = std::sqrt(z);
  const Complex v = std::sqrt(zp);
  const double t = std::abs(u - v) / (2.0 * std::sqrt(u.real() * v.real()));
  return 2.0 * std::asinh(t);
}

double disc_metric(const Complex& z, const Complex& v) {
  Point p(1);
  p[0] = z;
  return 2.0 * std::abs(v) / one_minus_norm2(p);
}

}  // namespace

Domain Domain::ball(int q) { return make(DomainKind::ball, q); }
Domain Domain::polydisc(int q) { return make(DomainKind::polydisc, q); }
Domain Domain::siegel(int q) { return make(DomainKind::siegel, q); }

Domain Domain::make(DomainKind kind, int q) {
  if (q < 1) throw DomainError("domain dimension must be positive");
  if ((kind == DomainKind::disc || kind == DomainKind::slit_plane) && q != 1) {
    throw DomainError(std::string(to_string(kind)) + " has dimension 1");
  }
  return {kind, q};
}

std::string_view to_string(DomainKind kind) noexcept {
  switch (kind) {
    case DomainKind::disc: return "disc";
    case DomainKind::ball: return "ball";
    case DomainKind::polydisc: return "polydisc";
    case DomainKind::siegel: return "siegel";
    case DomainKind::slit_plane: return "slitplane";
  }
  return "?";
}

std::optional<DomainKind> domain_kind_from_string(std::string_view name) noexcept {
  for (auto k : {DomainKind::disc, DomainKind::ball, DomainKind::polydisc, DomainKind::siegel,
                 DomainKind::slit_plane}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string to_string(const Domain& d) {
  return std::string(to_string(d.kind)) + " " + std::to_string(d.dim);
}

BoundaryPoint BoundaryPoint::unit(Point v) {
  if (std::abs(v.norm() - 1.0) > 1e-12) throw DomainError("boundary unit vector must have norm 1");
  return {Form::unit_vector, std::move(v)};
}

double one_minus_norm2(const Point& z) {
  Accumulator acc;
  acc.add(1.0);
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    acc.subtract_square(z[j].real());
    acc.subtract_square(z[j].imag());
  }
  return acc.value();
}

Complex hermitian(const Point& a, const Point& b) {
  // Eigen's dot conjugates its left operand.
  return b.dot(a);
}

Slack membership_slack(const Domain& d, const Point& p) {
  require_dim(d, p);
  switch (d.kind) {
    case DomainKind::disc:
    case DomainKind::ball:
      return {one_minus_norm2(p), 1.0};
    case DomainKind::polydisc: {
      double m = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < p.size(); ++j) {
        Point c(1);
        c[0] = p[j];
        m = std::min(m, one_minus_norm2(c));
      }
      return {m, 1.0};
    }
    case DomainKind::siegel: {
      const double scale = std::abs(p[0].imag()) + p.tail(p.size() - 1).squaredNorm();
      return {siegel_defining(p), scale};
    }
    case DomainKind::slit_plane: {
      const Complex z = p[0];
      const double s = z.real() > 0.0 ? std::abs(z) : std::abs(z.imag());
      return {s, std::abs(z)};
    }
  }
  return {0.0, 1.0};
}

bool contains(const Domain& d, const Point& p, double margin) {
  const Slack s = membership_slack(d, p);
  if (!p.allFinite()) return false;
  return s.value > margin;
}

bool within_tolerance(const Domain& d, const Point& p, double tolerance) {
  const Slack s = membership_slack(d, p);
  if (!p.allFinite() || !std::isfinite(s.value)) return false;
  if (s.scale == 0.0) return false;
  return s.value >= -tolerance * s.scale;
}

bool resolved(const Domain& d, const Point& p, double floor) {
  const Slack s = membership_slack(d, p);
  if (!p.allFinite() || !(s.value > 0.0)) return false;
  return s.value >= floor * s.scale;
}

double kobayashi_distance(const Domain& d, const Point& x, const Point& y, Convention convention) {
  require_inside(d, x);
  require_inside(d, y);
  double k = 0.0;
  switch (d.kind) {
    case DomainKind::disc:
    case DomainKind::ball:
      k = ball_distance(x, y);
      break;
    case DomainKind::polydisc:
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        Point a(1), b(1);
        a[0] = x[j];
        b[0] = y[j];
        k = std::max(k, ball_distance(a, b));
      }
      break;
    case DomainKind::siegel:
      k = siegel_distance(x, y);
      break;
    case DomainKind::slit_plane:
      k = slit_distance(x[0], y[0]);
      break;
  }
  return convention_factor(convention) * k;
}

double kobayashi_metric(const Domain& d, const TangentVector& t, Convention convention) {
  require_inside(d, t.base);
  require_dim(d, t.dir);
  const Point& z = t.base;
  const Point& v = t.dir;
  double kappa = 0.0;
  switch (d.kind) {
    case DomainKind::disc:
    case DomainKind::ball: {
      const double s = one_minus_norm2(z);
      const double proj = std::norm(hermitian(v, z));
      kappa = 2.0 * std::sqrt(v.squaredNorm() / s + proj / (s * s));
      break;
    }
    case DomainKind::polydisc:
      for (Eigen::Index j = 0; j < z.size(); ++j) kappa = std::max(kappa, disc_metric(z[j], v[j]));
      break;
    case DomainKind::siegel: {
      const double r = siegel_defining(z);
      const Point w = z.tail(z.size() - 1);
      const Point vw = v.tail(v.size() - 1);
      const Complex dr = v[0] / (2.0 * kI) - hermitian(vw, w);
      kappa = 2.0 * std::sqrt(vw.squaredNorm() / r + std::norm(dr) / (r * r));
      break;
    }
    case DomainKind::slit_plane: {
      const Complex u = std::sqrt(z[0]);
      kappa = std::abs(v[0]) / (2.0 * std::abs(u) * u.real());
      break;
    }
  }
  return convention_factor(convention) * kappa;
}

Point cayley_transform(CayleyDirection direction, const Point& p) {
  if (p.size() < 1) throw DomainError("empty point");
  Point out(p.size());
  if (direction == CayleyDirection::to_siegel) {
    const Complex denom = 1.0 - p[0];
    if (denom == 0.0) throw DomainError("Cayley transform pole at z = 1");
    out[0] = kI * (1.0 + p[0]) / denom;
    for (Eigen::Index j = 1; j < p.size(); ++j) out[j] = p[j] / denom;
  } else {
    const Complex denom = p[0] + kI;
    if (denom == 0.0) throw DomainError("inverse Cayley transform pole at z = -i");
    out[0] = (p[0] - kI) / denom;
    for (Eigen::Index j = 1; j < p.size(); ++j) out[j] = 2.0 * kI * p[j] / denom;
  }
  return out;
}

Point ball_automorphism(const Point& a, const Point& z) {
  if (a.size() != z.size()) throw DomainError("dimension mismatch in ball automorphism");
  const Domain b = Domain::ball(static_cast<int>(a.size()));
  require_inside(b, a);
  require_inside(b, z);
  const double a2 = a.squaredNorm();
  if (a2 == 0.0) return -z;
  const Complex za = hermitian(z, a);
  const Point proj = (za / a2) * a;
  const Point orth = z - proj;
  const double s = std::sqrt(one_minus_norm2(a));
  return (a - proj - s * orth) / (1.0 - za);
}

bool koranyi_membership(const Point& z, const BoundaryPoint& zeta, double amplitude) {
  if (amplitude <= 1.0) throw std::invalid_argument("Koranyi amplitude must exceed 1");
  if (zeta.form != BoundaryPoint::Form::unit_vector) {
    throw std::invalid_argument("Koranyi vertex must be a unit vector");
  }
  if (z.size() != zeta.coords.size()) throw DomainError("dimension mismatch in Koranyi test");
  const double gap = one_minus_norm2(z) / (1.0 + z.norm());
  return std::abs(1.0 - hermitian(z, zeta.coords)) < amplitude * gap;
}

std::string_view to_string(Flag f) noexcept {
  switch (f) {
    case Flag::yes: return "yes";
    case Flag::no: return "no";
    case Flag::inconclusive: return "inconclusive";
  }
  return "?";
}

SequenceFlags sequence_flags(std::span<const Point> seq, const BoundaryPoint& zeta) {
  if (seq.empty() || zeta.form != BoundaryPoint::Form::unit_vector) return {};
  const Point& e = zeta.coords;
  const Domain ball = Domain::ball(static_cast<int>(e.size()));
  const std::size_t tail = std::min<std::size_t>(10, seq.size());
  const auto first = seq.end() - static_cast<std::ptrdiff_t>(tail);

  std::vector<double> dist, ratio, miss;
  for (auto it = first; it != seq.end(); ++it) {
    const Complex c = hermitian(*it, e);
    const Point proj = c * e;
    dist.push_back(kobayashi_distance(ball, *it, proj));
    Point cp(1);
    cp[0] = c;
    const double gap = one_minus_norm2(cp) / (1.0 + std::abs(c));
    miss.push_back(std::abs(1.0 - c));
    ratio.push_back(gap > 0.0 ? miss.back() / gap : std::numeric_limits<double>::infinity());
  }

  SequenceFlags flags;
  const double dmax = *std::max_element(dist.begin(), dist.end());
  const double dmin = *std::min_element(dist.begin(), dist.end());
  if (dmax < 1e-6) {
    flags.special = Flag::yes;
  } else if (dmin >= 1e-3 && dist.back() >= 0.5 * dist.front()) {
    flags.special = Flag::no;
  }

  const double rmax = *std::max_element(ratio.begin(), ratio.end());
  const bool ratio_growing =
      tail >= 2 && std::is_sorted(ratio.begin(), ratio.end()) && ratio.back() > ratio.front();
  const bool miss_stuck = tail >= 2 && miss.back() >= miss.front() && miss.back() > 1e-3;
  if (rmax < 10.0 && miss.back() < 1e-8) {
    flags.restricted = Flag::yes;
  } else if ((ratio_growing && ratio.back() >= 10.0) || miss_stuck) {
    flags.restricted = Flag::no;
  }
  return flags;
}

bool has_ball_chart(DomainKind kind) noexcept { return kind != DomainKind::polydisc; }

Point to_ball_chart(const Domain& d, const Point& p) {
  require_dim(d, p);
  switch (d.kind) {
    case DomainKind::disc:
    case DomainKind::ball:
      return p;
    case DomainKind::siegel:
      return cayley_transform(CayleyDirection::to_ball, p);
    case DomainKind::slit_plane: {
      const Complex u = std::sqrt(p[0]);
      Point out(1);
      out[0] = (u - 1.0) / (u + 1.0);
      return out;
    }
    case DomainKind::polydisc:
      break;
  }
  throw DomainError("the polydisc has no ball chart");
}

double ball_chart_gap_squared(const Domain& d, const Point& p) {
  require_dim(d, p);
  switch (d.kind) {
    case DomainKind::disc:
    case DomainKind::ball:
      return one_minus_norm2(p);
    case DomainKind::siegel:
      // 1 - |Psi^{-1}(z, w)|^2 = 4 (Im z - |w|^2) / |z + i|^2
      return 4.0 * siegel_defining(p) / std::norm(p[0] + kI);
    case DomainKind::slit_plane: {
      const Complex u = std::sqrt(p[0]);
      return 4.0 * u.real() / std::norm(u + 1.0);
    }
    case DomainKind::polydisc:
      break;
  }
  throw DomainError("the polydisc has no ball chart");
}

double ball_chart_gap(const Domain& d, const Point& p) {
  const double g2 = ball_chart_gap_squared(d, p);
  const double n = std::sqrt(std::max(0.0, 1.0 - g2));
  return g2 / (1.0 + n);
}

Point boundary_to_ball(const Domain& d, const BoundaryPoint& b) {
  switch (b.form) {
    case BoundaryPoint::Form::unit_vector:
      if (b.coords.size() != d.dim) throw DomainError("boundary point dimension mismatch");
      return b.coords;
    case BoundaryPoint::Form::infinity: {
      if (d.kind != DomainKind::siegel && d.kind != DomainKind::slit_plane) {
        throw DomainError("infinity is not a boundary point of " + to_string(d));
      }
      Point e = Point::Zero(d.dim);
      e[0] = 1.0;
      return e;
    }
    case BoundaryPoint::Form::finite: {
      require_dim(d, b.coords);
      Point c;
      if (d.kind == DomainKind::siegel) {
        c = cayley_transform(CayleyDirection::to_ball, b.coords);
      } else if (d.kind == DomainKind::slit_plane) {
        // slit points are read as approached from the upper half-plane
        const Complex z = b.coords[0];
        if (z.imag() != 0.0 || z.real() > 0.0) throw DomainError("not a point of the slit");
        const Complex u(0.0, std::sqrt(-z.real()));
        c = Point(1);
        c[0] = (u - 1.0) / (u + 1.0);
      } else {
        c = b.coords;
      }
      const double n = c.norm();
      if (std::abs(n - 1.0) > 1e-9) throw DomainError("finite boundary point is not on the boundary");
      return c / n;
    }
  }
  throw DomainError("invalid boundary point");
}

const char* to_string(InversionErrorKind kind) noexcept {
  switch (kind) {
    case InversionErrorKind::newton_diverged: return "newton_diverged";
    case InversionErrorKind::left_domain: return "left_domain";
    case InversionErrorKind::singular_jacobian: return "singular_jacobian";
    case InversionErrorKind::evaluation: return "evaluation";
    case InversionErrorKind::inverse_mismatch: return "inverse_mismatch";
  }
  return "?";
}

}  // namespace orbitlab
