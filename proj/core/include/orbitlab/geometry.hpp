#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "orbitlab/settings.hpp"

namespace orbitlab {

using Complex = std::complex<double>;
using Point = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

enum class DomainKind { disc, ball, polydisc, siegel, slit_plane };

/// One of the supported hyperbolic domains in C^dim.
///
///  - disc:       |z| < 1                          (dim 1)
///  - ball:       |z_1|^2 + ... + |z_q|^2 < 1
///  - polydisc:   |z_j| < 1 for every j
///  - siegel:     Im z_1 > |z_2|^2 + ... + |z_q|^2
///  - slit_plane: C minus the nonpositive reals   (dim 1)
struct Domain {
  DomainKind kind = DomainKind::disc;
  int dim = 1;

  static Domain disc() { return {DomainKind::disc, 1}; }
  static Domain ball(int q);
  static Domain polydisc(int q);
  static Domain siegel(int q);
  static Domain slit_plane() { return {DomainKind::slit_plane, 1}; }
  static Domain make(DomainKind kind, int q);

  bool operator==(const Domain&) const = default;
};

std::string_view to_string(DomainKind kind) noexcept;
std::optional<DomainKind> domain_kind_from_string(std::string_view name) noexcept;
std::string to_string(const Domain& d);

struct TangentVector {
  Point base;
  Point dir;
};

/// A point of the boundary. Unit vectors live on the unit sphere (ball charts),
/// `infinity` is the point at infinity of the Siegel model and `finite` is a
/// boundary point written in the coordinates of the domain it bounds.
struct BoundaryPoint {
  enum class Form { unit_vector, infinity, finite };

  Form form = Form::unit_vector;
  Point coords;

  static BoundaryPoint unit(Point v);
  static BoundaryPoint at_infinity() { return {Form::infinity, Point()}; }
  static BoundaryPoint finite(Point v) { return {Form::finite, std::move(v)}; }
};

/// Signed distance-like quantity of the domain's defining inequality together
/// with the magnitude of the terms it was computed from.
struct Slack {
  double value;
  double scale;
};

Slack membership_slack(const Domain& d, const Point& p);

/// True when the defining inequality holds with slack strictly above `margin`
/// (e.g. Siegel: Im z_1 - |w|^2 > margin). Throws DomainError on a dimension
/// mismatch.
bool contains(const Domain& d, const Point& p, double margin = 0.0);

/// True unless the slack is below -tolerance * scale, i.e. the point is
/// outside by more than rounding of its own coordinates.
bool within_tolerance(const Domain& d, const Point& p, double tolerance);

/// True when the relative slack is at least `floor` (value >= floor * scale).
bool resolved(const Domain& d, const Point& p, double floor);

double kobayashi_distance(const Domain& d, const Point& x, const Point& y,
                          Convention convention = Convention::doubled);

double kobayashi_metric(const Domain& d, const TangentVector& t,
                        Convention convention = Convention::doubled);

enum class CayleyDirection { to_siegel, to_ball };

/// Psi(z, w) = (i (1 + z) / (1 - z), w / (1 - z)) and its inverse.
Point cayley_transform(CayleyDirection direction, const Point& p);

/// Moebius automorphism of the ball exchanging a and 0.
Point ball_automorphism(const Point& a, const Point& z);

/// |1 - <z, zeta>| < R (1 - |z|). Requires R > 1 and a unit-vector zeta.
bool koranyi_membership(const Point& z, const BoundaryPoint& zeta, double amplitude);

enum class Flag { yes, no, inconclusive };
std::string_view to_string(Flag f) noexcept;

struct SequenceFlags {
  Flag special = Flag::inconclusive;
  Flag restricted = Flag::inconclusive;
};

/// Empirical verdicts on whether a ball sequence is special and restricted at
/// zeta, judged from its trailing (up to) ten terms.
SequenceFlags sequence_flags(std::span<const Point> seq, const BoundaryPoint& zeta);

// Ball charts. Disc and ball are their own chart, the Siegel half-space uses
// the inverse Cayley transform and the slit plane uses
// z -> (sqrt z - 1) / (sqrt z + 1). The polydisc has none.

bool has_ball_chart(DomainKind kind) noexcept;
Point to_ball_chart(const Domain& d, const Point& p);
/// 1 - |chart(p)|^2 evaluated without cancellation where the chart allows.
double ball_chart_gap_squared(const Domain& d, const Point& p);
/// 1 - |chart(p)|.
double ball_chart_gap(const Domain& d, const Point& p);
/// Image of a boundary point as a unit vector of the chart ball.
Point boundary_to_ball(const Domain& d, const BoundaryPoint& b);

/// 1 - |z|^2 with error-free products and compensated summation.
double one_minus_norm2(const Point& z);

/// <a, b> = sum a_j conj(b_j).
Complex hermitian(const Point& a, const Point& b);

}  // namespace orbitlab
