#include "orbitlab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "orbitlab/errors.hpp"

namespace orbitlab {

namespace {

constexpr Complex kI{0.0, 1.0};

struct Built {
  MapDef map;
  TruthRecord truth;
  Point base_point;
};

struct Recipe {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
  std::function<void(const Bindings&)> check;
  std::function<Built(const Bindings&)> build;
};

Point point1(Complex a) {
  Point p(1);
  p << a;
  return p;
}

Point point2(Complex a, Complex b) {
  Point p(2);
  p << a, b;
  return p;
}

double real_param(const Bindings& v, const char* name) { return v.at(name).real(); }

void require(bool ok, const std::string& what) {
  if (!ok) throw CatalogError(what);
}

Provenance reference() { return {Basis::reference, ""}; }
Provenance elementary() { return {Basis::elementary, ""}; }
Provenance computed(std::string oracle) { return {Basis::computed, std::move(oracle)}; }

MapDef named(MapDef m, std::string name) {
  m.name = std::move(name);
  return m;
}

Built siegel_shear(const Bindings&) {
  Built b;
  b.map = named(parse_map("siegel 2 : (2*z1 + i*z2^2, z2) inverse ((z1 - i*z2^2)/2, z2)"), "siegel_shear");
  TruthRecord& t = b.truth;
  t.type = MapType::hyperbolic;
  t.rate = std::log(2.0);
  t.dw_point = point2(1.0, 0.0);
  t.dw_dilation = 0.5;
  t.repelling_point = BoundaryPoint::finite(point2(0.0, 0.0));
  t.repelling_dilation = 2.0;
  t.stable_set = "Re z2 = 0, the disjoint union of the classes {w = i r}, r real";
  t.provenance["type"] = computed("conjugation by h_r(z,w) = (z + i r^2 - 2 r w, w - i r) onto {w = 0}");
  t.provenance["rate"] = computed("sigma_m = m log 2 along (i 2^-n, 0)");
  t.provenance["dw_point"] = elementary();
  t.provenance["dw_dilation"] = computed("chart gap ratio along (2^n i, 0)");
  t.provenance["repelling_point"] = reference();
  t.provenance["repelling_dilation"] = reference();
  t.provenance["stable_set"] = reference();
  b.base_point = point2(kI, 0.0);
  return b;
}

Built halfplane_translation(const Bindings&) {
  Built b;
  b.map = named(parse_map("siegel 1 : (z1 + 1) inverse (z1 - 1)"), "halfplane_translation");
  TruthRecord& t = b.truth;
  t.type = MapType::parabolic;
  t.rate = 0.0;
  t.dw_point = point1(1.0);
  t.dw_dilation = 1.0;
  t.stable_set = "the whole half-plane, one class";
  t.provenance["type"] = computed("sigma_m = 2 asinh(m / 2), growing like 2 log m");
  t.provenance["rate"] = computed("sigma_m = 2 asinh(m / 2)");
  t.provenance["dw_point"] = elementary();
  t.provenance["dw_dilation"] = elementary();
  t.provenance["stable_set"] = elementary();
  b.base_point = point1(kI);
  return b;
}

Built slitplane_translation(const Bindings&) {
  Built b;
  b.map = named(parse_map("slitplane 1 : (z1 + 1) inverse (z1 - 1)"), "slitplane_translation");
  TruthRecord& t = b.truth;
  t.type = MapType::parabolic;
  t.rate = 0.0;
  t.dw_point = point1(1.0);
  t.dw_dilation = 1.0;
  t.stable_set = "Im z != 0, two classes: the upper and the lower half-plane";
  t.provenance["type"] = computed("square-root chart: sigma_m tends to 2 asinh(m / 2)");
  t.provenance["rate"] = computed("square-root chart: sigma_m tends to 2 asinh(m / 2)");
  t.provenance["dw_point"] = elementary();
  t.provenance["dw_dilation"] = elementary();
  t.provenance["stable_set"] = reference();
  b.base_point = point1(kI);
  return b;
}

Built disc_hyperbolic(const Bindings& v) {
  const double lambda = real_param(v, "lambda");
  const double c = (lambda - 1.0) / (lambda + 1.0);
  Built b;
  b.map = named(parse_map("disc 1 : ((z1 - c)/(1 - c*z1)) inverse ((z1 + c)/(1 + c*z1))", {{"c", c}}),
                "disc_hyperbolic");
  b.map.params["lambda"] = lambda;
  TruthRecord& t = b.truth;
  t.type = MapType::hyperbolic;
  t.rate = std::log(lambda);
  t.dw_point = point1(-1.0);
  t.dw_dilation = 1.0 / lambda;
  t.repelling_point = BoundaryPoint::unit(point1(1.0));
  t.repelling_dilation = lambda;
  t.stable_set = "the whole disc, one class";
  t.provenance["type"] = computed("half-plane conjugation to z -> z / lambda");
  t.provenance["rate"] = computed("half-plane conjugation: sigma_m = m log lambda on the real axis");
  t.provenance["dw_point"] = elementary();
  t.provenance["dw_dilation"] = elementary();
  t.provenance["repelling_point"] = elementary();
  t.provenance["repelling_dilation"] = elementary();
  t.provenance["stable_set"] = elementary();
  b.base_point = point1(0.0);
  return b;
}

Built disc_parabolic(const Bindings&) {
  Built b;
  b.map = named(parse_map("disc 1 : (((1 - i)*z1 + i)/(1 + i - i*z1)) inverse (((1 + i)*z1 - i)/(1 - i + i*z1))"),
                "disc_parabolic");
  TruthRecord& t = b.truth;
  t.type = MapType::parabolic;
  t.rate = 0.0;
  t.dw_point = point1(1.0);
  t.dw_dilation = 1.0;
  t.stable_set = "the whole disc, one class";
  t.provenance["type"] = computed("right half-plane conjugation to u -> u + 2i");
  t.provenance["rate"] = computed("right half-plane conjugation to u -> u + 2i");
  t.provenance["dw_point"] = elementary();
  t.provenance["dw_dilation"] = elementary();
  t.provenance["stable_set"] = elementary();
  b.base_point = point1(0.0);
  return b;
}

Built disc_rotation(const Bindings& v) {
  const double theta = real_param(v, "theta");
  const Complex u = std::polar(1.0, theta);
  Built b;
  b.map = named(parse_map("disc 1 : (u*z1) inverse (v*z1)", {{"u", u}, {"v", std::conj(u)}}), "disc_rotation");
  b.map.params["theta"] = theta;
  TruthRecord& t = b.truth;
  t.type = MapType::elliptic;
  t.rate = 0.0;
  t.interior_fixed_point = point1(0.0);
  t.stable_set = "the whole disc, one class";
  t.provenance["type"] = elementary();
  t.provenance["rate"] = elementary();
  t.provenance["interior_fixed_point"] = elementary();
  t.provenance["stable_set"] = elementary();
  b.base_point = point1(0.5);
  return b;
}

Built ball_unitary(const Bindings& v) {
  const Complex u1 = v.at("u1");
  const Complex u2 = v.at("u2");
  Built b;
  b.map = named(parse_map("ball 2 : (u1*z1, u2*z2) inverse (v1*z1, v2*z2)",
                          {{"u1", u1}, {"u2", u2}, {"v1", std::conj(u1)}, {"v2", std::conj(u2)}}),
                "ball_unitary");
  TruthRecord& t = b.truth;
  t.type = MapType::elliptic;
  t.rate = 0.0;
  t.interior_fixed_point = point2(0.0, 0.0);
  t.stable_set = "the whole ball, one class";
  t.provenance["type"] = elementary();
  t.provenance["rate"] = elementary();
  t.provenance["interior_fixed_point"] = elementary();
  t.provenance["stable_set"] = elementary();
  b.base_point = point2(0.3, 0.2 * kI);
  return b;
}

Built polydisc_product(const Bindings& v) {
  const double l1 = real_param(v, "lambda1");
  const double l2 = real_param(v, "lambda2");
  const double c1 = (l1 - 1.0) / (l1 + 1.0);
  const double c2 = (l2 - 1.0) / (l2 + 1.0);
  Built b;
  b.map = named(parse_map("polydisc 2 : ((z1 - c1)/(1 - c1*z1), (z2 - c2)/(1 - c2*z2)) "
                          "inverse ((z1 + c1)/(1 + c1*z1), (z2 + c2)/(1 + c2*z2))",
                          {{"c1", c1}, {"c2", c2}}),
                "polydisc_product");
  b.map.params["lambda1"] = l1;
  b.map.params["lambda2"] = l2;
  TruthRecord& t = b.truth;
  t.type = MapType::hyperbolic;
  t.rate = std::log(std::max(l1, l2));
  t.stable_set = "the whole polydisc, one class";
  t.provenance["type"] = computed("coordinatewise disc_hyperbolic, distance is the coordinate maximum");
  t.provenance["rate"] = computed("max of the coordinate rates log lambda_j");
  t.provenance["stable_set"] = elementary();
  b.base_point = point2(0.0, 0.0);
  return b;
}

Built siegel_affine(const Bindings& v) {
  const double mu = real_param(v, "mu");
  const double theta = real_param(v, "theta");
  const double shift = real_param(v, "b");
  const Complex u = std::polar(1.0, theta);
  const double root = std::sqrt(mu);
  Built b;
  b.map = named(parse_map("siegel 2 : (z1/mu + b, u*z2/s) inverse (mu*(z1 - b), s*v*z2)",
                          {{"mu", mu}, {"b", shift}, {"u", u}, {"v", std::conj(u)}, {"s", root}}),
                "siegel_affine");
  b.map.params["theta"] = theta;
  TruthRecord& t = b.truth;
  t.type = MapType::hyperbolic;
  t.rate = std::log(mu);
  const Point fixed = point2(shift * mu / (mu - 1.0), 0.0);
  t.dw_point = boundary_to_ball(Domain::siegel(2), BoundaryPoint::finite(fixed));
  t.dw_dilation = 1.0 / mu;
  t.repelling_point = BoundaryPoint::at_infinity();
  t.repelling_dilation = mu;
  t.stable_set = "the whole half-space, one class";
  t.provenance["type"] = computed("real translation conjugates to (z / mu, e^{i theta} w / sqrt(mu))");
  t.provenance["rate"] = computed("sigma_m = m log mu along the conjugated axis");
  t.provenance["dw_point"] = elementary();
  t.provenance["dw_dilation"] = elementary();
  t.provenance["repelling_point"] = elementary();
  t.provenance["repelling_dilation"] = elementary();
  t.provenance["stable_set"] = elementary();
  b.base_point = point2(kI + shift * mu / (mu - 1.0), 0.0);
  return b;
}

void check_lambda(const Bindings& v, const char* name) {
  const double l = real_param(v, name);
  require(l > 1.0 && std::isfinite(l), std::string(name) + " must be a real number above 1");
}

void check_unimodular(const Bindings& v, const char* name) {
  require(std::abs(std::abs(v.at(name)) - 1.0) <= 1e-12, std::string(name) + " must have modulus 1");
}

const std::vector<Recipe>& recipes() {
  static const std::vector<Recipe> all = {
      {"siegel_shear", "(z, w) -> (2z + i w^2, w) on the Siegel half-space of dimension 2", {},
       [](const Bindings&) {}, siegel_shear},
      {"halfplane_translation", "z -> z + 1 on the upper half-plane", {}, [](const Bindings&) {},
       halfplane_translation},
      {"slitplane_translation", "z -> z + 1 on the plane slit along the nonpositive reals", {},
       [](const Bindings&) {}, slitplane_translation},
      {"disc_hyperbolic", "disc automorphism with repelling multiplier lambda at +1",
       {{"lambda", 3.0, "real, > 1", true}}, [](const Bindings& v) { check_lambda(v, "lambda"); }, disc_hyperbolic},
      {"disc_parabolic", "parabolic disc automorphism fixing 1 (u -> u + 2i in the right half-plane)", {},
       [](const Bindings&) {}, disc_parabolic},
      {"disc_rotation", "z -> e^{i theta} z", {{"theta", 1.0, "real", true}}, [](const Bindings&) {},
       disc_rotation},
      {"ball_unitary", "(z1, z2) -> (u1 z1, u2 z2) on the unit ball",
       {{"u1", kI, "|u1| = 1", false}, {"u2", -1.0, "|u2| = 1", false}},
       [](const Bindings& v) {
         check_unimodular(v, "u1");
         check_unimodular(v, "u2");
       },
       ball_unitary},
      {"polydisc_product", "disc_hyperbolic(lambda1) x disc_hyperbolic(lambda2) on the bidisc",
       {{"lambda1", 2.0, "real, > 1", true}, {"lambda2", 3.0, "real, > 1", true}},
       [](const Bindings& v) {
         check_lambda(v, "lambda1");
         check_lambda(v, "lambda2");
       },
       polydisc_product},
      {"siegel_affine", "(z, w) -> (z / mu + b, e^{i theta} w / sqrt(mu)) on the Siegel half-space of dimension 2",
       {{"mu", 2.0, "real, > 1", true}, {"theta", 0.0, "real", true}, {"b", 0.0, "real", true}},
       [](const Bindings& v) { check_lambda(v, "mu"); }, siegel_affine},
  };
  return all;
}

}  // namespace

std::string_view to_string(Basis b) noexcept {
  switch (b) {
    case Basis::reference: return "reference";
    case Basis::elementary: return "elementary";
    case Basis::computed: return "computed";
  }
  return "?";
}

CatalogEntry catalog_get(std::string_view name, const Bindings& params) {
  const auto& all = recipes();
  const auto it = std::find_if(all.begin(), all.end(), [&](const Recipe& r) { return r.name == name; });
  if (it == all.end()) throw CatalogError("unknown catalog entry '" + std::string(name) + "'");

  Bindings values;
  for (const ParamSpec& p : it->params) values[p.name] = p.default_value;
  for (const auto& [key, value] : params) {
    const auto spec = std::find_if(it->params.begin(), it->params.end(), [&](const ParamSpec& p) { return p.name == key; });
    if (spec == it->params.end()) {
      throw CatalogError("catalog entry '" + it->name + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
      throw CatalogError("parameter '" + key + "' must be finite");
    }
    if (spec->real && value.imag() != 0.0) throw CatalogError("parameter '" + key + "' must be real");
    values[key] = value;
  }
  it->check(values);

  Built b = it->build(values);
  CatalogEntry e;
  e.name = it->name;
  e.description = it->description;
  e.params = it->params;
  e.values = std::move(values);
  e.map = std::move(b.map);
  e.truth = std::move(b.truth);
  e.base_point = std::move(b.base_point);
  return e;
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const Recipe& r : recipes()) out.push_back(r.name);
  return out;
}

}  // namespace orbitlab
