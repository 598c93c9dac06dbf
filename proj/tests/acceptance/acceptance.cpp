// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "orbitlab/catalog.hpp"
#include "orbitlab/premodel.hpp"
#include "orbitlab/stable_set.hpp"

namespace {

using namespace orbitlab;

constexpr Complex kI{0.0, 1.0};

Point pt(std::initializer_list<Complex> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index j = 0;
  for (Complex x : xs) p[j++] = x;
  return p;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;  // 0 when the criterion has no runtime bound
  std::function<void(Outcome&)> check;
};

// 1. Backward steps of the shear and its class rate.
void shear_rates(Outcome& o) {
  const MapDef f = catalog_get("siegel_shear").map;
  const Point x = pt({kI, 0.0});
  const double sigma = backward_step(f, x, 32, 16).limit;
  const double err = std::abs(sigma / 32.0 - std::log(2.0));
  const double mu = class_rate(f, x);
  o.detail << "|sigma_32/32 - log 2| = " << err << ", mu = " << mu << "; ";
  o.require(err < 1e-6, "sigma_32 / 32");
  o.require(std::abs(mu - 2.0) <= 1e-3, "class rate 2");
}

// 2. Backward orbits survive 60 steps exactly on {Re w = 0}.
void stable_dichotomy(Outcome& o) {
  const MapDef f = catalog_get("siegel_shear").map;
  const std::vector<double> magnitudes{1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.3};
  std::vector<double> cs{0.0};
  for (double m : magnitudes) {
    cs.push_back(m);
    cs.push_back(-m);
  }
  int points = 0, wrong_survival = 0, wrong_class = 0;
  for (int ia = 0; ia < 15; ++ia) {
    const double a = 1.0 + 3.0 * ia / 14.0;
    std::vector<Point> row;
    for (double c : cs) {
      const Point p = pt({a * kI, Complex(c, 0.5)});
      const bool survives = backward_orbit(f, p, 60).complete(60);
      wrong_survival += survives != (std::abs(c) < 1e-9);
      row.push_back(p);
      ++points;
    }
    // The partition's stability verdict on the same row.
    const Partition part = partition(f, row, 60);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const bool non_stable =
          std::find(part.non_stable.begin(), part.non_stable.end(), k) != part.non_stable.end();
      wrong_class += non_stable != (cs[k] != 0.0);
    }
  }
  o.detail << points << " grid points, survival mismatches " << wrong_survival << ", stability mismatches "
           << wrong_class << "; ";
  o.require(points == 225, "15x15 grid");
  o.require(wrong_survival == 0, "survival iff |c| < 1e-9");
  o.require(wrong_class == 0, "classifier accuracy");
}

// 3. Partition of samples on three slices, and invariance under f.
void partition_correctness(Outcome& o) {
  const MapDef f = catalog_get("siegel_shear").map;
  std::vector<Point> samples;
  std::vector<int> slice;
  const std::vector<double> rs{0.0, 0.3, 0.6};
  for (int k = 0; k < 3; ++k)
    for (Complex zeta : {Complex(0.0, 1.0), Complex(2.0, 3.0)}) {
      samples.push_back(oracle::h_inverse(rs[k], pt({zeta, 0.0})));
      slice.push_back(k);
    }
  std::vector<Point> images;
  for (const Point& p : samples) images.push_back(orbitlab::apply(f, p));

  auto check = [&](const Partition& p, const char* label) {
    o.detail << label << ": " << p.classes.size() << " classes; ";
    o.require(p.classes.size() == 3, std::string(label) + " class count");
    o.require(p.unresolved.empty() && p.non_stable.empty(), std::string(label) + " all resolved");
    for (std::size_t i = 0; i < samples.size(); ++i)
      for (std::size_t j = 0; j < samples.size(); ++j)
        if ((p.class_of[i] == p.class_of[j]) != (slice[i] == slice[j]))
          o.require(false, std::string(label) + " cross-class merge or split");
  };
  const Partition before = partition(f, samples, 32);
  const Partition after = partition(f, images, 32);
  check(before, "samples");
  check(after, "images");
}

// 4. Pre-model family of the shear.
void premodel_family(Outcome& o) {
  const MapDef f = catalog_get("siegel_shear").map;
  for (double r : {0.0, 1.0, -2.0}) {
    const PreModelReport rep = verify_premodel(f, siegel_example_premodel(r), default_premodel_probes(), 20);
    o.detail << "r=" << r << ": intertwining " << rep.intertwining << ", step " << rep.max_step_residual << "; ";
    o.require(rep.intertwining < 1e-12, "intertwining");
    o.require(rep.max_step_residual < 1e-6, "step identity");
    o.require(rep.passed, "verify_premodel passed");
  }
}

// 5. Rate identities.
void rate_identities(Outcome& o) {
  for (double mu : {2.0, 3.0, 10.0}) {
    const CatalogEntry e = catalog_get("siegel_affine", {{"mu", mu}});
    const double err = std::abs(divergence_rate(e.map, e.base_point, 40) - std::log(mu));
    o.detail << "mu=" << mu << ": " << err << "; ";
    o.require(err < 1e-9, "normal form rate");
  }
  {
    const CatalogEntry e = catalog_get("siegel_shear");
    const double c_tau = classify_type(e.map, e.base_point).rate;
    const double c_f = divergence_rate(e.map, e.base_point, 64);
    o.detail << "shear c(tau) - c(f) = " << c_tau - c_f << "; ";
    o.require(c_tau >= c_f - 1e-6, "c(tau) >= c(f)");
    o.require(std::abs(c_tau - c_f) < 1e-6, "equality gap");
  }
  {
    const CatalogEntry e = catalog_get("disc_hyperbolic", {{"lambda", 3.0}});
    const std::vector<Point> starts{e.base_point, pt({0.5 * kI})};
    const DWReport dw = denjoy_wolff(e.map, starts, 200);
    const double gap = std::abs(divergence_rate(e.map, e.base_point, 64) + std::log(dw.dilation));
    o.detail << "disc: lambda_DW " << dw.dilation << ", |c + log lambda_DW| = " << gap << "; ";
    o.require(dw.kind == DWReport::Kind::boundary, "boundary Denjoy-Wolff point");
    o.require(gap < 1e-3, "c(f) = -log lambda_DW");
  }
}

// 6. Closed-form sigma_m against the dynamics.
void closed_formula(Outcome& o) {
  const CatalogEntry e = catalog_get("disc_hyperbolic", {{"lambda", 2.0}});
  double worst = 0.0;
  for (int m = 1; m <= 10; ++m) {
    const double dynamic = backward_step(e.map, pt({0.0}), m, 8).limit;
    worst = std::max(worst, std::abs(dynamic - sigma_closed_form(0.0, 2.0, m)));
  }
  o.detail << "max |sigma_m - closed form| (m <= 10) = " << worst << "; ";
  o.require(worst < 1e-4, "radial agreement");
  for (double theta : {0.0, 1.0, -1.0}) {
    const double closed = sigma_closed_form(theta, 2.0, 40);
    const double naive = static_cast<double>(oracle::sigma_naive(theta, 2.0L, 40));
    const double err = std::abs(closed / 40.0 - std::log(2.0));
    // sigma_m = m log lambda - 2 log cos theta + O(lambda^-m), so the gap at
    // m = 40 is -2 log(cos theta) / 40 whatever the implementation does.
    o.detail << "theta=" << theta << ": " << err << " (naive oracle " << std::abs(naive / 40.0 - std::log(2.0))
             << ", -2 log cos(theta)/40 = " << -2.0 * std::log(std::cos(theta)) / 40.0 << "); ";
    o.require(err < 1e-3, "sigma_40 / 40");
  }
}

// 7. Type trichotomy on four catalog maps.
void trichotomy(Outcome& o) {
  const std::vector<std::pair<const char*, MapType>> cases{{"ball_unitary", MapType::elliptic},
                                                           {"halfplane_translation", MapType::parabolic},
                                                           {"siegel_shear", MapType::hyperbolic},
                                                           {"disc_hyperbolic", MapType::hyperbolic}};
  int correct = 0;
  for (const auto& [name, expected] : cases) {
    const CatalogEntry e = catalog_get(name);
    const MapType t = classify_type(e.map, e.base_point).type;
    correct += t == expected;
    o.detail << name << "=" << to_string(t) << " ";
  }
  o.detail << "(" << correct << "/4); ";
  o.require(correct == 4, "4/4 correct");
}

// 8. Geometry property suite.
void geometry_properties(Outcome& o) {
  constexpr int kSamples = 1000;
  std::mt19937_64 rng(2024);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };

  int isometry = 0, cayley = 0, triangle = 0, schwarz = 0, metric = 0, checked = 0;
  for (int q : {1, 2, 3}) {
    const Domain ball = q == 1 ? Domain::disc() : Domain::ball(q);
    for (int k = 0; k < kSamples; ++k) {
      const auto phi = oracle::random_ball_automorphism(rng, q);
      const Point x = oracle::random_ball_point(rng, q), y = oracle::random_ball_point(rng, q);
      const Point px = phi(x), py = phi(y);
      if (contains(ball, px) && contains(ball, py))
        isometry += rel(kobayashi_distance(ball, px, py), kobayashi_distance(ball, x, y)) >= 1e-9;
      const Point sx = cayley_transform(CayleyDirection::to_siegel, x);
      const Point sy = cayley_transform(CayleyDirection::to_siegel, y);
      if (contains(Domain::siegel(q), sx) && contains(Domain::siegel(q), sy))
        cayley += rel(kobayashi_distance(Domain::siegel(q), sx, sy), kobayashi_distance(ball, x, y)) >= 1e-9;
      ++checked;
    }
  }
  const std::vector<Domain> domains{Domain::disc(), Domain::ball(2),   Domain::polydisc(2),
                                    Domain::siegel(1), Domain::siegel(2), Domain::slit_plane()};
  std::normal_distribution<double> g;
  for (const Domain& d : domains) {
    for (int k = 0; k < kSamples; ++k) {
      const Point x = oracle::random_point(rng, d), y = oracle::random_point(rng, d),
                  z = oracle::random_point(rng, d);
      const double xz = kobayashi_distance(d, x, z);
      triangle += xz > kobayashi_distance(d, x, y) + kobayashi_distance(d, y, z) + 1e-9 * std::max(1.0, xz);

      Point v(d.dim);
      for (int j = 0; j < d.dim; ++j) v[j] = Complex(g(rng), g(rng));
      v /= kobayashi_metric(d, {x, v});
      auto quotient = [&](double t) { return kobayashi_distance(d, x, Point(x + t * v)) / t; };
      metric += std::abs((10.0 * quotient(1e-5) - quotient(1e-4)) / 9.0 - 1.0) >= 1e-5;
    }
  }
  for (const std::string& name : catalog_names()) {
    const CatalogEntry e = catalog_get(name);
    for (int k = 0; k < kSamples; ++k) {
      const Point x = oracle::random_point(rng, e.map.domain), y = oracle::random_point(rng, e.map.domain);
      const Point fx = orbitlab::apply(e.map, x), fy = orbitlab::apply(e.map, y);
      if (!contains(e.map.domain, fx) || !contains(e.map.domain, fy)) continue;
      const double before = kobayashi_distance(e.map.domain, x, y);
      schwarz += kobayashi_distance(e.map.domain, fx, fy) > before + 1e-9 * std::max(1.0, before);
    }
  }
  o.detail << "violations: isometry " << isometry << ", cayley " << cayley << ", triangle " << triangle
           << ", schwarz-pick " << schwarz << ", metric " << metric << "; ";
  o.require(isometry == 0 && cayley == 0, "isometries");
  o.require(triangle == 0, "triangle inequality");
  o.require(schwarz == 0, "Schwarz-Pick");
  o.require(metric == 0, "metric consistency");
}

// 9. Tangent boundedness at (i, 0).
void tangent_test(Outcome& o) {
  const MapDef f = catalog_get("siegel_shear").map;
  const BoundednessVerdict h = tangent_bounded(f, {pt({kI, 0.0}), pt({1.0, 0.0})}, 40);
  const BoundednessVerdict v = tangent_bounded(f, {pt({kI, 0.0}), pt({0.0, 1.0})}, 40);
  std::size_t first_above = 0;
  for (std::size_t k = 0; k < v.series.size(); ++k)
    if (v.series[k] > 60.0) {
      first_above = v.indices[k];
      break;
    }
  o.detail << "(1,0) " << to_string(h.verdict) << ", (0,1) " << to_string(v.verdict) << " above cap at n="
           << first_above << "; ";
  o.require(h.verdict == Boundedness::bounded, "horizontal bounded");
  o.require(v.verdict == Boundedness::unbounded, "vertical unbounded");
  o.require(first_above > 0 && first_above <= 40, "cap exceeded by n = 40");
}

// 10. Two classes sharing the Denjoy-Wolff point of the slit-plane translation.
void slit_classes(Outcome& o) {
  const MapDef f = catalog_get("slitplane_translation").map;
  const BoundednessVerdict same = equivalent(f, pt({kI}), pt({2.0 * kI}), 4096);
  const BoundednessVerdict across = equivalent(f, pt({kI}), pt({-kI}), 4096);
  o.detail << "(i, 2i) " << to_string(same.verdict) << ", (i, -i) " << to_string(across.verdict) << "; ";
  o.require(same.verdict == Boundedness::bounded, "same half-plane bounded");
  o.require(across.verdict == Boundedness::unbounded, "opposite half-planes unbounded");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "shear backward steps and class rate", 1.0, shear_rates},
      {2, "stable-set dichotomy on a 15x15 grid", 10.0, stable_dichotomy},
      {3, "partition of three slices, invariant under f", 10.0, partition_correctness},
      {4, "pre-model verification for r in {0, 1, -2}", 0.0, premodel_family},
      {5, "rate identities", 0.0, rate_identities},
      {6, "closed-form sigma_m oracle", 0.0, closed_formula},
      {7, "type trichotomy", 0.0, trichotomy},
      {8, "geometry property suite", 0.0, geometry_properties},
      {9, "tangent boundedness", 0.0, tangent_test},
      {10, "two classes at one Denjoy-Wolff point", 5.0, slit_classes},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.check(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0) o.require(seconds < c.budget_seconds, "runtime budget");
    failures += !o.pass;
    std::printf("AC%-2d %s  %s  (%.3f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title.c_str(), seconds,
                o.detail.str().c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
