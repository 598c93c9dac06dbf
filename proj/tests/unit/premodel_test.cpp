#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "orbitlab/catalog.hpp"
#include "orbitlab/errors.hpp"
#include "orbitlab/premodel.hpp"

namespace {

using namespace orbitlab;

constexpr Complex kI{0.0, 1.0};

Point pt(std::initializer_list<Complex> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index j = 0;
  for (Complex x : xs) p[j++] = x;
  return p;
}

TEST(NormalForm, HalfPlaneDivision) {
  const MapDef tau = normal_form_tau({1, 2.0, {}});
  EXPECT_EQ(tau.domain, Domain::siegel(1));
  EXPECT_LT(std::abs(orbitlab::apply(tau, pt({kI}))[0] - 0.5 * kI), 1e-15);
}

TEST(NormalForm, RotatesVerticalCoordinate) {
  const MapDef tau = normal_form_tau({2, 4.0, {kI}});
  const Point y = orbitlab::apply(tau, pt({Complex(1.0, 4.0), Complex(0.5, 1.0)}));
  EXPECT_LT((y - pt({Complex(0.25, 1.0), kI * Complex(0.5, 1.0) / 2.0})).norm(), 1e-15);
}

TEST(NormalForm, PreservesMembership) {
  std::mt19937_64 rng(3);
  const MapDef tau = normal_form_tau({3, 4.0, {kI, std::polar(1.0, 0.4)}});
  for (int k = 0; k < 100; ++k) {
    const Point p = oracle::random_siegel_point(rng, 3);
    EXPECT_TRUE(contains(tau.domain, orbitlab::apply(tau, p)));
  }
}

TEST(NormalForm, MuAtMostOneThrows) {
  EXPECT_THROW(normal_form_tau({1, 1.0, {}}), std::invalid_argument);
  EXPECT_THROW(normal_form_tau({2, 2.0, {}}), std::invalid_argument);
  EXPECT_THROW(normal_form_tau({2, 2.0, {2.0}}), std::invalid_argument);
}

TEST(NormalForm, InverseRoundTrip) {
  std::mt19937_64 rng(11);
  const MapDef tau = normal_form_tau({3, 3.0, {std::polar(1.0, 1.3), -1.0}});
  for (int k = 0; k < 200; ++k) {
    const Point p = oracle::random_siegel_point(rng, 3);
    const Point back = apply_inverse(tau, orbitlab::apply(tau, p));
    EXPECT_LE((back - p).norm(), 1e-12 * std::max(1.0, p.norm()));
  }
}

TEST(NormalForm, StepIdentityOnItself) {
  // On tau itself sigma_m is computed from the backward orbit and must equal
  // k(z, tau^m z) for the normal form.
  const MapDef tau = normal_form_tau({2, 3.0, {kI}});
  const Point z = pt({Complex(0.3, 2.0), Complex(0.2, 0.1)});
  for (int m = 1; m <= 6; ++m) {
    Point zm = z;
    for (int j = 0; j < m; ++j) zm = orbitlab::apply(tau, zm);
    const double direct = kobayashi_distance(tau.domain, z, zm);
    EXPECT_NEAR(backward_step(tau, z, m, 8).limit, direct, 1e-9) << m;
  }
}

TEST(NormalForm, DivergenceRateIsLogMu) {
  for (double mu : {2.0, 3.0, 10.0}) {
    const MapDef tau = normal_form_tau({2, mu, {1.0}});
    EXPECT_NEAR(divergence_rate(tau, pt({kI, 0.0}), 40), std::log(mu), 1e-9) << mu;
  }
}

TEST(SigmaClosedForm, RadialLambdaTwo) {
  EXPECT_NEAR(sigma_closed_form(0.0, 2.0, 1), std::log(2.0), 1e-15);
  EXPECT_NEAR(sigma_closed_form(0.0, 2.0, 3), 3.0 * std::log(2.0), 1e-14);
}

TEST(SigmaClosedForm, QuarterTurn) {
  EXPECT_NEAR(sigma_closed_form(std::numbers::pi / 4.0, 2.0, 1),
              std::log((std::sqrt(5.0) + 1.0) / (std::sqrt(5.0) - 1.0)), 1e-14);
}

TEST(SigmaClosedForm, MatchesNaiveFormula) {
  for (double theta : {-1.2, -0.5, 0.0, 0.3, 1.0, 1.5})
    for (double lambda : {1.5, 2.0, 3.0, 10.0})
      for (int m = 1; m <= 12; ++m) {
        // The naive formula subtracts two numbers of size lambda^m to get
        // about 2 cos^2 theta, which bounds how well it can agree.
        const double cancellation =
            8.0 * std::pow(lambda, m) * std::numeric_limits<long double>::epsilon() / std::pow(std::cos(theta), 2);
        EXPECT_NEAR(sigma_closed_form(theta, lambda, m),
                    static_cast<double>(oracle::sigma_naive(theta, lambda, m)), 1e-12 + cancellation)
            << theta << " " << lambda << " " << m;
      }
}

TEST(SigmaClosedForm, AsymptoticExpansion) {
  // sigma_m = m log lambda - 2 log cos theta + O(lambda^-m).
  for (double lambda : {2.0, 3.0, 10.0})
    for (double theta : {0.0, 1.0, -1.0}) {
      const double offset = -2.0 * std::log(std::cos(theta));
      EXPECT_NEAR(sigma_closed_form(theta, lambda, 40) - 40.0 * std::log(lambda), offset, 1e-9);
    }
}

TEST(SigmaClosedForm, RadialRateAtFortySteps) {
  for (double lambda : {2.0, 3.0, 10.0})
    EXPECT_LT(std::abs(sigma_closed_form(0.0, lambda, 40) / 40.0 - std::log(lambda)), 1e-3);
}

TEST(SigmaClosedForm, RateGapDecaysLikeOneOverM) {
  const double theta = 1.0, lambda = 2.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int m : {10, 40, 160, 640, 2560}) {
    const double gap = std::abs(sigma_closed_form(theta, lambda, m) / m - std::log(lambda));
    EXPECT_LT(gap, previous);
    previous = gap;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(SigmaClosedForm, NoOverflowForHugeM) {
  const double v = sigma_closed_form(0.5, 10.0, 2000);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v / 2000.0, std::log(10.0), 1e-3);
}

TEST(SigmaClosedForm, RejectsOutOfRange) {
  EXPECT_THROW(sigma_closed_form(std::numbers::pi / 2.0, 2.0, 1), std::invalid_argument);
  EXPECT_THROW(sigma_closed_form(0.0, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(sigma_closed_form(0.0, 2.0, 0), std::invalid_argument);
}

TEST(ExamplePremodel, TrivialSlice) {
  const PreModel pm = siegel_example_premodel(0.0);
  const Point g = orbitlab::apply(pm.g, pt({Complex(0.5, 2.0)}));
  EXPECT_EQ(g, pt({Complex(0.5, 2.0), 0.0}));
}

TEST(ExamplePremodel, UnitSlice) {
  const PreModel pm = siegel_example_premodel(1.0);
  const Point gi = orbitlab::apply(pm.g, pt({kI}));
  EXPECT_LT((gi - pt({2.0 * kI, kI})).norm(), 1e-15);
  const MapDef f = catalog_get("siegel_shear").map;
  const Point fgi = orbitlab::apply(f, gi);
  EXPECT_LT((fgi - pt({3.0 * kI, kI})).norm(), 1e-15);
  EXPECT_LT((fgi - orbitlab::apply(pm.g, pt({2.0 * kI}))).norm(), 1e-15);
}

TEST(ExamplePremodel, EmbeddingLandsInDomain) {
  std::mt19937_64 rng(23);
  for (double r : {-2.0, -0.7, 0.0, 0.4, 1.0, 3.0}) {
    const PreModel pm = siegel_example_premodel(r);
    for (int k = 0; k < 50; ++k) {
      const Point z = oracle::random_siegel_point(rng, 1);
      EXPECT_TRUE(contains(pm.g.target, orbitlab::apply(pm.g, z))) << r;
    }
  }
}

TEST(ExamplePremodel, MatchesConjugationOracle) {
  // g(zeta) = h_r^{-1}(zeta, 0).
  for (double r : {-2.0, 0.5, 1.0}) {
    const PreModel pm = siegel_example_premodel(r);
    const Point zeta = pt({Complex(0.3, 1.7)});
    const Point expected = oracle::h_inverse(r, pt({zeta[0], 0.0}));
    EXPECT_LT((orbitlab::apply(pm.g, zeta) - expected).norm(), 1e-14);
  }
}

TEST(VerifyPremodel, ExampleFamilyPasses) {
  const MapDef f = catalog_get("siegel_shear").map;
  for (double r : {0.0, 1.0, -2.0}) {
    const PreModelReport rep = verify_premodel(f, siegel_example_premodel(r), default_premodel_probes(), 20);
    EXPECT_TRUE(rep.passed) << r;
    EXPECT_LT(rep.intertwining, 1e-12);
    EXPECT_LT(rep.max_step_residual, 1e-6);
    EXPECT_EQ(rep.collisions, 0);
    EXPECT_EQ(rep.step_residual.size(), default_premodel_probes().size());
  }
}

TEST(VerifyPremodel, ThreeProbes) {
  const std::vector<Point> probes{pt({kI}), pt({2.0 * kI}), pt({Complex(1.0, 2.0)})};
  const PreModelReport rep =
      verify_premodel(catalog_get("siegel_shear").map, siegel_example_premodel(0.0), probes, 20);
  EXPECT_TRUE(rep.passed);
}

TEST(VerifyPremodel, WrongAutomorphismFails) {
  PreModel pm = siegel_example_premodel(0.0);
  pm.tau = parse_map("siegel 1 : (3*z1) inverse (z1/3)");
  const std::vector<Point> probes{pt({kI})};
  const PreModelReport rep = verify_premodel(catalog_get("siegel_shear").map, pm, probes, 5);
  EXPECT_FALSE(rep.passed);
  EXPECT_NEAR(rep.intertwining, 1.0, 1e-12);
}

TEST(VerifyPremodel, CollisionsAreCounted) {
  PreModel pm = siegel_example_premodel(0.0);
  pm.g = parse_embedding("siegel 1 -> siegel 2 : (i, 0)");
  const std::vector<Point> probes{pt({kI}), pt({2.0 * kI})};
  const PreModelReport rep = verify_premodel(catalog_get("siegel_shear").map, pm, probes, 2);
  EXPECT_EQ(rep.collisions, 1);
  EXPECT_FALSE(rep.passed);
}

TEST(VerifyPremodel, ProbeOutsideThrows) {
  const std::vector<Point> probes{pt({-kI})};
  EXPECT_THROW(verify_premodel(catalog_get("siegel_shear").map, siegel_example_premodel(0.0), probes, 2),
               DomainError);
}

TEST(DefaultProbes, LogSpacedOnImaginaryAxis) {
  const std::vector<Point> probes = default_premodel_probes();
  ASSERT_EQ(probes.size(), 9u);
  EXPECT_NEAR(probes.front()[0].imag(), 0.25, 1e-15);
  EXPECT_NEAR(probes.back()[0].imag(), 4.0, 1e-15);
  for (std::size_t k = 1; k < probes.size(); ++k)
    EXPECT_NEAR(probes[k][0].imag() / probes[k - 1][0].imag(), std::sqrt(2.0), 1e-14);
}

}  // namespace
