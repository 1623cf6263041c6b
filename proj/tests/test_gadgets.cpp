#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "linkc/gadgets.hpp"
#include "linkc/solver.hpp"
#include "support.hpp"

using namespace linkc;
using linkc::testing::sample_domain;

namespace {

std::vector<PlanePoint> one(PlanePoint z) { return {z}; }

// Every configuration Newton reaches with the inputs pinned must be one of the
// enumerated branches. Seeds are scattered around the input, or around the
// listed branches when `perturb` > 0. Middle joints of straight rods are
// quadratically flat, so positions are compared at sqrt(tol) scale.
void expect_complete(const FunctionalGadget& g, std::span<const PlanePoint> z, int seeds, unsigned rng_seed,
                     double perturb = 0.0) {
  const auto report = enumerate_configs(g, z);
  ASSERT_GT(report.size(), 0u);
  Linkage pinned = g.linkage;
  for (std::size_t i = 0; i < g.inputs.size(); ++i) {
    if (!pinned.is_fixed(g.inputs[i])) pinned.set_anchor(g.inputs[i], z[i]);
  }
  std::mt19937_64 rng(rng_seed);
  double spread = 0.0;
  for (const auto& [id, p] : report.configurations.front()) spread = std::max(spread, std::abs(p - z[0]));
  std::normal_distribution<double> jitter(0.0, perturb > 0.0 ? perturb : spread);
  int converged = 0;
  for (int s = 0; s < seeds; ++s) {
    const auto& base = report.configurations[static_cast<std::size_t>(s) % report.size()];
    Configuration seed;
    for (const auto& [id, anchor] : pinned.vertices()) {
      const PlanePoint centre = perturb > 0.0 ? base.at(id) : z[0];
      seed[id] = anchor ? *anchor : centre + PlanePoint{jitter(rng), jitter(rng)};
    }
    const auto res = newton_solve(pinned, seed, 1e-11, 300);
    if (!res.converged) continue;
    ++converged;
    double best = INFINITY;
    for (const auto& phi : report.configurations) {
      double gap = 0.0;
      for (const auto& [id, p] : phi) gap = std::max(gap, std::abs(p - res.configuration.at(id)));
      best = std::min(best, gap);
    }
    EXPECT_LE(best, 1e-4) << "seed " << s << " reached an unlisted configuration";
  }
  EXPECT_GT(converged, seeds / 10);
}

}  // namespace

TEST(TwoBar, FullyExtendedTip) {
  const auto g = two_bar(2.0, 1.0, 0.0, false);
  const auto e1 = two_bar_elbow(3.0, 0.0, 2.0, 1.0, 1);
  const auto e2 = two_bar_elbow(3.0, 0.0, 2.0, 1.0, -1);
  ASSERT_TRUE(e1 && e2);
  EXPECT_NEAR(std::abs(*e1 - 2.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(*e2 - 2.0), 0.0, 1e-12);
  EXPECT_EQ(branch_table(g, one(3.0)).count(), 1.0);
}

TEST(TwoBar, TwoElbowsInsideAnnulus) {
  const PlanePoint want{7.0 / 4.0, std::sqrt(15.0) / 4.0};
  for (int s : {1, -1}) {
    const auto e = two_bar_elbow(2.0, 0.0, 2.0, 1.0, s);
    ASSERT_TRUE(e);
    EXPECT_NEAR(std::abs(*e), 2.0, 1e-12);
    EXPECT_NEAR(std::abs(2.0 - *e), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(*e - (s > 0 ? want : std::conj(want))), 0.0, 1e-12);
  }
}

TEST(TwoBar, InfeasibleInsideInnerCircle) {
  EXPECT_FALSE(two_bar_elbow(0.5, 0.0, 2.0, 1.0, 1));
  EXPECT_EQ(branch_table(two_bar(2.0, 1.0, 0.0, false), one(0.5)).count(), 0.0);
}

TEST(TwoBar, RejectsLongSecondArm) { EXPECT_THROW(two_bar(1.0, 2.0, 0.0, false), LinkageError); }

TEST(TwoBar, CabledDomainAndStrength) {
  const auto g = two_bar(2.0, 1.0, 0.0, true);
  EXPECT_TRUE(g.strong);
  EXPECT_NEAR(std::abs(g.domain.discs[0].center - PlanePoint(0.0, 2.0)), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(g.domain.discs[0].radius, 0.5);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    EXPECT_EQ(enumerate_configs(g, sample_domain(g.domain, rng, 0.98)).degree, 1.0);
  }
}

TEST(TwoBar, NewtonFindsOnlyListedBranches) {
  const auto g = two_bar(2.0, 1.0, 0.0, false);
  expect_complete(g, one({2.1, 0.3}), 200, 2);
}

TEST(Square, PlainAdmitsDegeneratePose) {
  const Linkage sq = plain_square(1.0);
  const PlanePoint c = std::polar(1.0, 0.7);
  EXPECT_LE(residual(sq, {{"A", 0.0}, {"B", 1.0}, {"D", 0.0}, {"C", c}}), 1e-15);
}

TEST(Square, RigidifiedRejectsDegeneratePose) {
  const Linkage sq = rigidified_square(1.0);
  const PlanePoint c = std::polar(1.0, 0.3);
  const std::vector<VertexId> held{"C", "D"};
  Configuration seed{{"A", 0.0}, {"B", 1.0}, {"C", c}, {"D", 0.0}, {"sq.m01", c / 2.0}, {"sq.m23", 0.5}};
  const auto res = newton_solve(sq, seed, 1e-9, 500, held);
  EXPECT_FALSE(res.converged);
  EXPECT_GT(res.residual, 0.1);
}

TEST(Square, RigidifiedKeepsGenericPose) {
  const Linkage sq = rigidified_square(1.0, true);
  const PlanePoint u = std::polar(1.0, 1.1);
  Configuration seed{{"A", 0.0}, {"B", 1.0}, {"C", u}, {"D", 1.0 + u}};
  for (const auto& [id, anchor] : sq.vertices()) {
    if (!seed.contains(id)) seed[id] = 0.5 + u / 2.0;
  }
  const std::vector<VertexId> held{"C", "D"};
  const auto res = newton_solve(sq, seed, 1e-10, 500, held);
  EXPECT_TRUE(res.converged);
}

TEST(Square, TrussLengths) {
  auto [c, e] = truss_lengths(0.5, 1.0, 0.25);
  EXPECT_DOUBLE_EQ(c * c, 0.25 + 0.0625);
  EXPECT_DOUBLE_EQ(e * e, 0.0625 + 0.25);
  auto [c2, e2] = truss_lengths(1.0, 3.0, 2.0);
  EXPECT_DOUBLE_EQ(c2, std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(e2, std::sqrt(8.0));
}

class ModeTest : public ::testing::TestWithParam<bool> {};

TEST_P(ModeTest, TranslationByZeroIsIdentity) {
  const auto g = translation_gadget(0.0, Disc{{}, 1.0}, GetParam());
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const auto z = sample_domain(g.domain, rng);
    for (const auto& phi : enumerate_configs(g, z).configurations) EXPECT_NEAR(std::abs(g.output_of(phi)[0] - z[0]), 0.0, 1e-9);
  }
}

TEST_P(ModeTest, TranslationOfOrigin) {
  const PlanePoint z0{-0.7, 1.2};
  const auto g = translation_gadget(z0, Disc{{}, 1.0}, GetParam());
  const auto report = enumerate_configs(g, one(0.0));
  ASSERT_GT(report.size(), 0u);
  for (const auto& phi : report.configurations) EXPECT_NEAR(std::abs(g.output_of(phi)[0] - z0), 0.0, 1e-9);
}

TEST_P(ModeTest, ScalarAtOriginAndNegation) {
  const auto two = scalar_mult_gadget(2.0, Disc{{}, 1.0}, GetParam());
  for (const auto& phi : enumerate_configs(two, one(0.0)).configurations) {
    EXPECT_NEAR(std::abs(two.output_of(phi)[0]), 0.0, 1e-9);
  }
  const auto neg = scalar_mult_gadget(-1.0, Disc{{}, 1.0}, GetParam());
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const auto z = sample_domain(neg.domain, rng);
    for (const auto& phi : enumerate_configs(neg, z).configurations) {
      EXPECT_NEAR(std::abs(neg.output_of(phi)[0] + z[0]), 0.0, 1e-9);
    }
  }
}

TEST_P(ModeTest, ScalarRejectsTrivialFactors) {
  EXPECT_THROW(scalar_mult_gadget(0.0, Disc{{}, 1.0}, GetParam()), LinkageError);
  EXPECT_THROW(scalar_mult_gadget(1.0, Disc{{}, 1.0}, GetParam()), LinkageError);
}

TEST_P(ModeTest, AverageOfAntisymmetricPair) {
  const auto g = average_gadget(1.0, GetParam());
  const PlanePoint p = g.domain.discs[0].center;
  EXPECT_NEAR(std::abs(g.domain.discs[1].center + p), 0.0, 1e-12);
  EXPECT_NEAR(g.domain.discs[0].radius, 1.0, 1e-12);
  const std::vector<PlanePoint> z{p, -p};
  const auto report = enumerate_configs(g, z);
  ASSERT_GT(report.size(), 0u);
  for (const auto& phi : report.configurations) {
    EXPECT_NEAR(std::abs(g.output_of(phi)[0]), 0.0, 1e-9);
    const PlanePoint apex = phi.at("D");
    EXPECT_NEAR(std::abs(apex - z[0]), std::abs(apex - z[1]), 1e-9);
  }
  EXPECT_EQ(report.degree, GetParam() ? 1.0 : 2.0);
}

TEST_P(ModeTest, InversionFixesDomainCentre) {
  const PlanePoint z0 = std::polar(3.0, 0.7);
  const auto g = inversion_gadget(3.0, z0, 1.0, GetParam());
  const auto report = enumerate_configs(g, one(z0));
  ASSERT_GT(report.size(), 0u);
  for (const auto& phi : report.configurations) EXPECT_NEAR(std::abs(g.output_of(phi)[0] - z0), 0.0, 1e-9);
}

TEST_P(ModeTest, InversionRejectsWideDomain) {
  EXPECT_THROW(inversion_gadget(3.0, 3.0, 1.6, GetParam()), LinkageError);
  EXPECT_THROW(inversion_gadget(3.0, 2.0, 1.0, GetParam()), LinkageError);
}

TEST_P(ModeTest, ConjugationAtDomainCentreAndOnReals) {
  const double r = 1.0;
  const auto g = conjugation_gadget(r, GetParam());
  const PlanePoint centre{0.0, 8.0 * r};
  const auto report = enumerate_configs(g, one(centre));
  ASSERT_GT(report.size(), 0u);
  for (const auto& phi : report.configurations) {
    EXPECT_NEAR(std::abs(g.output_of(phi)[0] - std::conj(centre)), 0.0, 1e-9);
  }
  EXPECT_NEAR(std::abs(report.configurations[0].at("L1.E") - 6.0 * r), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(report.configurations[0].at("L2.E") + 6.0 * r), 0.0, 1e-9);
}

TEST_P(ModeTest, WitnessIsSoundEverywhere) {
  std::mt19937_64 rng(5);
  const std::vector<FunctionalGadget> gadgets = {
      two_bar(2.0, 1.0, {0.5, -0.5}, GetParam()), translation_gadget({1.0, 1.0}, Disc{{}, 0.5}, GetParam()),
      scalar_mult_gadget(-2.5, Disc{{1.0, 0.0}, 0.5}, GetParam()), average_gadget(0.5, GetParam()),
      inversion_gadget(2.0, {0.0, 2.0}, 1.0, GetParam()), conjugation_gadget(0.5, GetParam())};
  for (const auto& g : gadgets) {
    for (int k = 0; k < 100; ++k) {
      const auto z = sample_domain(g.domain, rng);
      const auto report = enumerate_configs(g, z);
      for (std::size_t i = 0; i < report.size(); ++i) EXPECT_LE(report.residuals[i], 1e-9) << g.name;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Modes, ModeTest, ::testing::Values(false, true),
                         [](const auto& info) { return info.param ? "cabled" : "classical"; });

TEST(Inversion, ClassicalFourfoldCover) {
  const auto g = inversion_gadget(3.0, 3.0, 1.0, false);
  std::mt19937_64 rng(6);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(enumerate_configs(g, sample_domain(g.domain, rng, 0.95)).degree, 4.0);
}

TEST(Inversion, ConservedQuantities) {
  InversionOptions opts;
  opts.a = 5.0;
  opts.b = 4.0;
  opts.c = 2.0;
  const auto g = inversion_gadget(3.0, 3.0, 1.0, false, opts);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    for (const auto& phi : enumerate_configs(g, sample_domain(g.domain, rng)).configurations) {
      EXPECT_NEAR(std::abs(phi.at("D")) * std::abs(phi.at("E")), 9.0, 1e-9);
      EXPECT_NEAR(std::abs(phi.at("F")), std::sqrt(13.0), 1e-9);
    }
  }
}

TEST(Inversion, NewtonFindsOnlyListedBranches) {
  const auto g = inversion_gadget(3.0, 3.0, 1.0, false);
  expect_complete(g, one({3.3, 0.4}), 200, 8);
}

TEST(Conjugation, NewtonFindsOnlyListedBranches) {
  const auto g = conjugation_gadget(1.0, false);
  expect_complete(g, one({0.3, 8.2}), 40, 9, 0.3);
}

TEST(Conjugation, ClassicalDegreeIsEven) {
  const auto g = conjugation_gadget(1.0, false);
  std::mt19937_64 rng(10);
  for (int k = 0; k < 30; ++k) {
    const double d = enumerate_configs(g, sample_domain(g.domain, rng, 0.95)).degree;
    EXPECT_GE(d, 2.0);
    EXPECT_EQ(std::fmod(d, 2.0), 0.0);
  }
}

TEST(StraightLine, CabledSegmentEnds) {
  const auto line = straight_line_gadget(0.0, std::sqrt(3.0), true);
  EXPECT_NEAR(line.lo, -2.0, 1e-12);
  EXPECT_NEAR(line.hi, 2.0, 1e-12);
  for (double x : {-2.0, -1.0, 0.0, 1.5, 2.0}) {
    bool any = false;
    for (int mask = 0; mask < (1 << line.sign_count) && !any; ++mask) {
      std::vector<int> s(static_cast<std::size_t>(line.sign_count));
      for (int b = 0; b < line.sign_count; ++b) s[static_cast<std::size_t>(b)] = (mask >> b) & 1 ? -1 : 1;
      if (auto phi = line.configure(x, s)) {
        any = true;
        EXPECT_NEAR(std::abs(phi->at(line.output) - x), 0.0, 1e-9);
      }
    }
    EXPECT_TRUE(any) << x;
  }
}

TEST(StraightLine, ClassicalEndpoints) {
  const double c = 1.0, d = c;
  const double e = std::sqrt(4.0 * c * c + d * d);
  const auto line = straight_line_gadget(0.5, c, false);
  EXPECT_NEAR(line.hi - 0.5, std::sqrt(2.0 * d * d + 2.0 * d * e), 1e-9);
  EXPECT_NEAR(0.5 - line.lo, std::sqrt(2.0 * d * d + 2.0 * d * e), 1e-9);
}

TEST(Trivial, ConstantAndProjection) {
  const auto k = constant_gadget({1.0, 1.0});
  const auto kr = enumerate_configs(k, std::span<const PlanePoint>{});
  ASSERT_EQ(kr.size(), 1u);
  EXPECT_EQ(k.output_of(kr.configurations[0])[0], PlanePoint(1.0, 1.0));

  const auto p = projection_gadget(3, {0, 2});
  const std::vector<PlanePoint> uvw{1.0, 2.0, 3.0};
  const auto pr = enumerate_configs(p, uvw);
  ASSERT_EQ(pr.size(), 1u);
  EXPECT_EQ(p.output_of(pr.configurations[0]), (std::vector<PlanePoint>{1.0, 3.0}));
  EXPECT_TRUE(p.strong);
  EXPECT_DOUBLE_EQ(p.domain.discs[0].radius, kPlaneSentinelRadius);

  const auto empty = projection_gadget(2, {});
  EXPECT_TRUE(empty.outputs.empty());
  EXPECT_THROW(projection_gadget(2, {2}), LinkageError);
}
