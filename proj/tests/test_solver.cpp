#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "linkc/compiler.hpp"
#include "linkc/gadgets.hpp"
#include "linkc/solver.hpp"
#include "support.hpp"

using namespace linkc;

namespace {

std::vector<PlanePoint> one(PlanePoint z) { return {z}; }

Linkage arm() {
  Linkage l;
  l.add_vertex("o", PlanePoint{0.0, 0.0});
  l.add_vertex("p");
  l.add_vertex("q");
  l.add_edge("o", "p", 2.0);
  l.add_edge("p", "q", 1.0);
  return l;
}

}  // namespace

TEST(Enumerate, TwoBarHasTwoDistinctConfigurations) {
  const auto g = two_bar(2.0, 1.0, 0.0, false);
  const auto report = enumerate_configs(g, one({2.1, 0.2}));
  ASSERT_EQ(report.size(), 2u);
  EXPECT_EQ(report.degree, 2.0);
  EXPECT_GT(report.separation, 0.1);
  EXPECT_NE(report.branch_labels[0], report.branch_labels[1]);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LE(report.residuals[i], 1e-12);
}

TEST(Enumerate, OutsideDomainThrows) {
  const auto g = two_bar(2.0, 1.0, 0.0, false);
  EXPECT_THROW(enumerate_configs(g, one(5.0)), DomainError);
}

TEST(Enumerate, ListingCapKeepsDegree) {
  const auto g = inversion_gadget(3.0, 3.0, 1.0, false);
  const auto report = enumerate_configs(g, one(3.2), kDefaultTolerance, 2);
  EXPECT_EQ(report.size(), 2u);
  EXPECT_EQ(report.degree, 4.0);
}

TEST(Newton, ExactSeedIsReturnedUnchanged) {
  const Configuration phi{{"o", 0.0}, {"p", 2.0}, {"q", 3.0}};
  const auto res = newton_solve(arm(), phi);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.iterations, 0);
  EXPECT_EQ(res.configuration, phi);
}

TEST(Newton, ConvergesToNearbyConfiguration) {
  const Configuration exact{{"o", 0.0}, {"p", std::polar(2.0, 0.5)}, {"q", std::polar(2.0, 0.5) + std::polar(1.0, 1.2)}};
  Configuration seed = exact;
  seed["p"] += PlanePoint{1e-3, -2e-3};
  seed["q"] += PlanePoint{-1e-3, 1e-3};
  const auto res = newton_solve(arm(), seed, 1e-12);
  ASSERT_TRUE(res.converged);
  EXPECT_LE(res.residual, 1e-12);
  EXPECT_LE(std::abs(res.configuration.at("p") - exact.at("p")), 1e-2);
  EXPECT_EQ(res.configuration.at("o"), PlanePoint(0.0, 0.0));
}

TEST(Newton, HeldVerticesStay) {
  Configuration seed{{"o", 0.0}, {"p", PlanePoint{0.5, 1.5}}, {"q", PlanePoint{0.0, 2.5}}};
  const std::vector<VertexId> held{"q"};
  const auto res = newton_solve(arm(), seed, 1e-12, 200, held);
  ASSERT_TRUE(res.converged);
  EXPECT_EQ(res.configuration.at("q"), PlanePoint(0.0, 2.5));
}

TEST(Newton, SlackCablesAreIgnoredAndTightOnesPulled) {
  Linkage l;
  l.add_vertex("o", PlanePoint{0.0, 0.0});
  l.add_vertex("p");
  l.add_edge("o", "p", 1.0, EdgeKind::kCable);
  const Configuration slack{{"o", 0.0}, {"p", 0.5}};
  EXPECT_EQ(newton_solve(l, slack).iterations, 0);
  const auto res = newton_solve(l, {{"o", 0.0}, {"p", 3.0}});
  ASSERT_TRUE(res.converged);
  EXPECT_LE(std::abs(res.configuration.at("p")), 1.0 + 1e-9);
}

TEST(Newton, ReportsInfeasibility) {
  Linkage l = arm();
  l.set_anchor("q", PlanePoint{5.0, 0.0});
  const auto res = newton_solve(l, {{"o", 0.0}, {"p", 2.0}, {"q", 5.0}});
  EXPECT_FALSE(res.converged);
  // The gap of 2 is shared among at most three constraints.
  EXPECT_GT(res.residual, 0.6);
}

TEST(RandomSeeds, SolvesAndIsReproducible) {
  const SolverConfig cfg{50, 99};
  const auto a = solve_from_random_seeds(arm(), cfg);
  const auto b = solve_from_random_seeds(arm(), cfg);
  ASSERT_TRUE(a.converged);
  EXPECT_EQ(a.configuration, b.configuration);
}

TEST(RandomSeeds, EnvironmentOverride) {
  ::setenv("LINKAGE_SEED", "77", 1);
  EXPECT_EQ(seed_from_env(5), 77u);
  ::setenv("LINKAGE_SEED", "x7", 1);
  EXPECT_EQ(seed_from_env(5), 5u);
  ::unsetenv("LINKAGE_SEED");
  EXPECT_EQ(seed_from_env(5), 5u);
}

TEST(Degree, TwoBarAnnulus) {
  const auto g = two_bar(2.0, 1.0, 0.0, false);
  const std::vector<PlanePoint> pts{0.5, 1.5, PlanePoint{0.0, 2.5}, 3.0, 3.5};
  const auto map = degree_map(g, pts);
  ASSERT_EQ(map.size(), pts.size());
  EXPECT_EQ(map[0].degree, 0.0);
  EXPECT_EQ(map[1].degree, 2.0);
  EXPECT_EQ(map[2].degree, 2.0);
  EXPECT_EQ(map[3].degree, 1.0);
  EXPECT_EQ(map[4].degree, 0.0);
}

TEST(Degree, ClassicalCountsAreEven) {
  const auto g = inversion_gadget(3.0, 3.0, 1.5, false);
  for (const auto& s : degree_map(g, radial_grid(3.0, 1.4, 4, 12))) {
    EXPECT_EQ(std::fmod(s.degree, 2.0), 0.0) << s.point;
  }
}

TEST(Grids, Shapes) {
  const auto rect = rect_grid({0.0, 0.0}, {1.0, 2.0}, 3, 5);
  ASSERT_EQ(rect.size(), 15u);
  EXPECT_EQ(rect.front(), PlanePoint(0.0, 0.0));
  EXPECT_EQ(rect.back(), PlanePoint(1.0, 2.0));
  const auto radial = radial_grid({1.0, 1.0}, 2.0, 4, 8);
  ASSERT_EQ(radial.size(), 32u);
  for (const auto& p : radial) {
    EXPECT_GT(std::abs(p - PlanePoint(1.0, 1.0)), 0.0);
    EXPECT_LE(std::abs(p - PlanePoint(1.0, 1.0)), 2.0 + 1e-12);
  }
  EXPECT_THROW(rect_grid(0.0, 1.0, 0, 1), LinkageError);
}

TEST(Hausdorff, PolylineDistances) {
  const std::vector<PlanePoint> seg{0.0, 2.0};
  const std::vector<PlanePoint> mid{1.0};
  EXPECT_DOUBLE_EQ(hausdorff_polyline(mid, seg), 1.0);
  const std::vector<PlanePoint> dense{0.0, 0.5, 1.0, 1.5, 2.0};
  EXPECT_DOUBLE_EQ(hausdorff_polyline(dense, seg), 0.0);
  const std::vector<PlanePoint> lifted{PlanePoint{0.0, 0.25}, PlanePoint{2.0, 0.25}};
  EXPECT_DOUBLE_EQ(hausdorff_polyline(lifted, seg), 0.25);
  EXPECT_DOUBLE_EQ(hausdorff_polyline(seg, lifted), hausdorff_polyline(lifted, seg));
}

TEST(Trace, ParabolaIsContinuous) {
  const auto tr = curve_tracer(parse_poly("z1 + i*z1*(1-z1)", 1), 0.0, 1.0, Mode::kCabled);
  const auto trace = trace_curve(tr, 120);
  ASSERT_EQ(trace.samples.size(), 120u);
  EXPECT_TRUE(trace.gaps.empty());
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const auto& s = trace.samples[k];
    const double t = s.param;
    EXPECT_NEAR(std::abs(s.output - PlanePoint(t, t * (1.0 - t))), 0.0, 1e-9);
    if (k > 0) EXPECT_LT(std::abs(s.output - trace.samples[k - 1].output), 0.05);
  }
  EXPECT_THROW(trace_curve(tr, 1), LinkageError);
}

TEST(Square, PlainSquareRealizesAllComponents) {
  const auto probe = probe_square_degeneracy(1.0, 10);
  ASSERT_EQ(probe.components.size(), 3u);
  for (const auto& c : probe.components) EXPECT_LE(c.plain_residual, 1e-12) << c.name;
  EXPECT_TRUE(probe.components[0].rigid_accepts);
}

TEST(Square, RigidifiedRejectsDegeneratePosesAwayFromTheGenericCircle) {
  // Poses within 0.5 rad of the point where the degenerate circles touch.
  const auto probe = probe_square_degeneracy(1.0, 20, 12345, false, 0.5);
  EXPECT_FALSE(probe.components[1].rigid_accepts);
  EXPECT_FALSE(probe.components[2].rigid_accepts);
  EXPECT_GT(probe.components[1].rigid_floor, 0.1);
  EXPECT_GT(probe.components[2].rigid_floor, 0.1);
}

TEST(Square, DegenerateCirclesMeetTheGenericOne) {
  // u = -side puts the generic rhombus C = A + u, D = B + u at D = A, C = -side,
  // which is also a pose of the "D on A" circle. The brace cannot exclude it.
  const Linkage rigid = rigidified_square(1.0);
  Configuration phi{{"A", 0.0}, {"B", 1.0}, {"C", -1.0}, {"D", 0.0}, {"sq.m01", -0.5}, {"sq.m23", 0.5}};
  EXPECT_LE(residual(rigid, phi), 1e-15);
}
