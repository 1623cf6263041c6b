#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "linkc/linkage.hpp"
#include "linkc/solver.hpp"

using namespace linkc;

namespace {

Linkage one_edge(double length, EdgeKind kind = EdgeKind::kRigid) {
  Linkage l;
  l.add_vertex("a", PlanePoint{0.0, 0.0});
  l.add_vertex("b");
  l.add_edge("a", "b", length, kind);
  return l;
}

}  // namespace

TEST(Residual, RigidAndCableEdges) {
  EXPECT_EQ(residual(one_edge(1.0), {{"a", 0.0}, {"b", 1.0}}), 0.0);
  EXPECT_EQ(residual(one_edge(1.0, EdgeKind::kCable), {{"a", 0.0}, {"b", 0.5}}), 0.0);
  EXPECT_DOUBLE_EQ(residual(one_edge(1.0), {{"a", 0.0}, {"b", 1.25}}), 0.25);
  EXPECT_DOUBLE_EQ(residual(one_edge(1.0), {{"a", 0.0}, {"b", 0.5}}), 0.5);
  EXPECT_DOUBLE_EQ(residual(one_edge(1.0, EdgeKind::kCable), {{"a", 0.0}, {"b", 1.5}}), 0.5);
}

TEST(Residual, AnchorDeviation) {
  EXPECT_DOUBLE_EQ(residual(one_edge(1.0), {{"a", PlanePoint{0.0, 0.3}}, {"b", PlanePoint{0.0, 1.3}}}), 0.3);
}

TEST(Residual, MalformedConfiguration) {
  EXPECT_THROW(residual(one_edge(1.0), {{"a", 0.0}}), MalformedConfiguration);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(residual(one_edge(1.0), {{"a", 0.0}, {"b", PlanePoint{nan, 0.0}}}), MalformedConfiguration);
}

TEST(LinkageModel, RejectsBadEdges) {
  Linkage l;
  l.add_vertex("a");
  l.add_vertex("b");
  EXPECT_THROW(l.add_edge("a", "a", 1.0), LinkageError);
  EXPECT_THROW(l.add_edge("a", "b", 0.0), LinkageError);
  EXPECT_THROW(l.add_edge("a", "b", -1.0), LinkageError);
  EXPECT_THROW(l.add_edge("a", "c", 1.0), LinkageError);
  l.add_edge("a", "b", 1.0);
  EXPECT_NO_THROW(l.add_edge("b", "a", 1.0));
  EXPECT_EQ(l.edge_count(), 1u);
  EXPECT_THROW(l.add_edge("a", "b", 2.0), IncompatibleLinkages);
  EXPECT_THROW(l.add_edge("a", "b", 1.0, EdgeKind::kCable), IncompatibleLinkages);
}

TEST(Union, IdempotentAndConflicting) {
  const Linkage l = one_edge(1.0);
  EXPECT_EQ(linkage_union(l, l), l);
  EXPECT_THROW(linkage_union(l, one_edge(2.0)), IncompatibleLinkages);
  Linkage moved;
  moved.add_vertex("a", PlanePoint{1.0, 0.0});
  EXPECT_THROW(linkage_union(l, moved), IncompatibleLinkages);
}

TEST(Union, DisjointIsProduct) {
  Linkage other;
  other.add_vertex("c", PlanePoint{5.0, 0.0});
  other.add_vertex("d");
  other.add_edge("c", "d", 2.0);
  const Linkage u = linkage_union(one_edge(1.0), other);
  EXPECT_EQ(u.vertex_count(), 4u);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  for (int k = 0; k < 50; ++k) {
    const Configuration phi{{"a", 0.0}, {"b", std::polar(1.0, angle(rng))}, {"c", 5.0}, {"d", 5.0 + std::polar(2.0, angle(rng))}};
    EXPECT_LE(residual(u, phi), 1e-15);
  }
}

TEST(Union, SharedElbowAgreesOnOverlap) {
  // Two arms of lengths 1 from 0 and 1 from 1.5 sharing the elbow: the elbow
  // must sit on both circles.
  Linkage left, right;
  left.add_vertex("p", PlanePoint{0.0, 0.0});
  left.add_vertex("e");
  left.add_edge("p", "e", 1.0);
  right.add_vertex("q", PlanePoint{1.5, 0.0});
  right.add_vertex("e");
  right.add_edge("q", "e", 1.0);
  const Linkage u = linkage_union(left, right);
  const auto solved = solve_from_random_seeds(u);
  ASSERT_TRUE(solved.converged);
  const PlanePoint e = solved.configuration.at("e");
  EXPECT_NEAR(e.real(), 0.75, 1e-8);
  EXPECT_NEAR(std::abs(e.imag()), std::sqrt(1.0 - 0.75 * 0.75), 1e-8);
  EXPECT_LE(residual(left, restrict_to(solved.configuration, left)), 1e-9);
  EXPECT_LE(residual(right, restrict_to(solved.configuration, right)), 1e-9);
}

TEST(FixVertices, FiberOverAnchors) {
  const Linkage ok = fix_vertices(one_edge(1.0), {{"b", PlanePoint{0.0, 1.0}}});
  EXPECT_EQ(ok.fixed_count(), 2u);
  EXPECT_EQ(residual(ok, {{"a", 0.0}, {"b", PlanePoint{0.0, 1.0}}}), 0.0);
  const Linkage empty = fix_vertices(one_edge(1.0), {{"b", PlanePoint{2.0, 0.0}}});
  EXPECT_FALSE(solve_from_random_seeds(empty, SolverConfig{20, 1}).converged);
  EXPECT_THROW(fix_vertices(one_edge(1.0), {{"a", 1.0}}), LinkageError);
  EXPECT_THROW(fix_vertices(one_edge(1.0), {{"zz", 1.0}}), LinkageError);
}

TEST(Tether, AddsFixedCable) {
  VertexId t;
  const Linkage l = tether(one_edge(1.0), "b", PlanePoint{1.0, 0.0}, 0.5, &t);
  ASSERT_TRUE(l.has_vertex(t));
  EXPECT_EQ(l.anchor(t), PlanePoint(1.0, 0.0));
  const Edge* e = l.find_edge(t, "b");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->kind, EdgeKind::kCable);
  EXPECT_THROW(tether(one_edge(1.0), "a", 0.0, 1.0), LinkageError);
}

TEST(Tether, ProjectsOntoDiscIntersection) {
  // b on the unit circle; tether to 1 with cable 0.5 keeps only the arc
  // within 0.5 of 1.
  VertexId t;
  const Linkage l = tether(one_edge(1.0), "b", PlanePoint{1.0, 0.0}, 0.5, &t);
  for (int k = 0; k < 360; ++k) {
    const PlanePoint b = std::polar(1.0, 6.283185307179586 * k / 360.0);
    const bool inside = std::abs(b - 1.0) <= 0.5;
    const double r = residual(l, {{"a", 0.0}, {"b", b}, {t, 1.0}});
    EXPECT_EQ(r <= 1e-12, inside) << k;
  }
}

TEST(Identify, IsolatedAndForbidden) {
  Linkage iso;
  iso.add_vertex("v");
  iso.add_vertex("w");
  const Linkage merged = identify_vertices(iso, "v", "w");
  EXPECT_EQ(merged.vertex_count(), 1u);
  EXPECT_TRUE(merged.has_vertex("v"));

  EXPECT_THROW(identify_vertices(one_edge(1.0), "a", "b"), QuotientForbidden);

  Linkage mismatch;
  for (const char* id : {"u", "v", "w"}) mismatch.add_vertex(id);
  mismatch.add_edge("v", "u", 1.0);
  mismatch.add_edge("w", "u", 2.0);
  EXPECT_THROW(identify_vertices(mismatch, "v", "w"), QuotientForbidden);
}

TEST(Identify, MovesEdgesToSurvivor) {
  Linkage l;
  for (const char* id : {"u", "v", "w", "x"}) l.add_vertex(id);
  l.add_edge("v", "u", 1.0);
  l.add_edge("w", "u", 1.0);
  l.add_edge("w", "x", 3.0);
  const Linkage q = identify_vertices(l, "v", "w");
  EXPECT_FALSE(q.has_vertex("w"));
  EXPECT_EQ(q.edge_count(), 2u);
  ASSERT_NE(q.find_edge("v", "x"), nullptr);
  EXPECT_EQ(q.find_edge("v", "x")->length, 3.0);
}

TEST(Affine, RescaleAndTranslate) {
  const Linkage l = one_edge(2.0);
  EXPECT_EQ(rescale(l, 1.0), l);
  const Linkage big = rescale(l, 3.0);
  EXPECT_EQ(big.find_edge("a", "b")->length, 6.0);
  EXPECT_THROW(rescale(l, 0.0), LinkageError);
  EXPECT_THROW(rescale(l, -1.0), LinkageError);
  const Linkage moved = translate(fix_vertices(l, {{"b", PlanePoint{2.0, 0.0}}}), PlanePoint{1.0, 1.0});
  EXPECT_EQ(moved.anchor("a"), PlanePoint(1.0, 1.0));
  EXPECT_EQ(moved.anchor("b"), PlanePoint(3.0, 1.0));
}

TEST(Affine, MembershipIsEquivariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586), scale(0.1, 10.0);
  const Linkage l = one_edge(2.0);
  for (int k = 0; k < 100; ++k) {
    const Configuration phi{{"a", 0.0}, {"b", std::polar(2.0, angle(rng))}};
    const double n = scale(rng);
    const PlanePoint z{scale(rng), -scale(rng)};
    EXPECT_LE(residual(rescale(l, n), transform(phi, n)), 1e-12 * n);
    EXPECT_LE(residual(translate(l, z), transform(phi, 1.0, z)), 1e-12 * (1.0 + std::abs(z)));
  }
}

TEST(FreeComponents, FixesLowestIdOfEachFreeComponent) {
  Linkage l;
  for (const char* id : {"c", "b", "a"}) l.add_vertex(id);
  auto [fixed, k] = free_component_fix(l);
  EXPECT_EQ(k, 3);
  EXPECT_EQ(fixed.fixed_count(), 3u);

  auto [same, none] = free_component_fix(one_edge(1.0));
  EXPECT_EQ(none, 0);
  EXPECT_EQ(same, one_edge(1.0));

  Linkage chain;
  for (const char* id : {"y", "x", "z"}) chain.add_vertex(id);
  chain.add_edge("x", "y", 1.0);
  auto [two, n] = free_component_fix(chain);
  EXPECT_EQ(n, 2);
  EXPECT_EQ(two.anchor("x"), PlanePoint(0.0, 0.0));
  EXPECT_EQ(two.anchor("z"), PlanePoint(0.0, 0.0));
  EXPECT_FALSE(two.is_fixed("y"));
}

TEST(ThreeFixed, IdentifiesHubVertex) {
  Linkage l;
  l.add_vertex("v", PlanePoint{0.0, 0.0});
  const Linkage r = reduce_to_three_fixed(l);
  EXPECT_EQ(r.fixed_count(), 3u);
  EXPECT_EQ(r.anchor("v"), PlanePoint(0.0, 0.0));
  EXPECT_FALSE(r.has_vertex("hub0"));
}

TEST(ThreeFixed, BracesByDistances) {
  Linkage l;
  l.add_vertex("v", PlanePoint{5.0, 0.0});
  const Linkage r = reduce_to_three_fixed(l);
  EXPECT_EQ(r.fixed_count(), 3u);
  EXPECT_FALSE(r.is_fixed("v"));
  EXPECT_DOUBLE_EQ(r.find_edge("v", "hub0")->length, 5.0);
  EXPECT_DOUBLE_EQ(r.find_edge("v", "hub1")->length, 4.0);
  EXPECT_DOUBLE_EQ(r.find_edge("v", "hubi")->length, std::sqrt(26.0));
  EXPECT_EQ(reduce_to_three_fixed(r).fixed_count(), 3u);
}

TEST(ThreeFixed, BracedVertexIsForced) {
  Linkage l;
  l.add_vertex("v", PlanePoint{2.0, -1.5});
  const Linkage r = reduce_to_three_fixed(l);
  const auto solved = solve_from_random_seeds(r, SolverConfig{50, 3}, 1e-13);
  ASSERT_TRUE(solved.converged);
  EXPECT_NEAR(std::abs(solved.configuration.at("v") - PlanePoint(2.0, -1.5)), 0.0, 1e-9);
}

TEST(Components, SortedByLowestId) {
  Linkage l;
  for (const char* id : {"d", "c", "b", "a"}) l.add_vertex(id);
  l.add_edge("a", "d", 1.0);
  const auto comps = connected_components(l);
  ASSERT_EQ(comps.size(), 3u);
  EXPECT_EQ(comps[0], (std::vector<VertexId>{"a", "d"}));
  EXPECT_EQ(comps[1], (std::vector<VertexId>{"b"}));
}

TEST(Ids, FactorySkipsTaken) {
  Linkage l;
  l.add_vertex("n0");
  IdFactory ids("n");
  const VertexId first = ids.next(l);
  EXPECT_NE(first, "n0");
  l.add_vertex(first);
  EXPECT_NE(ids.next(l), first);
}
