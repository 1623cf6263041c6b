#include "linkc/gadgets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace linkc {

namespace {

using Positions = std::optional<std::vector<PlanePoint>>;

nlohmann::json point_json(PlanePoint z) { return nlohmann::json::array({z.real(), z.imag()}); }

Stage make_stage(std::string label, std::vector<VertexId> reads, std::vector<VertexId> writes, int signs,
                 StageSolver solve) {
  Stage s;
  s.label = std::move(label);
  s.reads = std::move(reads);
  s.writes = std::move(writes);
  s.sign_count = signs;
  s.solve = std::move(solve);
  return s;
}

// Hands every edge to the first stage after which both endpoints are positioned.
void assign_locals(FunctionalGadget& g) {
  std::set<VertexId> known(g.inputs.begin(), g.inputs.end());
  for (const auto& [id, anchor] : g.linkage.vertices()) {
    if (anchor) known.insert(id);
  }
  std::set<Linkage::EdgeKey> used;
  for (auto& stage : g.stages) {
    known.insert(stage.writes.begin(), stage.writes.end());
    Linkage local;
    for (const auto& [k, e] : g.linkage.edges()) {
      if (used.contains(k) || !known.contains(e.u) || !known.contains(e.v)) continue;
      local.add_vertex(e.u, g.linkage.anchor(e.u));
      local.add_vertex(e.v, g.linkage.anchor(e.v));
      local.add_edge(e.u, e.v, e.length, e.kind);
      used.insert(k);
    }
    stage.local = std::move(local);
  }
  if (used.size() != g.linkage.edge_count()) throw LinkageError("gadget " + g.name + " leaves an edge unchecked");
  for (const auto& [id, _] : g.linkage.vertices()) {
    if (!known.contains(id)) throw LinkageError("gadget " + g.name + " never positions " + id);
  }
}

void add_rod(Linkage& l, const VertexId& u, const VertexId& v, double length) { l.add_edge(u, v, length); }

// gamma(z, w, f): apex at distance `arm` from both z and w.
std::optional<PlanePoint> apex(PlanePoint z, PlanePoint w, double arm, int f) {
  const PlanePoint d = w - z;
  const double n = std::abs(d);
  if (n == 0.0) return std::nullopt;
  double rad = arm * arm - n * n / 4.0;
  if (rad < 0.0) {
    if (rad < -1e-12 * arm * arm) return std::nullopt;
    rad = 0.0;
  }
  return (z + w) / 2.0 + static_cast<double>(f) * kI * std::sqrt(rad) * d / n;
}

void append_mids(std::vector<PlanePoint>& out, PlanePoint p0, PlanePoint p1, PlanePoint p2, PlanePoint p3) {
  out.push_back((p0 + p1) / 2.0);
  out.push_back((p2 + p3) / 2.0);
}

struct CellParams {
  double t;
  double a;
  double b;
  double c;
  PlanePoint center;
  PlanePoint z0;  // relative to center
  double r;
  bool cabled;
};

FunctionalGadget peaucellier_cell(const CellParams& p, const std::string& prefix) {
  const VertexId A = prefix + "A", B = prefix + "B", C = prefix + "C", D = prefix + "D", E = prefix + "E",
                 F = prefix + "F";
  FunctionalGadget g;
  g.name = "inversion";
  g.strong = p.cabled;
  Linkage& l = g.linkage;
  l.add_vertex(A, p.center);
  for (const auto& v : {B, C, D, E}) l.add_vertex(v);
  add_rod(l, A, B, p.a);
  add_rod(l, A, C, p.a);
  auto [m1, m2] = add_braced_parallelogram(l, D, B, E, C, p.b, p.b, prefix + "rh");
  g.inputs = {D};
  g.outputs = {E};
  g.domain = Domain{{Disc{p.center + p.z0, p.r}}};

  const double t2 = p.t * p.t;
  const PlanePoint ctr = p.center;
  auto invert = [ctr, t2](PlanePoint d) { return ctr + t2 / std::conj(d - ctr); };

  if (p.cabled) {
    l.add_edge(D, E, 2.0 * p.c, EdgeKind::kCable);
    const PlanePoint w0 = -kI * p.z0 / p.t;
    l = tether(l, C, ctr + p.a * w0, std::sqrt(2.0) * p.a);
    l = tether(l, D, ctr + p.z0, p.r);
    g.stages.push_back(make_stage("elbow", {D}, {C}, 1,
                                  [ctr, a = p.a, b = p.b](std::span<const PlanePoint> in, std::span<const int> s) -> Positions {
                                    auto c = two_bar_elbow(in[0], ctr, a, b, s[0]);
                                    if (!c) return std::nullopt;
                                    return std::vector<PlanePoint>{*c};
                                  }));
    g.stages.push_back(make_stage("cell", {D, C}, {E, B, m1, m2}, 0,
                                  [invert, ctr](std::span<const PlanePoint> in, std::span<const int>) -> Positions {
                                    const PlanePoint d = in[0], c = in[1];
                                    if (d == ctr) return std::nullopt;
                                    const PlanePoint e = invert(d);
                                    const PlanePoint b = d + e - c;
                                    std::vector<PlanePoint> out{e, b};
                                    append_mids(out, d, b, e, c);
                                    return out;
                                  }));
  } else {
    const double d = std::sqrt(t2 + p.c * p.c);
    l.add_vertex(F);
    add_rod(l, D, F, p.c);
    add_rod(l, E, F, p.c);
    add_rod(l, A, F, d);
    g.stages.push_back(make_stage(
        "cell", {D}, {E, B, C, m1, m2}, 1,
        [invert, ctr, b = p.b](std::span<const PlanePoint> in, std::span<const int> s) -> Positions {
          const PlanePoint dd = in[0];
          if (dd == ctr) return std::nullopt;
          const PlanePoint e = invert(dd);
          const double half = std::abs(dd - e) / 2.0;
          double rad = b * b - half * half;
          if (rad < 0.0) return std::nullopt;
          const PlanePoint u = (dd - ctr) / std::abs(dd - ctr);
          const PlanePoint bb = (dd + e) / 2.0 + static_cast<double>(s[0]) * kI * std::sqrt(rad) * u;
          const PlanePoint cc = dd + e - bb;
          std::vector<PlanePoint> out{e, bb, cc};
          append_mids(out, dd, bb, e, cc);
          return out;
        }));
    g.stages.push_back(make_stage("guard", {D}, {F}, 1,
                                  [ctr, d, c = p.c](std::span<const PlanePoint> in, std::span<const int> s) -> Positions {
                                    auto f = two_bar_elbow(in[0], ctr, d, c, s[0]);
                                    if (!f) return std::nullopt;
                                    return std::vector<PlanePoint>{*f};
                                  }));
  }
  g.params = {{"t", p.t},      {"a", p.a},   {"b", p.b},           {"c", p.c},
              {"center", point_json(p.center)}, {"z0", point_json(p.z0)}, {"r", p.r}, {"cabled", p.cabled},
              {"prefix", prefix}};
  assign_locals(g);
  return g;
}

// Which pantograph vertex plays which role for a given lambda.
struct PantographPlan {
  double c;
  double a;
  double b;
  VertexId root;      // fixed at 0
  VertexId elbow;
  VertexId input;
  VertexId output;
  double arm1;        // root to elbow
  double arm2;        // elbow to input
};

}  // namespace

std::optional<PlanePoint> two_bar_elbow(PlanePoint z, PlanePoint z1, double a, double b, int sign) {
  const PlanePoint dz = z - z1;
  const double alpha = std::norm(dz);
  if (alpha == 0.0) return std::nullopt;
  const double k = alpha + a * a - b * b;
  double rad = 4.0 * a * a * alpha - k * k;
  if (rad < 0.0) {
    const double scale = (alpha + a * a + b * b) * (alpha + a * a + b * b);
    if (rad < -1e-13 * scale) return std::nullopt;
    rad = 0.0;
  }
  return z1 + dz * PlanePoint(k, static_cast<double>(sign) * std::sqrt(rad)) / (2.0 * alpha);
}

FunctionalGadget two_bar(double a, double b, PlanePoint z1, bool cabled, const TwoBarOptions& opts,
                         const std::string& prefix) {
  if (!(a > 0.0) || !(b > 0.0)) throw LinkageError("two-bar arms must be positive");
  if (b > a) throw LinkageError("two-bar requires b <= a");
  if (std::abs(std::abs(opts.w0) - 1.0) > 1e-12) throw LinkageError("two-bar w0 must be a unit vector");
  const double d = opts.d > 0.0 ? opts.d : b / 2.0;
  if (cabled && !(d < b)) throw LinkageError("two-bar tip tether must be shorter than b");

  const VertexId A = prefix + "A", B = prefix + "B", C = prefix + "C";
  FunctionalGadget g;
  g.name = "two_bar";
  g.strong = cabled;
  g.linkage.add_vertex(A, z1);
  g.linkage.add_vertex(B);
  g.linkage.add_vertex(C);
  add_rod(g.linkage, A, B, a);
  add_rod(g.linkage, B, C, b);
  if (cabled) {
    g.linkage = tether(g.linkage, B, z1 + a * opts.w0, std::sqrt(2.0) * a);
    g.linkage = tether(g.linkage, C, z1 + kI * a * opts.w0, d);
    g.domain = Domain{{Disc{z1 + kI * a * opts.w0, d}}};
  } else {
    g.domain = Domain{{Disc{z1 + a * opts.w0, d}}};
  }
  g.inputs = {C};
  g.outputs = {C};
  g.stages.push_back(make_stage("elbow", {C}, {B}, 1,
                                [z1, a, b](std::span<const PlanePoint> in, std::span<const int> s) -> Positions {
                                  auto e = two_bar_elbow(in[0], z1, a, b, s[0]);
                                  if (!e) return std::nullopt;
                                  return std::vector<PlanePoint>{*e};
                                }));
  g.params = {{"a", a}, {"b", b}, {"z1", point_json(z1)}, {"cabled", cabled}, {"w0", point_json(opts.w0)},
              {"d", d}, {"prefix", prefix}};
  assign_locals(g);
  return g;
}

Linkage plain_square(double side, const std::string& prefix) {
  if (!(side > 0.0)) throw LinkageError("square side must be positive");
  const VertexId A = prefix + "A", B = prefix + "B", C = prefix + "C", D = prefix + "D";
  Linkage l;
  l.add_vertex(A, PlanePoint{0.0, 0.0});
  l.add_vertex(B, PlanePoint{side, 0.0});
  l.add_vertex(C);
  l.add_vertex(D);
  add_rod(l, A, B, side);
  add_rod(l, B, D, side);
  add_rod(l, D, C, side);
  add_rod(l, C, A, side);
  return l;
}

Linkage rigidified_square(double side, bool stiffen, const std::string& prefix) {
  Linkage l = plain_square(side, prefix);
  add_braced_parallelogram(l, prefix + "C", prefix + "A", prefix + "B", prefix + "D", side, side, prefix + "sq",
                           stiffen);
  return l;
}

std::pair<double, double> truss_lengths(double a, double b, double d) {
  return {std::sqrt(a * a + d * d), std::sqrt(d * d + (b - a) * (b - a))};
}

std::pair<VertexId, VertexId> add_braced_parallelogram(Linkage& l, const VertexId& p0, const VertexId& p1,
                                                       const VertexId& p2, const VertexId& p3, double len01,
                                                       double len12, const std::string& tag, bool stiffen) {
  for (const auto& v : {p0, p1, p2, p3}) {
    if (!l.has_vertex(v)) l.add_vertex(v);
  }
  add_rod(l, p0, p1, len01);
  add_rod(l, p1, p2, len12);
  add_rod(l, p2, p3, len01);
  add_rod(l, p3, p0, len12);
  const VertexId m01 = tag + ".m01", m23 = tag + ".m23";
  auto joint = [&](const VertexId& m, const VertexId& x, const VertexId& y, const std::string& truss) {
    l.add_vertex(m);
    add_rod(l, x, m, len01 / 2.0);
    add_rod(l, m, y, len01 / 2.0);
    if (stiffen) {
      const double post = len01 / 4.0;
      auto [c, e] = truss_lengths(len01 / 2.0, len01, post);
      l.add_vertex(truss);
      add_rod(l, truss, x, c);
      add_rod(l, truss, y, e);
      add_rod(l, truss, m, post);
    }
  };
  joint(m01, p0, p1, tag + ".t01");
  joint(m23, p2, p3, tag + ".t23");
  add_rod(l, m01, m23, len12);
  return {m01, m23};
}

FunctionalGadget translation_gadget(PlanePoint shift, const Disc& domain, bool cabled, const std::string& prefix) {
  if (!(domain.radius > 0.0)) throw LinkageError("translation radius must be positive");
  const double r = domain.radius;
  const double a = 3.0 * r, b = 2.0 * r;
  const PlanePoint z1 = domain.center - a * kI;
  FunctionalGadget g = two_bar(a, b, z1, cabled, TwoBarOptions{{1.0, 0.0}, r}, prefix);
  g.name = "translation";
  g.domain = Domain{{domain}};
  g.params = {{"shift", point_json(shift)}, {"center", point_json(domain.center)}, {"r", r}, {"cabled", cabled},
              {"prefix", prefix}};
  if (shift == PlanePoint{}) return g;

  const VertexId A = prefix + "A", B = prefix + "B", C = prefix + "C", F = prefix + "F", G = prefix + "G",
                 H = prefix + "H";
  const double e = std::abs(shift);
  g.linkage.add_vertex(F, z1 + shift);
  g.linkage.add_vertex(G);
  g.linkage.add_vertex(H);
  auto [m1, m2] = add_braced_parallelogram(g.linkage, A, B, G, F, a, e, prefix + "pa");
  auto [m3, m4] = add_braced_parallelogram(g.linkage, B, C, H, G, b, e, prefix + "pb");
  g.stages.push_back(make_stage("carry", {A, B, C}, {G, H, m1, m2, m3, m4}, 0,
                                [shift, z1](std::span<const PlanePoint> in, std::span<const int>) -> Positions {
                                  const PlanePoint pa = in[0], pb = in[1], pc = in[2];
                                  const PlanePoint pg = pb + shift, ph = pc + shift, pf = z1 + shift;
                                  std::vector<PlanePoint> out{pg, ph};
                                  append_mids(out, pa, pb, pg, pf);
                                  append_mids(out, pb, pc, ph, pg);
                                  return out;
                                }));
  g.outputs = {H};
  assign_locals(g);
  return g;
}

FunctionalGadget pantograph_gadget(double lambda, double r, bool cabled, const std::string& prefix) {
  if (lambda == 0.0 || lambda == 1.0) {
    throw LinkageError("scalar 0 and 1 are the constant and identity gadgets, not pantographs");
  }
  if (!std::isfinite(lambda)) throw LinkageError("scalar must be finite");
  if (!(r > 0.0)) throw LinkageError("pantograph radius must be positive");
  const VertexId A = prefix + "A", B = prefix + "B", C = prefix + "C", D = prefix + "D", E = prefix + "E",
                 F = prefix + "F";
  const double arm = 2.0 * r;
  PantographPlan plan{};
  if (lambda > 1.0) {
    plan = {lambda - 1.0, arm, arm, A, E, B, C, arm, arm};
  } else if (lambda > 0.0) {
    const double c = 1.0 / lambda - 1.0;
    plan = {c, arm / (1.0 + c), arm / (1.0 + c), A, D, C, B, arm, arm};
  } else {
    plan = {-lambda, arm, arm, B, E, A, C, arm, arm};
  }
  const double c = plan.c, a = plan.a, b = plan.b;

  FunctionalGadget g;
  g.name = "pantograph";
  g.strong = cabled;
  Linkage& l = g.linkage;
  for (const auto& v : {A, B, C, D, E, F}) l.add_vertex(v);
  l.add_vertex(plan.root, PlanePoint{});
  add_rod(l, A, E, a);
  add_rod(l, E, D, c * a);
  add_rod(l, A, D, (1.0 + c) * a);
  add_rod(l, D, F, b);
  add_rod(l, F, C, c * b);
  add_rod(l, D, C, (1.0 + c) * b);
  auto [m1, m2] = add_braced_parallelogram(l, E, D, F, B, c * a, b, prefix + "pg");

  const PlanePoint centre = kI * plan.arm1;
  if (cabled) {
    l = tether(l, plan.elbow, PlanePoint{plan.arm1, 0.0}, std::sqrt(2.0) * plan.arm1);
    l = tether(l, plan.input, centre, r);
  }
  g.inputs = {plan.input};
  g.outputs = {plan.output};
  g.domain = Domain{{Disc{centre, r}}};

  const double arm1 = plan.arm1, arm2 = plan.arm2;
  g.stages.push_back(make_stage("elbow", {plan.input}, {plan.elbow}, 1,
                                [arm1, arm2](std::span<const PlanePoint> in, std::span<const int> s) -> Positions {
                                  auto e = two_bar_elbow(in[0], PlanePoint{}, arm1, arm2, s[0]);
                                  if (!e) return std::nullopt;
                                  return std::vector<PlanePoint>{*e};
                                }));
  std::vector<VertexId> rest;
  for (const auto& v : {A, B, C, D, E, F}) {
    if (v != plan.root && v != plan.elbow && v != plan.input) rest.push_back(v);
  }
  rest.push_back(m1);
  rest.push_back(m2);
  const int mode = lambda > 1.0 ? 0 : (lambda > 0.0 ? 1 : 2);
  g.stages.push_back(make_stage(
      "carry", {plan.input, plan.elbow}, rest, 0,
      [mode, c](std::span<const PlanePoint> in, std::span<const int>) -> Positions {
        const PlanePoint input = in[0], elbow = in[1];
        PlanePoint pa{}, pb{}, pc{}, pd{}, pe{}, pf{};
        if (mode == 0) {  // root A, elbow E, input B
          pe = elbow;
          pb = input;
          pd = (1.0 + c) * pe;
          pf = pb - pe + pd;
          pc = (1.0 + c) * pb;
        } else if (mode == 1) {  // root A, elbow D, input C
          pd = elbow;
          pc = input;
          pe = pd / (1.0 + c);
          pf = pd + (pc - pd) / (1.0 + c);
          pb = pe + pf - pd;
        } else {  // root B, elbow E, input A
          pe = elbow;
          pa = input;
          pd = pa + (1.0 + c) * (pe - pa);
          pf = pb + pd - pe;
          pc = pa + (1.0 + c) * (pb - pa);
        }
        std::vector<PlanePoint> out;
        if (mode == 0) out = {pc, pd, pf};
        if (mode == 1) out = {pb, pe, pf};
        if (mode == 2) out = {pc, pd, pf};
        append_mids(out, pe, pd, pf, pb);
        return out;
      }));
  g.params = {{"lambda", lambda}, {"r", r}, {"cabled", cabled}, {"prefix", prefix}};
  assign_locals(g);
  return g;
}

FunctionalGadget scalar_mult_gadget(double lambda, const Disc& domain, bool cabled, const std::string& prefix) {
  FunctionalGadget p = pantograph_gadget(lambda, domain.radius, cabled, prefix + "p.");
  const PlanePoint p0 = p.domain.discs[0].center;
  FunctionalGadget g = p;
  if (domain.center != p0) {
    g = compose(translation_gadget(p0 - domain.center, domain, cabled, prefix + "t1."), p);
  }
  const PlanePoint back = lambda * (domain.center - p0);
  if (back != PlanePoint{}) {
    g = compose(g, translation_gadget(back, Disc{lambda * p0, std::abs(lambda) * domain.radius}, cabled,
                                      prefix + "t2."));
  }
  g.name = "scalar";
  g.params = {{"lambda", lambda}, {"center", point_json(domain.center)}, {"r", domain.radius}, {"cabled", cabled},
              {"prefix", prefix}};
  return g;
}

FunctionalGadget average_gadget(double r, bool cabled, const std::string& prefix) {
  if (!(r > 0.0)) throw LinkageError("average radius must be positive");
  const VertexId A = prefix + "A", B = prefix + "B", C = prefix + "C", D = prefix + "D", E = prefix + "E",
                 F = prefix + "F";
  // Normalised cell: rods of length 2, inputs near +1 (C) and -1 (A).
  constexpr double kArm = 1.0;
  const PlanePoint z0{1.0, 0.0};
  const PlanePoint apex0 = *apex(z0, -z0, 2.0 * kArm, 1);

  double r0 = 0.5;
  double d = 0.0;
  if (cabled) {
    for (;; r0 /= 2.0) {
      double max_plus = 0.0, min_minus = std::numeric_limits<double>::infinity();
      constexpr int kAngles = 32;
      for (double fz : {0.0, 0.5, 1.0}) {
        for (double fw : {0.0, 0.5, 1.0}) {
          for (int i = 0; i < kAngles; ++i) {
            for (int j = 0; j < kAngles; ++j) {
              const PlanePoint z = z0 + fz * r0 * std::polar(1.0, 2.0 * std::numbers::pi * i / kAngles);
              const PlanePoint w = -z0 + fw * r0 * std::polar(1.0, 2.0 * std::numbers::pi * j / kAngles);
              max_plus = std::max(max_plus, std::abs(*apex(z, w, 2.0 * kArm, 1) - apex0));
              min_minus = std::min(min_minus, std::abs(*apex(z, w, 2.0 * kArm, -1) - apex0));
            }
          }
        }
      }
      if (min_minus - max_plus > 0.1 * r0) {
        d = (max_plus + min_minus) / 2.0;
        break;
      }
      if (r0 < 1e-6) throw LinkageError("average tether search did not converge");
    }
  }

  FunctionalGadget g;
  g.name = "average";
  g.strong = cabled;
  Linkage& l = g.linkage;
  for (const auto& v : {A, B, C, D, E, F}) l.add_vertex(v);
  add_rod(l, A, E, kArm);
  add_rod(l, E, D, kArm);
  add_rod(l, A, D, 2.0 * kArm);
  add_rod(l, D, F, kArm);
  add_rod(l, F, C, kArm);
  add_rod(l, D, C, 2.0 * kArm);
  auto [m1, m2] = add_braced_parallelogram(l, E, D, F, B, kArm, kArm, prefix + "pg");
  if (cabled) {
    l = tether(l, A, -z0, r0);
    l = tether(l, C, z0, r0);
    l = tether(l, D, apex0, d);
  }
  g.inputs = {C, A};
  g.outputs = {B};
  g.domain = Domain{{Disc{z0, r0}, Disc{-z0, r0}}};
  g.stages.push_back(make_stage("apex", {C, A}, {D}, 1,
                                [](std::span<const PlanePoint> in, std::span<const int> s) -> Positions {
                                  auto p = apex(in[0], in[1], 2.0 * kArm, s[0]);
                                  if (!p) return std::nullopt;
                                  return std::vector<PlanePoint>{*p};
                                }));
  g.stages.push_back(make_stage("carry", {C, A, D}, {E, F, B, m1, m2}, 0,
                                [](std::span<const PlanePoint> in, std::span<const int>) -> Positions {
                                  const PlanePoint pc = in[0], pa = in[1], pd = in[2];
                                  const PlanePoint pe = (pa + pd) / 2.0, pf = (pd + pc) / 2.0;
                                  const PlanePoint pb = pe + pf - pd;
                                  std::vector<PlanePoint> out{pe, pf, pb};
                                  append_mids(out, pe, pd, pf, pb);
                                  return out;
                                }));
  assign_locals(g);
  FunctionalGadget out = rescale_gadget(g, r / r0);
  out.params = {{"r", r}, {"cabled", cabled}, {"prefix", prefix}, {"normalised_radius", r0}, {"tether", d}};
  return out;
}

FunctionalGadget inversion_gadget(double t, PlanePoint z0, double r, bool cabled, const InversionOptions& opts,
                                  const std::string& prefix) {
  if (!(t > 0.0)) throw LinkageError("inversion radius must be positive");
  if (std::abs(std::abs(z0) - t) > 1e-9 * t) throw LinkageError("inversion domain centre must lie on |z| = t");
  if (!(r > 0.0) || r > t / 2.0 * (1.0 + 1e-12)) throw LinkageError("inversion domain radius must be in (0, t/2]");
  CellParams p{t,
               opts.a > 0.0 ? opts.a : 5.0 * t / 3.0,
               opts.b > 0.0 ? opts.b : 4.0 * t / 3.0,
               opts.c > 0.0 ? opts.c : t,
               opts.center,
               z0,
               r,
               cabled};
  if (!(p.c < p.b && p.b < p.a)) throw LinkageError("inversion requires c < b < a");
  if (std::abs(p.a * p.a - p.b * p.b - t * t) > 1e-9 * t * t) throw LinkageError("inversion requires a^2 - b^2 = t^2");
  if (cabled) {
    if (!((p.a - t) + r < p.b)) throw LinkageError("inversion domain not inside the one-fold disc of the arm");
    if (t * t / (t - r) - (t - r) > 2.0 * p.c * (1.0 + 1e-12)) throw LinkageError("inversion cable DE too short");
  } else {
    const double d = std::sqrt(t * t + p.c * p.c);
    if (!(t - r > d - p.c && t + r < d + p.c)) throw LinkageError("inversion domain leaves the guard annulus");
  }
  return peaucellier_cell(p, prefix);
}

PlanePoint StraightLine::cell_input(double x) const { return z0 + 4.0 * c * c / std::conj(PlanePoint{x, 0.0} - z0); }

std::optional<Configuration> StraightLine::configure(double x, std::span<const int> signs, double tol) const {
  const PlanePoint d = cell_input(x);
  auto phi = cell.evaluate(std::span<const PlanePoint>(&d, 1), signs);
  if (!phi) return std::nullopt;
  (*phi)[pin] = z0 + kI * c;
  for (const auto& [id, anchor] : linkage.vertices()) {
    if (anchor) (*phi)[id] = *anchor;
  }
  if (std::isfinite(tol) && residual(linkage, *phi) > tol) return std::nullopt;
  return phi;
}

StraightLine straight_line_gadget(double x0, double c, bool cabled, double guard, const std::string& prefix) {
  if (!(c > 0.0)) throw LinkageError("straight line scale must be positive");
  const double t = 2.0 * c;
  const double g = guard > 0.0 ? guard : c;
  StraightLine s;
  s.x0 = x0;
  s.c = c;
  s.cabled = cabled;
  s.z0 = PlanePoint{x0, -2.0 * c};
  CellParams p{t, 5.0 * t / 3.0, 4.0 * t / 3.0, cabled ? t : g, s.z0, PlanePoint{0.0, 2.0 * c}, c, cabled};
  if (!cabled && !(g < p.b)) throw LinkageError("straight line guard must be shorter than the rhombus side");
  s.cell = peaucellier_cell(p, prefix);
  s.linkage = s.cell.linkage;
  s.pin = prefix + "pin";
  s.linkage.add_vertex(s.pin, s.z0 + kI * c);
  s.linkage.add_edge(s.pin, prefix + "A", c);
  s.linkage.add_edge(s.pin, prefix + "D", c);
  s.output = prefix + "E";
  s.sign_count = s.cell.branch_count();
  if (cabled) {
    s.lo = x0 - 2.0 * c / std::sqrt(3.0);
    s.hi = x0 + 2.0 * c / std::sqrt(3.0);
  } else {
    const double e = std::sqrt(4.0 * c * c + g * g);
    const double half = std::sqrt(2.0 * g * g + 2.0 * g * e);
    s.lo = x0 - half;
    s.hi = x0 + half;
  }
  return s;
}

FunctionalGadget conjugation_gadget(double r, bool cabled, const std::string& prefix) {
  if (!(r > 0.0)) throw LinkageError("conjugation radius must be positive");
  const double side = 10.0 * r;
  const double lc = std::sqrt(3.0) * r;
  const double guard = r / 2.0;
  const StraightLine right = straight_line_gadget(6.0 * r, lc, cabled, guard, prefix + "L1.");
  const StraightLine left = straight_line_gadget(-6.0 * r, lc, cabled, guard, prefix + "L2.");
  const VertexId A = right.output, B = left.output, C = prefix + "C", D = prefix + "D";

  FunctionalGadget g;
  g.name = "conjugation";
  g.strong = cabled;
  g.linkage = linkage_union(right.linkage, left.linkage);
  g.linkage.add_vertex(C);
  g.linkage.add_vertex(D);
  auto [m1, m2] = add_braced_parallelogram(g.linkage, A, C, B, D, side, side, prefix + "rh");
  g.inputs = {C};
  g.outputs = {D};
  g.domain = Domain{{Disc{PlanePoint{0.0, 8.0 * r}, r}}};

  auto line_stage = [&](const StraightLine& line, int side_sign, const std::string& label) {
    std::vector<VertexId> writes;
    for (const auto& [id, anchor] : line.linkage.vertices()) {
      if (!anchor) writes.push_back(id);
    }
    return make_stage(label, {C}, writes, line.sign_count,
                      [line, writes, side_sign, side](std::span<const PlanePoint> in,
                                                      std::span<const int> s) -> Positions {
                        const double y = in[0].imag();
                        const double rad = side * side - y * y;
                        if (rad < 0.0) return std::nullopt;
                        const double x = in[0].real() + side_sign * std::sqrt(rad);
                        auto phi = line.configure(x, s, std::numeric_limits<double>::infinity());
                        if (!phi) return std::nullopt;
                        std::vector<PlanePoint> out;
                        for (const auto& w : writes) out.push_back(phi->at(w));
                        return out;
                      });
  };
  g.stages.push_back(line_stage(right, 1, "line1"));
  g.stages.push_back(line_stage(left, -1, "line2"));
  g.stages.push_back(make_stage("rhombus", {C, A, B}, {D, m1, m2}, 0,
                                [](std::span<const PlanePoint> in, std::span<const int>) -> Positions {
                                  const PlanePoint pc = in[0], pa = in[1], pb = in[2];
                                  const PlanePoint pd = pa + pb - pc;
                                  std::vector<PlanePoint> out{pd};
                                  append_mids(out, pa, pc, pb, pd);
                                  return out;
                                }));
  g.params = {{"r", r}, {"cabled", cabled}, {"prefix", prefix}};
  assign_locals(g);
  return g;
}

FunctionalGadget constant_gadget(PlanePoint z0, const std::string& prefix) {
  if (!is_finite(z0)) throw LinkageError("constant must be finite");
  FunctionalGadget g;
  g.name = "constant";
  g.strong = true;
  g.linkage.add_vertex(prefix + "K", z0);
  g.outputs = {prefix + "K"};
  g.params = {{"value", point_json(z0)}, {"prefix", prefix}};
  return g;
}

FunctionalGadget projection_gadget(int n, const std::vector<int>& keep, const std::string& prefix) {
  if (n < 0) throw LinkageError("projection arity must be non-negative");
  FunctionalGadget g;
  g.name = "projection";
  g.strong = true;
  for (int i = 0; i < n; ++i) {
    const VertexId v = prefix + "x" + std::to_string(i);
    g.linkage.add_vertex(v);
    g.inputs.push_back(v);
    g.domain.discs.push_back(Disc{{}, kPlaneSentinelRadius});
  }
  for (int k : keep) {
    if (k < 0 || k >= n) throw LinkageError("projection index " + std::to_string(k) + " out of range");
    g.outputs.push_back(g.inputs[static_cast<std::size_t>(k)]);
  }
  g.params = {{"n", n}, {"keep", keep}, {"prefix", prefix}};
  return g;
}

FunctionalGadget identity_gadget(const Disc& domain, const std::string& prefix) {
  FunctionalGadget g;
  g.name = "identity";
  g.strong = true;
  g.linkage.add_vertex(prefix + "z");
  g.inputs = {prefix + "z"};
  g.outputs = {prefix + "z"};
  g.domain = Domain{{domain}};
  g.params = {{"center", point_json(domain.center)}, {"r", domain.radius}, {"prefix", prefix}};
  return g;
}

}  // namespace linkc
