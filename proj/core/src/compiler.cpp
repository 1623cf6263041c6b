#include "linkc/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "linkc/gadgets.hpp"

namespace linkc {

namespace {

constexpr double kMaxRadius = 1e9;

nlohmann::json domain_json(const Domain& d) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& disc : d.discs) {
    out.push_back({{"center", {disc.center.real(), disc.center.imag()}}, {"radius", disc.radius}});
  }
  return out;
}

// A compiled value: either a known constant or a vertex with a certified disc.
struct Value {
  bool constant = false;
  PlanePoint value{};
  VertexId vertex;
  Disc disc;
};

Value constant_value(PlanePoint z) {
  Value v;
  v.constant = true;
  v.value = z;
  v.disc = Disc{z, 0.0};
  return v;
}

bool is_real(PlanePoint z) { return z.imag() == 0.0; }

class Builder {
 public:
  Builder(FunctionalGadget base, Mode mode) : g_(std::move(base)), cabled_(mode == Mode::kCabled) {}

  FunctionalGadget& gadget() { return g_; }
  std::vector<NodeCertificate>& certificates() { return certs_; }

  Value translate(const Value& x, PlanePoint shift) {
    if (x.constant) return constant_value(x.value + shift);
    if (shift == PlanePoint{}) return x;
    return attach(translation_gadget(shift, x.disc, cabled_, next_prefix()), {x.vertex},
                  Disc{x.disc.center + shift, x.disc.radius}, "translate");
  }

  Value scale(const Value& x, double lambda) {
    if (x.constant) return constant_value(lambda * x.value);
    if (lambda == 1.0) return x;
    if (lambda == 0.0) return constant_value({});
    return attach(scalar_mult_gadget(lambda, x.disc, cabled_, next_prefix()), {x.vertex},
                  Disc{lambda * x.disc.center, std::abs(lambda) * x.disc.radius}, "scale");
  }

  Value average(const Value& x, const Value& y) {
    if (x.constant && y.constant) return constant_value((x.value + y.value) / 2.0);
    if (x.constant) return scale(translate(y, x.value), 0.5);
    if (y.constant) return scale(translate(x, y.value), 0.5);
    if (x.vertex == y.vertex) return x;
    const double r = std::max(x.disc.radius, y.disc.radius);
    FunctionalGadget avg = average_gadget(r, cabled_, next_prefix());
    const PlanePoint p = avg.domain.discs[0].center;
    const Value xs = translate(x, p - x.disc.center);
    const Value ys = translate(y, -p - y.disc.center);
    const Value mid = attach(std::move(avg), {xs.vertex, ys.vertex}, Disc{{}, (x.disc.radius + y.disc.radius) / 2.0},
                             "average");
    return translate(mid, (x.disc.center + y.disc.center) / 2.0);
  }

  Value add(const Value& x, const Value& y) {
    if (x.constant && y.constant) return constant_value(x.value + y.value);
    if (x.constant) return translate(y, x.value);
    if (y.constant) return translate(x, y.value);
    if (x.vertex == y.vertex) return scale(x, 2.0);
    return scale(average(x, y), 2.0);
  }

  // u -> t^2 / conj(u) on a disc inside |u - t| <= t/2.
  Value invert(const Value& x, double t) {
    if (x.constant) return constant_value(t * t / std::conj(x.value));
    const double reach = std::abs(x.disc.center - t) + x.disc.radius;
    if (reach > t / 2.0 * (1.0 + 1e-12)) throw LinkageError("inversion input disc leaves |u - t| <= t/2");
    const double c2 = std::norm(x.disc.center), r = x.disc.radius;
    const Disc image{t * t * x.disc.center / (c2 - r * r), t * t * r / (c2 - r * r)};
    return attach(inversion_gadget(t, PlanePoint{t, 0.0}, std::min(reach, t / 2.0), cabled_, {}, next_prefix()),
                  {x.vertex}, image, "invert");
  }

  Value square(const Value& x) {
    if (x.constant) return constant_value(x.value * x.value);
    const double big_r = std::abs(x.disc.center) + x.disc.radius;
    const double t = 3.0 * big_r + 1.0;
    const Value u1 = translate(x, t);
    const Value u2 = translate(scale(x, -1.0), t);
    const Value h = average(invert(u1, t), invert(u2, t));
    const Value out = translate(scale(invert(h, t), -t), t * t);
    return out;
  }

  Value mul(const Value& x, const Value& y) {
    if (x.constant && y.constant) return constant_value(x.value * y.value);
    if (x.constant && is_real(x.value)) return scale(y, x.value.real());
    if (y.constant && is_real(y.value)) return scale(x, y.value.real());
    if (!x.constant && !y.constant && x.vertex == y.vertex) return square(x);
    const Value s = add(x, y);
    const Value d = add(x, scale(y, -1.0));
    return scale(add(square(s), scale(square(d), -1.0)), 0.25);
  }

  Value conj(const Value& x) {
    if (x.constant) return constant_value(std::conj(x.value));
    const double r = x.disc.radius;
    FunctionalGadget cg = conjugation_gadget(r, cabled_, next_prefix());
    const PlanePoint z0 = cg.domain.discs[0].center;
    const Value moved = translate(x, z0 - x.disc.center);
    const Value flipped = attach(std::move(cg), {moved.vertex}, Disc{std::conj(z0), r}, "conj");
    return translate(flipped, std::conj(x.disc.center) - std::conj(z0));
  }

  VertexId materialize(const Value& x) {
    if (!x.constant) return x.vertex;
    FunctionalGadget k = constant_gadget(x.value, next_prefix());
    std::vector<VertexId> outs;
    g_ = graft(g_, k, {}, &outs);
    return outs.front();
  }

 private:
  std::string next_prefix() { return "n" + std::to_string(counter_++) + "."; }

  Value attach(FunctionalGadget part, const std::vector<VertexId>& wiring, const Disc& out_disc, const char* op) {
    if (!(out_disc.radius < kMaxRadius) || std::abs(out_disc.center) > kMaxRadius) {
      throw LinkageError("value disc of " + std::string(op) + " node " + part.name + " exceeds representable scale");
    }
    std::vector<VertexId> outs;
    g_ = graft(g_, part, wiring, &outs);
    Value v;
    v.vertex = outs.front();
    v.disc = out_disc;
    certs_.push_back(NodeCertificate{v.vertex, out_disc, op});
    return v;
  }

  FunctionalGadget g_;
  bool cabled_;
  int counter_ = 0;
  std::vector<NodeCertificate> certs_;
};

double degree_of(const FunctionalGadget& g, Mode mode) {
  return mode == Mode::kCabled ? 1.0 : std::ldexp(1.0, g.branch_count());
}

}  // namespace

const char* to_string(Mode mode) { return mode == Mode::kCabled ? "cabled" : "classical"; }

Mode parse_mode(const std::string& text) {
  if (text == "cabled") return Mode::kCabled;
  if (text == "classical") return Mode::kClassical;
  throw LinkageError("unknown mode '" + text + "' (expected classical or cabled)");
}

CompiledLinkage compile(const PolyExpr& expr, const Domain& region, Mode mode) {
  if (static_cast<int>(region.arity()) != expr.arity()) {
    throw LinkageError("region has " + std::to_string(region.arity()) + " discs but the expression has arity " +
                       std::to_string(expr.arity()));
  }
  for (const auto& d : region.discs) {
    if (!(d.radius > 0.0) || !std::isfinite(d.radius) || !is_finite(d.center)) {
      throw LinkageError("region discs must have finite centre and positive finite radius");
    }
  }

  FunctionalGadget base;
  base.name = "compiled";
  base.strong = true;
  base.domain = region;
  for (int i = 0; i < expr.arity(); ++i) {
    const VertexId v = "z" + std::to_string(i + 1);
    base.linkage.add_vertex(v);
    base.inputs.push_back(v);
  }

  // Only nodes reachable from the outputs are built.
  std::vector<bool> live(expr.nodes().size(), false);
  for (int o : expr.outputs) live[static_cast<std::size_t>(o)] = true;
  for (std::size_t i = expr.nodes().size(); i-- > 0;) {
    if (!live[i]) continue;
    const auto& n = expr.nodes()[i];
    if (n.lhs >= 0) live[static_cast<std::size_t>(n.lhs)] = true;
    if (n.rhs >= 0) live[static_cast<std::size_t>(n.rhs)] = true;
  }

  Builder b(std::move(base), mode);
  std::vector<Value> values(expr.nodes().size());
  for (std::size_t i = 0; i < expr.nodes().size(); ++i) {
    if (!live[i]) continue;
    const auto& n = expr.nodes()[i];
    try {
      switch (n.kind) {
        case NodeKind::kInput: {
          Value v;
          v.vertex = "z" + std::to_string(n.index + 1);
          v.disc = region.discs[static_cast<std::size_t>(n.index)];
          values[i] = v;
          break;
        }
        case NodeKind::kConst:
          values[i] = constant_value(n.value);
          break;
        case NodeKind::kAdd:
          values[i] = b.add(values[static_cast<std::size_t>(n.lhs)], values[static_cast<std::size_t>(n.rhs)]);
          break;
        case NodeKind::kMul:
          values[i] = b.mul(values[static_cast<std::size_t>(n.lhs)], values[static_cast<std::size_t>(n.rhs)]);
          break;
        case NodeKind::kConj:
          values[i] = b.conj(values[static_cast<std::size_t>(n.lhs)]);
          break;
      }
    } catch (const LinkageError& e) {
      throw LinkageError("cannot compile node " + expr.to_string(static_cast<int>(i)) + ": " + e.what());
    }
  }

  CompiledLinkage out;
  for (int o : expr.outputs) b.gadget().outputs.push_back(b.materialize(values[static_cast<std::size_t>(o)]));
  out.gadget = std::move(b.gadget());
  out.gadget.strong = mode == Mode::kCabled;
  out.gadget.params = nlohmann::json::object();
  out.mode = mode;
  out.degree = degree_of(out.gadget, mode);
  out.domain = region;
  out.certificates = std::move(b.certificates());
  out.meta = {{"kind", "compiled"},
              {"expr", expr.to_string()},
              {"dag", poly_to_json(expr)},
              {"mode", to_string(mode)},
              {"degree", out.degree},
              {"region", domain_json(region)}};
  return out;
}

std::optional<std::vector<int>> first_feasible_signs(const FunctionalGadget& g, std::span<const PlanePoint> input,
                                                     double tol) {
  const BranchTable table = branch_table(g, input, tol);
  if (!table.ok) return std::nullopt;
  std::vector<int> signs(static_cast<std::size_t>(g.branch_count()), 1);
  for (std::size_t s = 0; s < table.feasible.size(); ++s) {
    const auto& choice = table.feasible[s].front();
    std::copy(choice.begin(), choice.end(), signs.begin() + static_cast<std::ptrdiff_t>(table.offsets[s]));
  }
  return signs;
}

std::optional<Configuration> RealizedSet::realize(std::span<const PlanePoint> z, double tol) const {
  if (!compiled.domain.contains(z)) return std::nullopt;
  try {
    auto signs = first_feasible_signs(gadget, z, tol);
    if (!signs) return std::nullopt;
    return gadget.witness(z, *signs, tol);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

RealizedSet realize_set(const PolyExpr& g, int equalities, const Domain& region, Mode mode, unsigned seed) {
  const int m = static_cast<int>(g.outputs.size());
  if (equalities < 0 || equalities > m) throw LinkageError("equality count out of range");
  if (mode == Mode::kClassical && equalities < m) {
    throw LinkageError("inequalities need cabled mode: classical linkages have no tethers");
  }

  RealizedSet out;
  out.compiled = compile(g, region, mode);
  out.equalities = equalities;

  // Bound on the inequality components, sampled over the region.
  double max_g = 0.0;
  if (equalities < m) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<PlanePoint> z(region.arity());
    for (int s = 0; s < 10000; ++s) {
      for (std::size_t k = 0; k < z.size(); ++k) {
        const auto& d = region.discs[k];
        z[k] = d.center + d.radius * std::sqrt(unit(rng)) * std::polar(1.0, 2.0 * std::numbers::pi * unit(rng));
      }
      const auto v = g.eval(z);
      for (int i = equalities; i < m; ++i) {
        const PlanePoint gi = v[static_cast<std::size_t>(i)];
        if (std::abs(gi.imag()) > 1e-9 * (1.0 + std::abs(gi))) {
          throw LinkageError("inequality component " + std::to_string(i + 1) + " is not real-valued on the region");
        }
        max_g = std::max(max_g, std::abs(gi.real()));
      }
    }
  }
  out.b = max_g > 0.0 ? 2.0 * max_g : 1.0;

  const FunctionalGadget& cg = out.compiled.gadget;
  Linkage extra;
  for (int i = 0; i < m; ++i) {
    const VertexId& v = cg.outputs[static_cast<std::size_t>(i)];
    const auto anchor = cg.linkage.anchor(v);
    const bool equality = i < equalities;
    if (anchor) {
      const bool holds = equality ? *anchor == PlanePoint{} : (anchor->imag() == 0.0 && anchor->real() >= 0.0);
      if (holds) continue;
      // A constant output that violates its condition: pin a witness vertex so
      // the configuration space is empty.
      const VertexId z = "empty" + std::to_string(i);
      extra.add_vertex(v, *anchor);
      extra.add_vertex(z, PlanePoint{});
      extra.add_edge(v, z, std::abs(*anchor) / 2.0);
      continue;
    }
    if (equality) {
      extra.add_vertex(v, PlanePoint{});
    } else {
      extra.add_vertex(v);
      extra = tether(extra, v, PlanePoint{out.b, 0.0}, out.b);
    }
  }
  out.gadget = extra.vertex_count() ? constrain(cg, extra, "realize") : cg;
  out.linkage = out.gadget.linkage;
  out.compiled.meta["kind"] = "realized";
  out.compiled.meta["b"] = out.b;
  out.compiled.meta["equalities"] = equalities;
  out.compiled.meta["seed"] = seed;
  return out;
}

PlanePoint CurveTracer::input_at(double theta) const { return center + radius * std::polar(1.0, theta); }

CurveTracer curve_tracer(const PolyExpr& alpha, double a, double b, Mode mode) {
  if (!(a < b)) throw LinkageError("curve interval needs a < b");
  if (alpha.arity() != 1 || alpha.outputs.size() != 1) throw LinkageError("curve must be one expression in z1");
  PolyExpr doubled(1);
  const int z = doubled.input(0);
  doubled.outputs = {doubled.add(z, doubled.conj(z))};
  const PolyExpr beta = substitute(alpha, doubled);

  CurveTracer tr;
  tr.a = a;
  tr.b = b;
  tr.center = PlanePoint{(a + b) / 4.0, 0.0};
  tr.radius = (b - a) / 4.0;
  tr.compiled = compile(beta, Domain{{Disc{tr.center, tr.radius}}}, mode);
  tr.input = tr.compiled.gadget.inputs.front();
  tr.output = tr.compiled.gadget.outputs.front();
  tr.pivot = "pivot";
  Linkage extra;
  extra.add_vertex(tr.input);
  extra.add_vertex(tr.pivot, tr.center);
  extra.add_edge(tr.pivot, tr.input, tr.radius);
  tr.gadget = constrain(tr.compiled.gadget, extra, "pivot");
  tr.linkage = tr.gadget.linkage;
  tr.compiled.meta["kind"] = "curve";
  tr.compiled.meta["alpha"] = alpha.to_string();
  tr.compiled.meta["alpha_dag"] = poly_to_json(alpha);
  tr.compiled.meta["interval"] = {a, b};
  return tr;
}

}  // namespace linkc
