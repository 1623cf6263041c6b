#include "linkc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "linkc/gadgets.hpp"

namespace linkc {

namespace {

using json = nlohmann::json;

json point_json(PlanePoint z) { return json::array({z.real(), z.imag()}); }

PlanePoint point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("expected a point [re, im]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

Domain domain_from(const json& j) {
  Domain d;
  for (const auto& disc : j) d.discs.push_back(Disc{point_from(disc.at("center")), disc.at("radius").get<double>()});
  return d;
}

json domain_to(const Domain& d) {
  json out = json::array();
  for (const auto& disc : d.discs) out.push_back({{"center", point_json(disc.center)}, {"radius", disc.radius}});
  return out;
}

LinkageDocument from_gadget(const FunctionalGadget& g, json meta) {
  LinkageDocument doc;
  doc.linkage = g.linkage;
  doc.inputs = g.inputs;
  doc.outputs = g.outputs;
  doc.domain = g.domain;
  doc.meta = std::move(meta);
  return doc;
}

bool same_domain(const Domain& a, const Domain& b) {
  if (a.discs.size() != b.discs.size()) return false;
  for (std::size_t i = 0; i < a.discs.size(); ++i) {
    if (a.discs[i].center != b.discs[i].center || a.discs[i].radius != b.discs[i].radius) return false;
  }
  return true;
}

FunctionalGadget gadget_from_params(const std::string& name, const json& p) {
  const auto prefix = p.value("prefix", std::string{});
  auto num = [&](const char* k) { return p.at(k).get<double>(); };
  auto pt = [&](const char* k) { return point_from(p.at(k)); };
  auto cabled = [&] { return p.at("cabled").get<bool>(); };
  if (name == "two_bar") {
    TwoBarOptions o;
    o.w0 = pt("w0");
    o.d = num("d");
    return two_bar(num("a"), num("b"), pt("z1"), cabled(), o, prefix);
  }
  if (name == "translation") return translation_gadget(pt("shift"), Disc{pt("center"), num("r")}, cabled(), prefix);
  if (name == "pantograph") return pantograph_gadget(num("lambda"), num("r"), cabled(), prefix);
  if (name == "scalar") return scalar_mult_gadget(num("lambda"), Disc{pt("center"), num("r")}, cabled(), prefix);
  if (name == "average") return average_gadget(num("r"), cabled(), prefix);
  if (name == "inversion") {
    InversionOptions o;
    o.a = num("a");
    o.b = num("b");
    o.c = num("c");
    o.center = pt("center");
    return inversion_gadget(num("t"), pt("z0"), num("r"), cabled(), o, prefix);
  }
  if (name == "conjugation") return conjugation_gadget(num("r"), cabled(), prefix);
  if (name == "constant") return constant_gadget(pt("value"), prefix);
  if (name == "projection") return projection_gadget(p.at("n").get<int>(), p.at("keep").get<std::vector<int>>(), prefix);
  if (name == "identity") return identity_gadget(Disc{pt("center"), num("r")}, prefix);
  throw FormatError("unknown gadget " + name);
}

}  // namespace

LinkageDocument make_document(const FunctionalGadget& g) {
  return from_gadget(g, {{"kind", "gadget"}, {"name", g.name}, {"params", g.params}});
}

LinkageDocument make_document(const CompiledLinkage& c) {
  auto doc = from_gadget(c.gadget, c.meta);
  doc.domain = c.domain;
  return doc;
}

LinkageDocument make_document(const RealizedSet& s) {
  auto doc = from_gadget(s.gadget, s.compiled.meta);
  doc.domain = s.compiled.domain;
  return doc;
}

LinkageDocument make_document(const CurveTracer& t) {
  auto doc = from_gadget(t.gadget, t.compiled.meta);
  doc.domain = t.compiled.domain;
  return doc;
}

json to_json(const LinkageDocument& doc) {
  json vertices = json::array();
  for (const auto& [id, anchor] : doc.linkage.vertices()) {
    vertices.push_back({{"id", id}, {"fixed", anchor ? point_json(*anchor) : json(nullptr)}});
  }
  json edges = json::array();
  for (const auto& [k, e] : doc.linkage.edges()) {
    edges.push_back({{"u", k.first}, {"v", k.second}, {"length", e.length}, {"kind", to_string(e.kind)}});
  }
  return {{"vertices", vertices}, {"edges", edges},          {"inputs", doc.inputs},
          {"outputs", doc.outputs}, {"domain", domain_to(doc.domain)}, {"meta", doc.meta}};
}

LinkageDocument document_from_json(const json& j) {
  LinkageDocument doc;
  try {
    for (const auto& v : j.at("vertices")) {
      const auto& f = v.at("fixed");
      doc.linkage.add_vertex(v.at("id").get<std::string>(),
                             f.is_null() ? std::nullopt : std::optional<PlanePoint>(point_from(f)));
    }
    for (const auto& e : j.at("edges")) {
      const auto kind = e.at("kind").get<std::string>();
      if (kind != "rigid" && kind != "cable") throw FormatError("unknown edge kind " + kind);
      const auto u = e.at("u").get<std::string>(), v = e.at("v").get<std::string>();
      if (!doc.linkage.has_vertex(u) || !doc.linkage.has_vertex(v)) {
        throw FormatError("edge " + u + "-" + v + " uses an undeclared vertex");
      }
      doc.linkage.add_edge(u, v, e.at("length").get<double>(), kind == "cable" ? EdgeKind::kCable : EdgeKind::kRigid);
    }
    doc.inputs = j.at("inputs").get<std::vector<VertexId>>();
    doc.outputs = j.at("outputs").get<std::vector<VertexId>>();
    doc.domain = domain_from(j.at("domain"));
    doc.meta = j.value("meta", json::object());
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed linkage document: ") + e.what());
  }
  for (const auto& v : doc.inputs) {
    if (!doc.linkage.has_vertex(v)) throw FormatError("input " + v + " is not a vertex");
  }
  for (const auto& v : doc.outputs) {
    if (!doc.linkage.has_vertex(v)) throw FormatError("output " + v + " is not a vertex");
  }
  if (doc.domain.arity() != doc.inputs.size()) throw FormatError("domain needs one disc per input");
  return doc;
}

std::string dump_canonical(const LinkageDocument& doc) { return to_json(doc).dump(2) + "\n"; }

void write_document(const std::string& path, const LinkageDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << dump_canonical(doc);
  if (!out) throw FormatError("write failed for " + path);
}

LinkageDocument read_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return document_from_json(j);
}

Rebuilt rebuild(const LinkageDocument& doc) {
  Rebuilt out;
  const json& m = doc.meta;
  out.kind = m.value("kind", std::string{});
  try {
    if (out.kind == "compiled" || out.kind == "realized" || out.kind == "curve") {
      const Mode mode = parse_mode(m.at("mode").get<std::string>());
      if (out.kind == "curve") {
        const auto interval = m.at("interval");
        out.curve = curve_tracer(poly_from_json(m.at("alpha_dag")), interval.at(0).get<double>(),
                                 interval.at(1).get<double>(), mode);
        out.gadget = out.curve->gadget;
      } else if (out.kind == "realized") {
        out.realized = realize_set(poly_from_json(m.at("dag")), m.at("equalities").get<int>(),
                                   domain_from(m.at("region")), mode, m.at("seed").get<unsigned>());
        out.gadget = out.realized->gadget;
      } else {
        out.compiled = compile(poly_from_json(m.at("dag")), domain_from(m.at("region")), mode);
        out.gadget = out.compiled->gadget;
      }
    } else if (out.kind == "gadget") {
      out.gadget = gadget_from_params(m.at("name").get<std::string>(), m.at("params"));
    } else {
      throw FormatError("meta.kind must be compiled, realized, curve or gadget");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed meta: ") + e.what());
  }
  const Domain expected_domain = out.kind == "gadget" ? out.gadget.domain : domain_from(m.at("region"));
  if (!(out.gadget.linkage == doc.linkage)) throw FormatError("linkage does not match the one its meta describes");
  if (out.gadget.inputs != doc.inputs || out.gadget.outputs != doc.outputs) {
    throw FormatError("inputs or outputs do not match the meta");
  }
  if (!same_domain(expected_domain, doc.domain)) throw FormatError("domain does not match the meta");
  return out;
}

Domain parse_domain(const std::string& text) {
  Domain d;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    const std::string item = text.substr(start, end - start);
    const std::size_t colon = item.rfind(':');
    if (colon == std::string::npos) throw FormatError("domain disc needs center:radius, got '" + item + "'");
    Disc disc;
    try {
      disc.center = parse_complex(item.substr(0, colon));
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
    const std::string rad = item.substr(colon + 1);
    auto res = std::from_chars(rad.data(), rad.data() + rad.size(), disc.radius);
    if (res.ec != std::errc{} || res.ptr != rad.data() + rad.size() || !(disc.radius > 0.0) ||
        !std::isfinite(disc.radius)) {
      throw FormatError("domain radius must be a positive number, got '" + rad + "'");
    }
    d.discs.push_back(disc);
    start = end + 1;
  }
  return d;
}

std::string format_domain(const Domain& d) {
  std::string out;
  for (const auto& disc : d.discs) {
    if (!out.empty()) out += ';';
    out += format_complex(disc.center) + ":" + format_number(disc.radius);
  }
  return out;
}

std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "theta,param,out_re,out_im\n";
  for (const auto& s : trace.samples) {
    os << format_number(s.theta) << ',' << format_number(s.param) << ',' << format_number(s.output.real()) << ','
       << format_number(s.output.imag()) << '\n';
  }
}

void write_degree_csv(std::ostream& os, std::span<const DegreeSample> samples) {
  os << "re,im,degree\n";
  for (const auto& s : samples) {
    os << format_number(s.point.real()) << ',' << format_number(s.point.imag()) << ',' << format_number(s.degree)
       << '\n';
  }
}

void write_svg(std::ostream& os, const LinkageDocument& doc, const Configuration& phi,
               std::span<const PlanePoint> overlay, const SvgOptions& opts) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  auto grow = [&](PlanePoint p) {
    x0 = std::min(x0, p.real());
    x1 = std::max(x1, p.real());
    y0 = std::min(y0, p.imag());
    y1 = std::max(y1, p.imag());
  };
  for (const auto& [id, _] : doc.linkage.vertices()) grow(phi.at(id));
  for (const auto& p : overlay) grow(p);
  if (x0 > x1) x0 = y0 = -1.0, x1 = y1 = 1.0;
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double margin = 0.05 * span;
  const double scale = std::min(opts.width, opts.height) / (span + 2.0 * margin);
  auto sx = [&](PlanePoint p) { return (p.real() - x0 + margin) * scale; };
  auto sy = [&](PlanePoint p) { return (y1 - p.imag() + margin) * scale; };
  const double mark = std::max(2.0, 0.006 * std::min(opts.width, opts.height));

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\"" << opts.height
     << "\" viewBox=\"0 0 " << opts.width << ' ' << opts.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& [k, e] : doc.linkage.edges()) {
    const PlanePoint a = phi.at(e.u), b = phi.at(e.v);
    os << "<line x1=\"" << sx(a) << "\" y1=\"" << sy(a) << "\" x2=\"" << sx(b) << "\" y2=\"" << sy(b)
       << "\" stroke=\"" << (e.kind == EdgeKind::kCable ? "#b04a00\" stroke-dasharray=\"6 4" : "#333")
       << "\" stroke-width=\"1\"/>\n";
  }
  if (overlay.size() > 1) {
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : overlay) os << sx(p) << ',' << sy(p) << ' ';
    os << "\"/>\n";
  }
  for (const auto& [id, anchor] : doc.linkage.vertices()) {
    const PlanePoint p = phi.at(id);
    const bool input = std::find(doc.inputs.begin(), doc.inputs.end(), id) != doc.inputs.end();
    const bool output = std::find(doc.outputs.begin(), doc.outputs.end(), id) != doc.outputs.end();
    if (anchor) {
      os << "<rect x=\"" << sx(p) - mark << "\" y=\"" << sy(p) - mark << "\" width=\"" << 2 * mark << "\" height=\""
         << 2 * mark << "\" fill=\"black\"><title>" << id << "</title></rect>\n";
    }
    if (input) {
      os << "<circle cx=\"" << sx(p) << "\" cy=\"" << sy(p) << "\" r=\"" << 1.6 * mark
         << "\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2\"><title>" << id << "</title></circle>\n";
    }
    if (output) {
      const double d = 2.0 * mark;
      os << "<polygon points=\"" << sx(p) << ',' << sy(p) - d << ' ' << sx(p) + d << ',' << sy(p) << ' ' << sx(p)
         << ',' << sy(p) + d << ' ' << sx(p) - d << ',' << sy(p)
         << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"><title>" << id << "</title></polygon>\n";
    }
    if (!anchor && !input && !output) {
      os << "<circle cx=\"" << sx(p) << "\" cy=\"" << sy(p) << "\" r=\"" << 0.6 * mark << "\" fill=\"#555\"/>\n";
    }
  }
  os << "</svg>\n";
}

}  // namespace linkc
