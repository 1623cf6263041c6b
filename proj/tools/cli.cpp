#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "linkc/compiler.hpp"
#include "linkc/io.hpp"
#include "linkc/solver.hpp"

namespace linkc::cli {

namespace {

// Bad flag values detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<PlanePoint> parse_inputs(const std::string& text) {
  std::vector<PlanePoint> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_complex(item));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--input: ") + e.what());
    }
  }
  if (out.empty()) throw UsageError("--input needs at least one complex number");
  return out;
}

std::string format_tuple(std::span<const PlanePoint> z) {
  std::string s;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i) s += ",";
    s += format_complex_rounded(z[i]);
  }
  return s;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw LinkageError("cannot write " + path);
  f << text;
}

PlanePoint sample_disc(const Disc& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return d.center + d.radius * std::sqrt(unit(rng)) * std::polar(1.0, 2.0 * std::numbers::pi * unit(rng));
}

// Expression values expected at an input, when the document has an oracle.
std::optional<std::vector<PlanePoint>> oracle(const Rebuilt& r, const LinkageDocument& doc,
                                              std::span<const PlanePoint> z) {
  if (r.kind == "compiled") return poly_from_json(doc.meta.at("dag")).eval(z);
  if (r.kind == "curve") {
    const PlanePoint t{2.0 * z[0].real(), 0.0};
    return poly_from_json(doc.meta.at("alpha_dag")).eval(std::vector<PlanePoint>{t});
  }
  return std::nullopt;
}

struct Options {
  std::string poly;
  std::string domain;
  std::string mode = "cabled";
  std::string input;
  int steps = 360;
  double tol = kDefaultTolerance;
  int samples = 1000;
  std::string output;
  std::string file;
  std::string trace_interval;
  int equalities = -1;
  std::string svg;
  std::string overlay;
  double side = 1.0;
};

int cmd_compile(const Options& o, std::ostream& out) {
  const Mode mode = [&] {
    try {
      return parse_mode(o.mode);
    } catch (const LinkageError& e) {
      throw UsageError(e.what());
    }
  }();
  LinkageDocument doc;
  if (!o.trace_interval.empty()) {
    if (!o.domain.empty()) throw UsageError("--trace-interval and --domain are exclusive");
    const auto colon = o.trace_interval.find(':');
    if (colon == std::string::npos) throw UsageError("--trace-interval needs a:b");
    double a = 0.0, b = 0.0;
    try {
      a = std::stod(o.trace_interval.substr(0, colon));
      b = std::stod(o.trace_interval.substr(colon + 1));
    } catch (const std::exception&) {
      throw UsageError("--trace-interval needs two numbers a:b");
    }
    if (!(a < b)) throw UsageError("--trace-interval needs a < b");
    if (infer_arity(o.poly) > 1) throw UsageError("a curve is an expression in z1 only");
    PolyExpr alpha(1);
    try {
      alpha = parse_poly(o.poly, 1);
    } catch (const PolyParseError& e) {
      throw UsageError(std::string("--poly: ") + e.what());
    }
    if (alpha.outputs.size() != 1) throw UsageError("a curve has exactly one component");
    doc = make_document(curve_tracer(alpha, a, b, mode));
  } else {
    if (o.domain.empty()) throw UsageError("compile needs --domain (or --trace-interval)");
    Domain region;
    try {
      region = parse_domain(o.domain);
    } catch (const FormatError& e) {
      throw UsageError(std::string("--domain: ") + e.what());
    }
    const int arity = static_cast<int>(region.arity());
    if (infer_arity(o.poly) > arity) {
      throw UsageError("--poly uses z" + std::to_string(infer_arity(o.poly)) + " but --domain has " +
                       std::to_string(arity) + " disc(s)");
    }
    PolyExpr expr;
    try {
      expr = parse_poly(o.poly, arity);
    } catch (const PolyParseError& e) {
      throw UsageError(std::string("--poly: ") + e.what());
    }
    if (o.equalities >= 0) {
      if (o.equalities > static_cast<int>(expr.outputs.size())) {
        throw UsageError("--equalities exceeds the number of components");
      }
      if (mode == Mode::kClassical && o.equalities < static_cast<int>(expr.outputs.size())) {
        throw UsageError("inequalities need --mode cabled");
      }
      doc = make_document(realize_set(expr, o.equalities, region, mode, seed_from_env()));
    } else {
      doc = make_document(compile(expr, region, mode));
    }
  }
  write_text(o.output, dump_canonical(doc), out);
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  const auto z = parse_inputs(o.input);
  const auto doc = read_document(o.file);
  if (z.size() != doc.inputs.size()) {
    throw UsageError("--input has " + std::to_string(z.size()) + " value(s), linkage has " +
                     std::to_string(doc.inputs.size()) + " input(s)");
  }
  const auto r = rebuild(doc);
  if (r.realized) {
    auto phi = r.realized->realize(z, o.tol);
    if (!phi) {
      err << "input is not in the realized set\n";
      return 1;
    }
    out << format_tuple(r.gadget.output_of(*phi)) << "\n";
    return 0;
  }
  if (!r.gadget.in_domain(z)) {
    err << "input outside the restricted domain " << format_domain(doc.domain) << "\n";
    return 1;
  }
  const auto report = enumerate_configs(r.gadget, z, o.tol, 64);
  if (report.size() == 0) {
    err << "no configuration within tolerance " << o.tol << "\n";
    return 1;
  }
  for (const auto& phi : report.configurations) out << format_tuple(r.gadget.output_of(phi)) << "\n";
  if (report.degree > static_cast<double>(report.size())) {
    err << "listed " << report.size() << " of " << report.degree << " branches\n";
  }
  return 0;
}

int cmd_trace(const Options& o, std::ostream& out) {
  if (o.steps < 2) throw UsageError("--steps must be at least 2");
  const auto doc = read_document(o.file);
  const auto r = rebuild(doc);
  if (!r.curve) throw UsageError("trace needs a linkage compiled with --trace-interval");
  const Trace trace = trace_curve(*r.curve, o.steps, o.tol);
  std::ostringstream csv;
  write_trace_csv(csv, trace);
  write_text(o.output, csv.str(), out);
  if (!o.svg.empty()) {
    const std::vector<PlanePoint> in{r.curve->input_at(0.0)};
    const auto signs = first_feasible_signs(r.gadget, in, o.tol);
    if (!signs) throw LinkageError("no configuration at theta = 0");
    std::ofstream f(o.svg);
    write_svg(f, doc, *r.gadget.witness(in, *signs, o.tol), trace.outputs());
  }
  return 0;
}

int cmd_verify(const Options& o, std::ostream& out) {
  if (o.samples < 1) throw UsageError("--samples must be positive");
  const auto doc = read_document(o.file);
  bool pass = true;
  auto line = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    pass = pass && ok;
  };
  std::optional<Rebuilt> r;
  try {
    r = rebuild(doc);
    line("rebuild", true,
         "kind " + r->kind + ", " + std::to_string(doc.linkage.vertex_count()) + " vertices, " +
             std::to_string(doc.linkage.edge_count()) + " edges");
  } catch (const LinkageError& e) {
    line("rebuild", false, e.what());
    out << "FAIL overall\n";
    return 1;
  }
  const std::string canon = dump_canonical(doc);
  line("canonical", dump_canonical(document_from_json(nlohmann::json::parse(canon))) == canon,
       "write/read round trip is byte-stable");

  const bool strong = doc.meta.value("mode", std::string(r->gadget.strong ? "cabled" : "classical")) == "cabled";
  std::mt19937_64 rng(seed_from_env());
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double max_res = 0.0, max_err = 0.0, min_deg = 1e300, max_deg = 0.0;
  int unsolved = 0, bad_degree = 0, members = 0, bad_members = 0;
  for (int s = 0; s < o.samples; ++s) {
    std::vector<PlanePoint> z;
    if (r->curve) {
      z.push_back(r->curve->input_at(angle(rng)));
    } else {
      for (const auto& d : doc.domain.discs) z.push_back(sample_disc(d, rng));
    }
    if (r->realized) {
      auto phi = r->realized->realize(z, o.tol);
      if (!phi) continue;
      ++members;
      max_res = std::max(max_res, residual(r->gadget.linkage, *phi));
      const auto g = poly_from_json(doc.meta.at("dag")).eval(z);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const bool eq = static_cast<int>(i) < r->realized->equalities;
        if (eq ? std::abs(g[i]) > 1e-6 : g[i].real() < -1e-6) ++bad_members;
      }
      continue;
    }
    const BranchTable table = branch_table(r->gadget, z, o.tol);
    const double deg = table.count();
    min_deg = std::min(min_deg, deg);
    max_deg = std::max(max_deg, deg);
    if (strong ? deg != 1.0 : (deg < 1.0 || (std::fmod(deg, 2.0) != 0.0 && !table.collisions))) ++bad_degree;
    const auto signs = first_feasible_signs(r->gadget, z, o.tol);
    const auto phi = signs ? r->gadget.witness(z, *signs, o.tol) : std::nullopt;
    if (!phi) {
      ++unsolved;
      continue;
    }
    max_res = std::max(max_res, residual(r->gadget.linkage, *phi));
    if (auto expect = oracle(*r, doc, z)) {
      const auto got = r->gadget.output_of(*phi);
      for (std::size_t i = 0; i < got.size(); ++i) {
        max_err = std::max(max_err, std::abs(got[i] - (*expect)[i]) / (1.0 + std::abs((*expect)[i])));
      }
    }
  }
  std::ostringstream d;
  if (r->realized) {
    d << members << " of " << o.samples << " samples in the set, " << bad_members << " violate the conditions";
    line("membership", bad_members == 0, d.str());
  } else {
    d << o.samples - unsolved << " of " << o.samples << " samples solved";
    line("witness", unsolved == 0, d.str());
    d.str("");
    d << "min " << min_deg << ", max " << max_deg << (strong ? " (strong: expect 1)" : " (classical: expect even)");
    line("degree", bad_degree == 0, d.str());
    if (r->kind != "gadget") {
      d.str("");
      d << "max relative error " << max_err;
      line("function", max_err <= 1e-6, d.str());
    }
  }
  d.str("");
  d << "max " << max_res << " (tol " << o.tol << ")";
  line("residual", max_res <= o.tol, d.str());
  out << (pass ? "PASS" : "FAIL") << " overall\n";
  return pass ? 0 : 1;
}

int cmd_probe(const Options& o, std::ostream& out) {
  if (!(o.side > 0.0)) throw UsageError("--side must be positive");
  const auto probe = probe_square_degeneracy(o.side, 50, seed_from_env());
  out << "square side " << o.side << ", " << probe.seeds << " seeds per component\n";
  for (const auto& c : probe.components) {
    out << c.name << ": plain residual " << c.plain_residual << ", rigidified floor " << c.rigid_floor
        << (c.rigid_accepts ? " (realized)" : " (rejected)") << "\n";
    for (const auto& [id, p] : c.representative) out << "  " << id << " = " << format_complex_rounded(p) << "\n";
  }
  out << (probe.ok() ? "rigidified square keeps only the generic component\n"
                     : "rigidified square does not separate the components by 0.1*side\n");
  return 0;
}

std::vector<PlanePoint> read_overlay(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw LinkageError("cannot read " + path);
  std::string header, row;
  std::getline(f, header);
  std::vector<PlanePoint> pts;
  while (std::getline(f, row)) {
    std::vector<std::string> cols;
    std::stringstream ss(row);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (cols.size() < 4) continue;
    pts.emplace_back(std::stod(cols[2]), std::stod(cols[3]));
  }
  return pts;
}

int cmd_svg(const Options& o, std::ostream& out) {
  const auto doc = read_document(o.file);
  const auto r = rebuild(doc);
  std::vector<PlanePoint> z;
  if (!o.input.empty()) {
    z = parse_inputs(o.input);
  } else if (r.curve) {
    z.push_back(r.curve->input_at(0.0));
  } else {
    z = doc.domain.center();
  }
  if (z.size() != doc.inputs.size()) throw UsageError("--input arity does not match the linkage");
  std::optional<Configuration> phi;
  if (r.realized) {
    phi = r.realized->realize(z, o.tol);
  } else if (auto signs = first_feasible_signs(r.gadget, z, o.tol)) {
    phi = r.gadget.witness(z, *signs, o.tol);
  }
  if (!phi) throw LinkageError("no configuration at the chosen input");
  const auto overlay = o.overlay.empty() ? std::vector<PlanePoint>{} : read_overlay(o.overlay);
  std::ostringstream svg;
  write_svg(svg, doc, *phi, overlay);
  write_text(o.output, svg.str(), out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compile polynomial maps into planar linkages and verify them", "linkc"};
  app.require_subcommand(1);
  Options o;

  auto* compile_cmd = app.add_subcommand("compile", "Compile --poly over --domain into linkage JSON");
  compile_cmd->add_option("--poly", o.poly, "Expression(s) in z1..zn, comma separated")->required();
  compile_cmd->add_option("--domain", o.domain, "Discs center:radius separated by ';'");
  compile_cmd->add_option("--mode", o.mode, "classical or cabled")->capture_default_str();
  compile_cmd->add_option("--trace-interval", o.trace_interval, "a:b; compile a curve tracer for alpha on [a, b]");
  compile_cmd->add_option("--equalities", o.equalities,
                          "Realize {g_i = 0 for i < k, g_i >= 0 otherwise} instead of compiling the map");
  compile_cmd->add_option("-o", o.output, "Output path (stdout if omitted)");

  auto* eval_cmd = app.add_subcommand("eval", "Print the outputs of a linkage at --input");
  eval_cmd->add_option("file", o.file, "Linkage JSON")->required();
  eval_cmd->add_option("--input", o.input, "Comma-separated complex inputs")->required();
  eval_cmd->add_option("--tol", o.tol, "Residual tolerance")->capture_default_str();

  auto* trace_cmd = app.add_subcommand("trace", "Trace a curve linkage into CSV");
  trace_cmd->add_option("file", o.file, "Curve linkage JSON")->required();
  trace_cmd->add_option("--steps", o.steps, "Number of samples")->capture_default_str();
  trace_cmd->add_option("--tol", o.tol, "Residual tolerance")->capture_default_str();
  trace_cmd->add_option("-o", o.output, "CSV path (stdout if omitted)");
  trace_cmd->add_option("--svg", o.svg, "Also write an SVG with the trace overlaid");

  auto* verify_cmd = app.add_subcommand("verify", "Check a linkage JSON against its meta");
  verify_cmd->add_option("file", o.file, "Linkage JSON")->required();
  verify_cmd->add_option("--samples", o.samples, "Random inputs to check")->capture_default_str();
  verify_cmd->add_option("--tol", o.tol, "Residual tolerance")->capture_default_str();

  auto* probe_cmd = app.add_subcommand("probe-square", "Report the components of the square linkage");
  probe_cmd->add_option("--side", o.side, "Side length")->capture_default_str();

  auto* svg_cmd = app.add_subcommand("export-svg", "Render a configuration as SVG");
  svg_cmd->add_option("file", o.file, "Linkage JSON")->required();
  svg_cmd->add_option("--input", o.input, "Input position(s); default the domain centre");
  svg_cmd->add_option("--overlay", o.overlay, "Trace CSV drawn as a polyline");
  svg_cmd->add_option("--tol", o.tol, "Residual tolerance")->capture_default_str();
  svg_cmd->add_option("-o", o.output, "SVG path (stdout if omitted)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "linkc: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*compile_cmd) return cmd_compile(o, out);
    if (*eval_cmd) return cmd_eval(o, out, err);
    if (*trace_cmd) return cmd_trace(o, out);
    if (*verify_cmd) return cmd_verify(o, out);
    if (*probe_cmd) return cmd_probe(o, out);
    if (*svg_cmd) return cmd_svg(o, out);
  } catch (const UsageError& e) {
    err << "linkc: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "linkc: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace linkc::cli
