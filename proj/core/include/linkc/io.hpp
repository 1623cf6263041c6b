#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "linkc/compiler.hpp"
#include "linkc/gadget.hpp"
#include "linkc/solver.hpp"

namespace linkc {

/// Malformed or inconsistent linkage file.
class FormatError : public LinkageError {
 public:
  using LinkageError::LinkageError;
};

/// The on-disk form of a linkage. `meta` says how to rebuild the witness:
/// kind "compiled", "realized", "curve" or "gadget".
struct LinkageDocument {
  Linkage linkage;
  std::vector<VertexId> inputs;
  std::vector<VertexId> outputs;
  Domain domain;
  nlohmann::json meta = nlohmann::json::object();
};

LinkageDocument make_document(const FunctionalGadget& g);
LinkageDocument make_document(const CompiledLinkage& c);
LinkageDocument make_document(const RealizedSet& s);
LinkageDocument make_document(const CurveTracer& t);

nlohmann::json to_json(const LinkageDocument& doc);
LinkageDocument document_from_json(const nlohmann::json& j);

/// Key-sorted JSON, two-space indent, shortest round-trip numbers, trailing newline.
std::string dump_canonical(const LinkageDocument& doc);

void write_document(const std::string& path, const LinkageDocument& doc);
LinkageDocument read_document(const std::string& path);

/// A document rebuilt from its meta, with the witness available again.
struct Rebuilt {
  std::string kind;
  FunctionalGadget gadget;
  std::optional<CompiledLinkage> compiled;
  std::optional<RealizedSet> realized;
  std::optional<CurveTracer> curve;
};

/// Reconstructs the gadget described by doc.meta and checks that it produces
/// exactly doc's linkage, inputs, outputs and domain; FormatError otherwise.
Rebuilt rebuild(const LinkageDocument& doc);

/// Parses "center:radius;center:radius..." such as "0+0i:1;2i:0.5".
Domain parse_domain(const std::string& text);
std::string format_domain(const Domain& d);

/// Shortest round-trip decimal form of x.
std::string format_number(double x);

/// theta,param,out_re,out_im
void write_trace_csv(std::ostream& os, const Trace& trace);
/// re,im,degree
void write_degree_csv(std::ostream& os, std::span<const DegreeSample> samples);

struct SvgOptions {
  int width = 800;
  int height = 800;
};

/// Renders a configuration: rigid edges solid, cables dashed, fixed vertices
/// as filled squares, inputs as circles, outputs as diamonds, and an optional
/// polyline overlay. The view fits everything with a 5% margin.
void write_svg(std::ostream& os, const LinkageDocument& doc, const Configuration& phi,
               std::span<const PlanePoint> overlay = {}, const SvgOptions& opts = {});

}  // namespace linkc
