#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "linkc/gadget.hpp"
#include "linkc/poly.hpp"

namespace linkc {

enum class Mode { kClassical, kCabled };

const char* to_string(Mode mode);
Mode parse_mode(const std::string& text);

/// A vertex of the compiled linkage together with the disc its position is
/// certified to stay in over the requested region.
struct NodeCertificate {
  VertexId vertex;
  Disc disc;
  std::string op;
};

struct CompiledLinkage {
  FunctionalGadget gadget;
  Mode mode = Mode::kCabled;
  /// Covering degree over interior inputs: 2^(sign count) classical, 1 cabled.
  double degree = 1.0;
  Domain domain;
  std::vector<NodeCertificate> certificates;
  nlohmann::json meta = nlohmann::json::object();
};

/// Lowers the expression to translations, real scalings, averages, inversions
/// and conjugations, then grafts one gadget per elementary operation.
/// Products use zw = ((z+w)^2 - (z-w)^2)/4 and squares use
/// z^2 = t^2 - t*h((h(t+z) + h(t-z))/2) with h(u) = t^2/conj(u).
CompiledLinkage compile(const PolyExpr& expr, const Domain& region, Mode mode);

/// First feasible sign vector at `input` (nullopt if none).
std::optional<std::vector<int>> first_feasible_signs(const FunctionalGadget& g, std::span<const PlanePoint> input,
                                                     double tol = kDefaultTolerance);

/// Linkage whose configurations project onto {z in region : g_i(z) = 0 for
/// i < equalities, g_i(z) >= 0 otherwise}.
struct RealizedSet {
  CompiledLinkage compiled;
  /// Compiled gadget plus the output anchors and tethers (checked as a final stage).
  FunctionalGadget gadget;
  Linkage linkage;
  int equalities = 0;
  double b = 0.0;

  /// Witness configuration over z, or nullopt if z is not in the set.
  std::optional<Configuration> realize(std::span<const PlanePoint> z, double tol = kDefaultTolerance) const;
  bool contains(std::span<const PlanePoint> z, double tol = kDefaultTolerance) const {
    return realize(z, tol).has_value();
  }
};

RealizedSet realize_set(const PolyExpr& g, int equalities, const Domain& region, Mode mode,
                        unsigned seed = 12345);

/// Compiled z -> alpha(z + conj z) on the circle |z - (a+b)/4| = (b-a)/4, with
/// the input held on that circle by a rigid edge from a vertex fixed at its centre.
struct CurveTracer {
  CompiledLinkage compiled;
  FunctionalGadget gadget;
  Linkage linkage;
  VertexId input;
  VertexId output;
  VertexId pivot;
  double a = 0.0;
  double b = 0.0;
  PlanePoint center;
  double radius = 0.0;

  PlanePoint input_at(double theta) const;
};

CurveTracer curve_tracer(const PolyExpr& alpha, double a, double b, Mode mode);

}  // namespace linkc
