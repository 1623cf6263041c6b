#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linkc/gadget.hpp"

namespace linkc {

/// Elbow of a two-bar with root z1, arms a (root to elbow) and b (elbow to
/// tip), tip at z. sign selects the side of the root-tip line. nullopt when
/// the tip is outside the closed annulus a-b <= |z-z1| <= a+b.
std::optional<PlanePoint> two_bar_elbow(PlanePoint z, PlanePoint z1, double a, double b, int sign);

struct TwoBarOptions {
  /// Direction of the elbow tether (cabled only); |w0| = 1.
  PlanePoint w0{1.0, 0.0};
  /// Tip tether length; 0 selects b/2. Must be < b.
  double d = 0.0;
};

/// Identity gadget on the tip C of a two-bar rooted at A = z1 with elbow B.
/// Classical: domain disc radius b/2 around z1 + a*w0. Cabled: elbow tethered by
/// a cable sqrt(2)*a to z1 + a*w0 and tip by a cable d to z1 + i*a*w0, which is
/// also the domain.
FunctionalGadget two_bar(double a, double b, PlanePoint z1, bool cabled, const TwoBarOptions& opts = {},
                         const std::string& prefix = "");

/// Plain rhombus on A, B, C, D with cycle A-B-D-C-A, A fixed at 0 and B at side.
Linkage plain_square(double side, const std::string& prefix = "");

/// The square above with middle joints on AC and BD and a brace of length side
/// between them. With stiffen, every middle joint also gets a truss vertex.
Linkage rigidified_square(double side, bool stiffen = false, const std::string& prefix = "");

/// Truss lengths (c, e) that stiffen a joint at distance a along a rod of
/// length b using a post of height d: c^2 = a^2 + d^2, e^2 = d^2 + (b-a)^2.
std::pair<double, double> truss_lengths(double a, double b, double d);

/// Adds rigid sides p0p1, p1p2, p2p3, p3p0 of a parallelogram (cycle order,
/// p2 = p1 + p3 - p0) plus middle joints on p0p1 and p2p3 joined by a brace.
/// Returns the ids of the two middle joints.
std::pair<VertexId, VertexId> add_braced_parallelogram(Linkage& l, const VertexId& p0, const VertexId& p1,
                                                       const VertexId& p2, const VertexId& p3, double len01,
                                                       double len12, const std::string& tag, bool stiffen = false);

/// z -> z + shift on the disc `domain`. Two-bar plus rigidified parallelograms;
/// shift == 0 degenerates to the two-bar alone.
FunctionalGadget translation_gadget(PlanePoint shift, const Disc& domain, bool cabled, const std::string& prefix = "");

/// Pantograph computing z -> lambda * z on a disc of radius r whose centre is
/// chosen by the construction (see FunctionalGadget::domain). lambda not in {0, 1}.
FunctionalGadget pantograph_gadget(double lambda, double r, bool cabled, const std::string& prefix = "");

/// z -> lambda * z on `domain`: pantograph sandwiched between translations.
FunctionalGadget scalar_mult_gadget(double lambda, const Disc& domain, bool cabled, const std::string& prefix = "");

/// (z, w) -> (z + w)/2 on disc(P, r) x disc(-P, r); P is reported as
/// domain.discs[0].center.
FunctionalGadget average_gadget(double r, bool cabled, const std::string& prefix = "");

struct InversionOptions {
  /// Rhombus/arm lengths; 0 selects the defaults a = 5t/3, b = 4t/3, c = t.
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  /// Inversion centre (vertex A is fixed here).
  PlanePoint center{};
};

/// z -> center + t^2 / conj(z - center) on the disc |z - center - z0| <= r with
/// |z0| = t and r <= t/2. Classical: Peaucellier cell with guard vertex F, four
/// branches. Cabled: guard replaced by cable DE of length 2c, C and D tethered.
FunctionalGadget inversion_gadget(double t, PlanePoint z0, double r, bool cabled, const InversionOptions& opts = {},
                                  const std::string& prefix = "");

/// A linkage whose output vertex traces a real segment [lo, hi].
struct StraightLine {
  Linkage linkage;
  VertexId output;
  double x0 = 0.0;
  double c = 0.0;
  bool cabled = false;
  double lo = 0.0;
  double hi = 0.0;
  int sign_count = 0;
  /// The inversion cell whose input is pinned to the circle.
  FunctionalGadget cell;
  VertexId pin;        // extra fixed vertex at z0 + i*c
  PlanePoint z0;       // inversion centre x0 - 2ci

  /// Configuration with the output at x (real) for the given cell signs;
  /// nullopt if infeasible within tol.
  std::optional<Configuration> configure(double x, std::span<const int> signs, double tol = kDefaultTolerance) const;
  /// Input of the cell (a point of the circle) for output x.
  PlanePoint cell_input(double x) const;
};

/// Straight-line linkage with inversion radius 2c. Classical uses guard length
/// `guard` (0 selects c); cabled traces [x0 - 2c/sqrt(3), x0 + 2c/sqrt(3)].
StraightLine straight_line_gadget(double x0, double c, bool cabled, double guard = 0.0,
                                  const std::string& prefix = "");

/// z -> conj(z) on the disc |z - 8ri| <= r: two straight lines on [4r, 8r] and
/// [-8r, -4r] joined by a rigidified rhombus of side 10r.
FunctionalGadget conjugation_gadget(double r, bool cabled, const std::string& prefix = "");

/// Fixed output vertex at z0, no inputs.
FunctionalGadget constant_gadget(PlanePoint z0, const std::string& prefix = "");

/// n free input vertices; outputs are inputs[keep[i]].
FunctionalGadget projection_gadget(int n, const std::vector<int>& keep, const std::string& prefix = "");

/// Identity on `domain` with a single vertex (input = output), no stages.
FunctionalGadget identity_gadget(const Disc& domain, const std::string& prefix = "");

}  // namespace linkc
