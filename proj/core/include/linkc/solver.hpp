#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "linkc/compiler.hpp"
#include "linkc/gadget.hpp"
#include "linkc/linkage.hpp"

namespace linkc {

struct SolveReport {
  std::vector<Configuration> configurations;
  std::vector<double> residuals;
  std::vector<std::vector<int>> branch_labels;
  std::vector<bool> converged;
  /// Number of distinct configurations over the input. Equals
  /// configurations.size() unless the listing was capped.
  double degree = 0.0;
  /// Closest approach of two branches (see BranchTable::separation).
  double separation = 0.0;

  std::size_t size() const { return configurations.size(); }
};

/// All configurations over `input`, one per feasible sign vector, each gated
/// by the residual of the whole linkage. At most `max_listed` are materialized;
/// `degree` still counts all of them. Throws DomainError outside g.domain.
SolveReport enumerate_configs(const FunctionalGadget& g, std::span<const PlanePoint> input,
                              double tol = kDefaultTolerance, std::size_t max_listed = 4096);

struct NewtonResult {
  Configuration configuration;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped least squares (Levenberg-Marquardt) on the rigid edges, anchors and
/// violated cables of L, starting at `seed`. Fixed vertices are held at their
/// anchors; `held` vertices are held at their seed positions.
NewtonResult newton_solve(const Linkage& linkage, const Configuration& seed, double tol = kDefaultTolerance,
                          int max_iter = 200, std::span<const VertexId> held = {});

/// Solver settings recorded with results that depend on them.
struct SolverConfig {
  int random_seeds = 200;
  unsigned rng_seed = 12345;
};

/// rng_seed from LINKAGE_SEED when set and parseable, else `fallback`.
unsigned seed_from_env(unsigned fallback = 12345);

/// Newton from uniform random placements inside the disc around the anchors'
/// centroid whose radius is the anchor spread plus the total edge length.
/// Returns the first converged result, or the lowest-residual failure.
NewtonResult solve_from_random_seeds(const Linkage& linkage, const SolverConfig& config = {},
                                     double tol = kDefaultTolerance);

struct TraceSample {
  double theta = 0.0;
  /// Curve parameter z + conj(z) of the input z.
  double param = 0.0;
  PlanePoint input;
  PlanePoint output;
  /// Two branches came within kBranchCollision of each other here.
  bool critical = false;
};

struct Trace {
  std::vector<TraceSample> samples;
  /// theta intervals over which no configuration was found.
  std::vector<std::pair<double, double>> gaps;

  std::vector<PlanePoint> outputs() const;
};

/// Sweeps theta over [0, 2pi) in `steps` equal steps, placing the input at
/// center + radius * e^(i theta). The previous sign vector is reused while it
/// stays feasible; otherwise each stage takes the feasible choice nearest the
/// previous configuration.
Trace trace_curve(const CurveTracer& tracer, int steps, double tol = kDefaultTolerance);

struct SquareComponent {
  std::string name;
  /// A residual-0 configuration of the plain square on this component.
  Configuration representative;
  double plain_residual = 0.0;
  /// Smallest residual reached by Newton on the rigidified square with the
  /// square's corners held at sampled poses of this component.
  double rigid_floor = 0.0;
  bool rigid_accepts = false;
};

struct SquareProbe {
  double side = 0.0;
  int seeds = 0;
  /// generic rhombus, D on A with C rotating, C on B with D rotating.
  std::vector<SquareComponent> components;

  /// Plain square realizes all three components; rigidified keeps only the first.
  bool ok(double tol = kDefaultTolerance) const;
};

/// Degenerate poses are sampled with the rotating vertex at angle |theta| <=
/// max_angle from the point shared by the two degenerate circles; theta = pi
/// is where each meets the generic circle.
SquareProbe probe_square_degeneracy(double side, int seeds = 50, unsigned rng_seed = 12345, bool stiffen = false,
                                    double max_angle = 3.141592653589793);

struct DegreeSample {
  PlanePoint point;
  double degree = 0.0;
  double separation = 0.0;
};

/// Covering degree of a one-input gadget at each point (restricted domain not
/// enforced, so the image boundary is visible).
std::vector<DegreeSample> degree_map(const FunctionalGadget& g, std::span<const PlanePoint> points,
                                     double tol = kDefaultTolerance);

/// nx * ny points on the closed rectangle [lo, hi].
std::vector<PlanePoint> rect_grid(PlanePoint lo, PlanePoint hi, int nx, int ny);
/// Points center + rho e^(i phi) with rho in (0, rmax] (nr values) and nphi angles.
std::vector<PlanePoint> radial_grid(PlanePoint center, double rmax, int nr, int nphi);

/// Symmetric Hausdorff distance between two polylines (vertex to segment).
double hausdorff_polyline(std::span<const PlanePoint> a, std::span<const PlanePoint> b);

}  // namespace linkc
