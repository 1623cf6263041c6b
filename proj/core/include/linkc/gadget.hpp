#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "linkc/geometry.hpp"
#include "linkc/linkage.hpp"

namespace linkc {

/// Default acceptance tolerance for residuals, in plane units.
inline constexpr double kDefaultTolerance = 1e-9;

/// Branches whose positions agree this closely are treated as one.
inline constexpr double kBranchCollision = 1e-7;

/// Input lies outside a gadget's restricted domain.
class DomainError : public LinkageError {
 public:
  using LinkageError::LinkageError;
};

/// Composition whose domain U ∩ f^-1(U') is empty at the witness point.
class CompositionError : public LinkageError {
 public:
  using LinkageError::LinkageError;
};

/// Closed-form position solver for one building block. Given the positions of
/// `reads` and one sign (+1/-1) per binary branch, returns positions for
/// `writes`, or nullopt when the geometry has no real solution.
using StageSolver =
    std::function<std::optional<std::vector<PlanePoint>>(std::span<const PlanePoint> reads, std::span<const int> signs)>;

struct Stage {
  std::string label;
  std::vector<VertexId> reads;
  std::vector<VertexId> writes;
  int sign_count = 0;
  StageSolver solve;
  /// Constraints this stage is responsible for; the stage is feasible when
  /// its residual on this sublinkage is within tolerance.
  Linkage local;
};

/// Extra domain condition: positions of `vertices` must lie in `domain`.
/// Composition records the second factor's domain this way (U ∩ f^-1(U')).
struct DomainConstraint {
  std::vector<VertexId> vertices;
  Domain domain;
};

/// A linkage with designated inputs and outputs, a restricted domain and a
/// branch-indexed witness. Built by the constructors in gadgets.hpp and
/// combined with compose()/graft()/product().
struct FunctionalGadget {
  std::string name;
  Linkage linkage;
  std::vector<VertexId> inputs;
  std::vector<VertexId> outputs;
  Domain domain;
  std::vector<DomainConstraint> pullbacks;
  bool strong = false;
  std::vector<Stage> stages;
  nlohmann::json params = nlohmann::json::object();

  /// Total number of binary sign choices.
  int branch_count() const;

  /// Domain membership including pullback constraints (requires evaluation).
  bool in_domain(std::span<const PlanePoint> input, double slack = 1e-9) const;

  /// Runs all stages for a sign vector; nullopt if some stage has no real
  /// solution. The result is not residual-checked.
  std::optional<Configuration> evaluate(std::span<const PlanePoint> input, std::span<const int> signs) const;

  /// evaluate() followed by the residual gate: returns the configuration only
  /// if every stage's constraints hold within tol.
  std::optional<Configuration> witness(std::span<const PlanePoint> input, std::span<const int> signs,
                                       double tol = kDefaultTolerance) const;

  /// Output positions of a configuration, in output order.
  std::vector<PlanePoint> output_of(const Configuration& phi) const;
  std::vector<PlanePoint> input_of(const Configuration& phi) const;
};

/// Per-stage feasible local sign choices at one input; the feasible global
/// sign vectors are exactly the products of these (stages only communicate
/// through functional outputs, which do not depend on the branch taken).
struct BranchTable {
  std::vector<std::vector<std::vector<int>>> feasible;  // [stage][choice] -> local signs
  std::vector<std::size_t> offsets;                     // sign offset of each stage
  bool ok = true;                                       // every stage has a feasible choice
  /// Smallest distance between the positions written by two distinct feasible
  /// choices of one stage (infinity when no stage has two).
  double separation = std::numeric_limits<double>::infinity();
  /// Some choices coincided within kBranchCollision and were counted once.
  bool collisions = false;

  /// Number of feasible global sign vectors.
  double count() const;
};

/// Builds the branch table at `input`. Stages are evaluated in order using the
/// first feasible choice of each predecessor. The restricted domain is not
/// checked, so covering degrees can be measured anywhere.
BranchTable branch_table(const FunctionalGadget& g, std::span<const PlanePoint> input, double tol = kDefaultTolerance);

/// Signs whose configuration stays closest to `previous`, chosen stage by
/// stage among the feasible local choices. nullopt if some stage has none.
std::optional<std::vector<int>> nearest_signs(const FunctionalGadget& g, std::span<const PlanePoint> input,
                                              const Configuration& previous, double tol = kDefaultTolerance);

/// Renames vertices (all occurrences in linkage, stages, inputs, outputs, pullbacks).
FunctionalGadget rename_vertices(const FunctionalGadget& g, const std::map<VertexId, VertexId>& renames);

/// Prefixes every vertex id of g.
FunctionalGadget prefix_vertices(const FunctionalGadget& g, const std::string& prefix);

/// Unions `part` into `base`, identifying part.inputs[i] with wiring[i] (a base
/// vertex). Part vertices colliding with base ids are prefixed until unique.
/// Returns the combined gadget (inputs/outputs of base unchanged) and writes the
/// renamed part outputs into `part_outputs`.
FunctionalGadget graft(const FunctionalGadget& base, const FunctionalGadget& part, const std::vector<VertexId>& wiring,
                       std::vector<VertexId>* part_outputs);

/// Functional linkage for second ∘ first with domain U ∩ first^-1(U').
FunctionalGadget compose(const FunctionalGadget& first, const FunctionalGadget& second);

/// Disjoint union: (z, w) -> (f(z), g(w)).
FunctionalGadget product(const FunctionalGadget& a, const FunctionalGadget& b);

/// Outputs re-declared as outputs ++ inputs: z -> (f(z), z).
FunctionalGadget pair_with_identity(const FunctionalGadget& g);

/// Scales lengths and anchors by factor; the stage solvers are conjugated by
/// the scaling so the gadget computes z -> factor * f(z / factor).
FunctionalGadget rescale_gadget(const FunctionalGadget& g, double factor);

/// Unions extra constraints (anchors, tethers, edges among existing or fixed new
/// vertices) into g and adds a check-only stage for them. Every new vertex of
/// `extra` must be fixed.
FunctionalGadget constrain(const FunctionalGadget& g, const Linkage& extra, const std::string& label);

/// Renames vertices of a bare linkage; ids mapped to the same target are
/// identified (merging equal edges, rejecting conflicts and self-loops).
Linkage rename_linkage(const Linkage& linkage, const std::map<VertexId, VertexId>& renames);

}  // namespace linkc
