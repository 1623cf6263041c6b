#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "linkc/geometry.hpp"

namespace linkc {

using VertexId = std::string;

/// Base class for every error raised by the library.
class LinkageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration does not assign every vertex, or assigns a non-finite point.
class MalformedConfiguration : public LinkageError {
 public:
  using LinkageError::LinkageError;
};

/// Two linkages disagree on a shared vertex or edge.
class IncompatibleLinkages : public LinkageError {
 public:
  using LinkageError::LinkageError;
};

/// Vertex identification violates the quotient preconditions.
class QuotientForbidden : public LinkageError {
 public:
  using LinkageError::LinkageError;
};

enum class EdgeKind { kRigid, kCable };

const char* to_string(EdgeKind kind);

struct Edge {
  VertexId u;
  VertexId v;
  double length = 0.0;
  EdgeKind kind = EdgeKind::kRigid;
};

/// Positions of vertices; a point of C(L) when residual() is zero.
using Configuration = std::map<VertexId, PlanePoint>;

/// A cabled linkage: vertices with optional anchors and rigid/cable edges.
///
/// Edges are keyed by their unordered endpoint pair, so there is at most one
/// edge per pair. Zero and negative lengths are rejected. Adding an edge that
/// duplicates an existing one with the same length and kind is a no-op.
class Linkage {
 public:
  using EdgeKey = std::pair<VertexId, VertexId>;

  Linkage() = default;

  /// Adds a vertex; re-adding an existing id is allowed only with the same anchor.
  void add_vertex(const VertexId& id, std::optional<PlanePoint> anchor = std::nullopt);
  void add_edge(const VertexId& u, const VertexId& v, double length, EdgeKind kind = EdgeKind::kRigid);

  bool has_vertex(const VertexId& id) const { return vertices_.contains(id); }
  bool has_edge(const VertexId& u, const VertexId& v) const { return edges_.contains(key(u, v)); }
  const Edge* find_edge(const VertexId& u, const VertexId& v) const;

  std::optional<PlanePoint> anchor(const VertexId& id) const;
  bool is_fixed(const VertexId& id) const { return anchor(id).has_value(); }

  const std::map<VertexId, std::optional<PlanePoint>>& vertices() const { return vertices_; }
  const std::map<EdgeKey, Edge>& edges() const { return edges_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t fixed_count() const;

  std::vector<VertexId> neighbors(const VertexId& id) const;

  /// Removes the anchor of a fixed vertex (used by reductions that re-anchor).
  void unfix(const VertexId& id);
  void set_anchor(const VertexId& id, PlanePoint anchor);

  static EdgeKey key(const VertexId& u, const VertexId& v) {
    return u < v ? EdgeKey{u, v} : EdgeKey{v, u};
  }

  friend bool operator==(const Linkage& a, const Linkage& b);

 private:
  std::map<VertexId, std::optional<PlanePoint>> vertices_;
  std::map<EdgeKey, Edge> edges_;
};

/// Largest constraint violation of phi on L in plane units:
/// ||phi(u)-phi(v)| - l| for rigid edges, max(0, |phi(u)-phi(v)| - l) for
/// cables, |phi(v) - anchor| for fixed vertices. Zero exactly on C(L).
/// Throws MalformedConfiguration if phi misses a vertex or holds a non-finite point.
double residual(const Linkage& linkage, const Configuration& phi);

/// Graph union. Shared vertices must carry the same anchor and shared edges the
/// same length and kind; otherwise IncompatibleLinkages is thrown.
Linkage linkage_union(const Linkage& a, const Linkage& b);

/// Pins each listed (currently free) vertex at the given point.
Linkage fix_vertices(const Linkage& linkage, const std::map<VertexId, PlanePoint>& anchors);

/// Adds a vertex fixed at `anchor_point` and a cable of length `cable` to v.
/// The new vertex id is returned through `tether_id` when non-null.
Linkage tether(const Linkage& linkage, const VertexId& v, PlanePoint anchor_point, double cable,
               VertexId* tether_id = nullptr);

/// Quotient identifying w into v (v's id survives). Requires no edge vw and
/// equal lengths on edges to common neighbours.
Linkage identify_vertices(const Linkage& linkage, const VertexId& v, const VertexId& w);

/// Shifts every anchor by z.
Linkage translate(const Linkage& linkage, PlanePoint z);

/// Multiplies every edge length and anchor by factor (> 0).
Linkage rescale(const Linkage& linkage, double factor);

/// Fixes the lowest-id vertex of every anchor-free connected component at 0.
/// Returns the new linkage and the number of components fixed.
std::pair<Linkage, int> free_component_fix(const Linkage& linkage);

/// Replaces all anchors by three hub vertices fixed at 0, 1 and i, bracing every
/// formerly fixed vertex to the hubs by its three distances.
Linkage reduce_to_three_fixed(const Linkage& linkage);

/// Restriction of a configuration to the vertices of a sublinkage.
Configuration restrict_to(const Configuration& phi, const Linkage& sub);

/// Applies z -> factor * z + shift to every position.
Configuration transform(const Configuration& phi, double factor, PlanePoint shift = {});

/// Connected components as sorted vertex lists, ordered by their lowest id.
std::vector<std::vector<VertexId>> connected_components(const Linkage& linkage);

/// Deterministic fresh ids: prefix + counter, skipping ids already present.
class IdFactory {
 public:
  explicit IdFactory(std::string prefix) : prefix_(std::move(prefix)) {}
  VertexId next(const Linkage& avoid);

 private:
  std::string prefix_;
  int counter_ = 0;
};

}  // namespace linkc
