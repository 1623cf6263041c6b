#include "linkc/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace linkc {

namespace {

constexpr double kAnchorMatch = 1e-12;

bool same_point(PlanePoint a, PlanePoint b) { return std::abs(a - b) <= kAnchorMatch * (1.0 + std::abs(a)); }

bool same_length(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)); }

std::string describe(const Edge& e) {
  std::ostringstream os;
  os << e.u << "-" << e.v << " (" << to_string(e.kind) << ", " << e.length << ")";
  return os.str();
}

}  // namespace

const char* to_string(EdgeKind kind) { return kind == EdgeKind::kRigid ? "rigid" : "cable"; }

void Linkage::add_vertex(const VertexId& id, std::optional<PlanePoint> anchor) {
  if (id.empty()) throw LinkageError("vertex id must be non-empty");
  if (anchor && !is_finite(*anchor)) throw LinkageError("anchor of " + id + " is not finite");
  auto it = vertices_.find(id);
  if (it == vertices_.end()) {
    vertices_.emplace(id, anchor);
    return;
  }
  if (!anchor) return;
  if (!it->second) {
    it->second = anchor;
  } else if (!same_point(*it->second, *anchor)) {
    throw IncompatibleLinkages("conflicting anchors for vertex " + id);
  }
}

void Linkage::add_edge(const VertexId& u, const VertexId& v, double length, EdgeKind kind) {
  if (u == v) throw LinkageError("edge endpoints must differ: " + u);
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw LinkageError("edge " + u + "-" + v + " must have positive finite length");
  }
  if (!has_vertex(u) || !has_vertex(v)) throw LinkageError("edge " + u + "-" + v + " references an undeclared vertex");
  auto k = key(u, v);
  auto it = edges_.find(k);
  if (it != edges_.end()) {
    if (it->second.kind != kind || !same_length(it->second.length, length)) {
      throw IncompatibleLinkages("conflicting parallel edge " + describe(it->second));
    }
    return;
  }
  edges_.emplace(k, Edge{k.first, k.second, length, kind});
}

const Edge* Linkage::find_edge(const VertexId& u, const VertexId& v) const {
  auto it = edges_.find(key(u, v));
  return it == edges_.end() ? nullptr : &it->second;
}

std::optional<PlanePoint> Linkage::anchor(const VertexId& id) const {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) return std::nullopt;
  return it->second;
}

std::size_t Linkage::fixed_count() const {
  return static_cast<std::size_t>(
      std::count_if(vertices_.begin(), vertices_.end(), [](const auto& kv) { return kv.second.has_value(); }));
}

std::vector<VertexId> Linkage::neighbors(const VertexId& id) const {
  std::vector<VertexId> out;
  for (const auto& [k, e] : edges_) {
    if (e.u == id) out.push_back(e.v);
    if (e.v == id) out.push_back(e.u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Linkage::unfix(const VertexId& id) {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) throw LinkageError("unknown vertex " + id);
  it->second.reset();
}

void Linkage::set_anchor(const VertexId& id, PlanePoint anchor) {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) throw LinkageError("unknown vertex " + id);
  it->second = anchor;
}

bool operator==(const Linkage& a, const Linkage& b) {
  if (a.vertices_.size() != b.vertices_.size() || a.edges_.size() != b.edges_.size()) return false;
  for (auto ia = a.vertices_.begin(), ib = b.vertices_.begin(); ia != a.vertices_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.has_value() != ib->second.has_value()) return false;
    if (ia->second && *ia->second != *ib->second) return false;
  }
  for (auto ia = a.edges_.begin(), ib = b.edges_.begin(); ia != a.edges_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.kind != ib->second.kind || ia->second.length != ib->second.length) {
      return false;
    }
  }
  return true;
}

double residual(const Linkage& linkage, const Configuration& phi) {
  double worst = 0.0;
  auto position = [&](const VertexId& id) {
    auto it = phi.find(id);
    if (it == phi.end()) throw MalformedConfiguration("configuration misses vertex " + id);
    if (!is_finite(it->second)) throw MalformedConfiguration("non-finite position for vertex " + id);
    return it->second;
  };
  for (const auto& [id, anchor] : linkage.vertices()) {
    const PlanePoint p = position(id);
    if (anchor) worst = std::max(worst, std::abs(p - *anchor));
  }
  for (const auto& [k, e] : linkage.edges()) {
    const double dist = std::abs(position(e.u) - position(e.v));
    const double gap = dist - e.length;
    worst = std::max(worst, e.kind == EdgeKind::kRigid ? std::abs(gap) : std::max(0.0, gap));
  }
  return worst;
}

Linkage linkage_union(const Linkage& a, const Linkage& b) {
  Linkage out = a;
  for (const auto& [id, anchor] : b.vertices()) out.add_vertex(id, anchor);
  for (const auto& [k, e] : b.edges()) out.add_edge(e.u, e.v, e.length, e.kind);
  return out;
}

Linkage fix_vertices(const Linkage& linkage, const std::map<VertexId, PlanePoint>& anchors) {
  Linkage out = linkage;
  for (const auto& [id, z] : anchors) {
    if (!linkage.has_vertex(id)) throw LinkageError("cannot fix unknown vertex " + id);
    if (linkage.is_fixed(id)) throw LinkageError("vertex " + id + " is already fixed");
    if (!is_finite(z)) throw LinkageError("anchor for " + id + " is not finite");
    out.set_anchor(id, z);
  }
  return out;
}

Linkage tether(const Linkage& linkage, const VertexId& v, PlanePoint anchor_point, double cable,
               VertexId* tether_id) {
  if (!linkage.has_vertex(v)) throw LinkageError("cannot tether unknown vertex " + v);
  if (linkage.is_fixed(v)) throw LinkageError("cannot tether fixed vertex " + v);
  Linkage out = linkage;
  IdFactory ids(v + ".tether");
  const VertexId t = ids.next(out);
  out.add_vertex(t, anchor_point);
  out.add_edge(t, v, cable, EdgeKind::kCable);
  if (tether_id) *tether_id = t;
  return out;
}

Linkage identify_vertices(const Linkage& linkage, const VertexId& v, const VertexId& w) {
  if (!linkage.has_vertex(v) || !linkage.has_vertex(w)) throw LinkageError("identify: unknown vertex");
  if (v == w) return linkage;
  if (linkage.has_edge(v, w)) throw QuotientForbidden("edge " + v + "-" + w + " prevents identification");
  const auto av = linkage.anchor(v);
  const auto aw = linkage.anchor(w);
  if (av && aw && !same_point(*av, *aw)) {
    throw QuotientForbidden("vertices " + v + " and " + w + " are fixed at different points");
  }
  for (const auto& u : linkage.neighbors(w)) {
    const Edge* ev = linkage.find_edge(v, u);
    const Edge* ew = linkage.find_edge(w, u);
    if (ev && (ev->kind != ew->kind || !same_length(ev->length, ew->length))) {
      throw QuotientForbidden("common neighbour " + u + " has different edges to " + v + " and " + w);
    }
  }
  Linkage out;
  for (const auto& [id, anchor] : linkage.vertices()) {
    if (id == w) continue;
    out.add_vertex(id, id == v ? (av ? av : aw) : anchor);
  }
  for (const auto& [k, e] : linkage.edges()) {
    const VertexId a = e.u == w ? v : e.u;
    const VertexId b = e.v == w ? v : e.v;
    out.add_edge(a, b, e.length, e.kind);
  }
  return out;
}

Linkage translate(const Linkage& linkage, PlanePoint z) {
  Linkage out = linkage;
  for (const auto& [id, anchor] : linkage.vertices()) {
    if (anchor) out.set_anchor(id, *anchor + z);
  }
  return out;
}

Linkage rescale(const Linkage& linkage, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw LinkageError("rescale factor must be positive");
  Linkage out;
  for (const auto& [id, anchor] : linkage.vertices()) {
    out.add_vertex(id, anchor ? std::optional<PlanePoint>(*anchor * factor) : std::nullopt);
  }
  for (const auto& [k, e] : linkage.edges()) out.add_edge(e.u, e.v, e.length * factor, e.kind);
  return out;
}

std::vector<std::vector<VertexId>> connected_components(const Linkage& linkage) {
  std::map<VertexId, std::vector<VertexId>> adj;
  for (const auto& [id, _] : linkage.vertices()) adj[id];
  for (const auto& [k, e] : linkage.edges()) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::set<VertexId> seen;
  std::vector<std::vector<VertexId>> comps;
  for (const auto& [root, _] : adj) {
    if (seen.contains(root)) continue;
    std::vector<VertexId> comp;
    std::vector<VertexId> stack{root};
    seen.insert(root);
    while (!stack.empty()) {
      VertexId cur = stack.back();
      stack.pop_back();
      comp.push_back(cur);
      for (const auto& n : adj[cur]) {
        if (seen.insert(n).second) stack.push_back(n);
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

std::pair<Linkage, int> free_component_fix(const Linkage& linkage) {
  Linkage out = linkage;
  int k = 0;
  for (const auto& comp : connected_components(linkage)) {
    const bool anchored = std::any_of(comp.begin(), comp.end(), [&](const VertexId& v) { return linkage.is_fixed(v); });
    if (anchored) continue;
    out.set_anchor(comp.front(), PlanePoint{0.0, 0.0});
    ++k;
  }
  return {out, k};
}

Linkage reduce_to_three_fixed(const Linkage& linkage) {
  const PlanePoint hubs[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  const char* hub_names[3] = {"hub0", "hub1", "hubi"};

  // A vertex already fixed at a hub point becomes (or merges into) that hub.
  Linkage out = linkage;
  VertexId hub_id[3];
  for (int h = 0; h < 3; ++h) {
    std::vector<VertexId> at_hub;
    for (const auto& [id, anchor] : out.vertices()) {
      if (anchor && same_point(*anchor, hubs[h])) at_hub.push_back(id);
    }
    if (at_hub.empty()) {
      IdFactory ids(hub_names[h]);
      hub_id[h] = out.has_vertex(hub_names[h]) ? ids.next(out) : VertexId(hub_names[h]);
      out.add_vertex(hub_id[h], hubs[h]);
    } else {
      hub_id[h] = at_hub.front();
      for (std::size_t i = 1; i < at_hub.size(); ++i) out = identify_vertices(out, hub_id[h], at_hub[i]);
    }
  }
  const std::set<VertexId> hub_set(std::begin(hub_id), std::end(hub_id));
  std::vector<std::pair<VertexId, PlanePoint>> braced;
  for (const auto& [id, anchor] : out.vertices()) {
    if (anchor && !hub_set.contains(id)) braced.emplace_back(id, *anchor);
  }
  for (const auto& [id, z] : braced) {
    out.unfix(id);
    for (int h = 0; h < 3; ++h) out.add_edge(id, hub_id[h], std::abs(z - hubs[h]));
  }
  return out;
}

Configuration restrict_to(const Configuration& phi, const Linkage& sub) {
  Configuration out;
  for (const auto& [id, _] : sub.vertices()) {
    auto it = phi.find(id);
    if (it == phi.end()) throw MalformedConfiguration("configuration misses vertex " + id);
    out.emplace(id, it->second);
  }
  return out;
}

Configuration transform(const Configuration& phi, double factor, PlanePoint shift) {
  Configuration out;
  for (const auto& [id, z] : phi) out.emplace(id, factor * z + shift);
  return out;
}

VertexId IdFactory::next(const Linkage& avoid) {
  for (;;) {
    VertexId id = prefix_ + std::to_string(counter_++);
    if (!avoid.has_vertex(id)) return id;
  }
}

}  // namespace linkc
