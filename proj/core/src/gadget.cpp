#include "linkc/gadget.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace linkc {

namespace {

const VertexId& renamed(const std::map<VertexId, VertexId>& renames, const VertexId& id) {
  auto it = renames.find(id);
  return it == renames.end() ? id : it->second;
}

std::vector<VertexId> rename_all(const std::map<VertexId, VertexId>& renames, const std::vector<VertexId>& ids) {
  std::vector<VertexId> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(renamed(renames, id));
  return out;
}

PlanePoint lookup(const Configuration& phi, const VertexId& id) {
  auto it = phi.find(id);
  if (it == phi.end()) throw LinkageError("vertex " + id + " has no position yet");
  return it->second;
}

Configuration initial_configuration(const FunctionalGadget& g, std::span<const PlanePoint> input) {
  if (input.size() != g.inputs.size()) {
    throw DomainError("expected " + std::to_string(g.inputs.size()) + " inputs, got " + std::to_string(input.size()));
  }
  Configuration phi;
  for (const auto& [id, anchor] : g.linkage.vertices()) {
    if (anchor) phi[id] = *anchor;
  }
  for (std::size_t i = 0; i < input.size(); ++i) {
    auto [it, inserted] = phi.emplace(g.inputs[i], input[i]);
    if (!inserted && std::abs(it->second - input[i]) > 1e-12 * (1.0 + std::abs(input[i]))) {
      // A duplicated or anchored input must be presented consistently.
      throw DomainError("input " + g.inputs[i] + " is constrained to a different position");
    }
  }
  return phi;
}

bool run_stage(const Stage& stage, Configuration& phi, std::span<const int> signs) {
  std::vector<PlanePoint> reads;
  reads.reserve(stage.reads.size());
  for (const auto& r : stage.reads) reads.push_back(lookup(phi, r));
  auto out = stage.solve(reads, signs);
  if (!out) return false;
  if (out->size() != stage.writes.size()) throw LinkageError("stage " + stage.label + " wrote the wrong number of positions");
  for (std::size_t i = 0; i < out->size(); ++i) {
    if (!is_finite((*out)[i])) return false;
    phi[stage.writes[i]] = (*out)[i];
  }
  return true;
}

std::vector<std::vector<int>> all_sign_vectors(int k) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::vector<int> s(static_cast<std::size_t>(k));
    for (int b = 0; b < k; ++b) s[static_cast<std::size_t>(b)] = (mask >> b) & 1u ? -1 : 1;
    out.push_back(std::move(s));
  }
  return out;
}

Stage rename_stage(const Stage& s, const std::map<VertexId, VertexId>& renames) {
  Stage out = s;
  out.reads = rename_all(renames, s.reads);
  out.writes = rename_all(renames, s.writes);
  out.local = rename_linkage(s.local, renames);
  return out;
}

std::set<VertexId> vertex_set(const Linkage& l) {
  std::set<VertexId> out;
  for (const auto& [id, _] : l.vertices()) out.insert(id);
  return out;
}

// Prefix applied to `part` until none of its vertices (other than `keep`) collides with `taken`.
std::map<VertexId, VertexId> collision_renames(const Linkage& part, const std::set<VertexId>& keep,
                                               const std::set<VertexId>& taken) {
  std::string prefix;
  for (;;) {
    bool clash = false;
    for (const auto& [id, _] : part.vertices()) {
      if (!keep.contains(id) && taken.contains(prefix + id)) {
        clash = true;
        break;
      }
    }
    if (!clash) break;
    prefix += "p.";
  }
  std::map<VertexId, VertexId> renames;
  if (prefix.empty()) return renames;
  for (const auto& [id, _] : part.vertices()) {
    if (!keep.contains(id)) renames[id] = prefix + id;
  }
  return renames;
}

}  // namespace

Linkage rename_linkage(const Linkage& linkage, const std::map<VertexId, VertexId>& renames) {
  if (renames.empty()) return linkage;
  Linkage out;
  for (const auto& [id, anchor] : linkage.vertices()) out.add_vertex(renamed(renames, id), anchor);
  for (const auto& [k, e] : linkage.edges()) {
    const VertexId& a = renamed(renames, e.u);
    const VertexId& b = renamed(renames, e.v);
    if (a == b) throw QuotientForbidden("identification collapses edge " + e.u + "-" + e.v);
    out.add_edge(a, b, e.length, e.kind);
  }
  return out;
}

int FunctionalGadget::branch_count() const {
  return std::accumulate(stages.begin(), stages.end(), 0, [](int acc, const Stage& s) { return acc + s.sign_count; });
}

std::optional<Configuration> FunctionalGadget::evaluate(std::span<const PlanePoint> input,
                                                        std::span<const int> signs) const {
  if (static_cast<int>(signs.size()) != branch_count()) throw LinkageError("sign vector has the wrong length");
  Configuration phi = initial_configuration(*this, input);
  std::size_t offset = 0;
  for (const auto& stage : stages) {
    auto local_signs = signs.subspan(offset, static_cast<std::size_t>(stage.sign_count));
    offset += static_cast<std::size_t>(stage.sign_count);
    if (!run_stage(stage, phi, local_signs)) return std::nullopt;
  }
  if (phi.size() != linkage.vertex_count()) {
    for (const auto& [id, _] : linkage.vertices()) {
      if (!phi.contains(id)) throw LinkageError("gadget " + name + " never positions vertex " + id);
    }
  }
  return phi;
}

std::optional<Configuration> FunctionalGadget::witness(std::span<const PlanePoint> input, std::span<const int> signs,
                                                       double tol) const {
  auto phi = evaluate(input, signs);
  if (!phi) return std::nullopt;
  for (const auto& stage : stages) {
    if (residual(stage.local, *phi) > tol) return std::nullopt;
  }
  return phi;
}

std::vector<PlanePoint> FunctionalGadget::output_of(const Configuration& phi) const {
  std::vector<PlanePoint> out;
  for (const auto& o : outputs) out.push_back(lookup(phi, o));
  return out;
}

std::vector<PlanePoint> FunctionalGadget::input_of(const Configuration& phi) const {
  std::vector<PlanePoint> out;
  for (const auto& i : inputs) out.push_back(lookup(phi, i));
  return out;
}

bool FunctionalGadget::in_domain(std::span<const PlanePoint> input, double slack) const {
  if (!domain.contains(input, slack)) return false;
  if (pullbacks.empty()) return true;
  std::vector<int> signs(static_cast<std::size_t>(branch_count()), 1);
  auto phi = evaluate(input, signs);
  if (!phi) return false;
  for (const auto& c : pullbacks) {
    std::vector<PlanePoint> pts;
    for (const auto& v : c.vertices) pts.push_back(lookup(*phi, v));
    if (!c.domain.contains(pts, slack)) return false;
  }
  return true;
}

double BranchTable::count() const {
  if (!ok) return 0.0;
  double n = 1.0;
  for (const auto& f : feasible) n *= static_cast<double>(f.size());
  return n;
}

BranchTable branch_table(const FunctionalGadget& g, std::span<const PlanePoint> input, double tol) {
  BranchTable table;
  Configuration phi = initial_configuration(g, input);
  std::size_t offset = 0;
  for (const auto& stage : g.stages) {
    table.offsets.push_back(offset);
    offset += static_cast<std::size_t>(stage.sign_count);
    std::vector<std::vector<int>> feasible;
    std::vector<std::vector<PlanePoint>> placed;
    // Attempts overwrite only this stage's writes, so they can run in place.
    for (auto& signs : all_sign_vectors(stage.sign_count)) {
      if (!run_stage(stage, phi, signs)) continue;
      if (residual(stage.local, phi) > tol) continue;
      std::vector<PlanePoint> w;
      for (const auto& v : stage.writes) w.push_back(phi.at(v));
      bool collided = false;
      for (const auto& q : placed) {
        double gap = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) gap = std::max(gap, std::abs(w[i] - q[i]));
        if (gap <= kBranchCollision) collided = true;
        else table.separation = std::min(table.separation, gap);
      }
      if (collided) {
        table.collisions = true;
        continue;
      }
      placed.push_back(std::move(w));
      feasible.push_back(std::move(signs));
    }
    const bool any = !feasible.empty();
    if (any) run_stage(stage, phi, feasible.front());
    table.feasible.push_back(std::move(feasible));
    if (!any) {
      table.ok = false;
      // Later stages cannot be evaluated; record them as empty.
      for (std::size_t i = table.feasible.size(); i < g.stages.size(); ++i) {
        table.offsets.push_back(offset);
        offset += static_cast<std::size_t>(g.stages[i].sign_count);
        table.feasible.emplace_back();
      }
      return table;
    }
  }
  return table;
}

std::optional<std::vector<int>> nearest_signs(const FunctionalGadget& g, std::span<const PlanePoint> input,
                                              const Configuration& previous, double tol) {
  Configuration phi = initial_configuration(g, input);
  std::vector<int> chosen;
  for (const auto& stage : g.stages) {
    std::optional<std::vector<int>> best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (auto& signs : all_sign_vectors(stage.sign_count)) {
      if (!run_stage(stage, phi, signs)) continue;
      if (residual(stage.local, phi) > tol) continue;
      double gap = 0.0;
      for (const auto& w : stage.writes) {
        auto it = previous.find(w);
        if (it != previous.end()) gap = std::max(gap, std::abs(phi.at(w) - it->second));
      }
      if (gap < best_gap) {
        best_gap = gap;
        best = std::move(signs);
      }
    }
    if (!best) return std::nullopt;
    run_stage(stage, phi, *best);
    chosen.insert(chosen.end(), best->begin(), best->end());
  }
  return chosen;
}

FunctionalGadget rename_vertices(const FunctionalGadget& g, const std::map<VertexId, VertexId>& renames) {
  if (renames.empty()) return g;
  FunctionalGadget out = g;
  out.linkage = rename_linkage(g.linkage, renames);
  out.inputs = rename_all(renames, g.inputs);
  out.outputs = rename_all(renames, g.outputs);
  for (auto& c : out.pullbacks) c.vertices = rename_all(renames, c.vertices);
  for (auto& s : out.stages) s = rename_stage(s, renames);
  return out;
}

FunctionalGadget prefix_vertices(const FunctionalGadget& g, const std::string& prefix) {
  std::map<VertexId, VertexId> renames;
  for (const auto& [id, _] : g.linkage.vertices()) renames[id] = prefix + id;
  return rename_vertices(g, renames);
}

FunctionalGadget graft(const FunctionalGadget& base, const FunctionalGadget& part, const std::vector<VertexId>& wiring,
                       std::vector<VertexId>* part_outputs) {
  if (wiring.size() != part.inputs.size()) throw CompositionError("wiring arity does not match part inputs");
  for (const auto& w : wiring) {
    if (!base.linkage.has_vertex(w)) throw CompositionError("wiring names unknown vertex " + w);
  }

  // Duplicated part inputs force identification of the base vertices they read.
  FunctionalGadget b = base;
  std::vector<VertexId> wires = wiring;
  for (std::size_t i = 0; i < part.inputs.size(); ++i) {
    for (std::size_t j = i + 1; j < part.inputs.size(); ++j) {
      if (part.inputs[i] == part.inputs[j] && wires[i] != wires[j]) {
        const VertexId keep = std::min(wires[i], wires[j]);
        const VertexId drop = std::max(wires[i], wires[j]);
        b.linkage = identify_vertices(b.linkage, keep, drop);
        b = rename_vertices(b, {{drop, keep}});
        for (auto& w : wires) {
          if (w == drop) w = keep;
        }
      }
    }
  }

  const std::set<VertexId> part_inputs(part.inputs.begin(), part.inputs.end());
  auto renames = collision_renames(part.linkage, part_inputs, vertex_set(b.linkage));
  for (std::size_t i = 0; i < part.inputs.size(); ++i) renames[part.inputs[i]] = wires[i];
  FunctionalGadget p = rename_vertices(part, renames);

  FunctionalGadget out = b;
  out.linkage = linkage_union(b.linkage, p.linkage);
  out.stages.insert(out.stages.end(), p.stages.begin(), p.stages.end());
  out.pullbacks.push_back(DomainConstraint{p.inputs, p.domain});
  out.pullbacks.insert(out.pullbacks.end(), p.pullbacks.begin(), p.pullbacks.end());
  out.strong = b.strong && p.strong;
  if (part_outputs) *part_outputs = p.outputs;
  return out;
}

FunctionalGadget compose(const FunctionalGadget& first, const FunctionalGadget& second) {
  if (first.outputs.size() != second.inputs.size()) {
    throw CompositionError("cannot compose " + first.name + " (" + std::to_string(first.outputs.size()) +
                           " outputs) with " + second.name + " (" + std::to_string(second.inputs.size()) + " inputs)");
  }
  // Nonemptiness of U ∩ f^-1(U') is certified at the centre of U.
  const auto centre = first.domain.center();
  std::vector<int> signs(static_cast<std::size_t>(first.branch_count()), 1);
  const auto phi = first.evaluate(centre, signs);
  if (!phi || !second.domain.contains(first.output_of(*phi), 1e-9)) {
    throw CompositionError("composed domain of " + first.name + " then " + second.name + " is empty at its centre");
  }
  std::vector<VertexId> outs;
  FunctionalGadget out = graft(first, second, first.outputs, &outs);
  out.name = "compose(" + first.name + "," + second.name + ")";
  out.outputs = outs;
  out.params = nlohmann::json::object();
  return out;
}

FunctionalGadget product(const FunctionalGadget& a, const FunctionalGadget& b) {
  auto renames = collision_renames(b.linkage, {}, vertex_set(a.linkage));
  FunctionalGadget bb = rename_vertices(b, renames);
  FunctionalGadget out = a;
  out.name = "product(" + a.name + "," + b.name + ")";
  out.linkage = linkage_union(a.linkage, bb.linkage);
  out.inputs.insert(out.inputs.end(), bb.inputs.begin(), bb.inputs.end());
  out.outputs.insert(out.outputs.end(), bb.outputs.begin(), bb.outputs.end());
  out.domain.discs.insert(out.domain.discs.end(), bb.domain.discs.begin(), bb.domain.discs.end());
  out.pullbacks.insert(out.pullbacks.end(), bb.pullbacks.begin(), bb.pullbacks.end());
  out.stages.insert(out.stages.end(), bb.stages.begin(), bb.stages.end());
  out.strong = a.strong && b.strong;
  out.params = nlohmann::json::object();
  return out;
}

FunctionalGadget pair_with_identity(const FunctionalGadget& g) {
  FunctionalGadget out = g;
  out.name = "pair(" + g.name + ")";
  out.outputs.insert(out.outputs.end(), g.inputs.begin(), g.inputs.end());
  return out;
}

FunctionalGadget rescale_gadget(const FunctionalGadget& g, double factor) {
  if (!(factor > 0.0)) throw LinkageError("rescale factor must be positive");
  FunctionalGadget out = g;
  out.linkage = rescale(g.linkage, factor);
  for (auto& d : out.domain.discs) d = Disc{d.center * factor, d.radius * factor};
  for (auto& c : out.pullbacks) {
    for (auto& d : c.domain.discs) d = Disc{d.center * factor, d.radius * factor};
  }
  for (auto& s : out.stages) {
    s.local = rescale(s.local, factor);
    s.solve = [inner = s.solve, factor](std::span<const PlanePoint> reads,
                                        std::span<const int> signs) -> std::optional<std::vector<PlanePoint>> {
      std::vector<PlanePoint> scaled(reads.begin(), reads.end());
      for (auto& z : scaled) z /= factor;
      auto res = inner(scaled, signs);
      if (res) {
        for (auto& z : *res) z *= factor;
      }
      return res;
    };
  }
  return out;
}

FunctionalGadget constrain(const FunctionalGadget& g, const Linkage& extra, const std::string& label) {
  for (const auto& [id, anchor] : extra.vertices()) {
    if (!g.linkage.has_vertex(id) && !anchor) {
      throw LinkageError("constraint vertex " + id + " is new but not fixed");
    }
  }
  FunctionalGadget out = g;
  out.linkage = linkage_union(g.linkage, extra);
  Stage check;
  check.label = label;
  check.local = extra;
  check.solve = [](std::span<const PlanePoint>, std::span<const int>) -> std::optional<std::vector<PlanePoint>> {
    return std::vector<PlanePoint>{};
  };
  out.stages.push_back(std::move(check));
  return out;
}

}  // namespace linkc
