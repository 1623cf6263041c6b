#include "linkc/solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <unordered_map>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "linkc/gadgets.hpp"

namespace linkc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Global sign vectors from the per-stage choices, odometer order.
void for_each_branch(const BranchTable& table, std::size_t total_signs, std::size_t limit,
                     const std::function<void(const std::vector<int>&)>& visit) {
  const std::size_t stages = table.feasible.size();
  std::vector<std::size_t> digit(stages, 0);
  std::vector<int> signs(total_signs, 1);
  for (std::size_t produced = 0; produced < limit; ++produced) {
    for (std::size_t s = 0; s < stages; ++s) {
      const auto& choice = table.feasible[s][digit[s]];
      std::copy(choice.begin(), choice.end(), signs.begin() + static_cast<std::ptrdiff_t>(table.offsets[s]));
    }
    visit(signs);
    std::size_t s = stages;
    while (s > 0) {
      --s;
      if (++digit[s] < table.feasible[s].size()) break;
      digit[s] = 0;
      if (s == 0) return;
    }
    if (stages == 0) return;
  }
}

struct Problem {
  std::vector<VertexId> ids;
  std::unordered_map<VertexId, int> slot;  // vertex -> index into ids
  std::vector<int> unknown;                // slot -> unknown index or -1
  int unknowns = 0;
  std::vector<const Edge*> edges;
  std::vector<std::pair<int, int>> ends;
};

Problem make_problem(const Linkage& l, std::span<const VertexId> held) {
  Problem p;
  const std::set<VertexId> hold(held.begin(), held.end());
  for (const auto& [id, anchor] : l.vertices()) {
    const int s = static_cast<int>(p.ids.size());
    p.ids.push_back(id);
    p.slot.emplace(id, s);
    p.unknown.push_back(anchor || hold.contains(id) ? -1 : p.unknowns++);
  }
  for (const auto& [k, e] : l.edges()) {
    p.edges.push_back(&e);
    p.ends.emplace_back(p.slot.at(e.u), p.slot.at(e.v));
  }
  return p;
}

struct Row {
  double value;
  int u;
  int v;
  PlanePoint grad;  // derivative with respect to position u; v gets -grad
};

std::vector<Row> rows_at(const Problem& p, const std::vector<PlanePoint>& x) {
  std::vector<Row> rows;
  rows.reserve(p.edges.size());
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    const auto [u, v] = p.ends[i];
    const PlanePoint d = x[static_cast<std::size_t>(u)] - x[static_cast<std::size_t>(v)];
    const double dist = std::abs(d);
    const double gap = dist - p.edges[i]->length;
    if (p.edges[i]->kind == EdgeKind::kCable && gap <= 0.0) continue;
    rows.push_back({gap, u, v, dist > 0.0 ? d / dist : PlanePoint{1.0, 0.0}});
  }
  return rows;
}

double cost(const std::vector<Row>& rows) {
  double c = 0.0;
  for (const auto& r : rows) c += r.value * r.value;
  return c;
}

double worst(const std::vector<Row>& rows) {
  double w = 0.0;
  for (const auto& r : rows) w = std::max(w, std::abs(r.value));
  return w;
}

Configuration to_configuration(const Problem& p, const std::vector<PlanePoint>& x) {
  Configuration phi;
  for (std::size_t i = 0; i < p.ids.size(); ++i) phi.emplace_hint(phi.end(), p.ids[i], x[i]);
  return phi;
}

double uniform_angle(std::mt19937_64& rng, double max_angle) {
  return std::uniform_real_distribution<double>(-max_angle, max_angle)(rng);
}

}  // namespace

SolveReport enumerate_configs(const FunctionalGadget& g, std::span<const PlanePoint> input, double tol,
                              std::size_t max_listed) {
  if (!g.domain.contains(input)) throw DomainError("input outside the restricted domain of " + g.name);
  SolveReport report;
  const BranchTable table = branch_table(g, input, tol);
  report.separation = table.separation;
  if (!table.ok) return report;
  const double total = table.count();
  const std::size_t limit =
      total > static_cast<double>(max_listed) ? max_listed : static_cast<std::size_t>(total);
  std::size_t rejected = 0;
  for_each_branch(table, static_cast<std::size_t>(g.branch_count()), limit, [&](const std::vector<int>& signs) {
    auto phi = g.witness(input, signs, tol);
    const double res = phi ? residual(g.linkage, *phi) : kInf;
    if (!phi || res > tol) {
      ++rejected;
      return;
    }
    report.configurations.push_back(std::move(*phi));
    report.residuals.push_back(res);
    report.branch_labels.push_back(signs);
    report.converged.push_back(true);
  });
  report.degree = limit == static_cast<std::size_t>(total) ? static_cast<double>(report.size())
                                                            : total - static_cast<double>(rejected);
  return report;
}

NewtonResult newton_solve(const Linkage& linkage, const Configuration& seed, double tol, int max_iter,
                          std::span<const VertexId> held) {
  NewtonResult out;
  out.residual = residual(linkage, seed);
  if (out.residual <= tol) {
    out.configuration = seed;
    out.converged = true;
    return out;
  }
  const Problem p = make_problem(linkage, held);
  std::vector<PlanePoint> x(p.ids.size());
  for (std::size_t i = 0; i < p.ids.size(); ++i) {
    const auto anchor = linkage.anchor(p.ids[i]);
    x[i] = anchor ? *anchor : seed.at(p.ids[i]);
  }
  const int n = 2 * p.unknowns;
  auto rows = rows_at(p, x);
  double f = cost(rows);
  double lambda = 1e-3;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  int it = 0;
  for (; it < max_iter && worst(rows) > tol && n > 0; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(rows.size() * 4);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      const int iu = p.unknown[static_cast<std::size_t>(row.u)];
      const int iv = p.unknown[static_cast<std::size_t>(row.v)];
      const auto rr = static_cast<int>(r);
      if (iu >= 0) {
        trip.emplace_back(rr, 2 * iu, row.grad.real());
        trip.emplace_back(rr, 2 * iu + 1, row.grad.imag());
      }
      if (iv >= 0) {
        trip.emplace_back(rr, 2 * iv, -row.grad.real());
        trip.emplace_back(rr, 2 * iv + 1, -row.grad.imag());
      }
    }
    Eigen::SparseMatrix<double> J(static_cast<int>(rows.size()), n);
    J.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd r(static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) r[static_cast<int>(i)] = rows[i].value;
    const Eigen::SparseMatrix<double> JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;

    bool improved = false;
    while (lambda < 1e12) {
      Eigen::SparseMatrix<double> A = JtJ;
      for (int k = 0; k < n; ++k) A.coeffRef(k, k) += lambda * (1.0 + JtJ.coeff(k, k));
      ldlt.compute(A);
      if (ldlt.info() != Eigen::Success) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd step = ldlt.solve(-g);
      std::vector<PlanePoint> trial = x;
      for (std::size_t i = 0; i < p.ids.size(); ++i) {
        const int k = p.unknown[i];
        if (k >= 0) trial[i] += PlanePoint{step[2 * k], step[2 * k + 1]};
      }
      auto trial_rows = rows_at(p, trial);
      const double tf = cost(trial_rows);
      if (tf < f) {
        x = std::move(trial);
        rows = std::move(trial_rows);
        f = tf;
        lambda = std::max(lambda * 0.2, 1e-12);
        improved = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  out.iterations = it;
  out.configuration = to_configuration(p, x);
  out.residual = residual(linkage, out.configuration);
  out.converged = out.residual <= tol;
  return out;
}

unsigned seed_from_env(unsigned fallback) {
  const char* text = std::getenv("LINKAGE_SEED");
  if (text == nullptr) return fallback;
  unsigned value = 0;
  const char* end = text + std::char_traits<char>::length(text);
  auto res = std::from_chars(text, end, value);
  if (res.ec != std::errc{} || res.ptr != end) return fallback;
  return value;
}

NewtonResult solve_from_random_seeds(const Linkage& linkage, const SolverConfig& config, double tol) {
  PlanePoint centre{};
  int anchors = 0;
  for (const auto& [id, a] : linkage.vertices()) {
    if (a) {
      centre += *a;
      ++anchors;
    }
  }
  if (anchors > 0) centre /= static_cast<double>(anchors);
  double radius = 0.0;
  for (const auto& [id, a] : linkage.vertices()) {
    if (a) radius = std::max(radius, std::abs(*a - centre));
  }
  for (const auto& [k, e] : linkage.edges()) radius += e.length;

  std::mt19937_64 rng(config.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  NewtonResult best;
  best.residual = kInf;
  for (int s = 0; s < config.random_seeds; ++s) {
    Configuration seed;
    for (const auto& [id, a] : linkage.vertices()) {
      if (a) {
        seed[id] = *a;
      } else {
        const double rho = radius * std::sqrt(unit(rng));
        seed[id] = centre + std::polar(rho, 2.0 * std::numbers::pi * unit(rng));
      }
    }
    auto res = newton_solve(linkage, seed, tol);
    if (res.converged) return res;
    if (res.residual < best.residual) best = std::move(res);
  }
  return best;
}

std::vector<PlanePoint> Trace::outputs() const {
  std::vector<PlanePoint> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.output);
  return out;
}

Trace trace_curve(const CurveTracer& tracer, int steps, double tol) {
  if (steps < 2) throw LinkageError("trace needs at least 2 steps");
  const FunctionalGadget& g = tracer.gadget;
  Trace trace;
  std::optional<std::vector<int>> signs;
  std::optional<Configuration> previous;
  double gap_start = -1.0;  // negative: not inside a gap
  const double dtheta = 2.0 * std::numbers::pi / steps;
  for (int k = 0; k < steps; ++k) {
    const double theta = k * dtheta;
    const PlanePoint z = tracer.input_at(theta);
    const std::vector<PlanePoint> in{z};
    std::optional<Configuration> phi;
    bool critical = false;
    if (signs) phi = g.witness(in, *signs, tol);
    if (!phi) {
      const BranchTable table = branch_table(g, in, tol);
      critical = table.collisions || table.separation < kBranchCollision;
      signs = previous ? nearest_signs(g, in, *previous, tol) : first_feasible_signs(g, in, tol);
      if (signs) phi = g.witness(in, *signs, tol);
    }
    if (phi && residual(g.linkage, *phi) > tol) phi.reset();
    if (!phi) {
      if (gap_start < 0.0) gap_start = theta;
      continue;
    }
    if (gap_start >= 0.0) {
      trace.gaps.emplace_back(gap_start, theta);
      gap_start = -1.0;
    }
    TraceSample s;
    s.theta = theta;
    s.param = 2.0 * z.real();
    s.input = z;
    s.output = phi->at(tracer.output);
    s.critical = critical;
    trace.samples.push_back(s);
    previous = std::move(phi);
  }
  if (gap_start >= 0.0) trace.gaps.emplace_back(gap_start, 2.0 * std::numbers::pi);
  return trace;
}

bool SquareProbe::ok(double tol) const {
  if (components.size() != 3) return false;
  for (const auto& c : components) {
    if (c.plain_residual > tol) return false;
  }
  return components[0].rigid_accepts && !components[1].rigid_accepts && !components[2].rigid_accepts &&
         components[1].rigid_floor > 0.1 * side && components[2].rigid_floor > 0.1 * side;
}

SquareProbe probe_square_degeneracy(double side, int seeds, unsigned rng_seed, bool stiffen, double max_angle) {
  const Linkage plain = plain_square(side);
  const Linkage rigid = rigidified_square(side, stiffen);
  const PlanePoint A{0.0, 0.0}, B{side, 0.0};
  // Corner poses on each component. On the two degenerate circles theta = 0
  // is their common point (D = A, C = B) and theta = pi is where the circle
  // meets the generic component, which the brace cannot exclude.
  auto pose = [&](int component, double theta) {
    const PlanePoint u = std::polar(side, theta);
    Configuration phi{{"A", A}, {"B", B}};
    switch (component) {
      case 0:
        phi["C"] = A + u;
        phi["D"] = B + u;
        break;
      case 1:
        phi["D"] = A;
        phi["C"] = A + u;
        break;
      default:
        phi["C"] = B;
        phi["D"] = B - u;
        break;
    }
    return phi;
  };
  static const char* const kNames[] = {"generic rhombus", "D on A, C rotating", "C on B, D rotating"};
  const std::vector<VertexId> corners{"A", "B", "C", "D"};

  SquareProbe probe;
  probe.side = side;
  probe.seeds = seeds;
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> jitter(0.0, 0.1 * side);
  for (int c = 0; c < 3; ++c) {
    SquareComponent comp;
    comp.name = kNames[c];
    comp.representative = pose(c, std::numbers::pi / 3.0);
    comp.plain_residual = residual(plain, comp.representative);
    comp.rigid_floor = kInf;
    for (int s = 0; s < seeds; ++s) {
      Configuration seed = pose(c, uniform_angle(rng, max_angle));
      for (const auto& [id, anchor] : rigid.vertices()) {
        if (seed.contains(id)) continue;
        // Extra joints start near the centroid of the corners plus noise.
        const PlanePoint base = (seed["A"] + seed["B"] + seed["C"] + seed["D"]) / 4.0;
        seed[id] = base + PlanePoint{jitter(rng), jitter(rng)};
      }
      const auto res = newton_solve(rigid, seed, kDefaultTolerance, 500, corners);
      comp.rigid_floor = std::min(comp.rigid_floor, res.residual);
    }
    comp.rigid_accepts = comp.rigid_floor <= kDefaultTolerance;
    probe.components.push_back(std::move(comp));
  }
  return probe;
}

std::vector<DegreeSample> degree_map(const FunctionalGadget& g, std::span<const PlanePoint> points, double tol) {
  if (g.inputs.size() != 1) throw LinkageError("degree_map needs a one-input gadget");
  std::vector<DegreeSample> out;
  out.reserve(points.size());
  for (const auto& z : points) {
    const std::vector<PlanePoint> in{z};
    const BranchTable table = branch_table(g, in, tol);
    out.push_back({z, table.count(), table.separation});
  }
  return out;
}

std::vector<PlanePoint> rect_grid(PlanePoint lo, PlanePoint hi, int nx, int ny) {
  if (nx < 1 || ny < 1) throw LinkageError("grid needs at least one point per axis");
  std::vector<PlanePoint> out;
  out.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j) {
    const double y = ny == 1 ? lo.imag() : lo.imag() + (hi.imag() - lo.imag()) * j / (ny - 1);
    for (int i = 0; i < nx; ++i) {
      const double x = nx == 1 ? lo.real() : lo.real() + (hi.real() - lo.real()) * i / (nx - 1);
      out.emplace_back(x, y);
    }
  }
  return out;
}

std::vector<PlanePoint> radial_grid(PlanePoint center, double rmax, int nr, int nphi) {
  if (nr < 1 || nphi < 1) throw LinkageError("grid needs at least one point per axis");
  std::vector<PlanePoint> out;
  for (int i = 1; i <= nr; ++i) {
    const double rho = rmax * i / nr;
    for (int k = 0; k < nphi; ++k) out.push_back(center + std::polar(rho, 2.0 * std::numbers::pi * k / nphi));
  }
  return out;
}

namespace {

double point_segment(PlanePoint p, PlanePoint a, PlanePoint b) {
  const PlanePoint d = b - a;
  const double n = std::norm(d);
  if (n == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(d)).real() / n, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

double directed(std::span<const PlanePoint> from, std::span<const PlanePoint> to) {
  double h = 0.0;
  for (const auto& p : from) {
    double best = kInf;
    if (to.size() == 1) best = std::abs(p - to[0]);
    for (std::size_t i = 0; i + 1 < to.size(); ++i) best = std::min(best, point_segment(p, to[i], to[i + 1]));
    h = std::max(h, best);
  }
  return h;
}

}  // namespace

double hausdorff_polyline(std::span<const PlanePoint> a, std::span<const PlanePoint> b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 0.0 : kInf;
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace linkc
