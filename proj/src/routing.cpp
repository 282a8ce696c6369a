#include "destflow/routing.hpp"

#include <cmath>
#include <string>

#include "destflow/error.hpp"
#include "destflow/flux.hpp"
#include "destflow/scheme.hpp"

namespace destflow {

namespace {

struct Traversal {
  double time = 0.0;
  double weight = 0.0;
};

constexpr Traversal kBlocked{kInf, kInf};

// Cell-by-cell trajectory; `density_at(k, elapsed)` returns the total
// density met in cell k when entering it `elapsed` time units after t0.
template <class DensityAt>
Traversal traverse(const Road& road, std::size_t cells, double dx, double t0, const RunningCost& cost,
                   DensityAt&& density_at) {
  const FluxParams p{road.rho_max, road.v_max};
  Traversal tr;
  for (std::size_t k = 0; k < cells; ++k) {
    double omega = 0.0;
    if (!density_at(k, tr.time, omega)) return kBlocked;
    const double v = velocity(omega, p);
    if (!(v > 0.0)) return kBlocked;
    const double dtau = dx / v;
    tr.weight += cost(road.id, t0 + tr.time, omega) * dtau;
    tr.time += dtau;
  }
  return tr;
}

Traversal traverse_frozen(const Road& road, std::span<const double> omega, double dx, double t0,
                          const RunningCost& cost) {
  return traverse(road, omega.size(), dx, t0, cost, [&](std::size_t k, double, double& out) {
    out = omega[k];
    return true;
  });
}

Traversal traverse_spacetime(const Road& road, const DensityHistory& hist, std::size_t n0,
                             const RunningCost& cost) {
  const std::size_t last = hist.num_slices() - 1;
  const std::size_t cells = hist.layout.road_cells[road.id];
  const double t0 = static_cast<double>(n0) * hist.dt;
  Traversal tr = traverse(road, cells, hist.dx, t0, cost, [&](std::size_t k, double elapsed, double& out) {
    const double slots = std::floor(elapsed / hist.dt + 1e-9);
    const std::size_t n = n0 + static_cast<std::size_t>(slots);
    if (n > last) return false;
    out = hist.total(n, road.id, k);
    return true;
  });
  if (n0 > last || tr.time > static_cast<double>(last - n0) * hist.dt * (1.0 + 1e-12)) return kBlocked;
  return tr;
}

// Candidate cost of leaving junction j on road r.
bool better(double candidate, double best) { return candidate < best; }

}  // namespace

std::vector<double> road_profile(const FieldLayout& layout, std::span<const double> field, RoadId r) {
  const std::size_t nd = layout.destinations;
  std::vector<double> out(layout.road_cells[r]);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = cell_total(field.subspan(layout.cell_index(r, k) * nd, nd));
  return out;
}

double travel_time_frozen(const Road& road, std::span<const double> omega, double dx) {
  return traverse_frozen(road, omega, dx, 0.0, RunningCost::unit()).time;
}

double travel_time_spacetime(const Road& road, const DensityHistory& hist, std::size_t n0) {
  return traverse_spacetime(road, hist, n0, RunningCost::unit()).time;
}

WeightSample road_weight(const Road& road, std::span<const double> omega, double dx, double t0,
                         const RunningCost& cost) {
  const Traversal tr = traverse_frozen(road, omega, dx, t0, cost);
  return {road.id, t0, tr.weight, tr.time};
}

WeightSample road_weight(const Road& road, const DensityHistory& hist, std::size_t n0,
                         const RunningCost& cost) {
  const Traversal tr = traverse_spacetime(road, hist, n0, cost);
  return {road.id, static_cast<double>(n0) * hist.dt, tr.weight, tr.time};
}

ValueTable solve_static_values(const Network& n, std::size_t d, std::span<const WeightSample> weights,
                               Behavior mode) {
  ValueTable table;
  table.mode = mode;
  table.destination = d;
  std::vector<double> v(n.num_junctions(), kInf);
  v[n.destinations.at(d)] = 0.0;

  const std::size_t max_sweeps = n.num_junctions() + 1;
  bool changed = true;
  std::size_t sweeps = 0;
  while (changed) {
    if (sweeps++ > max_sweeps)
      throw NumericalError("value iteration for destination " + std::to_string(d + 1) +
                           " did not converge");
    changed = false;
    std::vector<double> next = v;
    for (const auto& j : n.junctions) {
      if (j.kind == JunctionKind::kDestination) continue;
      double best = kInf;
      for (RoadId r : j.out) best = std::min(best, v[n.roads[r].end] + weights[r].weight);
      if (best != next[j.id]) {
        next[j.id] = best;
        changed = true;
      }
    }
    v = std::move(next);
  }
  table.values.push_back(std::move(v));
  return table;
}

std::vector<RoadId> extract_next(const ValueTable& v, const Network& n,
                                 std::span<const WeightSample> weights) {
  std::vector<RoadId> next(n.num_junctions(), kNoRoad);
  for (const auto& j : n.junctions) {
    if (j.kind == JunctionKind::kDestination) continue;
    double best = kInf;
    for (RoadId r : j.out) {  // ascending road id
      const double c = v.at(0, n.roads[r].end) + weights[r].weight;
      if (better(c, best)) {
        best = c;
        next[j.id] = r;
      }
    }
  }
  return next;
}

RouteSolution value_basic(const Network& n, std::size_t d, double dx, const RunningCost& cost) {
  std::vector<WeightSample> w;
  for (const auto& r : n.roads) {
    const auto cells = static_cast<std::size_t>(std::llround(r.length() / dx));
    const std::vector<double> empty(cells, 0.0);
    w.push_back(road_weight(r, empty, dx, 0.0, cost));
  }
  RouteSolution sol;
  sol.values = solve_static_values(n, d, w, Behavior::kBasic);
  sol.next.push_back(extract_next(sol.values, n, w));
  return sol;
}

RouteSolution value_rational(const Network& n, std::size_t d, const FieldLayout& layout,
                             std::span<const double> rho, double dx, double tau,
                             const RunningCost& cost) {
  std::vector<WeightSample> w;
  for (const auto& r : n.roads) w.push_back(road_weight(r, road_profile(layout, rho, r.id), dx, tau, cost));
  RouteSolution sol;
  sol.values = solve_static_values(n, d, w, Behavior::kRational);
  sol.next.push_back(extract_next(sol.values, n, w));
  return sol;
}

std::vector<std::vector<WeightSample>> spacetime_weights(const Network& n, const DensityHistory& hist,
                                                         const RunningCost& cost) {
  std::vector<std::vector<WeightSample>> w(hist.num_slices());
  for (std::size_t t = 0; t < hist.num_slices(); ++t) {
    w[t].reserve(n.num_roads());
    for (const auto& r : n.roads) w[t].push_back(road_weight(r, hist, t, cost));
  }
  return w;
}

RouteSolution value_highly_rational(const Network& n, std::size_t d, const DensityHistory& hist,
                                    const RunningCost& cost, std::size_t max_sweeps) {
  if (hist.num_slices() == 0) throw ValidationError("empty density history");
  if (max_sweeps == 0) max_sweeps = n.num_junctions() + 1;
  const auto weights = spacetime_weights(n, hist, cost);
  const std::size_t last = hist.num_slices() - 1;
  const JunctionId target = n.destinations.at(d);

  RouteSolution sol;
  sol.values.mode = Behavior::kHighlyRational;
  sol.values.destination = d;
  sol.values.values.assign(last + 1, std::vector<double>(n.num_junctions(), kInf));
  sol.next.assign(last + 1, std::vector<RoadId>(n.num_junctions(), kNoRoad));

  // Arrival node of a driver entering road r at node t.
  auto arrival = [&](std::size_t t, RoadId r) -> std::size_t {
    const double tt = weights[t][r].travel_time;
    if (!std::isfinite(tt)) return last + 1;
    const double slots = std::floor(tt / hist.dt + 0.5);
    if (slots > static_cast<double>(last - t)) return last + 1;
    return t + static_cast<std::size_t>(slots);
  };

  for (std::size_t t = last + 1; t-- > 0;) {
    auto& v = sol.values.values[t];
    v[target] = 0.0;
    bool changed = true;
    std::size_t sweeps = 0;
    while (changed) {
      if (sweeps++ > max_sweeps)
        throw NumericalError("highly rational values for destination " + std::to_string(d + 1) +
                             " did not converge at t = " + std::to_string(static_cast<double>(t) * hist.dt));
      changed = false;
      for (const auto& j : n.junctions) {
        if (j.kind == JunctionKind::kDestination) continue;
        double best = kInf;
        RoadId choice = kNoRoad;
        for (RoadId r : j.out) {
          const std::size_t ta = arrival(t, r);
          if (ta > last) continue;
          const double c = sol.values.values[ta][n.roads[r].end] + weights[t][r].weight;
          if (better(c, best)) {
            best = c;
            choice = r;
          }
        }
        if (best != v[j.id]) {
          v[j.id] = best;
          changed = true;
        }
        sol.next[t][j.id] = choice;
      }
    }
  }
  return sol;
}

PolicySlice assemble_policy(const Network& n, std::span<const RouteSolution> per_destination,
                            std::size_t node) {
  PolicySlice slice(n.num_junctions(), per_destination.size());
  for (std::size_t d = 0; d < per_destination.size(); ++d) {
    const auto& next = per_destination[d].next;
    const auto& row = next.size() == 1 ? next.front() : next.at(node);
    for (const auto& j : n.junctions)
      if (j.kind == JunctionKind::kInternal || j.kind == JunctionKind::kOrigin)
        slice.at(j.id, d) = row[j.id];
  }
  return slice;
}

PolicySlice basic_policy(const Network& n, double dx) {
  std::vector<RouteSolution> sols;
  for (std::size_t d = 0; d < n.num_destinations(); ++d)
    sols.push_back(value_basic(n, d, dx, RunningCost::unit()));
  return assemble_policy(n, sols, 0);
}

}  // namespace destflow
