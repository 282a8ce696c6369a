#include "destflow/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "destflow/error.hpp"
#include "destflow/scheme.hpp"

namespace destflow {

double BoundaryData::density(JunctionId origin, std::size_t d, double t) const {
  double v = 0.0;
  for (const auto& w : inflows)
    if (w.origin == origin && w.destination == d && t >= w.t_on && t < w.t_off) v += w.density;
  return v;
}

NetworkSimulator::NetworkSimulator(const Network& network, const Grid& grid, BoundaryData boundary,
                                   SimulatorOptions options, PolicySlice fallback)
    : network_(network),
      grid_(grid),
      boundary_(std::move(boundary)),
      options_(options),
      fallback_(std::move(fallback)),
      layout_(network, grid) {
  if (options_.steps_per_slab == 0) throw ValidationError("a slab must span at least one step");
  if (grid_.steps % options_.steps_per_slab != 0)
    throw ValidationError("horizon is not a whole number of policy slabs");
  neighbourhood_ = neighbourhood_cells(network_, grid_, options_.delta);
  subnetworks_ = build_subnetworks(network_, grid_, options_.delta);
  interiors_ = interior_ranges(network_, grid_, options_.delta);
  for (std::size_t d = 0; d < network_.num_destinations(); ++d)
    reachable_.push_back(reachable_mask(network_, static_cast<int>(d)));
  for (const auto& w : boundary_.inflows) {
    if (w.origin < 0 || w.origin >= static_cast<JunctionId>(network_.num_junctions()) ||
        network_.junctions[w.origin].kind != JunctionKind::kOrigin)
      throw ValidationError("inflow imposed at a junction that is not an origin");
    if (w.destination >= network_.num_destinations())
      throw ValidationError("inflow names an unknown destination");
    for (RoadId r : network_.junctions[w.origin].out)
      if (!(w.density >= 0.0 && w.density < network_.roads[r].rho_max))
        throw ValidationError("inflow density outside [0, rho_max)");
  }
}

SlabState NetworkSimulator::initial_state() const {
  return state_from_field(std::vector<double>(layout_.size(), 0.0));
}

SlabState NetworkSimulator::state_from_field(std::vector<double> rho) const {
  if (rho.size() != layout_.size()) throw ValidationError("field does not match the network layout");
  SlabState s;
  s.rho = std::move(rho);
  s.junctions.resize(subnetworks_.size());
  s.injected.assign(layout_.destinations, 0.0);
  s.ejected.assign(layout_.destinations, 0.0);
  s.policy = resolve(PolicySlice(network_.num_junctions(), layout_.destinations), fallback_);
  for (std::size_t k = 0; k < subnetworks_.size(); ++k) {
    s.junctions[k].lambda = compute_split_coefficients(subnetworks_[k], layout_, s.rho, grid_.dx);
    rebuild_junction(s, k);
  }
  return s;
}

PolicySlice NetworkSimulator::resolve(const PolicySlice& next, const PolicySlice& previous) const {
  PolicySlice out = next;
  for (const auto& j : network_.junctions) {
    if (j.kind != JunctionKind::kInternal) continue;
    for (std::size_t d = 0; d < layout_.destinations; ++d) {
      if (out.at(j.id, d) != kNoRoad || !reachable_[d][j.id]) continue;
      RoadId r = previous.at(j.id, d);
      if (r == kNoRoad) r = fallback_.at(j.id, d);
      out.at(j.id, d) = r;
    }
  }
  return out;
}

void NetworkSimulator::rebuild_junction(SlabState& state, std::size_t k) const {
  JunctionSystem& js = state.junctions[k];
  js.paths = init_path_densities(network_, subnetworks_[k], layout_, state.rho, js.lambda, state.policy);
  js.rebuild(network_, subnetworks_[k], layout_);
}

void NetworkSimulator::begin_slab(SlabState& state, const PolicySlice& next) const {
  state.policy = resolve(next, state.policy);
  for (std::size_t k = 0; k < subnetworks_.size(); ++k) {
    state.junctions[k].lambda = compute_split_coefficients(subnetworks_[k], layout_, state.rho, grid_.dx);
    rebuild_junction(state, k);
  }
}

std::vector<double> NetworkSimulator::total_mass(const SlabState& state) const {
  const std::size_t nd = layout_.destinations;
  std::vector<double> m(nd, 0.0);
  for (std::size_t c = 0; c < layout_.total_cells; ++c)
    for (std::size_t d = 0; d < nd; ++d) m[d] += state.rho[c * nd + d];
  for (double& v : m) v *= grid_.dx;
  return m;
}

void NetworkSimulator::step(SlabState& state) const {
  step_impl(state, options_.exec == ExecMode::kParallel);
}
void NetworkSimulator::step_serial(SlabState& state) const { step_impl(state, false); }
void NetworkSimulator::step_parallel(SlabState& state) const { step_impl(state, true); }

void NetworkSimulator::step_impl(SlabState& state, bool parallel) const {
  const std::size_t nd = layout_.destinations;
  const double ratio = grid_.ratio();
  const double t = state.time(grid_);
  const std::vector<double> totals = cell_totals(layout_, state.rho);
  std::vector<double> next = state.rho;
  const auto nroads = static_cast<long>(network_.num_roads());
  const auto nsubs = static_cast<long>(subnetworks_.size());

  // Per-road boundary fluxes, per destination, for the mass balance.
  std::vector<double> road_in(network_.num_roads() * nd, 0.0);
  std::vector<double> road_out(network_.num_roads() * nd, 0.0);
  std::vector<std::exception_ptr> errors(network_.num_roads() + subnetworks_.size());

  auto advance_road = [&](long ri) {
    const auto r = static_cast<RoadId>(ri);
    const Road& road = network_.roads[r];
    const FluxParams p{road.rho_max, road.v_max};
    const InteriorRange ir = interiors_[r];
    if (ir.hi <= ir.lo) return;
    const std::size_t first = layout_.index(r, ir.lo, 0);
    const std::size_t count = (ir.hi - ir.lo) * nd;
    const double u_first = totals[layout_.cell_index(r, ir.lo)];

    std::vector<double> inflow(nd, 0.0);
    if (ir.lo == 0) {
      std::vector<double> b(nd);
      for (std::size_t d = 0; d < nd; ++d) b[d] = boundary_.density(road.start, d, t);
      const double bt = cell_total(b);
      const double g = godunov_flux(bt, p, u_first, p);
      for (std::size_t d = 0; d < nd; ++d) {
        inflow[d] = population_fraction(b[d], bt) * g;
        road_in[r * nd + d] = inflow[d];
      }
    } else {
      const std::size_t gc = layout_.cell_index(r, ir.lo - 1);
      const double g = godunov_flux(totals[gc], p, u_first, p);
      for (std::size_t d = 0; d < nd; ++d)
        inflow[d] = population_fraction(state.rho[gc * nd + d], totals[gc]) * g;
    }

    Outflow outflow;
    if (ir.hi == layout_.road_cells[r]) {
      outflow.kind = boundary_.outflow == OutflowMode::kFree ? OutflowKind::kFree : OutflowKind::kClosed;
    } else {
      outflow.kind = OutflowKind::kGhost;
      outflow.ghost_total = totals[layout_.cell_index(r, ir.hi)];
      outflow.ghost_params = p;
    }
    std::vector<double> out_flux(nd, 0.0);
    scheme_step(std::span<const double>(state.rho).subspan(first, count),
                std::span<double>(next).subspan(first, count), nd, inflow, outflow, p, ratio, out_flux);
    if (ir.hi == layout_.road_cells[r])
      for (std::size_t d = 0; d < nd; ++d) road_out[r * nd + d] = out_flux[d];
  };

  auto advance_junction = [&](long si) {
    const auto s = static_cast<std::size_t>(si);
    JunctionSystem& js = state.junctions[s];
    const std::size_t npop = js.paths.size();
    std::vector<double> local_totals(js.local_cell.size());
    for (std::size_t c = 0; c < js.local_cell.size(); ++c) local_totals[c] = totals[js.local_cell[c]];

    std::vector<double> inflow(npop, 0.0);
    std::vector<PathDownstream> down(npop);
    for (std::size_t a = 0; a < npop; ++a) {
      const PathPopulation& pp = js.paths[a];
      const auto& path = js.layout.paths[a];
      if (pp.incoming != kNoRoad) {
        const Road& in = network_.roads[pp.incoming];
        const FluxParams pin{in.rho_max, in.v_max};
        const std::size_t gc =
            layout_.cell_index(pp.incoming, layout_.road_cells[pp.incoming] - neighbourhood_ - 1);
        const double g = godunov_flux(totals[gc], pin, local_totals[path.front()],
                                      js.layout.cell_params[path.front()]);
        inflow[a] = population_fraction(state.rho[gc * nd + pp.destination], totals[gc]) * g;
      }
      const Road& out = network_.roads[pp.outgoing];
      down[a].total = totals[layout_.cell_index(pp.outgoing, neighbourhood_)];
      down[a].params = {out.rho_max, out.v_max};
    }
    const std::vector<double> in_vals = js.flat_values();
    std::vector<double> out_vals(in_vals.size());
    std::vector<double> out_flux(npop);
    multipath_step(js.layout, in_vals, out_vals, local_totals, inflow, down, ratio, out_flux);
    js.set_flat_values(out_vals);
    write_back(subnetworks_[s], js.paths, layout_, next);
  };

  auto guarded = [&](auto&& fn, long i, std::size_t slot) {
    try {
      fn(i);
    } catch (...) {
      errors[slot] = std::current_exception();
    }
  };

  if (parallel) {
#pragma omp parallel
    {
#pragma omp for schedule(static) nowait
      for (long r = 0; r < nroads; ++r) guarded(advance_road, r, static_cast<std::size_t>(r));
#pragma omp for schedule(static)
      for (long s = 0; s < nsubs; ++s)
        guarded(advance_junction, s, static_cast<std::size_t>(nroads + s));
    }
  } else {
    for (long r = 0; r < nroads; ++r) guarded(advance_road, r, static_cast<std::size_t>(r));
    for (long s = 0; s < nsubs; ++s) guarded(advance_junction, s, static_cast<std::size_t>(nroads + s));
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t s = 0; s < subnetworks_.size(); ++s) {
    for (const auto& pp : state.junctions[s].paths) {
      if (!pp.unroutable) continue;
      for (double v : pp.profile)
        if (v > 0.0)
          throw NumericalError("destination group " + std::to_string(pp.destination + 1) +
                               " reached junction " + network_.junctions[subnetworks_[s].junction].name +
                               " which has no finite route to it");
    }
  }
  for (const auto& road : network_.roads) {
    const std::size_t first = layout_.index(road.id, 0, 0);
    check_bounds(std::span<const double>(next).subspan(first, layout_.road_cells[road.id] * nd), nd,
                 {road.rho_max, road.v_max}, ("road " + road.name).c_str());
  }

  // Mass balance over the step.
  const auto before = total_mass(state);
  state.rho = std::move(next);
  const auto after = total_mass(state);
  double residual = 0.0;
  for (std::size_t d = 0; d < nd; ++d) {
    double in = 0.0, out = 0.0;
    for (std::size_t r = 0; r < network_.num_roads(); ++r) {
      in += road_in[r * nd + d];
      out += road_out[r * nd + d];
    }
    in *= grid_.dt;
    out *= grid_.dt;
    state.injected[d] += in;
    state.ejected[d] += out;
    residual += std::abs(after[d] - before[d] - (in - out));
  }
  state.max_mass_residual = std::max(state.max_mass_residual, residual);
  if (residual > options_.mass_tolerance)
    throw NumericalError("mass balance residual " + std::to_string(residual) + " at t = " + std::to_string(t));
  ++state.step;

  if (options_.lambda_schedule == LambdaSchedule::kPerStep &&
      state.step % options_.steps_per_slab != 0) {
    for (std::size_t k = 0; k < subnetworks_.size(); ++k) {
      state.junctions[k].lambda = compute_split_coefficients(subnetworks_[k], layout_, state.rho, grid_.dx);
      rebuild_junction(state, k);
    }
  }
}

void NetworkSimulator::advance_slab(SlabState& state, const PolicySlice& next) const {
  begin_slab(state, next);
  for (std::size_t k = 0; k < options_.steps_per_slab; ++k) step(state);
}

SimulationResult simulate(const NetworkSimulator& sim, const PolicyProvider& provider) {
  const Grid& g = sim.grid();
  const Network& n = sim.network();
  SimulationResult res;
  res.history.layout = sim.layout();
  res.history.dx = g.dx;
  res.history.dt = g.dt;
  res.history.slices.reserve(g.steps + 1);

  SlabState state = sim.initial_state();
  res.history.slices.push_back(state.rho);
  PolicySlice previous = state.policy;
  for (std::size_t h = 0; h < sim.num_slabs(); ++h) {
    const PolicySlice next = provider(h, state);
    sim.begin_slab(state, next);
    if (h > 0) {
      for (const auto& j : n.junctions) {
        if (j.kind != JunctionKind::kInternal) continue;
        for (std::size_t d = 0; d < n.num_destinations(); ++d)
          if (state.policy.at(j.id, d) != previous.at(j.id, d))
            res.events.push_back({state.time(g), j.id, d, previous.at(j.id, d), state.policy.at(j.id, d)});
      }
    }
    previous = state.policy;
    res.policy.slabs.push_back(state.policy);
    for (std::size_t k = 0; k < sim.options().steps_per_slab; ++k) {
      sim.step(state);
      res.history.slices.push_back(state.rho);
    }
  }
  res.injected = state.injected;
  res.ejected = state.ejected;
  res.max_mass_residual = state.max_mass_residual;
  return res;
}

SimulationResult simulate(const NetworkSimulator& sim, const NextPolicy& policy) {
  return simulate(sim, [&](std::size_t h, const SlabState&) { return policy.slab(h); });
}

}  // namespace destflow
