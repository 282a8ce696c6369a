#ifndef DESTFLOW_SIMULATOR_HPP_
#define DESTFLOW_SIMULATOR_HPP_

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "destflow/field.hpp"
#include "destflow/grid.hpp"
#include "destflow/junction.hpp"
#include "destflow/network.hpp"
#include "destflow/policy.hpp"

namespace destflow {

enum class ExecMode { kSerial, kParallel };

// When the split coefficients of the junction populations are recomputed.
enum class LambdaSchedule { kPerSlab, kPerStep };

enum class OutflowMode { kFree, kClosed };

// Density of destination group d imposed at an origin over [t_on, t_off).
struct InflowWindow {
  JunctionId origin = -1;
  std::size_t destination = 0;
  double density = 0.0;
  double t_on = 0.0;
  double t_off = std::numeric_limits<double>::infinity();
};

struct BoundaryData {
  std::vector<InflowWindow> inflows;
  OutflowMode outflow = OutflowMode::kFree;

  double density(JunctionId origin, std::size_t d, double t) const;
};

struct SimulatorOptions {
  double delta = 0.0;               // junction neighbourhood width
  std::size_t steps_per_slab = 1;   // dtau / dt
  ExecMode exec = ExecMode::kParallel;
  LambdaSchedule lambda_schedule = LambdaSchedule::kPerSlab;
  double mass_tolerance = 1e-9;     // per-step mass balance residual
};

struct SlabState {
  std::vector<double> rho;                 // FieldLayout-indexed densities
  std::vector<JunctionSystem> junctions;   // aligned with the subnetworks
  PolicySlice policy;                      // resolved policy of the current slab
  std::size_t step = 0;
  std::vector<double> injected;            // cumulative mass entered, per destination
  std::vector<double> ejected;             // cumulative mass left, per destination
  double max_mass_residual = 0.0;

  double time(const Grid& g) const { return g.time(step); }
};

class NetworkSimulator {
 public:
  // `fallback` supplies the route for junctions whose policy entry has no
  // finite route before any slab has chosen one.
  NetworkSimulator(const Network& network, const Grid& grid, BoundaryData boundary,
                   SimulatorOptions options, PolicySlice fallback);

  const Network& network() const { return network_; }
  const Grid& grid() const { return grid_; }
  const FieldLayout& layout() const { return layout_; }
  const BoundaryData& boundary() const { return boundary_; }
  const SimulatorOptions& options() const { return options_; }
  const std::vector<Subnetwork>& subnetworks() const { return subnetworks_; }
  const std::vector<InteriorRange>& interiors() const { return interiors_; }
  std::size_t neighbourhood() const { return neighbourhood_; }
  std::size_t num_slabs() const { return grid_.steps / options_.steps_per_slab; }

  // Empty network at t = 0.
  SlabState initial_state() const;
  SlabState state_from_field(std::vector<double> rho) const;

  // Replaces entries without a finite route at junctions that can still
  // reach the destination by the previous choice (or the fallback).
  PolicySlice resolve(const PolicySlice& next, const PolicySlice& previous) const;

  // Freezes the policy, recomputes the split coefficients and rebuilds the
  // junction populations from the road densities.
  void begin_slab(SlabState& state, const PolicySlice& next) const;

  // One time step; serial and OpenMP variants produce identical results.
  void step(SlabState& state) const;
  void step_serial(SlabState& state) const;
  void step_parallel(SlabState& state) const;

  void advance_slab(SlabState& state, const PolicySlice& next) const;

  // Per-destination mass (sum of rho_d dx over all road cells).
  std::vector<double> total_mass(const SlabState& state) const;

 private:
  void step_impl(SlabState& state, bool parallel) const;
  void rebuild_junction(SlabState& state, std::size_t s) const;

  Network network_;
  Grid grid_;
  BoundaryData boundary_;
  SimulatorOptions options_;
  PolicySlice fallback_;
  FieldLayout layout_;
  std::size_t neighbourhood_ = 0;  // cells per junction segment
  std::vector<Subnetwork> subnetworks_;
  std::vector<InteriorRange> interiors_;
  std::vector<std::vector<bool>> reachable_;  // [d][junction]
};

struct PolicyEvent {
  double t = 0.0;
  JunctionId junction = -1;
  std::size_t destination = 0;
  RoadId from = kNoRoad;
  RoadId to = kNoRoad;
};

struct SimulationResult {
  DensityHistory history;
  NextPolicy policy;                 // resolved policy, one slice per slab
  std::vector<PolicyEvent> events;
  std::vector<double> injected;
  std::vector<double> ejected;
  double max_mass_residual = 0.0;
};

// Chooses the policy of slab h given the state at its start.
using PolicyProvider = std::function<PolicySlice(std::size_t h, const SlabState& state)>;

SimulationResult simulate(const NetworkSimulator& sim, const PolicyProvider& provider);
SimulationResult simulate(const NetworkSimulator& sim, const NextPolicy& policy);

}  // namespace destflow

#endif  // DESTFLOW_SIMULATOR_HPP_
