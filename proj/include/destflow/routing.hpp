#ifndef DESTFLOW_ROUTING_HPP_
#define DESTFLOW_ROUTING_HPP_

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "destflow/field.hpp"
#include "destflow/grid.hpp"
#include "destflow/network.hpp"
#include "destflow/policy.hpp"

namespace destflow {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Running cost l_r(s; omega) integrated along a driver's trajectory to give
// a road weight. An empty function means l == 1 (weights are travel times).
struct RunningCost {
  std::function<double(RoadId road, double s, double omega)> fn;

  static RunningCost unit() { return {}; }
  static RunningCost zero() {
    return {[](RoadId, double, double) { return 0.0; }};
  }
  double operator()(RoadId road, double s, double omega) const {
    return fn ? fn(road, s, omega) : 1.0;
  }
};

struct WeightSample {
  RoadId road = kNoRoad;
  double t0 = 0.0;
  double weight = 0.0;
  double travel_time = 0.0;
};

// Total density of road r (one value per cell) from a flat network field.
std::vector<double> road_profile(const FieldLayout& layout, std::span<const double> field, RoadId r);

// Time to drive through a road whose density is frozen at `omega`: sum over
// cells of dx / v(omega_k); +inf if any cell is jammed.
double travel_time_frozen(const Road& road, std::span<const double> omega, double dx);

// Trajectory entering road r at t^{n0} through the space-time density: each
// cell is crossed at the speed read from the time slice holding the current
// clock. +inf when the trajectory stalls or does not reach the end of the
// road by the last slice of the history.
double travel_time_spacetime(const Road& road, const DensityHistory& hist, std::size_t n0);

WeightSample road_weight(const Road& road, std::span<const double> omega, double dx, double t0,
                         const RunningCost& cost);
WeightSample road_weight(const Road& road, const DensityHistory& hist, std::size_t n0,
                         const RunningCost& cost);

enum class Behavior { kBasic, kRational, kHighlyRational };

// V_d at every junction. Basic and rational tables hold a single time
// slice; highly rational tables hold one slice per time node.
struct ValueTable {
  Behavior mode = Behavior::kBasic;
  std::size_t destination = 0;
  std::vector<std::vector<double>> values;  // [n][junction]

  double at(std::size_t n, JunctionId j) const {
    return values.size() == 1 ? values.front()[j] : values.at(n)[j];
  }
};

struct RouteSolution {
  ValueTable values;
  std::vector<std::vector<RoadId>> next;  // [n][junction], kNoRoad where no finite route
};

// Bellman system with time-independent weights (one per road), solved by
// value iteration from V = 0 at the destination and +inf elsewhere.
ValueTable solve_static_values(const Network& n, std::size_t d, std::span<const WeightSample> weights,
                               Behavior mode);

// argmin over outgoing roads of V(end(r)) + w_r; ties go to the lowest
// road id. kNoRoad when every candidate is +inf.
std::vector<RoadId> extract_next(const ValueTable& v, const Network& n,
                                 std::span<const WeightSample> weights);

RouteSolution value_basic(const Network& n, std::size_t d, double dx, const RunningCost& cost);

// Weights from the density frozen at time tau (flat network field).
RouteSolution value_rational(const Network& n, std::size_t d, const FieldLayout& layout,
                             std::span<const double> rho, double dx, double tau,
                             const RunningCost& cost);

// Time-dependent values by backward induction over the time nodes of
// `hist`. Arrival times are rounded half-up to the nearest node; values past
// the last node are +inf. At a fixed node the junction values are iterated
// to a fixed point, at most `max_sweeps` times.
RouteSolution value_highly_rational(const Network& n, std::size_t d, const DensityHistory& hist,
                                    const RunningCost& cost, std::size_t max_sweeps = 0);

// Road weights for every road and every time node of `hist`: [n][road].
std::vector<std::vector<WeightSample>> spacetime_weights(const Network& n, const DensityHistory& hist,
                                                         const RunningCost& cost);

// Collects per-destination choices of time node `node` into a policy slice.
PolicySlice assemble_policy(const Network& n, std::span<const RouteSolution> per_destination,
                            std::size_t node);

// Basic-behaviour policy for every destination with l == 1.
PolicySlice basic_policy(const Network& n, double dx);

}  // namespace destflow

#endif  // DESTFLOW_ROUTING_HPP_
