#ifndef DESTFLOW_EQUILIBRIUM_HPP_
#define DESTFLOW_EQUILIBRIUM_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "destflow/field.hpp"
#include "destflow/routing.hpp"
#include "destflow/simulator.hpp"

namespace destflow {

// Forward runs for the two non-anticipating behaviours.
SimulationResult simulate_basic(const NetworkSimulator& sim, const RunningCost& cost = {});
// Re-solves the routes at the start of every slab against the density of
// that instant.
SimulationResult simulate_rational(const NetworkSimulator& sim, const RunningCost& cost = {});

// L1 distance over destinations, road cells and slab-boundary time nodes:
// sum |a - b| dx dtau. Throws ValidationError if the histories do not share
// a grid.
double density_distance(const DensityHistory& a, const DensityHistory& b, std::size_t steps_per_slab = 1);

struct XiState {
  SimulationResult run;   // history + resolved policy + switch events
  std::size_t iteration = 0;
};

// Solves the highly rational routes against `hist` for every destination,
// holds them constant on each slab and simulates the network under them.
XiState xi_apply(const NetworkSimulator& sim, const DensityHistory& hist, const RunningCost& cost = {},
                 std::size_t max_sweeps = 0);

enum class GuessKind { kBasic, kRational, kProvided };

struct InitialGuess {
  GuessKind kind = GuessKind::kBasic;
  DensityHistory provided;   // used with kProvided
};

enum class ConvergenceStatus { kConverged, kPeriodTwoCycle, kMaxIterations };

const char* status_name(ConvergenceStatus s);

struct ConvergenceReport {
  ConvergenceStatus status = ConvergenceStatus::kMaxIterations;
  double tol = 0.0;
  std::vector<double> residuals;   // residuals[k] = distance(Xi^{k+1}, Xi^k)
  std::vector<XiState> witnesses;  // last iterate, or the two cycle states
};

struct FixedPointOptions {
  std::optional<double> tol;       // default 1e-6 * injected mass * horizon (0 if nothing enters)
  std::size_t max_iters = 50;
  std::size_t max_sweeps = 0;
  RunningCost cost;
};

// Default tolerance relative to the problem scale.
double default_tolerance(const SimulationResult& guess, double horizon);

ConvergenceReport fixed_point_solve(const NetworkSimulator& sim, const InitialGuess& guess,
                                    const FixedPointOptions& opts = {});

// "iteration,residual,status" lines; the status column is "iterating" on
// all but the last row.
std::string diagnostics_csv(const ConvergenceReport& report);

}  // namespace destflow

#endif  // DESTFLOW_EQUILIBRIUM_HPP_
