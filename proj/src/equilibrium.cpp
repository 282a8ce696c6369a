#include "destflow/equilibrium.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "destflow/error.hpp"

namespace destflow {

SimulationResult simulate_basic(const NetworkSimulator& sim, const RunningCost& cost) {
  const Network& n = sim.network();
  std::vector<RouteSolution> sols;
  for (std::size_t d = 0; d < n.num_destinations(); ++d)
    sols.push_back(value_basic(n, d, sim.grid().dx, cost));
  NextPolicy policy;
  policy.slabs.push_back(assemble_policy(n, sols, 0));
  return simulate(sim, policy);
}

SimulationResult simulate_rational(const NetworkSimulator& sim, const RunningCost& cost) {
  const Network& n = sim.network();
  const Grid& g = sim.grid();
  const double dtau = g.dt * static_cast<double>(sim.options().steps_per_slab);
  return simulate(sim, [&](std::size_t h, const SlabState& state) {
    std::vector<RouteSolution> sols;
    for (std::size_t d = 0; d < n.num_destinations(); ++d)
      sols.push_back(
          value_rational(n, d, sim.layout(), state.rho, g.dx, static_cast<double>(h) * dtau, cost));
    return assemble_policy(n, sols, 0);
  });
}

double density_distance(const DensityHistory& a, const DensityHistory& b, std::size_t steps_per_slab) {
  if (!(a.layout == b.layout) || a.dx != b.dx || a.dt != b.dt || a.num_slices() != b.num_slices())
    throw ValidationError("density histories are on different grids");
  if (steps_per_slab == 0) throw ValidationError("a slab must span at least one step");
  const double dtau = a.dt * static_cast<double>(steps_per_slab);
  double sum = 0.0;
  for (std::size_t n = 0; n < a.num_slices(); n += steps_per_slab) {
    const auto& x = a.slices[n];
    const auto& y = b.slices[n];
    for (std::size_t i = 0; i < x.size(); ++i) sum += std::abs(x[i] - y[i]);
  }
  return sum * a.dx * dtau;
}

XiState xi_apply(const NetworkSimulator& sim, const DensityHistory& hist, const RunningCost& cost,
                 std::size_t max_sweeps) {
  const Network& n = sim.network();
  if (hist.num_slices() != sim.grid().steps + 1 || !(hist.layout == sim.layout()))
    throw ValidationError("density history does not cover the simulation horizon");
  std::vector<RouteSolution> sols;
  for (std::size_t d = 0; d < n.num_destinations(); ++d)
    sols.push_back(value_highly_rational(n, d, hist, cost, max_sweeps));
  const std::size_t sps = sim.options().steps_per_slab;
  NextPolicy policy;
  for (std::size_t h = 0; h < sim.num_slabs(); ++h) policy.slabs.push_back(assemble_policy(n, sols, h * sps));
  XiState out;
  out.run = simulate(sim, policy);
  return out;
}

const char* status_name(ConvergenceStatus s) {
  switch (s) {
    case ConvergenceStatus::kConverged:
      return "converged";
    case ConvergenceStatus::kPeriodTwoCycle:
      return "period-two-cycle";
    case ConvergenceStatus::kMaxIterations:
      return "max-iterations";
  }
  return "unknown";
}

double default_tolerance(const SimulationResult& guess, double horizon) {
  const double injected = std::accumulate(guess.injected.begin(), guess.injected.end(), 0.0);
  return 1e-6 * injected * horizon;
}

ConvergenceReport fixed_point_solve(const NetworkSimulator& sim, const InitialGuess& guess,
                                    const FixedPointOptions& opts) {
  if (opts.max_iters < 2) throw ValidationError("max_iters must be at least 2");
  if (opts.tol && !(*opts.tol > 0.0)) throw ValidationError("tolerance must be positive");
  const std::size_t sps = sim.options().steps_per_slab;

  std::vector<XiState> iterates;
  XiState first;
  switch (guess.kind) {
    case GuessKind::kBasic:
      first.run = simulate_basic(sim, opts.cost);
      break;
    case GuessKind::kRational:
      first.run = simulate_rational(sim, opts.cost);
      break;
    case GuessKind::kProvided:
      first.run.history = guess.provided;
      break;
  }
  ConvergenceReport report;
  report.tol = opts.tol ? *opts.tol : default_tolerance(first.run, sim.grid().horizon);
  iterates.push_back(std::move(first));

  for (std::size_t k = 1; k <= opts.max_iters; ++k) {
    XiState next = xi_apply(sim, iterates.back().run.history, opts.cost, opts.max_sweeps);
    next.iteration = k;
    const double r = density_distance(next.run.history, iterates.back().run.history, sps);
    report.residuals.push_back(r);
    iterates.push_back(std::move(next));
    const std::size_t last = iterates.size() - 1;
    if (r <= report.tol) {
      report.status = ConvergenceStatus::kConverged;
      report.witnesses.push_back(iterates[last]);
      return report;
    }
    if (last >= 2 &&
        density_distance(iterates[last].run.history, iterates[last - 2].run.history, sps) <= report.tol) {
      report.status = ConvergenceStatus::kPeriodTwoCycle;
      report.witnesses.push_back(iterates[last - 1]);
      report.witnesses.push_back(iterates[last]);
      return report;
    }
    // Only the last three iterates are ever compared.
    if (iterates.size() > 3) iterates.erase(iterates.begin());
  }
  report.status = ConvergenceStatus::kMaxIterations;
  report.witnesses.push_back(iterates.back());
  return report;
}

std::string diagnostics_csv(const ConvergenceReport& report) {
  std::string out = "iteration,residual,status\n";
  char buf[96];
  for (std::size_t k = 0; k < report.residuals.size(); ++k) {
    const bool last = k + 1 == report.residuals.size();
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%s\n", k + 1, report.residuals[k],
                  last ? status_name(report.status) : "iterating");
    out += buf;
  }
  return out;
}

}  // namespace destflow
