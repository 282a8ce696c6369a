// Times the network time step with the serial and OpenMP kernels on the
// benchmark network refined by a given factor, and checks that both give
// the same field.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "CLI11.hpp"
#include "destflow/equilibrium.hpp"
#include "destflow/scenario.hpp"

using namespace destflow;

namespace {

double run(const Network& n, const Scenario& s, ExecMode exec, std::size_t steps, std::vector<double>& out) {
  const NetworkSimulator sim = make_simulator(n, s, exec);
  const PolicySlice policy = basic_policy(n, s.dx);
  SlabState state = sim.initial_state();
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < steps; ++k) sim.advance_slab(state, policy);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out = state.rho;
  return secs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel step benchmark"};
  std::size_t steps = 2000;
  int refine = 4;
  app.add_option("--steps", steps, "Time steps per run")->check(CLI::PositiveNumber);
  app.add_option("--refine", refine, "Grid refinement factor over dx = 0.01")->check(CLI::Range(1, 64));
  CLI11_PARSE(app, argc, argv);

  const Network n = benchmark_network();
  Scenario s = benchmark_scenario(false);
  s.dx /= refine;
  s.dt /= refine;
  s.delta = s.dx;
  s.slab = s.dt;
  s.horizon = static_cast<double>(steps) * s.dt;

  std::vector<double> a, b;
  const double ts = run(n, s, ExecMode::kSerial, steps, a);
  const double tp = run(n, s, ExecMode::kParallel, steps, b);
  std::printf("cells %zu, steps %zu, threads %d\n", a.size(), steps, omp_get_max_threads());
  std::printf("serial   %8.3f ms/step\n", 1e3 * ts / static_cast<double>(steps));
  std::printf("parallel %8.3f ms/step  (speedup %.2fx)\n", 1e3 * tp / static_cast<double>(steps), ts / tp);
  std::printf("fields %s\n", a == b ? "identical" : "DIFFER");
  return a == b ? 0 : 1;
}
