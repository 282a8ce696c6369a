#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "destflow/error.hpp"
#include "destflow/network.hpp"
#include "destflow/scenario.hpp"

using namespace destflow;

namespace {

int run_simulate(const std::string& network_path, const std::string& scenario_path, const std::string& behavior,
                 const std::string& out_dir, const std::optional<double>& tol,
                 const std::optional<std::size_t>& max_iters, const std::string& guess, std::size_t stride) {
  Scenario s = load_scenario_file(scenario_path);
  std::string net = network_path;
  if (net.empty()) {
    if (s.network_path.empty()) throw ValidationError("no network given (--network or a 'network' line)");
    net = (std::filesystem::path(scenario_path).parent_path() / s.network_path).string();
  }
  const Network n = load_network_file(net);
  Behavior b;
  if (!behavior.empty()) b = parse_behavior(behavior);
  else if (s.behavior) b = *s.behavior;
  else throw ValidationError("no behavior given (--behavior or a 'behavior' line)");
  if (tol) s.tol = *tol;
  if (max_iters) s.max_iters = *max_iters;
  if (guess == "rational") s.guess = GuessKind::kRational;
  else if (guess == "basic") s.guess = GuessKind::kBasic;

  const RunOutputs out = run_scenario(n, s, b);
  write_outputs(out_dir, n, out, stride);
  std::printf("%s", summary_text(n, out).c_str());
  return 0;
}

int run_validate(const std::string& path) {
  const Network n = load_network_file(path);
  std::printf("ok: %zu roads, %zu junctions, %zu origins, %zu destinations\n", n.num_roads(),
              n.num_junctions(), n.origins.size(), n.num_destinations());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-destination traffic simulation on road networks"};
  app.require_subcommand(1);

  std::string network, scenario, behavior, out_dir, guess;
  std::optional<double> tol;
  std::optional<std::size_t> max_iters;
  std::size_t stride = 1;

  auto* sim = app.add_subcommand("simulate", "Run a scenario and export densities, policy events and diagnostics");
  sim->add_option("--network", network, "Network file (defaults to the scenario's 'network' line)");
  sim->add_option("--scenario", scenario, "Scenario file")->required();
  sim->add_option("--behavior", behavior, "basic | rational | high")
      ->check(CLI::IsMember({"basic", "rational", "high"}));
  sim->add_option("--out", out_dir, "Output directory")->required();
  sim->add_option("--tol", tol, "Fixed-point tolerance (highly rational)")->check(CLI::PositiveNumber);
  sim->add_option("--max-iters", max_iters, "Fixed-point iteration cap (highly rational)")
      ->check(CLI::Range(2, 100000));
  sim->add_option("--guess", guess, "Initial guess: basic | rational")->check(CLI::IsMember({"basic", "rational"}));
  sim->add_option("--stride", stride, "Export every n-th time step")->check(CLI::PositiveNumber);

  auto* emit = app.add_subcommand("emit-benchmark", "Write the benchmark network and scenario files");
  std::string emit_dir;
  emit->add_option("--out", emit_dir, "Output directory")->required();

  auto* val = app.add_subcommand("validate", "Check a network file");
  std::string val_net;
  val->add_option("--network", val_net, "Network file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return run_simulate(network, scenario, behavior, out_dir, tol, max_iters, guess, stride);
    if (*emit) {
      emit_benchmark(emit_dir);
      std::printf("wrote benchmark.net, benchmark.scn, benchmark_high.scn to %s\n", emit_dir.c_str());
      return 0;
    }
    if (*val) return run_validate(val_net);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
