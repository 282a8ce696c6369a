#include "destflow/scenario.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "destflow/error.hpp"
#include "destflow/grid.hpp"

namespace destflow {

namespace {

std::vector<std::string_view> tokens_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double number(std::string_view tok, int line, const char* what) {
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line) + ": bad " + what + " '" + std::string(tok) + "'");
  return v;
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Behavior parse_behavior(std::string_view name) {
  if (name == "basic") return Behavior::kBasic;
  if (name == "rational") return Behavior::kRational;
  if (name == "high") return Behavior::kHighlyRational;
  throw ParseError("unknown behavior '" + std::string(name) + "' (expected basic, rational or high)");
}

const char* behavior_name(Behavior b) {
  switch (b) {
    case Behavior::kBasic:
      return "basic";
    case Behavior::kRational:
      return "rational";
    case Behavior::kHighlyRational:
      return "high";
  }
  return "unknown";
}

Scenario load_scenario(std::string_view text) {
  Scenario s;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = tokens_of(line);
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    auto want = [&](std::size_t count, const char* usage) {
      if (tok.size() != count) throw ParseError(where + ": expected '" + usage + "'");
    };
    const std::string_view key = tok[0];
    if (key == "dx") {
      want(2, "dx <value>");
      s.dx = number(tok[1], line_no, "dx");
    } else if (key == "dt") {
      want(2, "dt <value>");
      s.dt = number(tok[1], line_no, "dt");
    } else if (key == "horizon") {
      want(2, "horizon <value>");
      s.horizon = number(tok[1], line_no, "horizon");
    } else if (key == "delta") {
      want(2, "delta <value>");
      s.delta = number(tok[1], line_no, "delta");
    } else if (key == "slab") {
      want(2, "slab <value>");
      s.slab = number(tok[1], line_no, "slab");
    } else if (key == "outflow") {
      want(2, "outflow free|closed");
      if (tok[1] == "free") s.outflow = OutflowMode::kFree;
      else if (tok[1] == "closed") s.outflow = OutflowMode::kClosed;
      else throw ParseError(where + ": outflow must be 'free' or 'closed'");
    } else if (key == "inflow") {
      want(6, "inflow <origin> <destination> <density> <t_on> <t_off|inf>");
      InflowSpec f;
      f.origin = std::string(tok[1]);
      f.destination = std::string(tok[2]);
      f.density = number(tok[3], line_no, "density");
      f.t_on = number(tok[4], line_no, "t_on");
      f.t_off = number(tok[5], line_no, "t_off");
      if (!(f.t_off > f.t_on)) throw ParseError(where + ": inflow window must have t_off > t_on");
      s.inflows.push_back(std::move(f));
    } else if (key == "tol") {
      want(2, "tol <value>");
      s.tol = number(tok[1], line_no, "tol");
    } else if (key == "max_iters") {
      want(2, "max_iters <n>");
      const double v = number(tok[1], line_no, "max_iters");
      if (v < 0 || v != std::floor(v)) throw ParseError(where + ": max_iters must be a whole number");
      s.max_iters = static_cast<std::size_t>(v);
    } else if (key == "guess") {
      want(2, "guess basic|rational");
      if (tok[1] == "basic") s.guess = GuessKind::kBasic;
      else if (tok[1] == "rational") s.guess = GuessKind::kRational;
      else throw ParseError(where + ": guess must be 'basic' or 'rational'");
    } else if (key == "network") {
      want(2, "network <path>");
      s.network_path = std::string(tok[1]);
    } else if (key == "behavior") {
      want(2, "behavior basic|rational|high");
      s.behavior = parse_behavior(tok[1]);
    } else {
      throw ParseError(where + ": unknown directive '" + std::string(key) + "'");
    }
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  std::string out;
  if (!s.network_path.empty()) out += "network " + s.network_path + "\n";
  out += "dx " + fmt(s.dx) + "\n";
  out += "dt " + fmt(s.dt) + "\n";
  out += "horizon " + fmt(s.horizon) + "\n";
  out += "delta " + fmt(s.delta) + "\n";
  if (s.slab > 0.0) out += "slab " + fmt(s.slab) + "\n";
  out += std::string("outflow ") + (s.outflow == OutflowMode::kFree ? "free" : "closed") + "\n";
  for (const auto& f : s.inflows)
    out += "inflow " + f.origin + " " + f.destination + " " + fmt(f.density) + " " + fmt(f.t_on) + " " +
           fmt(f.t_off) + "\n";
  if (s.behavior) out += std::string("behavior ") + behavior_name(*s.behavior) + "\n";
  if (s.tol) out += "tol " + fmt(*s.tol) + "\n";
  out += "max_iters " + std::to_string(s.max_iters) + "\n";
  out += std::string("guess ") + (s.guess == GuessKind::kRational ? "rational" : "basic") + "\n";
  return out;
}

BoundaryData make_boundary(const Network& n, const Scenario& s) {
  BoundaryData b;
  b.outflow = s.outflow;
  for (const auto& f : s.inflows) {
    const auto o = n.find_junction(f.origin);
    if (!o) throw ValidationError("inflow at unknown junction '" + f.origin + "'");
    const auto dj = n.find_junction(f.destination);
    const auto d = dj ? n.destination_index(*dj) : std::nullopt;
    if (!d) throw ValidationError("inflow names '" + f.destination + "', which is not a destination");
    b.inflows.push_back({*o, static_cast<std::size_t>(*d), f.density, f.t_on, f.t_off});
  }
  return b;
}

Grid make_scenario_grid(const Network& n, const Scenario& s) { return make_grid(n, s.dx, s.dt, s.horizon); }

NetworkSimulator make_simulator(const Network& n, const Scenario& s, ExecMode exec) {
  const Grid g = make_scenario_grid(n, s);
  SimulatorOptions opts;
  opts.delta = s.delta;
  opts.exec = exec;
  opts.steps_per_slab = s.slab > 0.0 ? integer_multiple(s.slab, s.dt, "slab length") : 1;
  return NetworkSimulator(n, g, make_boundary(n, s), opts, basic_policy(n, g.dx));
}

RunOutputs run_scenario(const Network& n, const Scenario& s, Behavior behavior, ExecMode exec) {
  const NetworkSimulator sim = make_simulator(n, s, exec);
  RunOutputs out;
  out.behavior = behavior;
  switch (behavior) {
    case Behavior::kBasic:
      out.result = simulate_basic(sim);
      break;
    case Behavior::kRational:
      out.result = simulate_rational(sim);
      break;
    case Behavior::kHighlyRational: {
      for (const auto& f : s.inflows)
        if (f.density > 0.0 && std::isinf(f.t_off))
          throw ValidationError("highly rational scenarios need inflow windows that end (origin " + f.origin +
                                ")");
      FixedPointOptions opts;
      opts.tol = s.tol;
      opts.max_iters = s.max_iters;
      out.report = fixed_point_solve(sim, InitialGuess{s.guess, {}}, opts);
      out.result = out.report->witnesses.back().run;
      break;
    }
  }
  return out;
}

std::string density_csv(const Network& n, const DensityHistory& hist, std::size_t stride) {
  if (stride == 0) throw ValidationError("output stride must be positive");
  std::string out = "t,road,x,dest,density\n";
  const std::size_t nd = hist.layout.destinations;
  char buf[160];
  for (std::size_t t = 0; t < hist.num_slices(); t += stride) {
    const double time = static_cast<double>(t) * hist.dt;
    for (const auto& r : n.roads) {
      for (std::size_t k = 0; k < hist.layout.road_cells[r.id]; ++k) {
        const double x = r.a + (static_cast<double>(k) + 0.5) * hist.dx;
        for (std::size_t d = 0; d < nd; ++d) {
          std::snprintf(buf, sizeof buf, "%.9g,%s,%.9g,%zu,%.9g\n", time, r.name.c_str(), x, d + 1,
                        hist.density(t, r.id, k, d));
          out += buf;
        }
      }
    }
  }
  return out;
}

std::string events_csv(const Network& n, const std::vector<PolicyEvent>& events) {
  std::string out = "t,junction,dest,from_road,to_road\n";
  auto road = [&](RoadId r) { return r == kNoRoad ? std::string("none") : n.roads[r].name; };
  char buf[64];
  for (const auto& e : events) {
    std::snprintf(buf, sizeof buf, "%.9g", e.t);
    out += std::string(buf) + "," + n.junctions[e.junction].name + "," + std::to_string(e.destination + 1) +
           "," + road(e.from) + "," + road(e.to) + "\n";
  }
  return out;
}

std::string summary_text(const Network& n, const RunOutputs& out) {
  std::string s = std::string("behavior ") + behavior_name(out.behavior) + "\n";
  char buf[128];
  for (std::size_t d = 0; d < n.num_destinations(); ++d) {
    std::snprintf(buf, sizeof buf, "dest %zu (%s): injected %.9g ejected %.9g\n", d + 1,
                  n.junctions[n.destinations[d]].name.c_str(), out.result.injected[d], out.result.ejected[d]);
    s += buf;
  }
  std::snprintf(buf, sizeof buf, "max mass residual %.3g\n", out.result.max_mass_residual);
  s += buf;
  std::snprintf(buf, sizeof buf, "policy events %zu\n", out.result.events.size());
  s += buf;
  if (out.report) {
    s += std::string("status ") + status_name(out.report->status) + "\n";
    std::snprintf(buf, sizeof buf, "iterations %zu\ntolerance %.9g\n", out.report->residuals.size(),
                  out.report->tol);
    s += buf;
  }
  return s;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("write failed for '" + path + "'");
}

void write_outputs(const std::string& dir, const Network& n, const RunOutputs& out, std::size_t stride) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  const std::filesystem::path p(dir);
  write_file((p / "density.csv").string(), density_csv(n, out.result.history, stride));
  write_file((p / "policy_events.csv").string(), events_csv(n, out.result.events));
  write_file((p / "summary.txt").string(), summary_text(n, out));
  if (out.report) {
    write_file((p / "diagnostics.csv").string(), diagnostics_csv(*out.report));
    if (out.report->witnesses.size() == 2) {
      const char* tags[2] = {"witness_1", "witness_2"};
      for (std::size_t w = 0; w < 2; ++w) {
        const auto& run = out.report->witnesses[w].run;
        write_file((p / (std::string(tags[w]) + "_density.csv")).string(), density_csv(n, run.history, stride));
        write_file((p / (std::string(tags[w]) + "_events.csv")).string(), events_csv(n, run.events));
      }
    }
  }
}

std::string benchmark_network_text(const BenchmarkLengths& len) {
  std::string s =
      "# Two origins (j1, j3), two destinations (j7 for group 1, j8 for group 2).\n"
      "# Road lengths are a reconstruction: the route r1 r3 r6 r7 is strictly\n"
      "# shorter than r1 r2 r5 on the empty network.\n";
  const std::pair<const char*, double> roads[] = {
      {"r1 j1 j2", len.r1}, {"r2 j2 j4", len.r2}, {"r3 j2 j5", len.r3}, {"r4 j3 j5", len.r4},
      {"r5 j4 j7", len.r5}, {"r6 j5 j6", len.r6}, {"r7 j6 j7", len.r7}, {"r8 j6 j8", len.r8},
  };
  for (const auto& [head, l] : roads) s += std::string("road ") + head + " " + fmt(l) + "\n";
  s += "origin j1\norigin j3\ndestination j7\ndestination j8\n";
  return s;
}

Network benchmark_network(const BenchmarkLengths& len) { return load_network(benchmark_network_text(len)); }

Scenario benchmark_scenario(bool stop_at_one) {
  Scenario s;
  s.dx = 0.01;
  s.dt = 0.005;
  s.horizon = 5.0;
  s.delta = 0.01;
  s.slab = 0.005;
  const double off = stop_at_one ? 1.0 : std::numeric_limits<double>::infinity();
  s.inflows.push_back({"j1", "j7", 0.3, 0.0, off});
  s.inflows.push_back({"j3", "j8", 0.4, 0.0, off});
  return s;
}

void emit_benchmark(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  const std::filesystem::path p(dir);
  const BenchmarkLengths len;
  const std::string header = "# Benchmark scenario on benchmark.net. Road lengths there are a reconstruction:\n"
                             "#   r1 " + fmt(len.r1) + ", r2 " + fmt(len.r2) + ", r3 " + fmt(len.r3) + ", r4 " +
                             fmt(len.r4) + ", r5 " + fmt(len.r5) + ", r6 " + fmt(len.r6) + ", r7 " +
                             fmt(len.r7) + ", r8 " + fmt(len.r8) + "\n";
  write_file((p / "benchmark.net").string(), benchmark_network_text(len));
  for (const bool high : {false, true}) {
    Scenario s = benchmark_scenario(high);
    s.network_path = "benchmark.net";
    write_file((p / (high ? "benchmark_high.scn" : "benchmark.scn")).string(),
               header + (high ? "# Inflows stop at t = 1 so the network empties before the horizon.\n" : "") +
                   serialize_scenario(s));
  }
}

}  // namespace destflow
