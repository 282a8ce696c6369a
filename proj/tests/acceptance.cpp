// Acceptance suite: one PASS/FAIL line per criterion on the reconstructed
// benchmark. Tolerances are fixed here; the exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "destflow/equilibrium.hpp"
#include "destflow/error.hpp"
#include "destflow/junction.hpp"
#include "destflow/routing.hpp"
#include "destflow/scenario.hpp"
#include "oracles.hpp"

using namespace destflow;

namespace {

constexpr double kUnusedTol = 1e-12;          // 1
constexpr double kSaturationTol = 0.02;       // 2
constexpr double kLevelTol = 0.02;            // 3
constexpr double kMinSpeedGap = 0.02;         // 3
constexpr std::size_t kMinSwitches = 2;       // 4
constexpr double kQueueMargin = 0.05;         // 5
constexpr double kRelativeTol = 1e-6;         // 6
constexpr double kDriftTol = 1e-12;           // 7
constexpr double kBalanceTol = 1e-9;          // 7
constexpr double kScalarTol = 1e-14;          // 8
constexpr double kValueTol = 1e-12;           // 8
constexpr double kQueueDensity = 0.5;         // queue cells are above the critical density
constexpr std::size_t kMinQueueCells = 3;

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("criterion %2d: %s  %s  [%s]\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double max_on_road(const DensityHistory& h, RoadId r) {
  double m = 0.0;
  for (std::size_t n = 0; n < h.num_slices(); ++n)
    for (std::size_t k = 0; k < h.layout.road_cells[r]; ++k) m = std::max(m, h.total(n, r, k));
  return m;
}

double max_group_on_road(const DensityHistory& h, RoadId r, std::size_t d) {
  double m = 0.0;
  for (std::size_t n = 0; n < h.num_slices(); ++n)
    for (std::size_t k = 0; k < h.layout.road_cells[r]; ++k) m = std::max(m, h.density(n, r, k, d));
  return m;
}

// Contiguous run of cells above the critical density ending at `last`
// (the last interior cell before the merge): [first, last], or none.
struct Queue {
  std::size_t cells = 0;
  std::size_t first = 0;
  double level = 0.0;  // mean density of the queue body (front cells excluded)
};

Queue queue_at(const DensityHistory& h, std::size_t n, RoadId r, std::size_t last) {
  Queue q;
  std::size_t k = last + 1;
  while (k > 0 && h.total(n, r, k - 1) > kQueueDensity) --k;
  q.cells = last + 1 - k;
  q.first = k;
  if (q.cells > kMinQueueCells) {
    double s = 0.0;
    for (std::size_t c = k + kMinQueueCells; c <= last; ++c) s += h.total(n, r, c);
    q.level = s / static_cast<double>(q.cells - kMinQueueCells);
  }
  return q;
}

double slope(const std::vector<double>& t, const std::vector<double>& x) {
  const double n = static_cast<double>(t.size());
  const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num += (t[i] - mt) * (x[i] - mx);
    den += (t[i] - mt) * (t[i] - mt);
  }
  return num / den;
}

// Maximum principle on one field: 0 <= rho_d <= rho <= rho_max per cell.
std::size_t bound_violations(const Network& n, const FieldLayout& layout, const std::vector<double>& s) {
  std::size_t bad = 0;
  const std::size_t nd = layout.destinations;
  for (const auto& r : n.roads)
    for (std::size_t k = 0; k < layout.road_cells[r.id]; ++k) {
      const std::size_t c = layout.cell_index(r.id, k) * nd;
      double total = 0.0;
      for (std::size_t d = 0; d < nd; ++d) total += s[c + d];
      if (!(total >= 0.0 && total <= r.rho_max)) ++bad;
      for (std::size_t d = 0; d < nd; ++d)
        if (!(s[c + d] >= 0.0 && s[c + d] <= total)) ++bad;
    }
  return bad;
}

std::size_t bound_violations(const Network& n, const DensityHistory& h) {
  std::size_t bad = 0;
  for (const auto& s : h.slices) bad += bound_violations(n, h.layout, s);
  return bad;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PolicySlice random_policy(const Network& n, std::mt19937& rng) {
  PolicySlice p(n.num_junctions(), n.num_destinations());
  for (std::size_t d = 0; d < n.num_destinations(); ++d) {
    const auto mask = reachable_mask(n, static_cast<int>(d));
    for (const auto& j : n.junctions) {
      if (j.kind != JunctionKind::kInternal || !mask[j.id]) continue;
      std::vector<RoadId> ok;
      for (RoadId r : j.out)
        if (mask[n.roads[r].end]) ok.push_back(r);
      p.at(j.id, d) = ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)];
    }
  }
  return p;
}

Network random_network(std::mt19937& rng) {
  std::uniform_int_distribution<int> size(2, 8);  // internal junctions; origins and destinations come on top
  for (;;) {
    try {
      Network n = load_network(oracle::random_network_text(rng, size(rng)));
      if (n.num_junctions() <= 10) return n;
    } catch (const ValidationError&) {
    }
  }
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const Network net = benchmark_network();
  const Scenario open = benchmark_scenario(false);
  const Scenario windowed = benchmark_scenario(true);
  const RoadId r2 = *net.find_road("r2"), r3 = *net.find_road("r3"), r4 = *net.find_road("r4"),
               r5 = *net.find_road("r5"), r6 = *net.find_road("r6");
  const JunctionId j2 = *net.find_junction("j2");
  const Grid grid = make_scenario_grid(net, open);
  const auto interior = interior_ranges(net, grid, open.delta);

  std::printf("benchmark: dx %g, dt %g, T %g, delta %g; rho_1 = 0.3 at j1, rho_2 = 0.4 at j3\n", open.dx,
              open.dt, open.horizon, open.delta);
  // Maximum-principle tally, taken as each run completes.
  std::size_t histories = 0, violations = 0;
  auto check_bounds = [&](const DensityHistory& h) {
    ++histories;
    violations += bound_violations(net, h);
  };
  double worst_balance = 0.0;
  std::size_t random_bound_violations = 0;  // closed random networks, checked step by step

  const RunOutputs basic = run_scenario(net, open, Behavior::kBasic);
  const DensityHistory& hb = basic.result.history;
  check_bounds(hb);
  worst_balance = std::max(worst_balance, basic.result.max_mass_residual);
  std::printf("basic run: %.2f s\n", seconds_since(start));

  // 1. Unused roads.
  {
    const double m = std::max(max_on_road(hb, r2), max_on_road(hb, r5));
    report(1, m <= kUnusedTol, "basic: r2 and r5 stay empty", fmt("max density %.3g, tol %.0e", m, kUnusedTol));
  }

  // Queues behind j5 on r3 and r4.
  const std::size_t last3 = interior[r3].hi - 1, last4 = interior[r4].hi - 1;
  std::size_t established = hb.num_slices();
  for (std::size_t n = 0; n < hb.num_slices(); ++n) {
    if (queue_at(hb, n, r3, last3).cells >= kMinQueueCells && queue_at(hb, n, r4, last4).cells >= kMinQueueCells) {
      established = n;
      break;
    }
  }

  // 2. Merge saturation.
  {
    const std::size_t cell = interior[r6].lo;
    double worst = 0.0, lo = 1.0, hi = 0.0;
    for (std::size_t n = established; n < hb.num_slices(); ++n) {
      const double v = hb.total(n, r6, cell);
      worst = std::max(worst, std::abs(v - 0.5));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const bool ok = established < hb.num_slices() && worst <= kSaturationTol;
    report(2, ok, "basic: first interior cell of r6 at the max-flux density once both queues stand",
           fmt("from t = %.3f: range [%.4f, %.4f], tol +-%.2f", static_cast<double>(established) * hb.dt, lo, hi,
               kSaturationTol));
  }

  // 3. Equal queue levels, different back-propagation speeds.
  double basic_level3 = 0.0;
  {
    std::vector<double> t, x3, x4;
    double level_gap = 0.0;
    for (std::size_t n = established; n < hb.num_slices(); ++n) {
      const Queue q3 = queue_at(hb, n, r3, last3), q4 = queue_at(hb, n, r4, last4);
      if (q3.cells <= kMinQueueCells || q4.cells <= kMinQueueCells) continue;
      level_gap = std::max(level_gap, std::abs(q3.level - q4.level));
      basic_level3 = std::max(basic_level3, q3.level);
      // Speed window: both backs still moving inside their roads.
      if (q3.first > interior[r3].lo + kMinQueueCells && q4.first > interior[r4].lo + kMinQueueCells) {
        t.push_back(static_cast<double>(n) * hb.dt);
        x3.push_back(static_cast<double>(q3.first) * hb.dx);
        x4.push_back(static_cast<double>(q4.first) * hb.dx);
      }
    }
    const bool have = t.size() >= 20;
    const double s3 = have ? slope(t, x3) : 0.0, s4 = have ? slope(t, x4) : 0.0;
    const bool ok = have && basic_level3 > 0.0 && level_gap <= kLevelTol && std::abs(s3 - s4) > kMinSpeedGap;
    report(3, ok, "basic: r3 and r4 queues share a density level but grow at different speeds",
           fmt("max level gap %.4f (tol %.2f); back speeds %.4f vs %.4f", level_gap, kLevelTol, s3, s4) +
               fmt(" (min gap %.2f); r3 level %.4f", kMinSpeedGap, basic_level3));
  }

  const auto t_rational = std::chrono::steady_clock::now();
  const RunOutputs rational = run_scenario(net, open, Behavior::kRational);
  const DensityHistory& hr = rational.result.history;
  check_bounds(hr);
  worst_balance = std::max(worst_balance, rational.result.max_mass_residual);
  std::printf("rational run: %.2f s\n", seconds_since(t_rational));

  // 4. Oscillating choice at j2 for group 1.
  {
    std::size_t switches = 0;
    for (const auto& e : rational.result.events)
      if (e.junction == j2 && e.destination == 0) ++switches;
    report(4, switches >= kMinSwitches, "rational: group-1 choice at j2 changes repeatedly",
           fmt("%.0f changes (need >= %.0f)", static_cast<double>(switches), static_cast<double>(kMinSwitches)));
  }

  // 5. No queue on r3.
  {
    const double m = max_on_road(hr, r3);
    const bool ok = basic_level3 > 0.0 && m <= basic_level3 - kQueueMargin;
    report(5, ok, "rational: r3 never reaches the basic queue level",
           fmt("max %.4f vs basic level %.4f - %.2f", m, basic_level3, kQueueMargin));
  }

  // 6. Period-two cycle of the fixed-point map.
  {
    const auto t_high = std::chrono::steady_clock::now();
    const NetworkSimulator sim = make_simulator(net, windowed);
    FixedPointOptions opts;
    opts.max_iters = 50;
    const SimulationResult guess = simulate_basic(sim);
    opts.tol = kRelativeTol * std::accumulate(guess.injected.begin(), guess.injected.end(), 0.0) * windowed.horizon;
    const ConvergenceReport rep = fixed_point_solve(sim, {GuessKind::kBasic, {}}, opts);
    std::printf("highly rational search: %zu iterations, %.2f s\n", rep.residuals.size(), seconds_since(t_high));
    for (const auto& w : rep.witnesses) {
      check_bounds(w.run.history);
      worst_balance = std::max(worst_balance, w.run.max_mass_residual);
    }
    auto case_a = [&](const XiState& w) {
      return max_group_on_road(w.run.history, r3, 0) == 0.0 && max_group_on_road(w.run.history, r2, 0) > 0.0;
    };
    auto case_b = [&](const XiState& w) {
      for (const auto& e : w.run.events)
        if (e.junction == j2 && e.destination == 0 && e.from == r2 && e.to == r3) return true;
      return false;
    };
    bool ok = rep.status == ConvergenceStatus::kPeriodTwoCycle && rep.witnesses.size() == 2;
    std::string detail = std::string("status ") + status_name(rep.status) + fmt(", tol %.3g", rep.tol);
    if (ok) {
      const auto& w1 = rep.witnesses[0];
      const auto& w2 = rep.witnesses[1];
      const bool ab = case_a(w2) && case_b(w1), ba = case_a(w1) && case_b(w2);
      ok = ab || ba;
      detail += ab ? "; witness 2 is A (no group 1 on r3), witness 1 is B (j2 switches r2 -> r3)"
                   : ba ? "; witness 1 is A (no group 1 on r3), witness 2 is B (j2 switches r2 -> r3)"
                        : "; witnesses do not match cases A and B";
    }
    report(6, ok, "highly rational: the fixed-point search ends in a two-cycle of cases A and B", detail);
  }

  // 7. Conservation.
  {
    std::mt19937 rng(2024);
    double worst_drift = 0.0;
    std::size_t nets = 0;
    for (; nets < 20; ++nets) {
      const Network n = random_network(rng);
      const Grid g = make_grid(n, 0.05, 0.025, 25.0);
      BoundaryData b;
      b.outflow = OutflowMode::kClosed;
      SimulatorOptions o;
      o.delta = 0.05;
      const NetworkSimulator sim(n, g, b, o, basic_policy(n, g.dx));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::vector<double> rho(sim.layout().size(), 0.0);
      for (const auto& r : n.roads)
        for (std::size_t k = 0; k < sim.layout().road_cells[r.id]; ++k) {
          const double total = 0.95 * u(rng);
          std::vector<double> w(n.num_destinations());
          double sw = 0.0;
          for (std::size_t d = 0; d < w.size(); ++d) {
            w[d] = reachable_mask(n, static_cast<int>(d))[r.end] ? u(rng) : 0.0;
            sw += w[d];
          }
          for (std::size_t d = 0; d < w.size(); ++d)
            if (sw > 0.0) rho[sim.layout().index(r.id, k, d)] = total * w[d] / sw;
        }
      SlabState s = sim.state_from_field(rho);
      auto mass = [&] {
        const auto m = sim.total_mass(s);
        return std::accumulate(m.begin(), m.end(), 0.0);
      };
      double m0 = mass();
      for (int step = 0; step < 1000; ++step) {
        sim.advance_slab(s, step % 50 == 0 ? random_policy(n, rng) : s.policy);
        random_bound_violations += bound_violations(n, sim.layout(), s.rho);
        const double m = mass();
        worst_drift = std::max(worst_drift, std::abs(m - m0) / m0);
        m0 = m;
      }
    }
    const bool ok = worst_drift <= kDriftTol && worst_balance <= kBalanceTol;
    report(7, ok, "conservation: closed random networks and open benchmark runs",
           fmt("%.0f networks x 1000 steps: max drift %.3g/step (tol %.0e); open residual %.3g", static_cast<double>(nets),
               worst_drift, kDriftTol, worst_balance) +
               fmt(" (tol %.0e)", kBalanceTol));
  }

  // 8. Scalar and shortest-path oracles.
  {
    Scenario s = open;
    s.inflows.erase(s.inflows.begin());  // group 2 only: r4 r6 r8
    const RunOutputs g2 = run_scenario(net, s, Behavior::kBasic);
    check_bounds(g2.result.history);
    const std::vector<RoadId> path{r4, r6, *net.find_road("r8")};
    std::size_t cells = 0;
    for (RoadId r : path) cells += g2.result.history.layout.road_cells[r];
    std::vector<double> ref(cells, 0.0);
    double worst = 0.0;
    const auto& h = g2.result.history;
    for (std::size_t n = 0; n < h.num_slices(); ++n) {
      if (n > 0) ref = oracle::scalar_godunov_step(ref, 0.4, h.dt / h.dx);
      std::size_t c = 0;
      for (RoadId r : path)
        for (std::size_t k = 0; k < h.layout.road_cells[r]; ++k, ++c)
          worst = std::max(worst, std::abs(h.density(n, r, k, 1) - ref[c]));
    }
    std::mt19937 rng(99);
    double worst_value = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Network n = random_network(rng);
      for (std::size_t d = 0; d < n.num_destinations(); ++d) {
        const auto sol = value_basic(n, d, 0.25, RunningCost::unit());
        const auto dist = oracle::dijkstra_to(n, n.destinations[d]);
        for (const auto& j : n.junctions) {
          const double v = sol.values.at(0, j.id);
          if (std::isinf(v) != std::isinf(dist[j.id])) worst_value = kInf;
          else if (std::isfinite(v)) worst_value = std::max(worst_value, std::abs(v - dist[j.id]));
        }
      }
    }
    report(8, worst <= kScalarTol && worst_value <= kValueTol,
           "oracles: group-2 path vs scalar Godunov; basic values vs Dijkstra on 100 networks",
           fmt("max cell error %.3g (tol %.0e); max value error %.3g (tol %.0e)", worst, kScalarTol, worst_value,
               kValueTol));
  }

  // 9. Reduction chain with no traffic.
  {
    Scenario s = windowed;
    for (auto& f : s.inflows) f.density = 0.0;
    const RunOutputs b0 = run_scenario(net, s, Behavior::kBasic);
    const RunOutputs r0 = run_scenario(net, s, Behavior::kRational);
    const RunOutputs h0 = run_scenario(net, s, Behavior::kHighlyRational);
    for (const auto* o : {&b0, &r0, &h0}) check_bounds(o->result.history);
    const double dr = density_distance(r0.result.history, b0.result.history);
    const double dh = density_distance(h0.result.history, b0.result.history);
    report(9, dr == 0.0 && dh == 0.0, "zero inflow: rational and highly rational equal basic",
           fmt("distances %.3g and %.3g (must be 0)", dr, dh));
  }

  // 10. Maximum principle over every history above.
  {
    const std::size_t bad = violations + random_bound_violations;
    report(10, bad == 0, "maximum principle: 0 <= rho_d <= rho <= rho_max in every acceptance run",
           fmt("%.0f benchmark histories + 20 random closed runs, %.0f violations", static_cast<double>(histories),
               static_cast<double>(bad)));
  }

  std::printf("%d of 10 criteria failed; total %.1f s\n", failures, seconds_since(start));
  return failures;
}
