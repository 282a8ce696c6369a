#include "destflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "destflow/error.hpp"

namespace destflow {

std::size_t integer_multiple(double value, double unit, const char* what) {
  if (!(unit > 0.0) || !(value >= 0.0))
    throw ValidationError(std::string(what) + ": invalid value");
  const double q = value / unit;
  const double k = std::round(q);
  if (std::abs(q - k) > 1e-9 * std::max(1.0, k))
    throw ValidationError(std::string(what) + " (" + std::to_string(value) +
                          ") is not an integer multiple of " + std::to_string(unit));
  return static_cast<std::size_t>(k);
}

bool check_cfl(const Grid& g, double max_v_max) { return g.dt * max_v_max <= g.dx; }

Grid make_grid(const Network& n, double dx, double dt, double horizon) {
  if (!(dx > 0.0)) throw ValidationError("dx must be positive");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(horizon > 0.0)) throw ValidationError("horizon must be positive");
  Grid g;
  g.dx = dx;
  g.dt = dt;
  g.horizon = horizon;
  g.steps = integer_multiple(horizon, dt, "horizon");
  double vmax = 0.0;
  for (const auto& r : n.roads) {
    const std::size_t cells = integer_multiple(r.length(), dx, ("length of road " + r.name).c_str());
    if (cells == 0) throw ValidationError("road " + r.name + " has no cells");
    g.cells_per_road.push_back(cells);
    vmax = std::max(vmax, r.v_max);
  }
  if (!check_cfl(g, vmax))
    throw NumericalError("CFL violated: dt * v_max = " + std::to_string(dt * vmax) +
                         " > dx = " + std::to_string(dx));
  return g;
}

}  // namespace destflow
