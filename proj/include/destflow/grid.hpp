#ifndef DESTFLOW_GRID_HPP_
#define DESTFLOW_GRID_HPP_

#include <cstddef>
#include <vector>

#include "destflow/network.hpp"

namespace destflow {

struct Grid {
  double dx = 0.0;
  double dt = 0.0;
  double horizon = 0.0;
  std::size_t steps = 0;         // horizon / dt
  std::vector<std::size_t> cells_per_road;

  double time(std::size_t n) const { return static_cast<double>(n) * dt; }
  double ratio() const { return dt / dx; }
};

// Integer k with value == k * unit up to a relative 1e-9; throws
// ValidationError naming `what` otherwise.
std::size_t integer_multiple(double value, double unit, const char* what);

// Validates dx, dt, the horizon, the road lengths and the CFL condition.
Grid make_grid(const Network& n, double dx, double dt, double horizon);

// dt * v_max <= dx.
bool check_cfl(const Grid& g, double max_v_max);

}  // namespace destflow

#endif  // DESTFLOW_GRID_HPP_
