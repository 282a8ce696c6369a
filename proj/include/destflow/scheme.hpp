#ifndef DESTFLOW_SCHEME_HPP_
#define DESTFLOW_SCHEME_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "destflow/flux.hpp"

namespace destflow {

// Below this total density a cell is treated as empty when splitting its
// outgoing flux among populations.
inline constexpr double kEmptyCellDensity = 1e-14;

// u_alpha / u, with the ratio set to 0 on (numerically) empty cells.
inline double population_fraction(double u_alpha, double u) {
  if (u == 0.0 || u < kEmptyCellDensity) return 0.0;
  return u_alpha / u;
}

inline double cell_total(std::span<const double> populations) {
  double s = 0.0;
  for (double v : populations) s += v;
  return s;
}

// Cell-major storage: values[k * pops + a] is population a on cell k.
struct DensityField {
  std::size_t pops = 0;
  std::size_t cells = 0;
  std::vector<double> values;

  DensityField() = default;
  DensityField(std::size_t num_pops, std::size_t num_cells)
      : pops(num_pops), cells(num_cells), values(num_pops * num_cells, 0.0) {}

  double& at(std::size_t a, std::size_t k) { return values[k * pops + a]; }
  double at(std::size_t a, std::size_t k) const { return values[k * pops + a]; }
  std::span<const double> cell(std::size_t k) const {
    return std::span<const double>(values).subspan(k * pops, pops);
  }
  double total(std::size_t k) const { return cell_total(cell(k)); }
  double mass(double dx) const;
};

enum class OutflowKind {
  kFree,    // ghost cell copies the last cell
  kClosed,  // zero flux
  kGhost,   // ghost cell with a prescribed total density
};

struct Outflow {
  OutflowKind kind = OutflowKind::kFree;
  double ghost_total = 0.0;
  FluxParams ghost_params{};
};

// One explicit step of the multi-population Godunov scheme on a single
// segment shared by all populations:
//   u_a^k <- u_a^k - r * (u_a^k/u^k G(u^k,u^{k+1}) - u_a^{k-1}/u^{k-1} G(u^{k-1},u^k))
// with r = dt/dx. `inflow` is the per-population flux entering cell 0;
// `outflow_flux`, when non-empty, receives the per-population flux leaving
// the last cell. Throws NumericalError if the output breaks the bounds
// 0 <= u_a, u <= rho_max.
void scheme_step(std::span<const double> in, std::span<double> out, std::size_t pops,
                 std::span<const double> inflow, const Outflow& outflow, const FluxParams& p,
                 double ratio, std::span<double> outflow_flux = {});

DensityField scheme_step(const DensityField& field, std::span<const double> inflow,
                         const Outflow& outflow, const FluxParams& p, double ratio);

// Several populations, each travelling along its own sequence of cells drawn
// from a shared set of local cells (overlapping paths through a junction).
struct MultiPathLayout {
  std::vector<FluxParams> cell_params;   // per local cell
  std::vector<std::vector<int>> paths;   // per population, local cells in travel order
  std::vector<std::size_t> offsets;      // start of each population in the flat value array

  void finalize();                       // fills offsets
  std::size_t size() const { return offsets.empty() ? 0 : offsets.back(); }
};

struct PathDownstream {
  bool closed = false;
  double total = 0.0;
  FluxParams params{};
};

// One step of the same scheme on a multi-path system. `totals` holds the
// total density of every local cell (all populations present there);
// `inflow[a]` is the flux entering population a's first cell. Populations
// leave through `downstream[a]`, recorded in `outflow_flux[a]`.
void multipath_step(const MultiPathLayout& layout, std::span<const double> in,
                    std::span<double> out, std::span<const double> totals,
                    std::span<const double> inflow, std::span<const PathDownstream> downstream,
                    double ratio, std::span<double> outflow_flux);

// Throws NumericalError if any population is negative or any cell total
// exceeds rho_max.
void check_bounds(std::span<const double> values, std::size_t pops, const FluxParams& p,
                  const char* context);

}  // namespace destflow

#endif  // DESTFLOW_SCHEME_HPP_
