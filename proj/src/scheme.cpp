#include "destflow/scheme.hpp"

#include <string>

#include "destflow/error.hpp"

namespace destflow {

double DensityField::mass(double dx) const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * dx;
}

void scheme_step(std::span<const double> in, std::span<double> out, std::size_t pops,
                 std::span<const double> inflow, const Outflow& outflow, const FluxParams& p,
                 double ratio, std::span<double> outflow_flux) {
  const std::size_t cells = pops == 0 ? 0 : in.size() / pops;
  if (cells == 0) return;

  std::vector<double> totals(cells);
  for (std::size_t k = 0; k < cells; ++k) totals[k] = cell_total(in.subspan(k * pops, pops));

  // flux[k] crosses the right edge of cell k.
  std::vector<double> edge(cells);
  for (std::size_t k = 0; k + 1 < cells; ++k) edge[k] = godunov_flux(totals[k], totals[k + 1], p);
  switch (outflow.kind) {
    case OutflowKind::kFree:
      edge[cells - 1] = godunov_flux(totals[cells - 1], totals[cells - 1], p);
      break;
    case OutflowKind::kClosed:
      edge[cells - 1] = 0.0;
      break;
    case OutflowKind::kGhost:
      edge[cells - 1] = godunov_flux(totals[cells - 1], p, outflow.ghost_total, outflow.ghost_params);
      break;
  }

  for (std::size_t a = 0; a < pops; ++a) {
    double entering = inflow.empty() ? 0.0 : inflow[a];
    for (std::size_t k = 0; k < cells; ++k) {
      const double u_a = in[k * pops + a];
      const double leaving = population_fraction(u_a, totals[k]) * edge[k];
      out[k * pops + a] = u_a - ratio * (leaving - entering);
      entering = leaving;
    }
    if (!outflow_flux.empty()) outflow_flux[a] = entering;
  }
  check_bounds(out, pops, p, "road segment");
}

DensityField scheme_step(const DensityField& field, std::span<const double> inflow,
                         const Outflow& outflow, const FluxParams& p, double ratio) {
  DensityField next(field.pops, field.cells);
  scheme_step(field.values, next.values, field.pops, inflow, outflow, p, ratio);
  return next;
}

void MultiPathLayout::finalize() {
  offsets.assign(paths.size() + 1, 0);
  for (std::size_t a = 0; a < paths.size(); ++a) offsets[a + 1] = offsets[a] + paths[a].size();
}

void multipath_step(const MultiPathLayout& layout, std::span<const double> in,
                    std::span<double> out, std::span<const double> totals,
                    std::span<const double> inflow, std::span<const PathDownstream> downstream,
                    double ratio, std::span<double> outflow_flux) {
  for (std::size_t a = 0; a < layout.paths.size(); ++a) {
    const auto& path = layout.paths[a];
    const std::size_t base = layout.offsets[a];
    double entering = inflow[a];
    for (std::size_t j = 0; j < path.size(); ++j) {
      const int c = path[j];
      const double u_a = in[base + j];
      double edge = 0.0;
      if (j + 1 < path.size()) {
        const int next = path[j + 1];
        edge = godunov_flux(totals[c], layout.cell_params[c], totals[next], layout.cell_params[next]);
      } else if (!downstream[a].closed) {
        edge = godunov_flux(totals[c], layout.cell_params[c], downstream[a].total, downstream[a].params);
      }
      const double leaving = population_fraction(u_a, totals[c]) * edge;
      out[base + j] = u_a - ratio * (leaving - entering);
      entering = leaving;
    }
    outflow_flux[a] = entering;
  }
}

void check_bounds(std::span<const double> values, std::size_t pops, const FluxParams& p,
                  const char* context) {
  const std::size_t cells = pops == 0 ? 0 : values.size() / pops;
  for (std::size_t k = 0; k < cells; ++k) {
    double total = 0.0;
    for (std::size_t a = 0; a < pops; ++a) {
      const double v = values[k * pops + a];
      if (!(v >= 0.0))
        throw NumericalError(std::string(context) + ": negative density " + std::to_string(v) +
                             " in cell " + std::to_string(k));
      total += v;
    }
    if (!(total <= p.rho_max))
      throw NumericalError(std::string(context) + ": density " + std::to_string(total) +
                           " above rho_max in cell " + std::to_string(k));
  }
}

}  // namespace destflow
