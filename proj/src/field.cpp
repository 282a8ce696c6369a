#include "destflow/field.hpp"

#include "destflow/scheme.hpp"

namespace destflow {

FieldLayout::FieldLayout(const Network& n, const Grid& g) : destinations(n.num_destinations()) {
  road_offset.reserve(n.num_roads());
  for (std::size_t r = 0; r < n.num_roads(); ++r) {
    road_offset.push_back(total_cells);
    road_cells.push_back(g.cells_per_road[r]);
    total_cells += g.cells_per_road[r];
  }
}

std::vector<double> cell_totals(const FieldLayout& layout, std::span<const double> field) {
  std::vector<double> totals(layout.total_cells);
  const std::size_t nd = layout.destinations;
  for (std::size_t c = 0; c < layout.total_cells; ++c)
    totals[c] = cell_total(field.subspan(c * nd, nd));
  return totals;
}

double DensityHistory::total(std::size_t n, RoadId r, std::size_t k) const {
  const std::size_t nd = layout.destinations;
  return cell_total(std::span<const double>(slices[n]).subspan(layout.cell_index(r, k) * nd, nd));
}

DensityHistory DensityHistory::zeros(const FieldLayout& layout, const Grid& g) {
  DensityHistory h;
  h.layout = layout;
  h.dx = g.dx;
  h.dt = g.dt;
  h.slices.assign(g.steps + 1, std::vector<double>(layout.size(), 0.0));
  return h;
}

}  // namespace destflow
