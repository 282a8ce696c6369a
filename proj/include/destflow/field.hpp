#ifndef DESTFLOW_FIELD_HPP_
#define DESTFLOW_FIELD_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "destflow/grid.hpp"
#include "destflow/network.hpp"

namespace destflow {

// Flat storage of per-destination densities on every road cell of the
// network: index (road_offset[r] + k) * destinations + d.
struct FieldLayout {
  std::size_t destinations = 0;
  std::vector<std::size_t> road_offset;
  std::vector<std::size_t> road_cells;
  std::size_t total_cells = 0;

  FieldLayout() = default;
  FieldLayout(const Network& n, const Grid& g);

  std::size_t size() const { return total_cells * destinations; }
  std::size_t index(RoadId r, std::size_t k, std::size_t d) const {
    return (road_offset[r] + k) * destinations + d;
  }
  std::size_t cell_index(RoadId r, std::size_t k) const { return road_offset[r] + k; }
  bool operator==(const FieldLayout&) const = default;
};

// Per-cell total density (sum over destinations) of a flat field.
std::vector<double> cell_totals(const FieldLayout& layout, std::span<const double> field);

// Space-time record of the network densities, one slice per time node t^n,
// n = 0..steps.
struct DensityHistory {
  FieldLayout layout;
  double dx = 0.0;
  double dt = 0.0;
  std::vector<std::vector<double>> slices;

  std::size_t num_slices() const { return slices.size(); }
  double total(std::size_t n, RoadId r, std::size_t k) const;
  double density(std::size_t n, RoadId r, std::size_t k, std::size_t d) const {
    return slices[n][layout.index(r, k, d)];
  }

  // All-zero history over `steps + 1` nodes.
  static DensityHistory zeros(const FieldLayout& layout, const Grid& g);
};

}  // namespace destflow

#endif  // DESTFLOW_FIELD_HPP_
