#ifndef DESTFLOW_JUNCTION_HPP_
#define DESTFLOW_JUNCTION_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "destflow/field.hpp"
#include "destflow/grid.hpp"
#include "destflow/network.hpp"
#include "destflow/policy.hpp"
#include "destflow/scheme.hpp"

namespace destflow {

// Contiguous cell range [first, first + count) of one road.
struct Segment {
  RoadId road = kNoRoad;
  std::size_t first = 0;
  std::size_t count = 0;
};

// Cells of each road that belong to the road interior (advanced by the
// road equations): [lo, hi).
struct InteriorRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

// Neighbourhood of one internal junction: the last `m` cells of every
// incoming road and the first `m` cells of every outgoing road, with
// delta = m * dx.
struct Subnetwork {
  JunctionId junction = -1;
  std::vector<Segment> inc_segments;  // aligned with Junction::inc
  std::vector<Segment> out_segments;  // aligned with Junction::out
};

// Throws ValidationError when delta is not a positive multiple of dx or a
// road is shorter than 2 delta.
std::size_t neighbourhood_cells(const Network& n, const Grid& g, double delta);
std::vector<Subnetwork> build_subnetworks(const Network& n, const Grid& g, double delta);
std::vector<InteriorRange> interior_ranges(const Network& n, const Grid& g, double delta);

// Density of one population travelling through a junction. Path
// populations (incoming != kNoRoad) live on the incoming segment followed
// by the outgoing segment of their chosen road. Residual populations
// (incoming == kNoRoad) hold vehicles of destination d already committed to
// an outgoing road that the current policy no longer selects; they live on
// that road's outgoing segment only.
struct PathPopulation {
  RoadId incoming = kNoRoad;
  std::size_t destination = 0;
  RoadId outgoing = kNoRoad;
  std::vector<double> profile;
  bool unroutable = false;  // policy had no finite route for this group
};

// lambda[i * destinations + d] for incoming index i of the junction.
struct SplitCoefficients {
  std::size_t destinations = 0;
  std::vector<double> lambda;

  double at(std::size_t i, std::size_t d) const { return lambda[i * destinations + d]; }
};

// Ratio of incoming-segment masses of the (i,d) path populations;
// equidistributed over the incoming roads when a destination has no mass.
SplitCoefficients compute_split_coefficients(std::span<const PathPopulation> paths,
                                             std::size_t num_incoming, std::size_t destinations,
                                             double dx);
// Same rule reading the incoming segments straight from a road field.
SplitCoefficients compute_split_coefficients(const Subnetwork& sub, const FieldLayout& layout,
                                             std::span<const double> field, double dx);

// Builds the population set of one junction for a slab. `next` must name an
// outgoing road of the junction for every destination; kNoRoad entries are
// routed to the first outgoing road and flagged unroutable.
std::vector<PathPopulation> init_path_densities(const Network& n, const Subnetwork& sub,
                                                const FieldLayout& layout,
                                                std::span<const double> field,
                                                const SplitCoefficients& lam,
                                                const PolicySlice& next);

// Sums the populations back into per-destination densities on the road cells
// of the junction neighbourhood.
void write_back(const Subnetwork& sub, std::span<const PathPopulation> paths,
                const FieldLayout& layout, std::span<double> field);

// The populations of a junction mapped onto local cells for multipath_step.
struct JunctionSystem {
  std::vector<Segment> local_segments;      // in order: incoming then outgoing
  std::vector<std::size_t> local_cell;      // global cell index per local cell
  MultiPathLayout layout;
  std::vector<PathPopulation> paths;
  SplitCoefficients lambda;

  void rebuild(const Network& n, const Subnetwork& sub, const FieldLayout& layout);
  std::vector<double> flat_values() const;
  void set_flat_values(std::span<const double> values);
};

}  // namespace destflow

#endif  // DESTFLOW_JUNCTION_HPP_
