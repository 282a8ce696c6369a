#ifndef DESTFLOW_POLICY_HPP_
#define DESTFLOW_POLICY_HPP_

#include <cstddef>
#include <vector>

#include "destflow/network.hpp"

namespace destflow {

// Outgoing road chosen at every junction for every destination, for one
// slab. kNoRoad marks "no finite route" (and is the entry for origin-less
// bookkeeping at destinations).
struct PolicySlice {
  std::size_t destinations = 0;
  std::vector<RoadId> choice;  // [junction * destinations + d]

  PolicySlice() = default;
  PolicySlice(std::size_t num_junctions, std::size_t num_destinations)
      : destinations(num_destinations), choice(num_junctions * num_destinations, kNoRoad) {}

  RoadId at(JunctionId j, std::size_t d) const { return choice[j * destinations + d]; }
  RoadId& at(JunctionId j, std::size_t d) { return choice[j * destinations + d]; }
  bool operator==(const PolicySlice&) const = default;
};

// Piecewise-constant policy: slab h covers [h dtau, (h+1) dtau[. A single
// slab is held for all times.
struct NextPolicy {
  std::vector<PolicySlice> slabs;

  const PolicySlice& slab(std::size_t h) const {
    return slabs.size() == 1 ? slabs.front() : slabs.at(h);
  }
  bool operator==(const NextPolicy&) const = default;
};

}  // namespace destflow

#endif  // DESTFLOW_POLICY_HPP_
