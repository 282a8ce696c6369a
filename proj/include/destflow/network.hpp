#ifndef DESTFLOW_NETWORK_HPP_
#define DESTFLOW_NETWORK_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace destflow {

// Dense indices: roads 0..N_R-1 and junctions 0..N_J-1, in order of first
// appearance in the network file.
using RoadId = std::int32_t;
using JunctionId = std::int32_t;
inline constexpr RoadId kNoRoad = -1;

inline constexpr double kDefaultRhoMax = 1.0;
inline constexpr double kDefaultVMax = 1.0;

struct Road {
  RoadId id = kNoRoad;
  std::string name;
  double a = 0.0;
  double b = 0.0;
  JunctionId start = -1;
  JunctionId end = -1;
  double rho_max = kDefaultRhoMax;
  double v_max = kDefaultVMax;

  double length() const { return b - a; }
};

enum class JunctionKind { kOrigin, kDestination, kInternal };

struct Junction {
  JunctionId id = -1;
  std::string name;
  std::vector<RoadId> inc;
  std::vector<RoadId> out;
  JunctionKind kind = JunctionKind::kInternal;
};

// Plain aggregate so that invalid networks can be built and inspected by
// validate_network. load_network only ever returns valid ones.
struct Network {
  std::vector<Road> roads;
  std::vector<Junction> junctions;
  // destinations[d] is the junction of destination index d (0-based here,
  // 1-based in user-facing output).
  std::vector<JunctionId> destinations;
  std::vector<JunctionId> origins;

  std::size_t num_roads() const { return roads.size(); }
  std::size_t num_junctions() const { return junctions.size(); }
  std::size_t num_destinations() const { return destinations.size(); }

  std::optional<RoadId> find_road(std::string_view name) const;
  std::optional<JunctionId> find_junction(std::string_view name) const;
  // Destination index of junction j, if j is a listed destination.
  std::optional<int> destination_index(JunctionId j) const;
  bool is_internal(JunctionId j) const {
    return junctions[j].kind == JunctionKind::kInternal;
  }
};

// Builds junction inc/out sets and kinds from the road list, in road order.
// Destinations and origins are left untouched.
void rebuild_topology(Network& n);

struct Violation {
  std::string entity;
  std::string message;
};

std::vector<Violation> validate_network(const Network& n);

// Extra geometric check for a junction neighbourhood of width delta.
std::vector<Violation> validate_road_lengths(const Network& n, double delta);

// Throws ParseError on malformed text and ValidationError when any invariant
// fails.
Network load_network(std::string_view text);
Network load_network_file(const std::string& path);

std::string serialize_network(const Network& n);

// Junctions from which destination index d can be reached.
std::vector<JunctionId> reachable_set(const Network& n, int d);
std::vector<bool> reachable_mask(const Network& n, int d);

}  // namespace destflow

#endif  // DESTFLOW_NETWORK_HPP_
