#include "destflow/junction.hpp"

#include <algorithm>
#include <string>

#include "destflow/error.hpp"

namespace destflow {

std::size_t neighbourhood_cells(const Network& n, const Grid& g, double delta) {
  const std::size_t m = integer_multiple(delta, g.dx, "junction neighbourhood width");
  if (m == 0) throw ValidationError("junction neighbourhood width must be at least one cell");
  for (const auto& r : n.roads)
    if (g.cells_per_road[r.id] < 2 * m)
      throw ValidationError("road " + r.name + " is shorter than twice the junction neighbourhood");
  return m;
}

std::vector<Subnetwork> build_subnetworks(const Network& n, const Grid& g, double delta) {
  const std::size_t m = neighbourhood_cells(n, g, delta);
  std::vector<Subnetwork> subs;
  for (const auto& j : n.junctions) {
    if (j.kind != JunctionKind::kInternal) continue;
    Subnetwork s;
    s.junction = j.id;
    for (RoadId i : j.inc) s.inc_segments.push_back({i, g.cells_per_road[i] - m, m});
    for (RoadId o : j.out) s.out_segments.push_back({o, 0, m});
    subs.push_back(std::move(s));
  }
  return subs;
}

std::vector<InteriorRange> interior_ranges(const Network& n, const Grid& g, double delta) {
  const std::size_t m = neighbourhood_cells(n, g, delta);
  std::vector<InteriorRange> ranges;
  for (const auto& r : n.roads) {
    InteriorRange ir;
    ir.lo = n.is_internal(r.start) ? m : 0;
    ir.hi = n.is_internal(r.end) ? g.cells_per_road[r.id] - m : g.cells_per_road[r.id];
    ranges.push_back(ir);
  }
  return ranges;
}

namespace {

SplitCoefficients split_from_masses(const std::vector<double>& masses, std::size_t num_incoming,
                                    std::size_t nd) {
  SplitCoefficients lam;
  lam.destinations = nd;
  lam.lambda.assign(num_incoming * nd, 0.0);
  for (std::size_t d = 0; d < nd; ++d) {
    double denom = 0.0;
    for (std::size_t i = 0; i < num_incoming; ++i) denom += masses[i * nd + d];
    for (std::size_t i = 0; i < num_incoming; ++i)
      lam.lambda[i * nd + d] =
          denom > 0.0 ? masses[i * nd + d] / denom : 1.0 / static_cast<double>(num_incoming);
  }
  return lam;
}

std::size_t index_in(const std::vector<RoadId>& roads, RoadId r) {
  return static_cast<std::size_t>(std::find(roads.begin(), roads.end(), r) - roads.begin());
}

}  // namespace

SplitCoefficients compute_split_coefficients(std::span<const PathPopulation> paths,
                                             std::size_t num_incoming, std::size_t destinations,
                                             double dx) {
  // Incoming roads are identified by order of first appearance among the
  // path populations, which follows the junction's inc order.
  std::vector<RoadId> inc;
  for (const auto& p : paths)
    if (p.incoming != kNoRoad && std::find(inc.begin(), inc.end(), p.incoming) == inc.end())
      inc.push_back(p.incoming);
  std::vector<double> masses(num_incoming * destinations, 0.0);
  for (const auto& p : paths) {
    if (p.incoming == kNoRoad) continue;
    const std::size_t i = index_in(inc, p.incoming);
    if (i >= num_incoming) continue;
    // The incoming half is the first half of the profile.
    const std::size_t half = p.profile.size() / 2;
    double s = 0.0;
    for (std::size_t k = 0; k < half; ++k) s += p.profile[k];
    masses[i * destinations + p.destination] += s * dx;
  }
  return split_from_masses(masses, num_incoming, destinations);
}

SplitCoefficients compute_split_coefficients(const Subnetwork& sub, const FieldLayout& layout,
                                             std::span<const double> field, double dx) {
  const std::size_t nd = layout.destinations;
  std::vector<double> masses(sub.inc_segments.size() * nd, 0.0);
  for (std::size_t i = 0; i < sub.inc_segments.size(); ++i) {
    const Segment& s = sub.inc_segments[i];
    for (std::size_t d = 0; d < nd; ++d) {
      double m = 0.0;
      for (std::size_t k = 0; k < s.count; ++k) m += field[layout.index(s.road, s.first + k, d)];
      masses[i * nd + d] = m * dx;
    }
  }
  return split_from_masses(masses, sub.inc_segments.size(), nd);
}

std::vector<PathPopulation> init_path_densities(const Network& n, const Subnetwork& sub,
                                                const FieldLayout& layout,
                                                std::span<const double> field,
                                                const SplitCoefficients& lam,
                                                const PolicySlice& next) {
  const Junction& j = n.junctions[sub.junction];
  const std::size_t nd = layout.destinations;
  std::vector<RoadId> chosen(nd);
  std::vector<bool> unroutable(nd, false);
  for (std::size_t d = 0; d < nd; ++d) {
    RoadId o = next.at(j.id, d);
    if (o == kNoRoad) {
      o = j.out.front();
      unroutable[d] = true;
    } else if (std::find(j.out.begin(), j.out.end(), o) == j.out.end()) {
      throw ValidationError("policy selects road " + std::to_string(o) + " which does not leave junction " +
                            j.name);
    }
    chosen[d] = o;
  }

  std::vector<PathPopulation> paths;
  for (std::size_t i = 0; i < sub.inc_segments.size(); ++i) {
    const Segment& in = sub.inc_segments[i];
    for (std::size_t d = 0; d < nd; ++d) {
      const Segment& out = sub.out_segments[index_in(j.out, chosen[d])];
      PathPopulation p;
      p.incoming = in.road;
      p.destination = d;
      p.outgoing = chosen[d];
      p.unroutable = unroutable[d];
      p.profile.reserve(in.count + out.count);
      for (std::size_t k = 0; k < in.count; ++k)
        p.profile.push_back(field[layout.index(in.road, in.first + k, d)]);
      const double l = lam.at(i, d);
      for (std::size_t k = 0; k < out.count; ++k)
        p.profile.push_back(l * field[layout.index(out.road, out.first + k, d)]);
      paths.push_back(std::move(p));
    }
  }
  for (const Segment& out : sub.out_segments) {
    for (std::size_t d = 0; d < nd; ++d) {
      if (chosen[d] == out.road) continue;
      PathPopulation p;
      p.incoming = kNoRoad;
      p.destination = d;
      p.outgoing = out.road;
      for (std::size_t k = 0; k < out.count; ++k)
        p.profile.push_back(field[layout.index(out.road, out.first + k, d)]);
      paths.push_back(std::move(p));
    }
  }
  return paths;
}

void write_back(const Subnetwork& sub, std::span<const PathPopulation> paths,
                const FieldLayout& layout, std::span<double> field) {
  const std::size_t nd = layout.destinations;
  auto clear = [&](const Segment& s) {
    for (std::size_t k = 0; k < s.count; ++k)
      for (std::size_t d = 0; d < nd; ++d) field[layout.index(s.road, s.first + k, d)] = 0.0;
  };
  for (const auto& s : sub.inc_segments) clear(s);
  for (const auto& s : sub.out_segments) clear(s);

  auto find_inc = [&](RoadId r) -> const Segment& {
    for (const auto& s : sub.inc_segments)
      if (s.road == r) return s;
    throw ValidationError("path population references a road outside the junction");
  };
  auto find_out = [&](RoadId r) -> const Segment& {
    for (const auto& s : sub.out_segments)
      if (s.road == r) return s;
    throw ValidationError("path population references a road outside the junction");
  };
  for (const auto& p : paths) {
    std::size_t pos = 0;
    if (p.incoming != kNoRoad) {
      const Segment& in = find_inc(p.incoming);
      for (std::size_t k = 0; k < in.count; ++k, ++pos)
        field[layout.index(in.road, in.first + k, p.destination)] += p.profile[pos];
    }
    const Segment& out = find_out(p.outgoing);
    for (std::size_t k = 0; k < out.count; ++k, ++pos)
      field[layout.index(out.road, out.first + k, p.destination)] += p.profile[pos];
  }
}

void JunctionSystem::rebuild(const Network& n, const Subnetwork& sub, const FieldLayout& fl) {
  local_segments.clear();
  local_cell.clear();
  layout = MultiPathLayout{};
  std::vector<std::size_t> seg_base;
  auto add = [&](const Segment& s) {
    seg_base.push_back(local_cell.size());
    local_segments.push_back(s);
    for (std::size_t k = 0; k < s.count; ++k) {
      local_cell.push_back(fl.cell_index(s.road, s.first + k));
      const Road& r = n.roads[s.road];
      layout.cell_params.push_back({r.rho_max, r.v_max});
    }
  };
  for (const auto& s : sub.inc_segments) add(s);
  for (const auto& s : sub.out_segments) add(s);

  const std::size_t num_inc = sub.inc_segments.size();
  auto local_range = [&](std::size_t seg, std::vector<int>& path) {
    for (std::size_t k = 0; k < local_segments[seg].count; ++k)
      path.push_back(static_cast<int>(seg_base[seg] + k));
  };
  for (const auto& p : paths) {
    std::vector<int> path;
    if (p.incoming != kNoRoad) {
      for (std::size_t s = 0; s < num_inc; ++s)
        if (sub.inc_segments[s].road == p.incoming) local_range(s, path);
    }
    for (std::size_t s = 0; s < sub.out_segments.size(); ++s)
      if (sub.out_segments[s].road == p.outgoing) local_range(num_inc + s, path);
    layout.paths.push_back(std::move(path));
  }
  layout.finalize();
}

std::vector<double> JunctionSystem::flat_values() const {
  std::vector<double> v;
  v.reserve(layout.size());
  for (const auto& p : paths) v.insert(v.end(), p.profile.begin(), p.profile.end());
  return v;
}

void JunctionSystem::set_flat_values(std::span<const double> values) {
  std::size_t pos = 0;
  for (auto& p : paths)
    for (double& x : p.profile) x = values[pos++];
}

}  // namespace destflow
