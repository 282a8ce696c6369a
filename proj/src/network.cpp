#include "destflow/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "destflow/error.hpp"

namespace destflow {

namespace {

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

double parse_number(std::string_view tok, int line_no, const char* what) {
  // std::from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line_no) + ": invalid " + what + " '" +
                     std::string(tok) + "'");
  }
  return value;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::optional<RoadId> Network::find_road(std::string_view name) const {
  for (const auto& r : roads)
    if (r.name == name) return r.id;
  return std::nullopt;
}

std::optional<JunctionId> Network::find_junction(std::string_view name) const {
  for (const auto& j : junctions)
    if (j.name == name) return j.id;
  return std::nullopt;
}

std::optional<int> Network::destination_index(JunctionId j) const {
  for (std::size_t d = 0; d < destinations.size(); ++d)
    if (destinations[d] == j) return static_cast<int>(d);
  return std::nullopt;
}

void rebuild_topology(Network& n) {
  for (auto& j : n.junctions) {
    j.inc.clear();
    j.out.clear();
  }
  for (const auto& r : n.roads) {
    n.junctions[r.start].out.push_back(r.id);
    n.junctions[r.end].inc.push_back(r.id);
  }
  for (auto& j : n.junctions) {
    if (j.inc.empty())
      j.kind = JunctionKind::kOrigin;
    else if (j.out.empty())
      j.kind = JunctionKind::kDestination;
    else
      j.kind = JunctionKind::kInternal;
  }
}

std::vector<Violation> validate_network(const Network& n) {
  std::vector<Violation> v;
  const auto nj = static_cast<JunctionId>(n.junctions.size());
  const auto nr = static_cast<RoadId>(n.roads.size());

  if (n.roads.empty()) v.push_back({"network", "no roads"});
  if (n.junctions.empty()) v.push_back({"network", "no junctions"});
  if (n.origins.empty()) v.push_back({"network", "no origins"});
  if (n.destinations.empty()) v.push_back({"network", "no destinations"});

  for (JunctionId j = 0; j < nj; ++j)
    if (n.junctions[j].id != j)
      v.push_back({n.junctions[j].name, "junction id not dense"});
  for (RoadId r = 0; r < nr; ++r) {
    const Road& road = n.roads[r];
    if (road.id != r) v.push_back({road.name, "road id not dense"});
    if (!(road.b - road.a > 0.0)) v.push_back({road.name, "non-positive length"});
    if (!(road.rho_max > 0.0)) v.push_back({road.name, "rho_max must be positive"});
    if (!(road.v_max > 0.0)) v.push_back({road.name, "v_max must be positive"});
    if (road.start < 0 || road.start >= nj || road.end < 0 || road.end >= nj) {
      v.push_back({road.name, "endpoint is not a junction"});
      continue;
    }
    const auto& out = n.junctions[road.start].out;
    const auto& inc = n.junctions[road.end].inc;
    if (std::find(out.begin(), out.end(), r) == out.end())
      v.push_back({road.name, "missing from out set of its start junction"});
    if (std::find(inc.begin(), inc.end(), r) == inc.end())
      v.push_back({road.name, "missing from inc set of its end junction"});
  }
  // Names must be unique for the file format to round-trip.
  {
    std::map<std::string, int> seen;
    for (const auto& r : n.roads)
      if (++seen["r:" + r.name] == 2) v.push_back({r.name, "duplicate road name"});
    for (const auto& j : n.junctions)
      if (++seen["j:" + j.name] == 2) v.push_back({j.name, "duplicate junction name"});
  }

  std::size_t internal = 0;
  for (const auto& j : n.junctions) {
    for (RoadId r : j.inc) {
      if (r < 0 || r >= nr || n.roads[r].end != j.id)
        v.push_back({j.name, "inc set lists a road that does not end here"});
      if (std::find(j.out.begin(), j.out.end(), r) != j.out.end())
        v.push_back({j.name, "inc and out sets are not disjoint"});
    }
    for (RoadId r : j.out)
      if (r < 0 || r >= nr || n.roads[r].start != j.id)
        v.push_back({j.name, "out set lists a road that does not start here"});
    if (j.inc.empty() && j.out.empty()) v.push_back({j.name, "isolated junction"});

    const bool is_origin = j.inc.empty() && !j.out.empty();
    const bool is_dest = j.out.empty() && !j.inc.empty();
    const JunctionKind expected = is_origin ? JunctionKind::kOrigin
                                  : is_dest ? JunctionKind::kDestination
                                            : JunctionKind::kInternal;
    if (j.kind != expected) v.push_back({j.name, "kind inconsistent with inc/out sets"});
    if (!is_origin && !is_dest) ++internal;

    const bool listed_dest =
        std::find(n.destinations.begin(), n.destinations.end(), j.id) != n.destinations.end();
    const bool listed_origin =
        std::find(n.origins.begin(), n.origins.end(), j.id) != n.origins.end();
    if (is_dest && !listed_dest) v.push_back({j.name, "sink junction not listed as destination"});
    if (listed_dest && !is_dest) v.push_back({j.name, "listed destination has outgoing roads"});
    if (is_origin && !listed_origin) v.push_back({j.name, "source junction not listed as origin"});
    if (listed_origin && !is_origin) v.push_back({j.name, "listed origin has incoming roads"});
  }
  if (!n.junctions.empty() && internal == 0)
    v.push_back({"network", "no internal junctions"});

  for (std::size_t a = 0; a < n.destinations.size(); ++a)
    for (std::size_t b = a + 1; b < n.destinations.size(); ++b)
      if (n.destinations[a] == n.destinations[b])
        v.push_back({"network", "destination listed twice"});

  // Reachability only makes sense once the structure is sound.
  if (v.empty()) {
    for (std::size_t d = 0; d < n.destinations.size(); ++d) {
      const auto mask = reachable_mask(n, static_cast<int>(d));
      for (JunctionId o : n.origins)
        if (!mask[o])
          v.push_back({n.junctions[o].name,
                       "cannot reach destination " + n.junctions[n.destinations[d]].name});
    }
  }
  return v;
}

std::vector<Violation> validate_road_lengths(const Network& n, double delta) {
  std::vector<Violation> v;
  for (const auto& r : n.roads)
    if (r.length() < 2.0 * delta * (1.0 - 1e-12))
      v.push_back({r.name, "shorter than twice the junction neighbourhood width"});
  return v;
}

std::vector<bool> reachable_mask(const Network& n, int d) {
  if (d < 0 || d >= static_cast<int>(n.destinations.size()))
    throw ValidationError("destination index " + std::to_string(d + 1) + " out of range");
  std::vector<bool> mask(n.junctions.size(), false);
  std::vector<JunctionId> stack{n.destinations[d]};
  mask[n.destinations[d]] = true;
  while (!stack.empty()) {
    JunctionId j = stack.back();
    stack.pop_back();
    for (RoadId r : n.junctions[j].inc) {
      JunctionId s = n.roads[r].start;
      if (!mask[s]) {
        mask[s] = true;
        stack.push_back(s);
      }
    }
  }
  return mask;
}

std::vector<JunctionId> reachable_set(const Network& n, int d) {
  const auto mask = reachable_mask(n, d);
  std::vector<JunctionId> out;
  for (JunctionId j = 0; j < static_cast<JunctionId>(mask.size()); ++j)
    if (mask[j]) out.push_back(j);
  return out;
}

Network load_network(std::string_view text) {
  Network n;
  std::map<std::string, JunctionId, std::less<>> junction_ids;
  std::vector<std::string> origin_names, dest_names;
  std::vector<int> origin_lines, dest_lines;

  auto junction = [&](std::string_view name) {
    auto it = junction_ids.find(name);
    if (it != junction_ids.end()) return it->second;
    const auto id = static_cast<JunctionId>(n.junctions.size());
    Junction j;
    j.id = id;
    j.name = std::string(name);
    n.junctions.push_back(std::move(j));
    junction_ids.emplace(std::string(name), id);
    return id;
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = split_tokens(line);
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (tok[0] == "road") {
      if (tok.size() < 5 || tok.size() > 7)
        throw ParseError(where + ": expected 'road <id> <start> <end> <length> [rho_max] [v_max]'");
      if (n.find_road(tok[1])) throw ParseError(where + ": duplicate road '" + std::string(tok[1]) + "'");
      Road r;
      r.id = static_cast<RoadId>(n.roads.size());
      r.name = std::string(tok[1]);
      r.start = junction(tok[2]);
      r.end = junction(tok[3]);
      r.a = 0.0;
      r.b = parse_number(tok[4], line_no, "length");
      if (tok.size() >= 6) r.rho_max = parse_number(tok[5], line_no, "rho_max");
      if (tok.size() >= 7) r.v_max = parse_number(tok[6], line_no, "v_max");
      n.roads.push_back(std::move(r));
    } else if (tok[0] == "destination") {
      if (tok.size() != 2) throw ParseError(where + ": expected 'destination <junction>'");
      dest_names.emplace_back(tok[1]);
      dest_lines.push_back(line_no);
    } else if (tok[0] == "origin") {
      if (tok.size() != 2) throw ParseError(where + ": expected 'origin <junction>'");
      origin_names.emplace_back(tok[1]);
      origin_lines.push_back(line_no);
    } else {
      throw ParseError(where + ": unknown directive '" + std::string(tok[0]) + "'");
    }
    if (eol == text.size()) break;
  }

  rebuild_topology(n);
  for (std::size_t k = 0; k < dest_names.size(); ++k) {
    auto it = junction_ids.find(dest_names[k]);
    if (it == junction_ids.end())
      throw ValidationError("line " + std::to_string(dest_lines[k]) + ": unknown destination junction '" +
                            dest_names[k] + "'");
    n.destinations.push_back(it->second);
  }
  if (!origin_names.empty()) {
    for (std::size_t k = 0; k < origin_names.size(); ++k) {
      auto it = junction_ids.find(origin_names[k]);
      if (it == junction_ids.end())
        throw ValidationError("line " + std::to_string(origin_lines[k]) + ": unknown origin junction '" +
                              origin_names[k] + "'");
      n.origins.push_back(it->second);
    }
  } else {
    for (const auto& j : n.junctions)
      if (j.kind == JunctionKind::kOrigin) n.origins.push_back(j.id);
  }

  const auto violations = validate_network(n);
  if (!violations.empty()) {
    std::string msg = "invalid network:";
    for (const auto& v : violations) msg += "\n  " + v.entity + ": " + v.message;
    throw ValidationError(msg);
  }
  return n;
}

Network load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open network file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_network(ss.str());
}

std::string serialize_network(const Network& n) {
  std::string out;
  for (const auto& r : n.roads) {
    out += "road " + r.name + " " + n.junctions[r.start].name + " " + n.junctions[r.end].name + " " +
           format_number(r.length()) + " " + format_number(r.rho_max) + " " +
           format_number(r.v_max) + "\n";
  }
  for (JunctionId o : n.origins) out += "origin " + n.junctions[o].name + "\n";
  for (JunctionId d : n.destinations) out += "destination " + n.junctions[d].name + "\n";
  return out;
}

}  // namespace destflow
