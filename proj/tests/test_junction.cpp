#include <numeric>

#include "doctest.h"
#include "destflow/error.hpp"
#include "destflow/field.hpp"
#include "destflow/grid.hpp"
#include "destflow/junction.hpp"
#include "destflow/scenario.hpp"

using namespace destflow;

namespace {

// Two incoming roads a, b merging at j into c, one destination.
const char* kMerge = "road a o1 j 1\nroad b o2 j 1\nroad c j d 1\ndestination d\n";

}  // namespace

TEST_CASE("one-cell neighbourhoods on the benchmark") {
  const Network n = benchmark_network();
  const Grid g = make_grid(n, 0.01, 0.005, 1.0);
  CHECK(neighbourhood_cells(n, g, 0.01) == 1);
  const auto subs = build_subnetworks(n, g, 0.01);
  CHECK(subs.size() == 4);  // j2, j4, j5, j6
  for (const auto& s : subs) {
    if (n.junctions[s.junction].name != "j5") continue;
    CHECK(s.inc_segments.size() == 2);
    CHECK(s.out_segments.size() == 1);
    for (const auto& seg : s.inc_segments) {
      CHECK(seg.count == 1);
      CHECK(seg.first == g.cells_per_road[seg.road] - 1);
    }
    CHECK(s.out_segments[0].first == 0);
  }
}

TEST_CASE("chain junction has one incoming and one outgoing segment") {
  const Network n = load_network("road a o j 1\nroad b j d 1\ndestination d\n");
  const Grid g = make_grid(n, 0.1, 0.05, 1.0);
  const auto subs = build_subnetworks(n, g, 0.2);
  REQUIRE(subs.size() == 1);
  CHECK(subs[0].inc_segments.size() == 1);
  CHECK(subs[0].out_segments.size() == 1);
  CHECK(subs[0].inc_segments[0].first == 8);
  CHECK(subs[0].inc_segments[0].count == 2);
}

TEST_CASE("segments and interiors partition every road") {
  const Network n = benchmark_network();
  const Grid g = make_grid(n, 0.01, 0.005, 1.0);
  for (double delta : {0.01, 0.03, 0.1}) {
    const auto subs = build_subnetworks(n, g, delta);
    const auto ranges = interior_ranges(n, g, delta);
    std::vector<std::vector<int>> cover(n.num_roads());
    for (const auto& r : n.roads) cover[r.id].assign(g.cells_per_road[r.id], 0);
    for (const auto& r : n.roads)
      for (std::size_t k = ranges[r.id].lo; k < ranges[r.id].hi; ++k) ++cover[r.id][k];
    for (const auto& s : subs) {
      for (const auto& seg : s.inc_segments)
        for (std::size_t k = 0; k < seg.count; ++k) ++cover[seg.road][seg.first + k];
      for (const auto& seg : s.out_segments)
        for (std::size_t k = 0; k < seg.count; ++k) ++cover[seg.road][seg.first + k];
    }
    for (const auto& c : cover)
      for (int v : c) CHECK(v == 1);
  }
}

TEST_CASE("neighbourhood must be a positive whole number of cells and fit twice on every road") {
  const Network n = benchmark_network();
  const Grid g = make_grid(n, 0.01, 0.005, 1.0);
  CHECK_THROWS_AS(build_subnetworks(n, g, 0.015), ValidationError);
  CHECK_THROWS_AS(build_subnetworks(n, g, 0.0), ValidationError);
  CHECK_THROWS_AS(build_subnetworks(n, g, 0.3), ValidationError);  // r4 is 0.5 long
}

TEST_CASE("split coefficients") {
  const Network n = load_network(kMerge);
  const Grid g = make_grid(n, 0.1, 0.05, 1.0);
  const FieldLayout layout(n, g);
  const auto sub = build_subnetworks(n, g, 0.1).at(0);
  std::vector<double> rho(layout.size(), 0.0);

  SUBCASE("both masses zero: equidistributed") {
    const auto lam = compute_split_coefficients(sub, layout, rho, g.dx);
    CHECK(lam.at(0, 0) == 0.5);
    CHECK(lam.at(1, 0) == 0.5);
  }
  SUBCASE("masses 0.2 and 0.6") {
    rho[layout.index(0, 9, 0)] = 0.2;
    rho[layout.index(1, 9, 0)] = 0.6;
    const auto lam = compute_split_coefficients(sub, layout, rho, g.dx);
    CHECK(lam.at(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(lam.at(1, 0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(lam.at(0, 0) + lam.at(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("single incoming road") {
    const Network c = load_network("road a o j 1\nroad b j d 1\ndestination d\n");
    const Grid gc = make_grid(c, 0.1, 0.05, 1.0);
    const FieldLayout lc(c, gc);
    std::vector<double> r(lc.size(), 0.0);
    r[lc.index(0, 9, 0)] = 0.3;
    CHECK(compute_split_coefficients(build_subnetworks(c, gc, 0.1)[0], lc, r, gc.dx).at(0, 0) == 1.0);
  }
}

TEST_CASE("path initialisation splits the outgoing half by the coefficients") {
  const Network n = load_network(kMerge);
  const Grid g = make_grid(n, 0.1, 0.05, 1.0);
  const FieldLayout layout(n, g);
  const auto sub = build_subnetworks(n, g, 0.1).at(0);
  std::vector<double> rho(layout.size(), 0.0);
  PolicySlice next(n.num_junctions(), 1);
  next.at(sub.junction, 0) = 2;

  SUBCASE("zero density gives zero paths") {
    const auto lam = compute_split_coefficients(sub, layout, rho, g.dx);
    for (const auto& p : init_path_densities(n, sub, layout, rho, lam, next))
      for (double v : p.profile) CHECK(v == 0.0);
  }
  SUBCASE("two incoming with 0.25 / 0.75") {
    rho[layout.index(0, 9, 0)] = 0.2;
    rho[layout.index(1, 9, 0)] = 0.6;
    rho[layout.index(2, 0, 0)] = 0.4;
    const auto lam = compute_split_coefficients(sub, layout, rho, g.dx);
    const auto paths = init_path_densities(n, sub, layout, rho, lam, next);
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].profile[0] == 0.2);
    CHECK(paths[0].profile[1] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(paths[1].profile[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(paths[0].profile[1] + paths[1].profile[1] == doctest::Approx(0.4).epsilon(1e-15));

    std::vector<double> back(layout.size(), 0.0);
    back = rho;
    write_back(sub, paths, layout, back);
    for (std::size_t i = 0; i < rho.size(); ++i) CHECK(back[i] == doctest::Approx(rho[i]).epsilon(1e-15));
  }
  SUBCASE("policy naming a road that does not leave the junction") {
    next.at(sub.junction, 0) = 0;
    const auto lam = compute_split_coefficients(sub, layout, rho, g.dx);
    CHECK_THROWS_AS(init_path_densities(n, sub, layout, rho, lam, next), ValidationError);
  }
}

TEST_CASE("one incoming road: path carries the road density unchanged") {
  const Network n = load_network("road a o j 1\nroad b j d 1\ndestination d\n");
  const Grid g = make_grid(n, 0.1, 0.05, 1.0);
  const FieldLayout layout(n, g);
  const auto sub = build_subnetworks(n, g, 0.1).at(0);
  std::vector<double> rho(layout.size(), 0.4);
  PolicySlice next(n.num_junctions(), 1);
  next.at(sub.junction, 0) = 1;
  const auto lam = compute_split_coefficients(sub, layout, rho, g.dx);
  const auto paths = init_path_densities(n, sub, layout, rho, lam, next);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].profile == std::vector<double>{0.4, 0.4});
}

TEST_CASE("mass on a non-chosen outgoing road stays in a residual population") {
  const Network n = load_network("road a o j 1\nroad b j d1 1\nroad c j d2 1\ndestination d1\ndestination d2\n");
  const Grid g = make_grid(n, 0.1, 0.05, 1.0);
  const FieldLayout layout(n, g);
  const auto sub = build_subnetworks(n, g, 0.1).at(0);
  std::vector<double> rho(layout.size(), 0.0);
  rho[layout.index(2, 0, 0)] = 0.05;  // group 1 already on c, committed earlier
  PolicySlice next(n.num_junctions(), 2);
  next.at(sub.junction, 0) = 1;
  next.at(sub.junction, 1) = 2;
  const auto lam = compute_split_coefficients(sub, layout, rho, g.dx);
  const auto paths = init_path_densities(n, sub, layout, rho, lam, next);
  double residual = 0.0;
  for (const auto& p : paths)
    if (p.incoming == kNoRoad && p.destination == 0 && p.outgoing == 2) residual += p.profile[0];
  CHECK(residual == 0.05);
  std::vector<double> back(layout.size(), 0.0);
  write_back(sub, paths, layout, back);
  CHECK(back == rho);
}
