#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sysfree/covering_graph.hpp"
#include "sysfree/errors.hpp"

using namespace sysfree;
using namespace sysfree::graph;

namespace {

std::vector<oracle::Edge> edges_of(const Multigraph& g) {
  std::vector<oracle::Edge> out;
  for (const auto& e : g.edges) out.push_back({e.u, e.v, e.length});
  return out;
}

}  // namespace

TEST_CASE("girth against simple-cycle enumeration") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> vertices(2, 8);
  std::uniform_real_distribution<double> length(0.5, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    Multigraph g;
    g.vertex_count = vertices(rng);
    std::uniform_int_distribution<int> vertex(0, g.vertex_count - 1);
    std::uniform_int_distribution<int> count(0, 12);
    for (int k = count(rng); k > 0; --k) {
      const int u = vertex(rng), v = vertex(rng);
      if (u != v) g.edges.push_back({u, v, trial % 2 ? 1.0 : length(rng)});
    }
    const double expected = oracle::brute_girth(g.vertex_count, edges_of(g));
    const double got = weighted_girth(g);
    if (std::isinf(expected)) {
      CHECK(std::isinf(got));
    } else {
      CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("girth basics") {
  Multigraph tri{3, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}}};
  CHECK(weighted_girth(tri) == 3.0);
  Multigraph par{2, {{0, 1, 1.5}, {1, 0, 2.0}}};
  CHECK(weighted_girth(par) == 3.5);
  Multigraph tree{3, {{0, 1, 1}, {1, 2, 1}}};
  CHECK(std::isinf(weighted_girth(tree)));
  CHECK_THROWS_AS(weighted_girth(Multigraph{2, {{0, 0, 1}}}), ParameterError);
  CHECK_THROWS_AS(weighted_girth(Multigraph{2, {{0, 1, -1}}}), ParameterError);
  CHECK_THROWS_AS(weighted_girth(Multigraph{2, {{0, 2, 1}}}), ParameterError);
  CHECK(tri.connected());
  CHECK_FALSE(Multigraph{4, {{0, 1, 1}, {2, 3, 1}}}.connected());
}

TEST_CASE("antipodal cycles attain the bound") {
  for (int n = 4; n <= 40; n += 2) {
    const auto check = graph_quotient_systole_check(antipodal_cycle(n));
    CHECK(check.cover_sys == n);
    CHECK(check.quotient_sys == n / 2);
    CHECK(check.quotient_sys == check.cover_sys / 2);
    CHECK(check.holds);
  }
  CHECK_THROWS_AS(antipodal_cycle(5), ParameterError);
  CHECK_THROWS_AS(antipodal_cycle(2), ParameterError);
}

TEST_CASE("random double covers") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int base = 4 + 2 * (trial % 6);
    const auto cover = random_cubic_double_cover(base, rng, 0.5, 2.0);
    CHECK(cover.graph().vertex_count == 2 * base);
    CHECK(cover.graph().connected());
    const Multigraph q = cover.quotient();
    CHECK(q.vertex_count == base);
    CHECK(q.edges.size() * 2 == cover.graph().edges.size());
    const auto check = graph_quotient_systole_check(cover);
    CHECK(check.holds);
    CHECK(check.quotient_sys <= check.cover_sys);
    CHECK(check.quotient_sys == doctest::Approx(oracle::brute_girth(q.vertex_count, edges_of(q))));
  }
  CHECK_THROWS_AS(random_cubic_double_cover(5, rng), ParameterError);
  CHECK_THROWS_AS(random_cubic_double_cover(6, rng, 2.0, 1.0), ParameterError);
}

TEST_CASE("involution validation") {
  Multigraph c4{4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}}};
  CHECK_NOTHROW(CoveringGraph(c4, {2, 3, 0, 1}));
  CHECK_THROWS_AS(CoveringGraph(c4, {0, 3, 2, 1}), ParameterError);     // fixed vertex
  CHECK_THROWS_AS(CoveringGraph(c4, {1, 2, 3, 0}), ParameterError);     // not an involution
  CHECK_THROWS_AS(CoveringGraph(c4, {1, 0, 3, 2}), ParameterError);     // edge to partner
  CHECK_THROWS_AS(CoveringGraph(c4, {2, 3}), ParameterError);
  Multigraph unequal{4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 2}, {3, 0, 1}}};
  CHECK_THROWS_AS(CoveringGraph(unequal, {2, 3, 0, 1}), ParameterError);
  Multigraph split{8, {}};
  for (int v = 0; v < 4; ++v) split.edges.push_back({v, (v + 1) % 4, 1});
  for (int v = 0; v < 4; ++v) split.edges.push_back({4 + v, 4 + (v + 1) % 4, 1});
  const CoveringGraph trivial(split, {4, 5, 6, 7, 0, 1, 2, 3});
  CHECK_THROWS_AS(graph_quotient_systole_check(trivial), ParameterError);
}
