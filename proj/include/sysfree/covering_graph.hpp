#pragma once

// Discrete model of a double cover with its deck involution. A graph carrying
// a fixed-point-free involution covers its quotient two-to-one; every cycle
// of the quotient lifts either to a cycle of the same length or to a path
// from v to its partner, which closes up into a cycle of twice the length.
// So the quotient girth is at least half the cover girth.

#include <cstdint>
#include <random>
#include <vector>

namespace sysfree::graph {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double length = 1.0;
};

// Undirected multigraph without self-loops.
struct Multigraph {
  int vertex_count = 0;
  std::vector<WeightedEdge> edges;

  bool connected() const;
};

// Shortest cycle length, treating a pair of parallel edges as a 2-cycle.
// Infinity for forests.
double weighted_girth(const Multigraph& graph);

class CoveringGraph {
 public:
  // Throws ParameterError unless `involution` is a fixed-point-free
  // involution of the vertices that maps edges to edges of equal length and
  // fixes no edge.
  CoveringGraph(Multigraph graph, std::vector<int> involution);

  const Multigraph& graph() const { return graph_; }
  const std::vector<int>& involution() const { return involution_; }

  // One vertex per orbit, one edge per edge orbit.
  Multigraph quotient() const;

 private:
  Multigraph graph_;
  std::vector<int> involution_;
};

struct CoveringCheck {
  double cover_sys = 0.0;
  double quotient_sys = 0.0;
  bool holds = false;  // quotient_sys >= cover_sys / 2
};

// Throws ParameterError when the cover is disconnected.
CoveringCheck graph_quotient_systole_check(const CoveringGraph& cover);

// Cycle on 2m unit edges with the antipodal involution.
CoveringGraph antipodal_cycle(int vertex_count);

// Random connected cubic graph on `base_vertices` vertices (even, >= 4)
// lifted along a random Z/2 voltage assignment to a connected double cover;
// the deck involution swaps the sheets. Edge lengths are drawn from
// [min_length, max_length] and shared by both lifts.
CoveringGraph random_cubic_double_cover(int base_vertices, std::mt19937_64& rng,
                                        double min_length = 1.0, double max_length = 1.0);

}  // namespace sysfree::graph
