#include "sysfree/covering_graph.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <tuple>

#include "sysfree/errors.hpp"

namespace sysfree::graph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Adjacent {
  int to;
  double length;
  std::size_t edge;
};

std::vector<std::vector<Adjacent>> adjacency(const Multigraph& g) {
  std::vector<std::vector<Adjacent>> adj(static_cast<std::size_t>(g.vertex_count));
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    adj[static_cast<std::size_t>(edge.u)].push_back({edge.v, edge.length, e});
    adj[static_cast<std::size_t>(edge.v)].push_back({edge.u, edge.length, e});
  }
  return adj;
}

double distance_avoiding(const std::vector<std::vector<Adjacent>>& adj, int from, int to,
                         std::size_t banned_edge) {
  std::vector<double> dist(adj.size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<std::size_t>(from)] = 0.0;
  queue.push({0.0, from});
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    if (v == to) return d;
    for (const auto& a : adj[static_cast<std::size_t>(v)]) {
      if (a.edge == banned_edge) continue;
      const double nd = d + a.length;
      if (nd < dist[static_cast<std::size_t>(a.to)]) {
        dist[static_cast<std::size_t>(a.to)] = nd;
        queue.push({nd, a.to});
      }
    }
  }
  return kInf;
}

using EdgeKey = std::tuple<int, int, double>;

EdgeKey key_of(int u, int v, double length) {
  return {std::min(u, v), std::max(u, v), length};
}

void validate(const Multigraph& g) {
  if (g.vertex_count < 1) throw ParameterError("graph needs at least one vertex");
  for (const auto& e : g.edges) {
    if (e.u < 0 || e.v < 0 || e.u >= g.vertex_count || e.v >= g.vertex_count) {
      throw ParameterError("edge endpoint out of range");
    }
    if (e.u == e.v) throw ParameterError("self-loops are not supported");
    if (!(e.length > 0.0)) throw ParameterError("edge lengths must be positive");
  }
}

// Pairs each edge with its image under the involution.
std::vector<std::size_t> edge_images(const Multigraph& g, const std::vector<int>& sigma) {
  std::map<EdgeKey, std::vector<std::size_t>> classes;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    classes[key_of(edge.u, edge.v, edge.length)].push_back(e);
  }
  std::vector<std::size_t> image(g.edges.size());
  for (const auto& [key, members] : classes) {
    const auto& [u, v, length] = key;
    const auto su = sigma[static_cast<std::size_t>(u)];
    const auto sv = sigma[static_cast<std::size_t>(v)];
    const EdgeKey target = key_of(su, sv, length);
    if (target == key) {
      throw ParameterError("involution fixes an edge");
    }
    const auto it = classes.find(target);
    if (it == classes.end() || it->second.size() != members.size()) {
      throw ParameterError("involution does not map edges onto edges");
    }
    for (std::size_t k = 0; k < members.size(); ++k) image[members[k]] = it->second[k];
  }
  return image;
}

}  // namespace

bool Multigraph::connected() const {
  if (vertex_count == 0) return true;
  std::vector<int> parent(static_cast<std::size_t>(vertex_count));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int components = vertex_count;
  for (const auto& e : edges) {
    const int a = find(e.u);
    const int b = find(e.v);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --components;
    }
  }
  return components == 1;
}

double weighted_girth(const Multigraph& graph) {
  validate(graph);
  const auto adj = adjacency(graph);
  double best = kInf;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    if (edge.length >= best) continue;
    best = std::min(best, edge.length + distance_avoiding(adj, edge.u, edge.v, e));
  }
  return best;
}

CoveringGraph::CoveringGraph(Multigraph graph, std::vector<int> involution)
    : graph_(std::move(graph)), involution_(std::move(involution)) {
  validate(graph_);
  if (involution_.size() != static_cast<std::size_t>(graph_.vertex_count)) {
    throw ParameterError("involution must list one partner per vertex");
  }
  for (int v = 0; v < graph_.vertex_count; ++v) {
    const int s = involution_[static_cast<std::size_t>(v)];
    if (s < 0 || s >= graph_.vertex_count) throw ParameterError("involution out of range");
    if (s == v) throw ParameterError("involution fixes a vertex");
    if (involution_[static_cast<std::size_t>(s)] != v) {
      throw ParameterError("map is not an involution");
    }
  }
  for (const auto& e : graph_.edges) {
    if (involution_[static_cast<std::size_t>(e.u)] == e.v) {
      throw ParameterError("edge joins a vertex to its partner; the quotient would have a loop");
    }
  }
  edge_images(graph_, involution_);
}

Multigraph CoveringGraph::quotient() const {
  std::vector<int> orbit(static_cast<std::size_t>(graph_.vertex_count), -1);
  int count = 0;
  for (int v = 0; v < graph_.vertex_count; ++v) {
    if (orbit[static_cast<std::size_t>(v)] >= 0) continue;
    orbit[static_cast<std::size_t>(v)] = count;
    orbit[static_cast<std::size_t>(involution_[static_cast<std::size_t>(v)])] = count;
    ++count;
  }
  const auto image = edge_images(graph_, involution_);
  Multigraph q;
  q.vertex_count = count;
  for (std::size_t e = 0; e < graph_.edges.size(); ++e) {
    if (image[e] < e) continue;
    const auto& edge = graph_.edges[e];
    q.edges.push_back({orbit[static_cast<std::size_t>(edge.u)],
                       orbit[static_cast<std::size_t>(edge.v)], edge.length});
  }
  return q;
}

CoveringCheck graph_quotient_systole_check(const CoveringGraph& cover) {
  if (!cover.graph().connected()) throw ParameterError("covering graph is disconnected");
  CoveringCheck out;
  out.cover_sys = weighted_girth(cover.graph());
  out.quotient_sys = weighted_girth(cover.quotient());
  out.holds = out.quotient_sys >= out.cover_sys / 2.0;
  return out;
}

CoveringGraph antipodal_cycle(int vertex_count) {
  if (vertex_count < 4 || vertex_count % 2 != 0) {
    throw ParameterError("antipodal cycle needs an even vertex count of at least 4");
  }
  Multigraph g;
  g.vertex_count = vertex_count;
  std::vector<int> sigma(static_cast<std::size_t>(vertex_count));
  for (int v = 0; v < vertex_count; ++v) {
    g.edges.push_back({v, (v + 1) % vertex_count, 1.0});
    sigma[static_cast<std::size_t>(v)] = (v + vertex_count / 2) % vertex_count;
  }
  return {std::move(g), std::move(sigma)};
}

namespace {

Multigraph random_cubic(int n, std::mt19937_64& rng, double min_length, double max_length) {
  std::uniform_real_distribution<double> length(min_length, max_length);
  for (;;) {
    std::vector<int> stubs;
    for (int v = 0; v < n; ++v) stubs.insert(stubs.end(), 3, v);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    Multigraph g;
    g.vertex_count = n;
    bool simple = true;
    std::map<std::pair<int, int>, int> seen;
    for (std::size_t k = 0; k < stubs.size(); k += 2) {
      const int u = stubs[k];
      const int v = stubs[k + 1];
      if (u == v || seen[{std::min(u, v), std::max(u, v)}]++ > 0) {
        simple = false;
        break;
      }
      g.edges.push_back({u, v, min_length == max_length ? min_length : length(rng)});
    }
    if (simple && g.connected()) return g;
  }
}

}  // namespace

CoveringGraph random_cubic_double_cover(int base_vertices, std::mt19937_64& rng,
                                        double min_length, double max_length) {
  if (base_vertices < 4 || base_vertices % 2 != 0) {
    throw ParameterError("cubic base graph needs an even vertex count of at least 4");
  }
  if (!(min_length > 0.0) || max_length < min_length) {
    throw ParameterError("invalid edge length range");
  }
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    const Multigraph base = random_cubic(base_vertices, rng, min_length, max_length);
    Multigraph cover;
    cover.vertex_count = 2 * base_vertices;
    for (const auto& e : base.edges) {
      const int voltage = coin(rng) ? 1 : 0;
      cover.edges.push_back({2 * e.u, 2 * e.v + voltage, e.length});
      cover.edges.push_back({2 * e.u + 1, 2 * e.v + (1 - voltage), e.length});
    }
    if (!cover.connected()) continue;
    std::vector<int> sigma(static_cast<std::size_t>(cover.vertex_count));
    for (int v = 0; v < cover.vertex_count; ++v) sigma[static_cast<std::size_t>(v)] = v ^ 1;
    return {std::move(cover), std::move(sigma)};
  }
}

}  // namespace sysfree::graph
