#pragma once

// Slow, direct reference implementations. Nothing here calls into the library
// code it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using Quad = std::array<std::int64_t, 4>;

// x + y sqrt(p)
struct Surd {
  std::int64_t x = 0;
  std::int64_t y = 0;
};

inline Surd mul(Surd u, Surd v, std::int64_t p) { return {u.x * v.x + p * u.y * v.y, u.x * v.y + u.y * v.x}; }
inline Surd add(Surd u, Surd v) { return {u.x + v.x, u.y + v.y}; }

using Mat = std::array<std::array<Surd, 2>, 2>;

inline Mat to_matrix(const Quad& q) {
  const auto [a, b, c, d] = q;
  return {{{Surd{a, b}, Surd{-c, d}}, {Surd{c, d}, Surd{a, -b}}}};
}

inline Mat matmul(const Mat& m, const Mat& n, std::int64_t p) {
  Mat out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out[i][j] = add(mul(m[i][0], n[0][j], p), mul(m[i][1], n[1][j], p));
  return out;
}

// Reads (a, b, c, d) back off a matrix of the right shape.
inline Quad from_matrix(const Mat& m) { return {m[0][0].x, m[0][0].y, m[1][0].x, m[1][0].y}; }

inline bool matrix_has_group_shape(const Mat& m) {
  return m[1][1].x == m[0][0].x && m[1][1].y == -m[0][0].y && m[0][1].x == -m[1][0].x &&
         m[0][1].y == m[1][0].y;
}

// Determinant of the matrix as a surd; must be exactly 1 + 0 sqrt(p).
inline Surd matrix_det(const Mat& m, std::int64_t p) {
  const Surd ad = mul(m[0][0], m[1][1], p);
  const Surd bc = mul(m[0][1], m[1][0], p);
  return {ad.x - bc.x, ad.y - bc.y};
}

inline Quad negate(const Quad& q) { return {-q[0], -q[1], -q[2], -q[3]}; }

inline bool same_mod_sign(const Quad& x, const Quad& y) { return x == y || x == negate(y); }

inline std::int64_t mod(std::int64_t v, std::int64_t n) { return ((v % n) + n) % n; }

inline bool congruent_to_pm_identity(const Quad& q, std::int64_t n) {
  for (int s : {1, -1}) {
    if (mod(s * q[0] - 1, n) == 0 && mod(s * q[1], n) == 0 && mod(s * q[2], n) == 0 &&
        mod(s * q[3], n) == 0)
      return true;
  }
  return false;
}

// Every (a, b, c, d) with a >= 2, 2a <= trace_bound, |b|, |d| <= box,
// |c| <= c_bound, unit norm and congruent to +-I mod n, by four nested loops.
// Keyed by |trace|.
inline std::map<std::int64_t, std::set<Quad>> brute_spectrum(std::int64_t p, std::int64_t n,
                                                              std::int64_t trace_bound,
                                                              std::int64_t box) {
  std::map<std::int64_t, std::set<Quad>> out;
  const std::int64_t a_max = trace_bound / 2;
  const auto c_bound = static_cast<std::int64_t>(std::sqrt(2.0 * p * box * box)) + 2;
  for (std::int64_t a = 2; a <= a_max; ++a)
    for (std::int64_t b = -box; b <= box; ++b)
      for (std::int64_t d = -box; d <= box; ++d)
        for (std::int64_t c = -c_bound; c <= c_bound; ++c) {
          if (a * a - p * b * b + c * c - p * d * d != 1) continue;
          const Quad q{a, b, c, d};
          if (congruent_to_pm_identity(q, n)) out[2 * a].insert(q);
        }
  return out;
}

// Count of (a, b, c, d) in (Z/n)^4 with unit norm, modulo +-1 when n > 2.
inline std::int64_t brute_residue_order(std::int64_t p, std::int64_t n) {
  std::int64_t count = 0;
  for (std::int64_t a = 0; a < n; ++a)
    for (std::int64_t b = 0; b < n; ++b)
      for (std::int64_t c = 0; c < n; ++c)
        for (std::int64_t d = 0; d < n; ++d)
          if (mod(a * a - p * b * b + c * c - p * d * d - 1, n) == 0) ++count;
  return n > 2 ? count / 2 : count;
}

// Shortest lattice vector by scanning integer combinations.
inline double brute_lattice_min(double ux, double uy, double vx, double vy, int range) {
  double best = std::numeric_limits<double>::infinity();
  for (int m = -range; m <= range; ++m)
    for (int n = -range; n <= range; ++n) {
      if (m == 0 && n == 0) continue;
      best = std::min(best, std::hypot(m * ux + n * vx, m * uy + n * vy));
    }
  return best;
}

struct Edge {
  int u;
  int v;
  double w;
};

// Girth by enumerating every simple cycle with a DFS from its smallest vertex.
// Parallel edges count as 2-cycles. Exponential; small graphs only.
inline double brute_girth(int vertices, const std::vector<Edge>& edges) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const bool parallel = (edges[i].u == edges[j].u && edges[i].v == edges[j].v) ||
                            (edges[i].u == edges[j].v && edges[i].v == edges[j].u);
      if (parallel) best = std::min(best, edges[i].w + edges[j].w);
    }
  std::vector<std::vector<std::pair<int, std::size_t>>> adj(static_cast<std::size_t>(vertices));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    adj[static_cast<std::size_t>(edges[e].u)].push_back({edges[e].v, e});
    adj[static_cast<std::size_t>(edges[e].v)].push_back({edges[e].u, e});
  }
  std::vector<char> on_path(static_cast<std::size_t>(vertices), 0);
  std::function<void(int, int, int, double)> dfs = [&](int start, int v, int depth, double len) {
    for (const auto& [to, e] : adj[static_cast<std::size_t>(v)]) {
      const double next = len + edges[e].w;
      if (to == start && depth >= 2) {
        best = std::min(best, next);
        continue;
      }
      if (to <= start || on_path[static_cast<std::size_t>(to)]) continue;
      on_path[static_cast<std::size_t>(to)] = 1;
      dfs(start, to, depth + 1, next);
      on_path[static_cast<std::size_t>(to)] = 0;
    }
  };
  for (int s = 0; s < vertices; ++s) {
    on_path[static_cast<std::size_t>(s)] = 1;
    dfs(s, s, 0, 0.0);
    on_path[static_cast<std::size_t>(s)] = 0;
  }
  return best;
}

}  // namespace oracle
