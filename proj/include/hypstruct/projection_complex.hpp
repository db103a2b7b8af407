// Copyright 2026 The hypstruct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hypstruct/error.hpp"

/// Projection families on lines: axioms, modified distances, the projection
/// graph P_K, the quasi-tree of spaces C_K and a bottleneck checker.
namespace hypstruct::projection_complex {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Domains 0..n-1, each a copy of R. proj[Y][X] holds the points of pi_Y(X).
struct DomainFamily {
  double theta = 1.0;
  std::vector<std::string> labels;
  std::vector<std::vector<std::vector<double>>> proj;

  DomainFamily() = default;
  DomainFamily(std::size_t n, double theta_) : theta(theta_), proj(n, std::vector<std::vector<double>>(n)) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  std::size_t size() const { return proj.size(); }

  const std::vector<double>& pi(std::size_t Y, std::size_t X) const {
    if (Y >= size() || X >= size() || X == Y || proj[Y][X].empty()) {
      throw Error(ErrorCode::MissingProjection,
                  "no projection of " + std::to_string(X) + " to " + std::to_string(Y));
    }
    return proj[Y][X];
  }
  void set(std::size_t Y, std::size_t X, std::vector<double> pts) { proj[Y][X] = std::move(pts); }
};

inline std::pair<double, double> extent(const std::vector<double>& pts) {
  const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end());
  return {*lo, *hi};
}

inline double diam(const std::vector<double>& pts) {
  const auto [lo, hi] = extent(pts);
  return hi - lo;
}

/// diam(pi_Y(X) u pi_Y(Z)).
inline double dpi(const DomainFamily& fam, std::size_t Y, std::size_t X, std::size_t Z) {
  const auto [a, b] = extent(fam.pi(Y, X));
  const auto [c, d] = extent(fam.pi(Y, Z));
  return std::max(b, d) - std::min(a, c);
}

// ---------------------------------------------------------------------------
// Axioms

struct P1Witness {
  std::array<std::size_t, 3> triple{};  // X < Y < Z
  std::array<double, 3> values{};       // dpi_X(Y,Z), dpi_Y(X,Z), dpi_Z(X,Y)
};

struct P2Count {
  std::size_t X = 0, Y = 0;
  std::size_t count = 0;  // |{Z : dpi_Z(X,Y) > theta}|
};

struct AxiomReport {
  double theta_used = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> p0_violations;  // (Y, X) with diam pi_Y(X) > theta
  std::vector<P1Witness> p1_violations;
  std::vector<P2Count> p2_counts;  // pairs X < Y with a nonzero count

  bool ok() const { return p0_violations.empty() && p1_violations.empty(); }
  std::size_t max_p2() const {
    std::size_t m = 0;
    for (const auto& c : p2_counts) m = std::max(m, c.count);
    return m;
  }
};

inline AxiomReport verify_axioms(const DomainFamily& fam) {
  AxiomReport r;
  r.theta_used = fam.theta;
  const std::size_t n = fam.size();
  for (std::size_t Y = 0; Y < n; ++Y) {
    for (std::size_t X = 0; X < n; ++X) {
      if (X != Y && diam(fam.pi(Y, X)) > fam.theta) r.p0_violations.emplace_back(Y, X);
    }
  }
  for (std::size_t X = 0; X < n; ++X) {
    for (std::size_t Y = X + 1; Y < n; ++Y) {
      for (std::size_t Z = Y + 1; Z < n; ++Z) {
        P1Witness w{{X, Y, Z}, {dpi(fam, X, Y, Z), dpi(fam, Y, X, Z), dpi(fam, Z, X, Y)}};
        int big = 0;
        for (double v : w.values) big += v > fam.theta;
        if (big > 1) r.p1_violations.push_back(w);
      }
    }
  }
  for (std::size_t X = 0; X < n; ++X) {
    for (std::size_t Y = X + 1; Y < n; ++Y) {
      P2Count c{X, Y, 0};
      for (std::size_t Z = 0; Z < n; ++Z) {
        if (Z != X && Z != Y && dpi(fam, Z, X, Y) > fam.theta) ++c.count;
      }
      if (c.count) r.p2_counts.push_back(c);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// H(X,Z) and modified distances

/// Ordered pairs (X',Z'), X' != Z', meeting one of the four clauses. A clause is
/// only tested where its projection distances are defined.
inline std::vector<std::pair<std::size_t, std::size_t>> h_set(const DomainFamily& fam, std::size_t X, std::size_t Z) {
  if (X == Z) throw Error(ErrorCode::ConfigError, "H(X,Z) needs X != Z");
  const double t2 = 2.0 * fam.theta;
  const std::size_t n = fam.size();
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      bool in = (a == X && b == Z);
      if (!in && a == X && b != Z) in = dpi(fam, Z, X, b) > t2;
      if (!in && b == Z && a != X) in = dpi(fam, X, a, Z) > t2;
      if (!in && a != X && a != Z && b != X && b != Z) {
        in = dpi(fam, X, a, b) > t2 && dpi(fam, Z, a, b) > t2;
      }
      if (in) out.emplace_back(a, b);
    }
  }
  return out;
}

namespace detail {

inline double modified_from(const DomainFamily& fam, std::size_t Y,
                            const std::vector<std::pair<std::size_t, std::size_t>>& H) {
  double best = kInf;
  for (const auto& [a, b] : H) {
    if (a == Y || b == Y) return 0.0;
  }
  for (const auto& [a, b] : H) best = std::min(best, dpi(fam, Y, a, b));
  return best;
}

}  // namespace detail

inline double modified_distance(const DomainFamily& fam, std::size_t Y, std::size_t X, std::size_t Z) {
  if (Y == X || Y == Z) throw Error(ErrorCode::ConfigError, "modified_distance needs Y outside {X, Z}");
  return detail::modified_from(fam, Y, h_set(fam, X, Z));
}

/// All d_Y(X,Z), each H(X,Z) enumerated once. Entry [X][Z][Y]; NaN where undefined.
inline std::vector<std::vector<std::vector<double>>> modified_distance_table(const DomainFamily& fam) {
  const std::size_t n = fam.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<std::vector<double>>> t(n, std::vector<std::vector<double>>(n, std::vector<double>(n, nan)));
  for (std::size_t X = 0; X < n; ++X) {
    for (std::size_t Z = 0; Z < n; ++Z) {
      if (X == Z) continue;
      const auto H = h_set(fam, X, Z);
      for (std::size_t Y = 0; Y < n; ++Y) {
        if (Y != X && Y != Z) t[X][Z][Y] = detail::modified_from(fam, Y, H);
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Projection graph

struct ProjectionGraph {
  std::size_t vertices = 0;
  double K = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // X < Z
  std::vector<std::vector<bool>> adjacent;

  bool connected() const {
    if (vertices == 0) return true;
    std::vector<bool> seen(vertices, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w = 0; w < vertices; ++w) {
        if (adjacent[v][w] && !seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  }
};

/// X and Z are adjacent iff no Y has d_Y(X,Z) > K.
inline ProjectionGraph build_projection_graph(const DomainFamily& fam, double K) {
  if (!(K > 0.0)) throw Error(ErrorCode::ConfigError, "K must be positive");
  const std::size_t n = fam.size();
  ProjectionGraph g;
  g.vertices = n;
  g.K = K;
  g.adjacent.assign(n, std::vector<bool>(n, false));
  for (std::size_t X = 0; X < n; ++X) {
    for (std::size_t Z = X + 1; Z < n; ++Z) {
      const auto H = h_set(fam, X, Z);
      bool edge = true;
      for (std::size_t Y = 0; Y < n && edge; ++Y) {
        if (Y != X && Y != Z && detail::modified_from(fam, Y, H) > K) edge = false;
      }
      if (edge) {
        g.edges.emplace_back(X, Z);
        g.adjacent[X][Z] = g.adjacent[Z][X] = true;
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Finite metric graphs

struct MetricGraph {
  struct Arc {
    int to;
    double len;
  };
  std::vector<std::vector<Arc>> adj;

  std::size_t size() const { return adj.size(); }
  int add_vertex() {
    adj.emplace_back();
    return static_cast<int>(adj.size() - 1);
  }
  void add_edge(int u, int v, double len) {
    if (!(len > 0.0)) throw Error(ErrorCode::ConfigError, "edge lengths must be positive");
    adj[static_cast<std::size_t>(u)].push_back({v, len});
    adj[static_cast<std::size_t>(v)].push_back({u, len});
  }
  std::size_t edge_count() const {
    std::size_t m = 0;
    for (const auto& a : adj) m += a.size();
    return m / 2;
  }
  static MetricGraph cycle(int n, double len = 1.0) {
    MetricGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex();
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n, len);
    return g;
  }
};

/// All-pairs shortest paths with predecessors (Dijkstra from every vertex).
struct ShortestPaths {
  std::size_t n = 0;
  std::vector<double> dist;  // row-major n x n
  std::vector<int> pred;     // pred[x*n + v]: previous vertex on a shortest x -> v path

  double d(std::size_t x, std::size_t v) const { return dist[x * n + v]; }
  int p(std::size_t x, std::size_t v) const { return pred[x * n + v]; }
};

inline ShortestPaths all_pairs(const MetricGraph& g) {
  ShortestPaths sp;
  sp.n = g.size();
  sp.dist.assign(sp.n * sp.n, kInf);
  sp.pred.assign(sp.n * sp.n, -1);
  using Item = std::pair<double, int>;
  for (std::size_t s = 0; s < sp.n; ++s) {
    double* dist = &sp.dist[s * sp.n];
    int* pred = &sp.pred[s * sp.n];
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0.0;
    pq.emplace(0.0, static_cast<int>(s));
    while (!pq.empty()) {
      const auto [du, u] = pq.top();
      pq.pop();
      if (du > dist[u]) continue;
      for (const auto& arc : g.adj[static_cast<std::size_t>(u)]) {
        const double nd = du + arc.len;
        if (nd < dist[arc.to]) {
          dist[arc.to] = nd;
          pred[arc.to] = u;
          pq.emplace(nd, arc.to);
        }
      }
    }
  }
  return sp;
}

// ---------------------------------------------------------------------------
// Quasi-tree of spaces

struct QuasiTreeOfSpaces {
  struct Bridge {
    std::size_t X, Z;
    int u, v;  // vertices on C(X) and C(Z)
  };
  MetricGraph graph;
  ProjectionGraph pk;
  double K = 0.0, L = 0.0, delta = 0.0;
  std::vector<std::size_t> domain_of;
  std::vector<double> coord;
  std::vector<std::vector<int>> domain_vertices;  // sorted by coordinate
  std::vector<Bridge> bridges;

  int vertex_at(std::size_t Y, double x) const {
    for (int v : domain_vertices[Y]) {
      if (std::abs(coord[static_cast<std::size_t>(v)] - x) <= 1e-9 * (1.0 + std::abs(x))) return v;
    }
    throw Error(ErrorCode::MissingProjection, "coordinate is not a vertex of the discretization");
  }
};

/// Each C(Y) is cut to the span of its projection points widened by 10 theta and
/// sampled every delta, with every projection point kept as a vertex. A bridge of
/// length L joins every point of pi_X(Z) to every point of pi_Z(X) for P_K edges.
inline QuasiTreeOfSpaces build_quasi_tree(const DomainFamily& fam, const ProjectionGraph& pk, double L, double delta) {
  if (!(delta > 0.0) || !(L > 0.0)) throw Error(ErrorCode::ConfigError, "L and delta must be positive");
  if (delta > fam.theta / 4.0) throw Error(ErrorCode::ResolutionTooCoarse, "delta exceeds theta / 4");
  QuasiTreeOfSpaces q;
  q.pk = pk;
  q.K = pk.K;
  q.L = L;
  q.delta = delta;
  const std::size_t n = fam.size();
  q.domain_vertices.resize(n);
  for (std::size_t Y = 0; Y < n; ++Y) {
    std::vector<double> pts;
    for (std::size_t X = 0; X < n; ++X) {
      if (X != Y) pts.insert(pts.end(), fam.pi(Y, X).begin(), fam.pi(Y, X).end());
    }
    double lo = 0.0, hi = 0.0;
    if (!pts.empty()) std::tie(lo, hi) = extent(pts);
    lo -= 10.0 * fam.theta;
    hi += 10.0 * fam.theta;
    const auto steps = static_cast<long long>(std::ceil((hi - lo) / delta));
    for (long long i = 0; i <= steps; ++i) pts.push_back(std::min(hi, lo + static_cast<double>(i) * delta));
    std::sort(pts.begin(), pts.end());
    std::vector<double> uniq;
    for (double x : pts) {
      if (uniq.empty() || x - uniq.back() > 1e-9 * (1.0 + std::abs(x))) uniq.push_back(x);
    }
    for (std::size_t i = 0; i < uniq.size(); ++i) {
      const int v = q.graph.add_vertex();
      q.domain_of.push_back(Y);
      q.coord.push_back(uniq[i]);
      q.domain_vertices[Y].push_back(v);
      if (i > 0) q.graph.add_edge(v - 1, v, uniq[i] - uniq[i - 1]);
    }
  }
  for (const auto& [X, Z] : pk.edges) {
    for (double a : fam.pi(X, Z)) {
      for (double b : fam.pi(Z, X)) {
        const int u = q.vertex_at(X, a), v = q.vertex_at(Z, b);
        q.graph.add_edge(u, v, L);
        q.bridges.push_back({X, Z, u, v});
      }
    }
  }
  return q;
}

inline QuasiTreeOfSpaces build_quasi_tree(const DomainFamily& fam, double K, double L, double delta) {
  if (delta > fam.theta / 4.0) throw Error(ErrorCode::ResolutionTooCoarse, "delta exceeds theta / 4");
  return build_quasi_tree(fam, build_projection_graph(fam, K), L, delta);
}

/// Largest |d_C(u,v) - |x_u - x_v|| over same-domain vertex pairs.
inline double embedding_defect(const QuasiTreeOfSpaces& q, const ShortestPaths& sp) {
  double worst = 0.0;
  for (const auto& verts : q.domain_vertices) {
    for (std::size_t i = 0; i < verts.size(); ++i) {
      for (std::size_t j = i + 1; j < verts.size(); ++j) {
        const auto u = static_cast<std::size_t>(verts[i]), v = static_cast<std::size_t>(verts[j]);
        worst = std::max(worst, std::abs(sp.d(u, v) - std::abs(q.coord[u] - q.coord[v])));
      }
    }
  }
  return worst;
}

inline double embedding_defect(const QuasiTreeOfSpaces& q) { return embedding_defect(q, all_pairs(q.graph)); }

// ---------------------------------------------------------------------------
// Bottleneck criterion

/// A point z on the edge (u, w) at distance s from u.
struct EdgePoint {
  int u = -1, w = -1;
  double s = 0.0, len = 0.0;
};

struct BottleneckFailure {
  int x = -1, y = -1;
  EdgePoint midpoint;
  std::vector<int> detour;  // x ... y, every vertex farther than delta from the midpoint
};

struct BottleneckReport {
  double delta = 0.0;
  bool pass = false;
  double delta_min = 0.0;  // least passing radius
  std::pair<int, int> critical_pair{-1, -1};
  std::vector<BottleneckFailure> failures;  // witnesses for the requested delta (capped)
  std::size_t failing_pairs = 0;
  std::size_t pairs = 0;
  std::size_t core_vertices = 0;
};

namespace detail {

/// Midpoint of the shortest a -> b path recorded in sp, taken at distance t from a.
inline EdgePoint point_on_path(const ShortestPaths& sp, int a, int b, double t) {
  int w = b;
  while (true) {
    const int u = sp.p(static_cast<std::size_t>(a), static_cast<std::size_t>(w));
    const double du = sp.d(static_cast<std::size_t>(a), static_cast<std::size_t>(u));
    if (du <= t) {
      const double dw = sp.d(static_cast<std::size_t>(a), static_cast<std::size_t>(w));
      return {u, w, t - du, dw - du};
    }
    w = u;
  }
}

inline double dist_to(const ShortestPaths& sp, const EdgePoint& z, std::size_t v) {
  return std::min(z.s + sp.d(static_cast<std::size_t>(z.u), v),
                  z.len - z.s + sp.d(static_cast<std::size_t>(z.w), v));
}

inline bool is_z_edge(const EdgePoint& z, int a, int b) {
  return (a == z.u && b == z.w) || (a == z.w && b == z.u);
}

/// BFS from x over allowed vertices farther than r from z, never crossing z's edge.
inline std::optional<std::vector<int>> detour(const MetricGraph& g, const ShortestPaths& sp, const EdgePoint& z,
                                              int x, int y, double r, const std::vector<char>& allowed,
                                              std::vector<int>& mark, int stamp, std::vector<int>& parent,
                                              std::vector<int>& queue) {
  if (dist_to(sp, z, static_cast<std::size_t>(x)) <= r || dist_to(sp, z, static_cast<std::size_t>(y)) <= r) {
    return std::nullopt;
  }
  queue.clear();
  queue.push_back(x);
  mark[static_cast<std::size_t>(x)] = stamp;
  parent[static_cast<std::size_t>(x)] = -1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    if (u == y) {
      std::vector<int> path;
      for (int v = y; v != -1; v = parent[static_cast<std::size_t>(v)]) path.push_back(v);
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (const auto& arc : g.adj[static_cast<std::size_t>(u)]) {
      const auto t = static_cast<std::size_t>(arc.to);
      if (mark[t] == stamp || !allowed[t] || is_z_edge(z, u, arc.to)) continue;
      mark[t] = stamp;
      if (dist_to(sp, z, t) <= r) continue;
      parent[t] = u;
      queue.push_back(arc.to);
    }
  }
  return std::nullopt;
}

/// Max over x-y paths inside `allowed` avoiding z's edge of the least distance to z.
inline double widest(const MetricGraph& g, const ShortestPaths& sp, const EdgePoint& z, int x, int y,
                     const std::vector<char>& allowed) {
  const std::size_t n = g.size();
  std::vector<double> best(n, -kInf);
  std::priority_queue<std::pair<double, int>> pq;
  best[static_cast<std::size_t>(x)] = dist_to(sp, z, static_cast<std::size_t>(x));
  pq.emplace(best[static_cast<std::size_t>(x)], x);
  while (!pq.empty()) {
    const auto [b, u] = pq.top();
    pq.pop();
    if (b < best[static_cast<std::size_t>(u)]) continue;
    if (u == y) return b;
    for (const auto& arc : g.adj[static_cast<std::size_t>(u)]) {
      const auto t = static_cast<std::size_t>(arc.to);
      if (!allowed[t] || is_z_edge(z, u, arc.to)) continue;
      const double nb = std::min(b, dist_to(sp, z, t));
      if (nb > best[t]) {
        best[t] = nb;
        pq.emplace(nb, arc.to);
      }
    }
  }
  return 0.0;  // every x-y path crosses z
}

/// Pendant trees hang off the 2-core; each vertex records where its tree attaches.
struct CoreDecomposition {
  std::vector<char> in_core;
  std::vector<int> root;  // attachment vertex in the core (itself for core vertices)
  std::size_t core_size = 0;
};

inline CoreDecomposition core_decomposition(const MetricGraph& g) {
  const std::size_t n = g.size();
  CoreDecomposition c;
  c.in_core.assign(n, 1);
  c.root.assign(n, -1);
  std::vector<int> deg(n);
  std::vector<int> leaves;
  for (std::size_t v = 0; v < n; ++v) {
    deg[v] = static_cast<int>(g.adj[v].size());
    if (deg[v] <= 1) leaves.push_back(static_cast<int>(v));
  }
  while (!leaves.empty()) {
    const int v = leaves.back();
    leaves.pop_back();
    if (!c.in_core[static_cast<std::size_t>(v)]) continue;
    c.in_core[static_cast<std::size_t>(v)] = 0;
    for (const auto& arc : g.adj[static_cast<std::size_t>(v)]) {
      const auto t = static_cast<std::size_t>(arc.to);
      if (c.in_core[t] && --deg[t] <= 1) leaves.push_back(arc.to);
    }
  }
  std::vector<int> stack;
  for (std::size_t v = 0; v < n; ++v) {
    if (!c.in_core[v]) continue;
    ++c.core_size;
    c.root[v] = static_cast<int>(v);
    stack.push_back(static_cast<int>(v));
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& arc : g.adj[static_cast<std::size_t>(u)]) {
        const auto t = static_cast<std::size_t>(arc.to);
        if (!c.in_core[t] && c.root[t] < 0) {
          c.root[t] = static_cast<int>(v);
          stack.push_back(arc.to);
        }
      }
    }
  }
  return c;
}

}  // namespace detail

/// For every vertex pair x, y with midpoint z of a shortest path: the pair passes at
/// delta iff the closed delta-ball about z contains x or y, or separates them.
/// delta_min is the exact least passing radius over all pairs.
///
/// A pendant tree meets the rest of the graph in one vertex, so detours never enter
/// one: a pair reduces to its attachment points a, b and the point z at the same
/// distance from a along a shortest a-b path; if z falls inside a pendant tree the
/// pair passes at radius 0. Reduced checks are cached.
inline BottleneckReport bottleneck_check(const MetricGraph& g, const ShortestPaths& sp, double delta,
                                         std::size_t max_witnesses = 8) {
  const std::size_t n = g.size();
  for (double v : sp.dist) {
    if (!std::isfinite(v)) throw Error(ErrorCode::DisconnectedInput, "bottleneck_check needs a connected graph");
  }
  BottleneckReport r;
  r.delta = delta;
  r.pairs = n * (n - 1) / 2;
  const detail::CoreDecomposition core = detail::core_decomposition(g);
  r.core_vertices = core.core_size;
  const std::vector<char> everything(n, 1);

  struct Reduced {
    int a, b;
    double t;
  };
  struct Item {
    double d;
    int x, y;
  };
  std::vector<Item> order;
  order.reserve(r.pairs);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) order.push_back({sp.d(x, y), static_cast<int>(x), static_cast<int>(y)});
  }
  std::sort(order.begin(), order.end(), [](const Item& p, const Item& q) { return p.d > q.d; });

  // Cached per (a, b, t): exact value, or an upper bound when only a BFS ran.
  struct Known {
    double value;
    bool exact;
  };
  std::map<std::tuple<int, int, long long>, Known> cache;
  std::vector<int> mark(n, 0), parent(n, -1), queue;
  int stamp = 0;
  const double scale = 1e9;

  for (const Item& it : order) {
    const double half = 0.5 * it.d;
    if (half <= std::min(r.delta_min, delta)) break;
    const int a = core.root[static_cast<std::size_t>(it.x)];
    const int b = core.root[static_cast<std::size_t>(it.y)];
    if (a < 0 || a == b) continue;  // forest, or both hang off one vertex: z cuts
    const double ax = sp.d(static_cast<std::size_t>(it.x), static_cast<std::size_t>(a));
    const double D = sp.d(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    const double t = half - ax;
    if (t <= 0.0 || t >= D) continue;  // z inside a pendant tree
    const Reduced red{a, b, t};
    const auto key = std::make_tuple(red.a, red.b, std::llround(red.t * scale));
    const double level = std::min(r.delta_min, delta);
    auto found = cache.find(key);
    double W;
    if (found != cache.end() && (found->second.exact || found->second.value <= level)) {
      W = found->second.value;
      if (!found->second.exact) continue;
    } else {
      const EdgePoint z = detail::point_on_path(sp, red.a, red.b, red.t);
      if (!detail::detour(g, sp, z, red.a, red.b, level, core.in_core, mark, ++stamp, parent, queue)) {
        cache[key] = {level, false};
        continue;
      }
      W = detail::widest(g, sp, z, red.a, red.b, core.in_core);
      cache[key] = {W, true};
    }
    if (W > delta) {
      ++r.failing_pairs;
      if (r.failures.size() < max_witnesses) {
        const EdgePoint z = detail::point_on_path(sp, red.a, red.b, red.t);
        auto path = detail::detour(g, sp, z, it.x, it.y, delta, everything, mark, ++stamp, parent, queue);
        if (path) r.failures.push_back({it.x, it.y, z, *path});
      }
    }
    if (W > r.delta_min) {
      r.delta_min = W;
      r.critical_pair = {it.x, it.y};
    }
  }
  // Once half <= min(delta_min, delta) a pair can neither fail nor raise delta_min.
  r.pass = r.failing_pairs == 0;
  return r;
}

inline BottleneckReport bottleneck_check(const MetricGraph& g, double delta, std::size_t max_witnesses = 8) {
  return bottleneck_check(g, all_pairs(g), delta, max_witnesses);
}

/// Reference implementation without the pendant-tree reduction, for testing.
inline BottleneckReport bottleneck_check_naive(const MetricGraph& g, const ShortestPaths& sp, double delta) {
  const std::size_t n = g.size();
  BottleneckReport r;
  r.delta = delta;
  r.pairs = n * (n - 1) / 2;
  const std::vector<char> everything(n, 1);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const EdgePoint z = detail::point_on_path(sp, static_cast<int>(x), static_cast<int>(y), 0.5 * sp.d(x, y));
      const double W =
          detail::widest(g, sp, z, static_cast<int>(x), static_cast<int>(y), everything);
      if (W > delta) ++r.failing_pairs;
      if (W > r.delta_min) {
        r.delta_min = W;
        r.critical_pair = {static_cast<int>(x), static_cast<int>(y)};
      }
    }
  }
  r.pass = r.failing_pairs == 0;
  return r;
}


// ---------------------------------------------------------------------------
// Calibration of K

struct Calibration {
  double K = 0.0;
  double L = 0.0;
  double delta = 0.0;     // grid resolution
  double bottleneck = 0.0;  // radius tested, K/2 + 2 theta
  int doublings = 0;
  double embedding_defect = 0.0;
  BottleneckReport report;
  std::vector<double> tried;
};

/// Doubles K from 4 theta (L = K, grid theta/4) until the complex embeds every
/// domain isometrically and passes the bottleneck test at radius K/2 + 2 theta.
inline Calibration calibrate_K(const DomainFamily& fam, int max_doublings = 6) {
  Calibration c;
  c.delta = fam.theta / 4.0;
  double K = 4.0 * fam.theta;
  for (int i = 0; i <= max_doublings; ++i, K *= 2.0) {
    c.tried.push_back(K);
    const ProjectionGraph pk = build_projection_graph(fam, K);
    if (!pk.connected()) continue;
    const QuasiTreeOfSpaces q = build_quasi_tree(fam, pk, K, c.delta);
    const ShortestPaths sp = all_pairs(q.graph);
    const double defect = embedding_defect(q, sp);
    if (defect > 1e-9) continue;
    const double radius = 0.5 * K + 2.0 * fam.theta;
    BottleneckReport rep = bottleneck_check(q.graph, sp, radius);
    if (!rep.pass) continue;
    c.K = K;
    c.L = K;
    c.bottleneck = radius;
    c.doublings = i;
    c.embedding_defect = defect;
    c.report = std::move(rep);
    return c;
  }
  throw Error(ErrorCode::CalibrationFailed,
              "no K up to " + std::to_string(K / 2.0) + " passed the bottleneck test");
}

// ---------------------------------------------------------------------------
// Group actions on a family

/// x -> sign * x + shift between two domain lines.
struct LineIsometry {
  int sign = 1;
  double shift = 0.0;
  double operator()(double x) const { return sign * x + shift; }
  /// (*this) after `first`.
  LineIsometry after(const LineIsometry& first) const { return {sign * first.sign, sign * first.shift + shift}; }
};

/// One group element: Y -> image[Y] (-1 when the image leaves the finite family)
/// together with F[Y] : C(Y) -> C(image[Y]).
struct LabelAction {
  std::vector<long> image;
  std::vector<LineIsometry> F;
};

inline LabelAction identity_action(std::size_t n) {
  LabelAction a;
  for (std::size_t Y = 0; Y < n; ++Y) a.image.push_back(static_cast<long>(Y));
  a.F.assign(n, LineIsometry{});
  return a;
}

struct CocycleFailure {
  std::size_t g = 0, h = 0, Y = 0;
  std::string what;
};

struct EquivarianceFailure {
  std::size_t g = 0, Y = 0, X = 0;
  std::vector<double> expected, found;  // F_g^Y(pi_Y(X)) and pi_{gY}(gX)
};

struct CompatibilityReport {
  bool pass = true;
  std::size_t checks = 0;
  std::vector<CocycleFailure> cocycle;
  std::vector<EquivarianceFailure> equivariance;
};

/// products lists (g, h, hg) as indices into actions.
inline CompatibilityReport verify_group_compatibility(const DomainFamily& fam, const std::vector<LabelAction>& actions,
                                                      const std::vector<std::array<std::size_t, 3>>& products,
                                                      double tol = 1e-8) {
  CompatibilityReport r;
  const std::size_t n = fam.size();
  for (const auto& [g, h, hg] : products) {
    const LabelAction& A = actions[g];
    const LabelAction& B = actions[h];
    const LabelAction& C = actions[hg];
    for (std::size_t Y = 0; Y < n; ++Y) {
      const long gY = A.image[Y];
      if (gY < 0 || B.image[static_cast<std::size_t>(gY)] < 0) continue;
      ++r.checks;
      const long hgY = B.image[static_cast<std::size_t>(gY)];
      if (C.image[Y] != hgY) {
        r.cocycle.push_back({g, h, Y, "labels: h(g(Y)) != (hg)(Y)"});
        continue;
      }
      const LineIsometry lhs = B.F[static_cast<std::size_t>(gY)].after(A.F[Y]);
      const LineIsometry& rhs = C.F[Y];
      if (lhs.sign != rhs.sign || std::abs(lhs.shift - rhs.shift) > tol * (1.0 + std::abs(rhs.shift))) {
        r.cocycle.push_back({g, h, Y, "F_h^{gY} F_g^Y != F_hg^Y"});
      }
    }
  }
  for (std::size_t g = 0; g < actions.size(); ++g) {
    const LabelAction& A = actions[g];
    for (std::size_t Y = 0; Y < n; ++Y) {
      for (std::size_t X = 0; X < n; ++X) {
        if (X == Y || A.image[Y] < 0 || A.image[X] < 0) continue;
        ++r.checks;
        std::vector<double> expected;
        for (double p : fam.pi(Y, X)) expected.push_back(A.F[Y](p));
        std::vector<double> found =
            fam.pi(static_cast<std::size_t>(A.image[Y]), static_cast<std::size_t>(A.image[X]));
        std::sort(expected.begin(), expected.end());
        std::sort(found.begin(), found.end());
        bool same = expected.size() == found.size();
        for (std::size_t i = 0; same && i < found.size(); ++i) {
          same = std::abs(expected[i] - found[i]) <= tol * (1.0 + std::abs(found[i]));
        }
        if (!same) r.equivariance.push_back({g, Y, X, expected, found});
      }
    }
  }
  r.pass = r.cocycle.empty() && r.equivariance.empty();
  return r;
}

}  // namespace hypstruct::projection_complex
