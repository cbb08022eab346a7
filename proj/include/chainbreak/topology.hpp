#pragma once

// Zephyr hardware graph Z(m, t).
//
// Qubits carry coordinates (u, w, k, j, z) with u, j in {0,1}, w in [0, 2m],
// k in [0, t), z in [0, m).  A qubit's id is its lexicographic rank, i.e.
// (((u*(2m+1) + w)*t + k)*2 + j)*m + z.  Coupler incidence matches the
// dwave-networkx generator:
//   external  (u,w,k,j,z) -- (u,w,k,j,z+1)
//   odd       (u,w,k,0,z) -- (u,w,k,1,z-a),  a in {0,1}
//   internal  (0, 2w+1+a(2i-1), k, j, z) -- (1, 2z+1+b(2j-1), h, i, w)

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chainbreak {

struct ZephyrCoordinate {
  int u = 0;
  int w = 0;
  int k = 0;
  int j = 0;
  int z = 0;

  friend constexpr auto operator<=>(const ZephyrCoordinate&, const ZephyrCoordinate&) = default;
};

enum class CouplerClass { internal = 0, external = 1, odd = 2 };

constexpr std::string_view to_string(CouplerClass c) noexcept {
  switch (c) {
    case CouplerClass::internal: return "internal";
    case CouplerClass::external: return "external";
    case CouplerClass::odd: return "odd";
  }
  return "?";
}

inline CouplerClass coupler_class_from_string(std::string_view s) {
  if (s == "internal") return CouplerClass::internal;
  if (s == "external") return CouplerClass::external;
  if (s == "odd") return CouplerClass::odd;
  throw std::invalid_argument("unknown coupler class '" + std::string(s) + "'");
}

struct ZephyrEdge {
  std::size_t a = 0;  // a < b
  std::size_t b = 0;
  CouplerClass cls = CouplerClass::internal;

  friend constexpr bool operator==(const ZephyrEdge&, const ZephyrEdge&) = default;
};

struct ZephyrGraph {
  int m = 0;
  int t = 0;
  std::vector<ZephyrCoordinate> vertices;  // indexed by id
  std::vector<ZephyrEdge> edges;           // sorted by (a, b)

  std::size_t vertex_count() const noexcept { return vertices.size(); }

  /// Sorted neighbour lists.
  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(vertices.size());
    for (const auto& e : edges) {
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    return adj;
  }
};

namespace detail {
inline void check_grid(long long m, long long t) {
  if (m < 1 || t < 1)
    throw std::invalid_argument("Zephyr parameters must be positive (m=" + std::to_string(m) +
                                ", t=" + std::to_string(t) + ")");
}
}  // namespace detail

/// 8tm^2 + 4tm.
inline std::size_t vertex_count(long long m, long long t) {
  detail::check_grid(m, t);
  return static_cast<std::size_t>(8 * t * m * m + 4 * t * m);
}

constexpr std::size_t zephyr_linear_index(const ZephyrCoordinate& q, int m, int t) noexcept {
  const std::size_t M = 2 * static_cast<std::size_t>(m) + 1;
  return ((((static_cast<std::size_t>(q.u) * M + q.w) * t + q.k) * 2 + q.j) * m) + q.z;
}

constexpr ZephyrCoordinate zephyr_coordinate(std::size_t id, int m, int t) noexcept {
  ZephyrCoordinate q;
  q.z = static_cast<int>(id % m);
  id /= m;
  q.j = static_cast<int>(id % 2);
  id /= 2;
  q.k = static_cast<int>(id % t);
  id /= t;
  const std::size_t M = 2 * static_cast<std::size_t>(m) + 1;
  q.w = static_cast<int>(id % M);
  q.u = static_cast<int>(id / M);
  return q;
}

inline ZephyrGraph build_zephyr(int m, int t) {
  detail::check_grid(m, t);
  ZephyrGraph g;
  g.m = m;
  g.t = t;
  const int M = 2 * m + 1;

  g.vertices.reserve(vertex_count(m, t));
  for (int u = 0; u < 2; ++u)
    for (int w = 0; w < M; ++w)
      for (int k = 0; k < t; ++k)
        for (int j = 0; j < 2; ++j)
          for (int z = 0; z < m; ++z) g.vertices.push_back({u, w, k, j, z});

  auto id = [m, t](int u, int w, int k, int j, int z) {
    return zephyr_linear_index({u, w, k, j, z}, m, t);
  };
  auto add = [&g](std::size_t a, std::size_t b, CouplerClass c) {
    if (a > b) std::swap(a, b);
    g.edges.push_back({a, b, c});
  };

  for (int u = 0; u < 2; ++u)
    for (int w = 0; w < M; ++w)
      for (int k = 0; k < t; ++k)
        for (int j = 0; j < 2; ++j)
          for (int z = 0; z + 1 < m; ++z) add(id(u, w, k, j, z), id(u, w, k, j, z + 1), CouplerClass::external);

  for (int u = 0; u < 2; ++u)
    for (int w = 0; w < M; ++w)
      for (int k = 0; k < t; ++k)
        for (int a = 0; a < 2; ++a)
          for (int z = a; z < m; ++z) add(id(u, w, k, 0, z), id(u, w, k, 1, z - a), CouplerClass::odd);

  for (int w = 0; w < m; ++w)
    for (int z = 0; z < m; ++z)
      for (int h = 0; h < t; ++h)
        for (int k = 0; k < t; ++k)
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                  add(id(0, 2 * w + 1 + a * (2 * i - 1), k, j, z),
                      id(1, 2 * z + 1 + b * (2 * j - 1), h, i, w), CouplerClass::internal);

  std::sort(g.edges.begin(), g.edges.end(), [](const ZephyrEdge& x, const ZephyrEdge& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  const auto dup = std::adjacent_find(g.edges.begin(), g.edges.end(),
                                      [](const ZephyrEdge& x, const ZephyrEdge& y) {
                                        return x.a == y.a && x.b == y.b;
                                      });
  if (dup != g.edges.end())
    throw std::logic_error("duplicate Zephyr coupler " + std::to_string(dup->a) + "-" +
                           std::to_string(dup->b));
  return g;
}

inline std::vector<std::size_t> degrees(const ZephyrGraph& g) {
  std::vector<std::size_t> deg(g.vertex_count(), 0);
  for (const auto& e : g.edges) {
    ++deg[e.a];
    ++deg[e.b];
  }
  return deg;
}

/// Per-vertex incident edge counts split by coupler class (indexed by CouplerClass).
inline std::vector<std::array<std::size_t, 3>> degrees_by_class(const ZephyrGraph& g) {
  std::vector<std::array<std::size_t, 3>> deg(g.vertex_count(), {0, 0, 0});
  for (const auto& e : g.edges) {
    ++deg[e.a][static_cast<int>(e.cls)];
    ++deg[e.b][static_cast<int>(e.cls)];
  }
  return deg;
}

/// degree -> number of vertices with that degree; isolated vertices count under 0.
inline std::map<std::size_t, std::size_t> degree_histogram(const ZephyrGraph& g) {
  std::map<std::size_t, std::size_t> hist;
  for (auto d : degrees(g)) ++hist[d];
  return hist;
}

inline std::size_t max_degree(const ZephyrGraph& g) {
  const auto deg = degrees(g);
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

/// "a b class" per line.
inline void write_edge_list(std::ostream& os, const ZephyrGraph& g) {
  for (const auto& e : g.edges) os << e.a << ' ' << e.b << ' ' << to_string(e.cls) << '\n';
}

}  // namespace chainbreak
