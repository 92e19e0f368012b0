#include "dismech/mesh.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace dismech {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

int MeshTopology::find_shell_edge(int a, int b) const {
  const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
  auto it = std::lower_bound(shell_edges.begin(), shell_edges.end(), key,
                             [](const ShellEdge& e, const std::array<int, 2>& k) { return e.nodes < k; });
  if (it != shell_edges.end() && it->nodes == key) return static_cast<int>(it - shell_edges.begin());
  return -1;
}

bool MeshTopology::is_joint_node(int n) const {
  return std::binary_search(joint_nodes.begin(), joint_nodes.end(), n);
}

MeshTopology build_topology(std::vector<Vec3> nodes, std::vector<std::array<int, 2>> rod_edges,
                            std::vector<std::array<int, 3>> triangles) {
  MeshTopology t;
  t.nodes = std::move(nodes);
  t.rod_edges = std::move(rod_edges);
  t.triangles = std::move(triangles);
  const int n = t.num_nodes();
  if (n == 0) throw std::invalid_argument("topology has no nodes");
  auto check = [n](int idx, const char* what, std::size_t item) {
    if (idx < 0 || idx >= n)
      throw std::invalid_argument(std::string(what) + " " + std::to_string(item + 1) +
                                  " references node index out of range");
  };

  std::set<std::array<int, 2>> seen;
  for (std::size_t i = 0; i < t.rod_edges.size(); ++i) {
    const auto& e = t.rod_edges[i];
    check(e[0], "edge", i);
    check(e[1], "edge", i);
    if (e[0] == e[1]) throw std::invalid_argument("edge " + std::to_string(i + 1) + " joins a node to itself");
    const std::array<int, 2> key{std::min(e[0], e[1]), std::max(e[0], e[1])};
    if (!seen.insert(key).second) throw std::invalid_argument("duplicate edge " + std::to_string(i + 1));
    if ((t.nodes[e[0]] - t.nodes[e[1]]).norm() == 0.0)
      throw std::invalid_argument("edge " + std::to_string(i + 1) + " has zero length");
  }

  std::map<std::array<int, 2>, ShellEdge> edges;
  for (std::size_t f = 0; f < t.triangles.size(); ++f) {
    const auto& tri = t.triangles[f];
    for (int k = 0; k < 3; ++k) check(tri[k], "triangle", f);
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] ||
        triangle_area(t.nodes[tri[0]], t.nodes[tri[1]], t.nodes[tri[2]]) <= 0.0)
      throw std::invalid_argument("triangle " + std::to_string(f + 1) + " has zero area");
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = edges.try_emplace(key);
      ShellEdge& se = it->second;
      if (inserted) {
        se.nodes = key;
        se.triangles[0] = static_cast<int>(f);
        se.local[0] = k;
        se.owner_forward = (a == key[0]);
      } else if (se.triangles[1] < 0) {
        se.triangles[1] = static_cast<int>(f);
        se.local[1] = k;
      } else {
        throw std::invalid_argument("shell edge (" + std::to_string(key[0] + 1) + ", " +
                                    std::to_string(key[1] + 1) + ") is shared by more than two triangles");
      }
    }
  }
  t.shell_edges.reserve(edges.size());
  for (auto& kv : edges) t.shell_edges.push_back(kv.second);
  t.triangle_edges.assign(t.triangles.size(), {-1, -1, -1});
  for (std::size_t s = 0; s < t.shell_edges.size(); ++s)
    for (int side = 0; side < 2; ++side)
      if (t.shell_edges[s].triangles[side] >= 0)
        t.triangle_edges[t.shell_edges[s].triangles[side]][t.shell_edges[s].local[side]] = static_cast<int>(s);

  std::vector<char> on_rod(n, 0), on_tri(n, 0);
  for (const auto& e : t.rod_edges) on_rod[e[0]] = on_rod[e[1]] = 1;
  for (const auto& tri : t.triangles)
    for (int v : tri) on_tri[v] = 1;
  for (int i = 0; i < n; ++i)
    if (on_rod[i] && on_tri[i]) t.joint_nodes.push_back(i);

  t.frame_edges = t.rod_edges;
  t.frame_edge_shell.assign(t.rod_edges.size(), -1);
  if (!t.joint_nodes.empty()) {
    std::vector<char> augmented(t.shell_edges.size(), 0);
    for (std::size_t f = 0; f < t.triangles.size(); ++f) {
      const auto& tri = t.triangles[f];
      if (!(t.is_joint_node(tri[0]) || t.is_joint_node(tri[1]) || t.is_joint_node(tri[2]))) continue;
      for (int k = 0; k < 3; ++k) augmented[t.triangle_edges[f][k]] = 1;
    }
    for (std::size_t s = 0; s < t.shell_edges.size(); ++s) {
      if (!augmented[s] || seen.count(t.shell_edges[s].nodes)) continue;
      t.frame_edges.push_back(t.shell_edges[s].nodes);
      t.frame_edge_shell.push_back(static_cast<int>(s));
    }
  }
  return t;
}

std::vector<double> voronoi_lengths(const MeshTopology& topo) {
  std::vector<double> dl(topo.nodes.size(), 0.0);
  for (const auto& e : topo.rod_edges) {
    const double half = 0.5 * (topo.nodes[e[1]] - topo.nodes[e[0]]).norm();
    dl[e[0]] += half;
    dl[e[1]] += half;
  }
  return dl;
}

}  // namespace dismech
