#pragma once

#include "dismech/types.hpp"

namespace dismech {

// Local edge k of triangle (v0, v1, v2) is opposite vertex k and runs
// v[k+1] -> v[k+2] in the triangle's winding.
struct ShellEdge {
  std::array<int, 2> nodes{};              // (min, max)
  std::array<int, 2> triangles{-1, -1};    // owner (lower index) first; -1 if boundary
  std::array<int, 2> local{-1, -1};        // local edge index inside each triangle
  bool owner_forward = true;               // owner winding runs nodes[0] -> nodes[1]
  bool interior() const { return triangles[1] >= 0; }
};

struct MeshTopology {
  std::vector<Vec3> nodes;
  std::vector<std::array<int, 2>> rod_edges;
  std::vector<std::array<int, 3>> triangles;

  std::vector<ShellEdge> shell_edges;                 // sorted by (min, max)
  std::vector<std::array<int, 3>> triangle_edges;     // shell edge of each local edge
  std::vector<int> joint_nodes;                       // sorted

  // Edges carrying a frame and a twist angle: rod edges in input order, then
  // shell edges of triangles touching a joint node (oriented min -> max).
  std::vector<std::array<int, 2>> frame_edges;
  std::vector<int> frame_edge_shell;                  // shell-edge index, -1 for rod edges

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_rod_edges() const { return static_cast<int>(rod_edges.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_shell_edges() const { return static_cast<int>(shell_edges.size()); }
  int num_frame_edges() const { return static_cast<int>(frame_edges.size()); }

  // Shell edge index joining a and b, or -1.
  int find_shell_edge(int a, int b) const;
  bool is_joint_node(int n) const;
};

// Indices are 0-based. Throws std::invalid_argument on out-of-range indices,
// duplicate or degenerate rod edges and zero-area triangles.
MeshTopology build_topology(std::vector<Vec3> nodes, std::vector<std::array<int, 2>> rod_edges,
                            std::vector<std::array<int, 3>> triangles);

// Per-node Voronoi length: half the summed undeformed length of incident rod edges.
std::vector<double> voronoi_lengths(const MeshTopology& topo);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace dismech
