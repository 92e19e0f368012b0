#include <gtest/gtest.h>

#include <random>

#include "dismech/scenarios.hpp"

using namespace dismech;

namespace {

MeshTopology two_triangles() {
  return build_topology({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)}, {}, {{{0, 1, 2}}, {{1, 3, 2}}});
}

MeshTopology rod(int n, double length) {
  std::vector<Vec3> x;
  std::vector<std::array<int, 2>> e;
  for (int i = 0; i < n; ++i) x.emplace_back(length * i / (n - 1), 0, 0);
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return build_topology(x, e, {});
}

}  // namespace

TEST(Topology, TwoTrianglesShareOneEdge) {
  const MeshTopology t = two_triangles();
  EXPECT_EQ(t.num_shell_edges(), 5);
  int interior = 0;
  for (const ShellEdge& e : t.shell_edges) interior += e.interior();
  EXPECT_EQ(interior, 1);
  const int shared = t.find_shell_edge(2, 1);
  ASSERT_GE(shared, 0);
  EXPECT_TRUE(t.shell_edges[shared].interior());
  EXPECT_EQ(t.shell_edges[shared].nodes, (std::array<int, 2>{1, 2}));
  EXPECT_EQ(build_springs(t, Material{}, ShellModel::Hinge).hinges.size(), 1u);
  EXPECT_EQ(build_springs(t, Material{}, ShellModel::Midedge).midedge.size(), 2u);
}

TEST(Topology, LocalEdgeOppositeVertex) {
  const MeshTopology t = two_triangles();
  for (int f = 0; f < t.num_triangles(); ++f)
    for (int k = 0; k < 3; ++k) {
      const ShellEdge& e = t.shell_edges[t.triangle_edges[f][k]];
      const int v = t.triangles[f][k];
      EXPECT_NE(e.nodes[0], v);
      EXPECT_NE(e.nodes[1], v);
    }
}

TEST(Topology, RejectsInvalidInput) {
  const std::vector<Vec3> x{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  EXPECT_THROW(build_topology(x, {{{0, 3}}}, {}), std::invalid_argument);
  EXPECT_THROW(build_topology(x, {{{1, 1}}}, {}), std::invalid_argument);
  EXPECT_THROW(build_topology(x, {{{0, 1}}, {{1, 0}}}, {}), std::invalid_argument);
  EXPECT_THROW(build_topology(x, {}, {{{0, 1, 2}}}), std::invalid_argument);  // collinear
  EXPECT_THROW(build_topology({}, {}, {}), std::invalid_argument);
}

TEST(Springs, RodStencilsAndStiffness) {
  const MeshTopology t = rod(5, 0.4);
  Material m;
  m.E_rod = 2e9;
  m.nu_rod = 0.25;
  m.r0 = 2e-3;
  const SpringSet s = build_springs(t, m, ShellModel::Hinge);
  ASSERT_EQ(s.stretch.size(), 4u);
  ASSERT_EQ(s.bendtwist.size(), 3u);
  const double A = M_PI * 4e-6, I = M_PI * 1.6e-11 / 4.0;
  EXPECT_DOUBLE_EQ(s.stretch[0].ks, 2e9 * A);
  EXPECT_DOUBLE_EQ(s.stretch[0].rest_length, 0.1);
  EXPECT_DOUBLE_EQ(s.bendtwist[1].EI, 2e9 * I);
  EXPECT_DOUBLE_EQ(s.bendtwist[1].GJ, 2e9 / 2.5 * 2.0 * I);
  EXPECT_DOUBLE_EQ(s.bendtwist[1].voronoi, 0.1);
  EXPECT_EQ(s.bendtwist[1].nodes, (std::array<int, 3>{1, 2, 3}));
}

TEST(Springs, EdgeFlipsAreRecorded) {
  // Edge 1 is stored 2 -> 1, against the stencil 0 -> 1 -> 2.
  const MeshTopology t = build_topology({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0.1, 0)}, {{{0, 1}}, {{2, 1}}}, {});
  const SpringSet s = build_springs(t, Material{}, ShellModel::Hinge);
  ASSERT_EQ(s.bendtwist.size(), 1u);
  EXPECT_EQ(s.bendtwist[0].nodes[1], 1);
  const int flipped = s.bendtwist[0].nodes[0] == 0 ? 1 : 0;
  EXPECT_EQ(s.bendtwist[0].sign[flipped], -1);
  EXPECT_EQ(s.bendtwist[0].sign[1 - flipped], 1);
}

TEST(Layout, DofCountOnRandomTopologies) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const StripMesh m = strip_mesh(MeshFamily::Random, 0.05 + 0.01 * (trial % 5), 0.02, 6e-3, rng());
    const MeshTopology t = build_topology(m.geometry.nodes, {}, m.geometry.triangles);
    const int N = t.num_nodes(), Z = t.num_shell_edges();
    EXPECT_EQ(make_layout(t, ShellModel::Hinge).size(), 3 * N);
    EXPECT_EQ(make_layout(t, ShellModel::Midedge).size(), 3 * N + Z);
    // Euler characteristic of a disc: V - E + F = 1.
    EXPECT_EQ(N - Z + t.num_triangles(), 1);
  }
  const MeshTopology r = rod(7, 1.0);
  EXPECT_EQ(make_layout(r, ShellModel::Hinge).size(), 3 * 7 + 6);
}

TEST(Layout, JointAugmentsFrameEdges) {
  // Rod 4 -> 0 attached to a corner of a two-triangle patch.
  const MeshTopology t = build_topology({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0), Vec3(-1, 0, 0)},
                                        {{{4, 0}}}, {{{0, 1, 2}}, {{1, 3, 2}}});
  EXPECT_EQ(t.joint_nodes, std::vector<int>{0});
  // Triangle 0 touches the joint: its three edges carry frames.
  EXPECT_EQ(t.num_frame_edges(), 1 + 3);
  EXPECT_EQ(make_layout(t, ShellModel::Hinge).size(), 3 * 5 + 4);
  EXPECT_EQ(make_layout(t, ShellModel::Midedge).size(), 3 * 5 + 4 + 5);
  // Node 0 joins the rod edge with the two triangle edges incident to it.
  const SpringSet s = build_springs(t, Material{}, ShellModel::Hinge);
  int at_joint = 0;
  for (const auto& b : s.bendtwist) at_joint += b.nodes[1] == 0;
  EXPECT_EQ(at_joint, 3);
}

TEST(Mass, TotalsMatchVolumes) {
  const MeshTopology t = build_topology({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0), Vec3(-1, 0, 0)},
                                        {{{4, 0}}}, {{{0, 1, 2}}, {{1, 3, 2}}});
  Material m;
  m.rho_rod = 1000.0;
  m.rho_shell = 500.0;
  m.r0 = 0.01;
  m.h = 0.02;
  const DofLayout L = make_layout(t, ShellModel::Hinge);
  const VecX mass = lumped_mass(t, m, L);
  double total = 0.0;
  for (int i = 0; i < t.num_nodes(); ++i) {
    EXPECT_EQ(mass[L.pos(i, 0)], mass[L.pos(i, 1)]);
    EXPECT_EQ(mass[L.pos(i, 0)], mass[L.pos(i, 2)]);
    total += mass[L.pos(i, 0)];
  }
  const double expected = 1000.0 * M_PI * 1e-4 * 1.0 + 500.0 * 0.02 * 1.0;
  EXPECT_NEAR(total, expected, 1e-12 * expected);
  for (int e = 0; e < L.n_theta; ++e) EXPECT_GT(mass[L.theta(e)], 0.0);
}

TEST(Voronoi, HalfOfIncidentEdges) {
  const MeshTopology t = build_topology({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 3, 0)}, {{{0, 1}}, {{1, 2}}}, {});
  const std::vector<double> dl = voronoi_lengths(t);
  EXPECT_DOUBLE_EQ(dl[0], 0.5);
  EXPECT_DOUBLE_EQ(dl[1], 2.0);
  EXPECT_DOUBLE_EQ(dl[2], 1.5);
}

TEST(StripMesh, FamiliesCoverTheStrip) {
  for (MeshFamily f : all_mesh_families()) {
    const StripMesh m = strip_mesh(f, 0.1, 0.02, 5e-3, 1);
    const MeshTopology t = build_topology(m.geometry.nodes, {}, m.geometry.triangles);
    double area = 0.0;
    for (const auto& tri : t.triangles) {
      const Vec3 n = (t.nodes[tri[1]] - t.nodes[tri[0]]).cross(t.nodes[tri[2]] - t.nodes[tri[0]]);
      EXPECT_GT(n.z(), 0.0) << family_name(f);
      area += 0.5 * n.z();
    }
    double xmin = 0.0;
    for (const Vec3& p : t.nodes) xmin = std::min(xmin, p.x());
    EXPECT_NEAR(area, 0.02 * (0.1 - xmin), 1e-12) << family_name(f);
    EXPECT_FALSE(m.clamped.empty());
    EXPECT_GE(m.tip.size(), 2u);
    EXPECT_EQ(parse_family(family_name(f)), f);
  }
}
