#include <gtest/gtest.h>

#include <random>

#include "dismech/rod_energy.hpp"

using namespace dismech;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

struct Rod {
  MeshTopology topo;
  SpringSet springs;
  DofLayout layout;
  VecX q;
};

// Helix-like random polyline with 0-based edges i -> i+1, some stored reversed.
Rod random_rod(std::mt19937_64& rng, int n, bool flips) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::vector<Vec3> x{Vec3::Zero()};
  for (int i = 1; i < n; ++i) x.push_back(x.back() + Vec3(1.0, u(rng), u(rng)).normalized() * 0.1);
  std::vector<std::array<int, 2>> e;
  for (int i = 0; i + 1 < n; ++i) {
    if (flips && rng() % 2) e.push_back({i + 1, i});
    else e.push_back({i, i + 1});
  }
  Rod r;
  r.topo = build_topology(x, e, {});
  r.springs = build_springs(r.topo, Material{}, ShellModel::Hinge);
  r.layout = make_layout(r.topo, ShellModel::Hinge);
  r.q = VecX::Zero(r.layout.size());
  for (int i = 0; i < n; ++i) r.q.segment<3>(3 * i) = x[i];
  return r;
}

double wrap(double a) { return std::remainder(a, 2.0 * M_PI); }

}  // namespace

TEST(ParallelTransport, MapsTangentAndPreservesAngles) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 a = random_unit(rng), b = random_unit(rng), v = random_unit(rng);
    if (a.dot(b) < -0.99) continue;
    EXPECT_NEAR((parallel_transport(a, a, b) - b).norm(), 0.0, 1e-12);
    const Vec3 w = parallel_transport(v, a, b);
    EXPECT_NEAR(w.norm(), 1.0, 1e-12);
    EXPECT_NEAR(w.dot(b), v.dot(a), 1e-12);
    // The common normal a x b is left alone.
    const Vec3 axis = a.cross(b);
    if (axis.norm() > 1e-6) EXPECT_NEAR((parallel_transport(axis, a, b) - axis).norm(), 0.0, 1e-12);
  }
  EXPECT_EQ(parallel_transport(Vec3(0, 1, 0), Vec3(1, 0, 0), Vec3(1, 0, 0)), Vec3(0, 1, 0));
}

TEST(ParallelTransport, AntiparallelTangents) {
  const Vec3 t(0, 0, 1), v(1, 0, 0);
  EXPECT_THROW(parallel_transport(v, t, -t), AntiparallelTransport);
  const Vec3 w = transport_robust(v, t, -t);
  EXPECT_NEAR(w.dot(t), 0.0, 1e-12);
  EXPECT_NEAR(w.norm(), 1.0, 1e-12);
}

TEST(SignedAngle, InvertsRotation) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(-3.1, 3.1);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 axis = random_unit(rng);
    const Vec3 u = perpendicular_seed(axis);
    EXPECT_NEAR(u.dot(axis), 0.0, 1e-12);
    EXPECT_NEAR(u.norm(), 1.0, 1e-12);
    const double a = ang(rng);
    EXPECT_NEAR(signed_angle(u, rotate_about(u, axis, a), axis), a, 1e-10);
  }
}

TEST(ReferenceFrames, OrthonormalAndAdapted) {
  std::mt19937_64 rng(3);
  Rod r = random_rod(rng, 12, true);
  const FrameSet f = init_reference_frames(r.topo, r.springs.bendtwist, r.q, r.layout);
  for (int e = 0; e < r.topo.num_frame_edges(); ++e) {
    EXPECT_NEAR((f.tangent[e] - edge_tangent(r.topo, r.q, e)).norm(), 0.0, 1e-14);
    EXPECT_NEAR(f.d1[e].norm(), 1.0, 1e-12);
    EXPECT_NEAR(f.d1[e].dot(f.tangent[e]), 0.0, 1e-12);
    EXPECT_NEAR((f.d2[e] - f.tangent[e].cross(f.d1[e])).norm(), 0.0, 1e-12);
    // theta = 0: material frame equals reference frame.
    EXPECT_NEAR((f.m1[e] - f.d1[e]).norm(), 0.0, 1e-12);
  }
}

TEST(ReferenceFrames, PlanarCurveHasNoReferenceTwist) {
  Rod r;
  std::vector<Vec3> x;
  for (int i = 0; i < 9; ++i) x.emplace_back(std::cos(0.3 * i), std::sin(0.3 * i), 0.0);
  std::vector<std::array<int, 2>> e;
  for (int i = 0; i + 1 < 9; ++i) e.push_back({i, i + 1});
  r.topo = build_topology(x, e, {});
  r.springs = build_springs(r.topo, Material{}, ShellModel::Hinge);
  r.layout = make_layout(r.topo, ShellModel::Hinge);
  r.q = VecX::Zero(r.layout.size());
  for (int i = 0; i < 9; ++i) r.q.segment<3>(3 * i) = x[i];
  const FrameSet f = init_reference_frames(r.topo, r.springs.bendtwist, r.q, r.layout);
  for (double tw : f.ref_twist) EXPECT_NEAR(tw, 0.0, 1e-12);
}

TEST(ReferenceFrames, IncrementalTwistMatchesScratch) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 0.01);
  for (int trial = 0; trial < 20; ++trial) {
    Rod r = random_rod(rng, 10, true);
    FrameSet f = init_reference_frames(r.topo, r.springs.bendtwist, r.q, r.layout);
    for (int step = 0; step < 50; ++step) {
      for (int i = 0; i < 3 * r.topo.num_nodes(); ++i) r.q[i] += n(rng);
      f = time_update_frames(f, r.topo, r.springs.bendtwist, r.q, r.layout);
    }
    for (std::size_t s = 0; s < r.springs.bendtwist.size(); ++s)
      EXPECT_NEAR(wrap(f.ref_twist[s] - reference_twist(f, r.springs.bendtwist[s])), 0.0, 1e-10);
    for (int e = 0; e < r.topo.num_frame_edges(); ++e) {
      EXPECT_NEAR(f.d1[e].dot(edge_tangent(r.topo, r.q, e)), 0.0, 1e-12);
      EXPECT_NEAR(f.d1[e].norm(), 1.0, 1e-12);
    }
  }
}

TEST(ReferenceFrames, RigidSpinAboutAxisIsTwistFree) {
  // Rotating a straight rod about an axis normal to it keeps ref twist zero.
  Rod r;
  r.topo = build_topology({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}, {{{0, 1}}, {{1, 2}}}, {});
  r.springs = build_springs(r.topo, Material{}, ShellModel::Hinge);
  r.layout = make_layout(r.topo, ShellModel::Hinge);
  r.q = VecX::Zero(r.layout.size());
  for (int i = 0; i < 3; ++i) r.q[3 * i] = i;
  FrameSet f = init_reference_frames(r.topo, r.springs.bendtwist, r.q, r.layout);
  for (int step = 1; step <= 40; ++step) {
    const double a = 0.05 * step;
    for (int i = 0; i < 3; ++i) r.q.segment<3>(3 * i) = Vec3(i * std::cos(a), i * std::sin(a), 0.0);
    f = time_update_frames(f, r.topo, r.springs.bendtwist, r.q, r.layout);
  }
  EXPECT_NEAR(f.ref_twist[0], 0.0, 1e-12);
}
