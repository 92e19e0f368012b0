#include <gtest/gtest.h>

#include <random>

#include "dismech/rod_energy.hpp"
#include "dismech/verification.hpp"

using namespace dismech;

namespace {

struct Rod {
  MeshTopology topo;
  SpringSet springs;
  DofLayout layout;
  FrameSet frames;
  VecX q;
};

Rod make_rod(const std::vector<Vec3>& x, const std::vector<std::array<int, 2>>& edges, const Material& m = {}) {
  Rod r;
  r.topo = build_topology(x, edges, {});
  r.springs = build_springs(r.topo, m, ShellModel::Hinge);
  r.layout = make_layout(r.topo, ShellModel::Hinge);
  r.q = VecX::Zero(r.layout.size());
  for (std::size_t i = 0; i < x.size(); ++i) r.q.segment<3>(3 * i) = x[i];
  r.frames = init_reference_frames(r.topo, r.springs.bendtwist, r.q, r.layout);
  return r;
}

std::vector<std::array<int, 2>> chain(int n) {
  std::vector<std::array<int, 2>> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return e;
}

double total(const Rod& r, bool bend, bool twist) {
  double E = 0.0;
  for (std::size_t s = 0; s < r.springs.bendtwist.size(); ++s) {
    const auto& sp = r.springs.bendtwist[s];
    if (bend) E += bend_contribution(sp, static_cast<int>(s), r.q, r.frames, r.layout).energy;
    if (twist) E += twist_contribution(sp, static_cast<int>(s), r.q, r.frames, r.layout).energy;
  }
  return E;
}

}  // namespace

TEST(Stretch, EnergyAndForceOracle) {
  // eps = 0.1 on a unit rest length: E = 1/2 ks eps^2, |grad| = ks eps.
  const Contribution6 c = stretch_local(Vec3(0, 0, 0), Vec3(1.1, 0, 0), 1.0, 2.0);
  EXPECT_NEAR(c.energy, 0.01, 1e-15);
  EXPECT_NEAR(c.gradient[3], 0.2, 1e-14);
  EXPECT_NEAR(c.gradient[0], -0.2, 1e-14);
  EXPECT_NEAR(c.gradient.segment<2>(1).norm() + c.gradient.segment<2>(4).norm(), 0.0, 1e-15);
  // Axial stiffness ks / rest length at zero strain; transverse stiffness 0.
  const Contribution6 z = stretch_local(Vec3(0, 0, 0), Vec3(1, 0, 0), 1.0, 2.0);
  EXPECT_NEAR(z.hessian(3, 3), 2.0, 1e-14);
  EXPECT_NEAR(z.hessian(4, 4), 0.0, 1e-14);
}

TEST(Curvature, BinormalMagnitude) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0.01, 3.0), len(0.1, 2.0);
  for (int k = 0; k < 500; ++k) {
    const double phi = ang(rng);
    const Vec3 ei = len(rng) * Vec3(1, 0, 0), ej = len(rng) * Vec3(std::cos(phi), std::sin(phi), 0);
    const Vec3 kb = curvature_binormal(ei, ej);
    EXPECT_NEAR(kb.norm(), 2.0 * std::tan(0.5 * phi), 1e-10 * (1.0 + kb.norm()));
    EXPECT_NEAR(kb.normalized().z(), 1.0, 1e-12);
  }
}

TEST(Bend, PlanarArcEnergy) {
  // Straight natural state; deformed to a planar arc with turning angle phi per
  // node: E = 1/2 EI (2 tan(phi/2))^2 / dl per interior node.
  const int n = 8;
  Material m;
  m.E_rod = 3e6;
  std::vector<Vec3> x;
  for (int i = 0; i < n; ++i) x.emplace_back(0.1 * i, 0, 0);
  Rod r = make_rod(x, chain(n), m);
  const double phi = 0.2;
  Vec3 p = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    r.q.segment<3>(3 * i) = p;
    p += 0.1 * Vec3(std::cos(phi * i), std::sin(phi * i), 0);
  }
  r.frames = time_update_frames(r.frames, r.topo, r.springs.bendtwist, r.q, r.layout);
  const double EI = 3e6 * M_PI * 1e-12 / 4.0, k = 2.0 * std::tan(0.5 * phi);
  EXPECT_NEAR(total(r, true, false), (n - 2) * 0.5 * EI * k * k / 0.1, 1e-12);
  EXPECT_NEAR(total(r, false, true), 0.0, 1e-20);
}

TEST(Twist, UniformTwistEnergy) {
  const int n = 5;
  Material m;
  m.E_rod = 1e6;
  m.nu_rod = 0.5;
  std::vector<Vec3> x;
  for (int i = 0; i < n; ++i) x.emplace_back(0.1 * i, 0, 0);
  Rod r = make_rod(x, chain(n), m);
  const double a = 0.3;
  for (int e = 0; e < n - 1; ++e) r.q[r.layout.theta(e)] = a * e;
  update_material_frames(r.frames, r.q, r.layout);
  const double GJ = 1e6 / 3.0 * M_PI * 1e-12 / 2.0;
  EXPECT_NEAR(total(r, false, true), (n - 2) * 0.5 * GJ * a * a / 0.1, 1e-15);
  EXPECT_NEAR(total(r, true, false), 0.0, 1e-20);
}

TEST(BendTwist, EdgeFlipsLeaveEnergyUnchanged) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  const int n = 7;
  std::vector<Vec3> x;
  for (int i = 0; i < n; ++i) x.emplace_back(0.1 * i, 0.01 * std::sin(i), 0.003 * i * i);
  std::vector<std::array<int, 2>> flipped = chain(n);
  std::swap(flipped[2][0], flipped[2][1]);
  std::swap(flipped[4][0], flipped[4][1]);
  auto is_flipped = [](int e) { return e == 2 || e == 4; };
  Rod a = make_rod(x, chain(n)), b = make_rod(x, flipped);
  // Give b the same physical material frames as a; a flipped edge carries
  // the negated tangent and m1.
  for (int e = 0; e < n - 1; ++e) {
    const Vec3 target = is_flipped(e) ? Vec3(-a.frames.m1[e]) : a.frames.m1[e];
    b.q[b.layout.theta(e)] = signed_angle(b.frames.d1[e], target, b.frames.tangent[e]);
  }
  update_material_frames(b.frames, b.q, b.layout);
  capture_natural_rod_state(a.springs.bendtwist, a.q, a.frames, a.layout);
  capture_natural_rod_state(b.springs.bendtwist, b.q, b.frames, b.layout);
  for (int i = 0; i < 3 * n; ++i) {
    const double d = u(rng);
    a.q[i] += d;
    b.q[i] += d;
  }
  for (int e = 0; e < n - 1; ++e) {
    const double d = 10.0 * u(rng);
    a.q[a.layout.theta(e)] += d;
    b.q[b.layout.theta(e)] += is_flipped(e) ? -d : d;
  }
  a.frames = time_update_frames(a.frames, a.topo, a.springs.bendtwist, a.q, a.layout);
  b.frames = time_update_frames(b.frames, b.topo, b.springs.bendtwist, b.q, b.layout);
  const double Ea = total(a, true, true), Eb = total(b, true, true);
  EXPECT_GT(Ea, 0.0);
  EXPECT_NEAR(Ea, Eb, 1e-10 * Ea);
}

TEST(BendTwist, CapturedNaturalStateHasZeroEnergyAndForce) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  const int n = 9;
  std::vector<Vec3> x{Vec3::Zero()};
  for (int i = 1; i < n; ++i) x.push_back(x.back() + 0.1 * Vec3(1.0, u(rng), u(rng)).normalized());
  Rod r = make_rod(x, chain(n));
  for (int e = 0; e < n - 1; ++e) r.q[r.layout.theta(e)] = u(rng);
  update_material_frames(r.frames, r.q, r.layout);
  capture_natural_rod_state(r.springs.bendtwist, r.q, r.frames, r.layout);
  EXPECT_NEAR(total(r, true, true), 0.0, 1e-24);
  for (std::size_t s = 0; s < r.springs.bendtwist.size(); ++s) {
    const auto c = bend_contribution(r.springs.bendtwist[s], static_cast<int>(s), r.q, r.frames, r.layout);
    EXPECT_NEAR(c.gradient.norm(), 0.0, 1e-12);
  }
}

TEST(FiniteDifference, RodEnergies) {
  for (const FdReport& r : check_gradients(21, 100)) {
    if (r.name != "stretch" && r.name != "bend" && r.name != "twist") continue;
    EXPECT_EQ(r.samples, 100);
    EXPECT_LT(r.gradient_error, 1e-5) << r.name;
    EXPECT_LT(r.hessian_error, 1e-4) << r.name;
  }
}
