#include <gtest/gtest.h>

#include <random>

#include "dismech/simulation.hpp"

using namespace dismech;

namespace {

// Two-node rod along x with rest length l.
SystemSpec two_node_rod(double l) {
  SystemSpec s;
  s.topology = build_topology({Vec3(0, 0, 0), Vec3(l, 0, 0)}, {{{0, 1}}}, {});
  s.material.E_rod = 1e7;
  s.material.rho_rod = 1200.0;
  s.material.r0 = 1e-3;
  return s;
}

Vec3 momentum(const Simulation& sim) {
  Vec3 p = Vec3::Zero();
  for (int i = 0; i < sim.topology().num_nodes(); ++i)
    for (int k = 0; k < 3; ++k) p[k] += sim.mass()[3 * i + k] * sim.u()[3 * i + k];
  return p;
}

}  // namespace

TEST(BackwardEuler, FreeFallVelocityUpdate) {
  SystemSpec s = two_node_rod(0.1);
  s.environment.g = Vec3(0.3, -1.0, -9.81);
  s.solver.dt = 1e-2;
  Simulation sim(std::move(s));
  sim.set_velocity(0, Vec3(0.5, 0.0, 1.0));
  sim.set_velocity(1, Vec3(0.5, 0.0, 1.0));
  const Vec3 g(0.3, -1.0, -9.81);
  for (int k = 0; k < 100; ++k) {
    const VecX u0 = sim.u();
    sim.step();
    for (int i = 0; i < 2; ++i)
      EXPECT_NEAR((sim.u().segment<3>(3 * i) - u0.segment<3>(3 * i) - 1e-2 * g).norm(), 0.0, 1e-12) << k;
  }
}

TEST(ImplicitMidpoint, OscillatorEnergyDrift) {
  // Node 1 slides along x on the axial spring k = EA / l; node 0 is clamped.
  const double l = 0.1;
  SystemSpec s = two_node_rod(l);
  s.boundary.fixed_nodes = {0};
  s.boundary.fixed_components = {{1, 1}, {1, 2}};
  s.boundary.fixed_theta = {0};
  const double A = M_PI * 1e-6, k = 1e7 * A / l, m = 0.5 * 1200.0 * A * l;
  const double period = 2.0 * M_PI * std::sqrt(m / k);
  s.solver.dt = period / 40.0;
  s.solver.tol = 1e-11;
  s.solver.integrator = Integrator::ImplicitMidpoint;
  Simulation sim(std::move(s));
  sim.set_velocity(1, Vec3(0.05, 0, 0));
  auto energy = [&] { return sim.kinetic_energy() + sim.elastic_energy(); };
  const double E0 = energy();
  double worst = 0.0;
  for (int i = 0; i < 40 * 1000; ++i) {
    sim.step();
    worst = std::max(worst, std::abs(energy() - E0) / E0);
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(BackwardEuler, OscillatorEnergyDecaysMonotonically) {
  const double l = 0.1;
  SystemSpec s = two_node_rod(l);
  s.boundary.fixed_nodes = {0};
  s.boundary.fixed_components = {{1, 1}, {1, 2}};
  s.boundary.fixed_theta = {0};
  const double A = M_PI * 1e-6, k = 1e7 * A / l, m = 0.5 * 1200.0 * A * l;
  s.solver.dt = 2.0 * M_PI * std::sqrt(m / k) / 40.0;
  s.solver.tol = 1e-13;
  Simulation sim(std::move(s));
  sim.set_velocity(1, Vec3(0.05, 0, 0));
  double prev = sim.kinetic_energy() + sim.elastic_energy();
  const double E0 = prev;
  for (int i = 0; i < 400; ++i) {
    sim.step();
    const double E = sim.kinetic_energy() + sim.elastic_energy();
    EXPECT_LT(E, prev) << i;
    prev = E;
  }
  EXPECT_LT(prev, 0.5 * E0);
}

TEST(BackwardEuler, FreeRodConservesMomentum) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  SystemSpec s;
  std::vector<Vec3> x{Vec3::Zero()};
  for (int i = 1; i < 8; ++i) x.push_back(x.back() + 0.02 * Vec3(1.0, u(rng), u(rng)).normalized());
  std::vector<std::array<int, 2>> e;
  for (int i = 0; i + 1 < 8; ++i) e.push_back({i, i + 1});
  s.topology = build_topology(x, e, {});
  s.solver.dt = 1e-3;
  s.solver.tol = 1e-10;
  Simulation sim(std::move(s));
  for (int i = 0; i < 8; ++i) sim.set_velocity(i, Vec3(u(rng), u(rng), u(rng)));
  for (int step = 0; step < 200; ++step) {
    const Vec3 p0 = momentum(sim);
    const StepReport r = sim.step();
    ASSERT_TRUE(r.converged);
    EXPECT_LT((momentum(sim) - p0).norm(), 1e-8 * p0.norm()) << step;
  }
}

TEST(Static, AxialLoadFollowsHookesLaw) {
  const double l = 0.1, F = 0.02;
  SystemSpec s = two_node_rod(l);
  s.boundary.fixed_nodes = {0};
  s.boundary.fixed_theta = {0};
  s.solver.static_solve = true;
  s.solver.tol = 1e-12;
  Simulation sim(std::move(s));
  sim.register_custom_force([&](const VecX& q, const VecX&, double, std::vector<Triplet>*) {
    VecX f = VecX::Zero(q.size());
    f[3] = F;
    return f;
  });
  ASSERT_TRUE(sim.solve_static().converged);
  const double EA = 1e7 * M_PI * 1e-6;
  EXPECT_NEAR(sim.q()[3] - l, F * l / EA, 1e-12);
  EXPECT_NEAR(sim.q().segment<2>(4).norm(), 0.0, 1e-14);
}

TEST(ForwardEuler, ExplicitUpdate) {
  // Stretched spring: u1 = u0 - dt * grad E / m, q1 = q0 + dt * u0.
  const double l = 0.1;
  SystemSpec s = two_node_rod(l);
  s.solver.integrator = Integrator::ForwardEuler;
  s.solver.dt = 1e-5;
  Simulation sim(std::move(s));
  VecX q = sim.q(), u = VecX::Zero(q.size());
  q[3] = 1.01 * l;
  u[1] = 0.2;
  sim.set_state(q, u);
  const double m = sim.mass()[3];
  const double force = 1e7 * M_PI * 1e-6 * 0.01;
  sim.step();
  EXPECT_NEAR(sim.q()[1], 1e-5 * 0.2, 1e-18);
  EXPECT_NEAR(sim.q()[3], 1.01 * l, 1e-18);
  EXPECT_NEAR(sim.u()[3], -1e-5 * force / m, 1e-10 * force / m);
  EXPECT_NEAR(sim.u()[0], 1e-5 * force / m, 1e-10 * force / m);
}

TEST(Newton, SolvesLinearSystemInOneIteration) {
  const VecX b = (VecX(3) << 1.0, -2.0, 0.5).finished();
  SpMat A(3, 3);
  A.insert(0, 0) = 4.0;
  A.insert(1, 1) = 3.0;
  A.insert(2, 2) = 2.0;
  A.insert(0, 1) = 1.0;
  A.insert(1, 0) = 1.0;
  ResidualFn eval = [&](const VecX& q, VecX& f, SpMat* J) {
    f = A * q - b;
    if (J) *J = A;
  };
  VecX q = VecX::Zero(3);
  SolverSettings s;
  s.tol = 1e-12;
  const StepReport r = newton_solve(eval, q, {0, 0, 0}, s);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 2);
  EXPECT_NEAR((A * q - b).norm(), 0.0, 1e-12);
}
