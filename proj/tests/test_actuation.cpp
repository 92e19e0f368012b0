#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "dismech/simulation.hpp"

using namespace dismech;

namespace {

SystemSpec straight_rod(int n, double dx) {
  SystemSpec s;
  std::vector<Vec3> x;
  std::vector<std::array<int, 2>> e;
  for (int i = 0; i < n; ++i) x.emplace_back(dx * i, 0, 0);
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  s.topology = build_topology(x, e, {});
  s.boundary.fixed_nodes = {0, 1};
  s.boundary.fixed_theta = {0};
  return s;
}

std::vector<int> all_bend_springs(const Simulation& sim) {
  std::vector<int> out;
  for (std::size_t i = 0; i < sim.springs().bendtwist.size(); ++i) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace

TEST(Schedule, PiecewiseLinearAndClamped) {
  ActuationSchedule s;
  s.times = {0.0, 1.0, 3.0};
  s.values = {2.0, 4.0, 0.0};
  EXPECT_EQ(evaluate_schedule(s, -1.0), 2.0);
  EXPECT_EQ(evaluate_schedule(s, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(evaluate_schedule(s, 0.25), 2.5);
  EXPECT_EQ(evaluate_schedule(s, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(evaluate_schedule(s, 2.5), 1.0);
  EXPECT_EQ(evaluate_schedule(s, 7.0), 0.0);
}

TEST(Schedule, ValidationRejectsBadInput) {
  ActuationSchedule s;
  EXPECT_THROW(validate_schedule(s), std::invalid_argument);
  s.times = {0.0, 1.0};
  s.values = {1.0};
  EXPECT_THROW(validate_schedule(s), std::invalid_argument);
  s.values = {1.0, 2.0};
  s.times = {1.0, 1.0};
  EXPECT_THROW(validate_schedule(s), std::invalid_argument);
  s.times = {0.0, 1.0};
  s.values = {1.0, -0.5};
  s.target.quantity = ActuatedQuantity::RestLength;
  EXPECT_THROW(validate_schedule(s), std::invalid_argument);
  s.target.quantity = ActuatedQuantity::Kappa1;
  EXPECT_NO_THROW(validate_schedule(s));
  EXPECT_THROW(parse_quantity("curl"), std::invalid_argument);
  for (const char* q : {"kappa1", "kappa2", "twist", "length", "hinge"}) EXPECT_EQ(quantity_name(parse_quantity(q)), q);
}

TEST(Actuator, NonPositiveLengthThrows) {
  const SystemSpec spec = straight_rod(3, 0.1);
  SpringSet s = build_springs(spec.topology, spec.material, ShellModel::Hinge);
  EXPECT_THROW(write_quantity(s, ActuatedQuantity::RestLength, 0, 0.0), std::invalid_argument);
  WaveActuation w;
  w.target = {ActuatedQuantity::RestLength, {0}};
  w.amplitude = 0.2;
  w.frequency = 1.0;
  const Actuator a(s, {}, {w});
  // 0.1 + 0.2 sin(...) crosses zero at a quarter period past the trough.
  EXPECT_NO_THROW(a.apply(s, 0.0));
  EXPECT_THROW(a.apply(s, 0.75), std::invalid_argument);
}

TEST(Actuator, WavePhasesAndHalfSine) {
  const SystemSpec spec = straight_rod(6, 0.1);
  SpringSet s = build_springs(spec.topology, spec.material, ShellModel::Hinge);
  const int n = static_cast<int>(s.bendtwist.size());
  ASSERT_EQ(n, 4);
  for (Waveform form : {Waveform::Sine, Waveform::HalfSine}) {
    WaveActuation w;
    w.target = {ActuatedQuantity::Kappa1, {0, 1, 2, 3}};
    w.waveform = form;
    w.offset = 0.1;
    w.amplitude = 0.5;
    w.frequency = 2.0;
    w.phase_start = 0.3;
    w.phase_end = -1.2;
    const Actuator a(s, {}, {w});
    SpringSet out = s;
    for (double t : {0.0, 0.13, 0.4, 1.7}) {
      a.apply(out, t);
      for (int i = 0; i < n; ++i) {
        const double phase = 0.3 + (-1.5) * i / 3.0;
        double sn = std::sin(4.0 * M_PI * t + phase);
        if (form == Waveform::HalfSine) {
          sn = std::max(0.0, sn);
          EXPECT_GE(out.bendtwist[i].kappa_bar[0], 0.1);
        }
        EXPECT_NEAR(out.bendtwist[i].kappa_bar[0], 0.1 + 0.5 * sn, 1e-14);
        EXPECT_EQ(out.bendtwist[i].kappa_bar[1], 0.0);
      }
    }
  }
}

TEST(Actuator, ConstantScheduleLeavesTrajectoryBitwiseUnchanged) {
  auto run = [](bool actuated) {
    SystemSpec spec = straight_rod(6, 0.02);
    spec.environment.g = Vec3(0, 0, -9.81);
    spec.solver.dt = 1e-3;
    Simulation sim(std::move(spec));
    if (actuated) {
      ActuationSchedule s;
      s.target = {ActuatedQuantity::Kappa1, all_bend_springs(sim)};
      s.times = {0.0, 1.0};
      s.values = {0.0, 0.0};
      ActuationSchedule len;
      len.target = {ActuatedQuantity::RestLength, {2}};
      len.times = {0.0};
      len.values = {sim.springs().stretch[2].rest_length};
      sim.set_actuator(Actuator(sim.springs(), {s, len}, {}));
    }
    for (int k = 0; k < 30; ++k) sim.step();
    return sim.q();
  };
  const VecX a = run(false), b = run(true);
  ASSERT_EQ(a.size(), b.size());
  for (int i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]) << i;
}

TEST(Actuator, StaticSolveReachesActuatedNaturalShape) {
  SystemSpec spec = straight_rod(7, 0.02);
  spec.solver.static_solve = true;
  spec.solver.tol = 1e-12;
  Simulation sim(std::move(spec));
  ActuationSchedule s;
  s.target = {ActuatedQuantity::Kappa1, all_bend_springs(sim)};
  s.times = {0.0};
  s.values = {0.15};
  sim.set_actuator(Actuator(sim.springs(), {s}, {}));
  const VecX q0 = sim.q();
  ASSERT_TRUE(sim.solve_static().converged);
  for (const auto& b : sim.springs().bendtwist) EXPECT_EQ(b.kappa_bar[0], 0.15);
  const double strained = sim.elastic_energy(q0);
  EXPECT_GT(strained, 0.0);
  EXPECT_LT(sim.elastic_energy(), 1e-12 * strained);
  EXPECT_GT((sim.q() - q0).norm(), 1e-3);
}

TEST(ScheduleCsv, LoadsColumnsAndReportsErrors) {
  const std::string path = ::testing::TempDir() + "dismech_schedule.csv";
  {
    std::ofstream f(path);
    f << "time, bend, grow\n0, 0.0, 0.1\n\n0.5, 0.2, 0.12\n1.0, -0.1, 0.1\n";
  }
  const std::vector<std::pair<std::string, ActuationTarget>> targets{
      {"bend", {ActuatedQuantity::Kappa2, {0, 1}}}, {"grow", {ActuatedQuantity::RestLength, {3}}}};
  const auto s = load_schedule_csv(path, targets);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].target.quantity, ActuatedQuantity::Kappa2);
  EXPECT_EQ(s[0].target.springs, (std::vector<int>{0, 1}));
  EXPECT_EQ(s[0].times, (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(s[0].values, (std::vector<double>{0.0, 0.2, -0.1}));
  EXPECT_EQ(s[1].values, (std::vector<double>{0.1, 0.12, 0.1}));
  EXPECT_THROW(load_schedule_csv(path, {targets[0]}), std::runtime_error);
  {
    std::ofstream f(path);
    f << "time,bend\n0,1\n0.5,x\n";
  }
  try {
    load_schedule_csv(path, targets);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_schedule_csv(path + ".missing", targets), std::runtime_error);
  std::remove(path.c_str());
}
