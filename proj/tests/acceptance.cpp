// Acceptance run: one PASS/FAIL line per criterion 1-8, with the measured
// values and wall time. Exit status 0 when every criterion passes.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "dismech/verification.hpp"

using namespace dismech;
namespace fs = std::filesystem;

namespace {

// Tolerances and time limits.
constexpr double kGradTol = 1e-5, kHessTol = 1e-4;
constexpr int kFdSamples = 100;
constexpr double kRodTol = 0.05, kShellTol = 0.15;
constexpr double kBeVelocityTol = 1e-12, kMidpointDrift = 1e-6, kMomentumTol = 1e-8;
constexpr int kOscillatorPeriods = 1000;
constexpr double kContinuityFactor = 1e-6;
constexpr int kDissipationSamples = 10000;
constexpr double kLimitFd = 60, kLimitCantilever = 120, kLimitMesh = 300, kLimitContact = 180, kLimitLocomotion = 300;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
  std::string what;
  bool passed = false;
};

struct Criterion {
  int id;
  std::string title;
  std::vector<Check> checks;
  bool passed() const {
    for (const Check& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <typename F>
void timed(Criterion& c, const std::string& label, double limit, F&& body) {
  const auto t0 = Clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    c.checks.push_back({label + " threw: " + e.what(), false});
  }
  const double s = seconds_since(t0);
  c.checks.push_back({label + fmt(" runtime %.1f s", s) + fmt(" < %.0f s", limit), s < limit});
}

// ---------------------------------------------------------------- 1

Criterion gradients() {
  Criterion c{1, "finite-difference gradients and Hessians", {}};
  timed(c, "all modules", kLimitFd, [&] {
    for (const FdReport& r : check_gradients(1, kFdSamples)) {
      std::string s = r.name + fmt(" (%.0f stencils)", r.samples);
      if (r.has_gradient) s += fmt(" grad %.2e", r.gradient_error);
      s += fmt(" hess/jac %.2e", r.hessian_error);
      c.checks.push_back({s, r.samples >= kFdSamples && r.passed(kGradTol, kHessTol)});
    }
  });
  return c;
}

// ---------------------------------------------------------------- 2

Criterion cantilevers() {
  Criterion c{2, "cantilevers against Euler-Bernoulli", {}};
  double stiff = 0.0, soft = 0.0;
  timed(c, "rod E = 20 GPa", kLimitCantilever, [&] {
    const CantileverResult r = validate_rod_cantilever(2e10);
    stiff = r.relative_error();
    c.checks.push_back({fmt("rod 20 GPa error %.4f", stiff) + fmt(" < %.2f", kRodTol), stiff < kRodTol});
  });
  timed(c, "rod E = 20 MPa", kLimitCantilever, [&] {
    soft = validate_rod_cantilever(2e7).relative_error();
    c.checks.push_back({fmt("rod 20 MPa error %.4f", soft) + fmt(" > 20 GPa error %.4f", stiff), soft > stiff});
  });
  for (ShellModel m : {ShellModel::Hinge, ShellModel::Midedge}) {
    const std::string name = m == ShellModel::Hinge ? "hinge" : "midedge";
    timed(c, name + " shell", kLimitCantilever, [&] {
      const double e = validate_shell_cantilever(m, MeshFamily::Equilateral).relative_error();
      c.checks.push_back({name + fmt(" equilateral error %.4f", e) + fmt(" < %.2f", kShellTol), e < kShellTol});
    });
  }
  return c;
}

// ---------------------------------------------------------------- 3

Criterion mesh_dependence() {
  Criterion c{3, "mesh dependence of the shell models", {}};
  timed(c, "mesh study", kLimitMesh, [&] {
    const auto rows = mesh_study();
    const double sh = normalized_spread(rows, ShellModel::Hinge), sm = normalized_spread(rows, ShellModel::Midedge);
    c.checks.push_back({fmt("midedge spread %.4f", sm) + fmt(" < hinge spread %.4f", sh), sm < sh});
    std::vector<std::pair<double, MeshFamily>> err;
    std::string list;
    for (const auto& r : rows)
      if (r.model == ShellModel::Hinge) {
        err.emplace_back(std::abs(r.normalized - 1.0), r.family);
        list += " " + family_name(r.family) + fmt("=%.3f", r.normalized);
      }
    std::sort(err.rbegin(), err.rend());
    const bool top = err.size() >= 2 &&
                     ((err[0].second == MeshFamily::RightIsosceles && err[1].second == MeshFamily::NonUniform) ||
                      (err[0].second == MeshFamily::NonUniform && err[1].second == MeshFamily::RightIsosceles));
    c.checks.push_back({"hinge largest errors on right-isosceles and non-uniform:" + list, top});
  });
  return c;
}

// ---------------------------------------------------------------- 4

Criterion contact() {
  Criterion c{4, "floor and obstacle contact", {}};
  double peak[2] = {0.0, 0.0};
  const double E[2] = {2e6, 2e9};
  for (int k = 0; k < 2; ++k) {
    timed(c, fmt("rod drop E = %.0e", E[k]), kLimitContact, [&] {
      Scenario sc = instantiate(rod_drop(E[k]));
      const double delta = sc.sim->environment().params().floor.delta;
      const int n = sc.sim->topology().num_nodes();
      const MatX X0 = node_matrix(sc.sim->q(), n);
      double gap = sc.sim->environment().min_floor_gap(sc.sim->q());
      record(*sc.sim, 1, [&](const Simulation& s) {
        gap = std::min(gap, s.environment().min_floor_gap(s.q()));
        peak[k] = std::max(peak[k], deviation_from_rigid(X0, node_matrix(s.q(), n)));
      });
      c.checks.push_back({fmt("rod drop E = %.0e", E[k]) + fmt(" min floor gap %.3e", gap) + fmt(" >= -delta = %.1e", -delta),
                          gap >= -delta});
    });
  }
  c.checks.push_back({fmt("peak deviation from rigid: 2 MPa %.3e", peak[0]) + fmt(" > 2 GPa %.3e", peak[1]),
                      peak[0] > peak[1]});

  timed(c, "gripper with contact", kLimitContact, [&] {
    Scenario sc = instantiate(gripper(true));
    const SphereObstacle s = sc.sim->environment().params().obstacles.at(0);
    double gap = sc.sim->environment().min_obstacle_gap(sc.sim->q());
    record(*sc.sim, 1, [&](const Simulation& sim) { gap = std::min(gap, sim.environment().min_obstacle_gap(sim.q())); });
    c.checks.push_back({fmt("gripper min clearance %.3e", gap) + fmt(" >= -delta = %.1e", -s.delta), gap >= -s.delta});
    c.checks.push_back({fmt("gripper touches the sphere (clearance %.3e", gap) + fmt(" < delta %.1e)", s.delta),
                        gap < s.delta});
  });
  timed(c, "gripper without contact", kLimitContact, [&] {
    const ScenarioFiles with = gripper(true);
    const SphereObstacle s = instantiate(with).sim->environment().params().obstacles.at(0);
    Scenario sc = instantiate(gripper(false));
    const MeshTopology& t = sc.sim->topology();
    const double r0 = sc.sim->material().r0;
    auto clearance = [&](const VecX& q) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& e : t.rod_edges) best = std::min(best, sphere_edge_gap(node_position(q, e[0]), node_position(q, e[1]), r0, s));
      return best;
    };
    double gap = clearance(sc.sim->q());
    record(*sc.sim, 1, [&](const Simulation& sim) { gap = std::min(gap, clearance(sim.q())); });
    c.checks.push_back({fmt("rod passes through the sphere without contact (min clearance %.3e < 0)", gap), gap < 0.0});
  });
  return c;
}

// ---------------------------------------------------------------- 5

Criterion locomotion() {
  Criterion c{5, "locomotion properties", {}};
  timed(c, "earthworm", kLimitLocomotion, [&] {
    for (double mu : {0.25, 0.0}) {
      const ScenarioFiles f = earthworm(mu);
      // Single-stroke amplitude: the contraction of one edge.
      const double stroke = std::abs(f.config.get_double("actuation.edge1.amplitude", 0.0));
      Scenario sc = instantiate(f);
      const int front = sc.log.nodes.at(1);
      const Trajectory t = record(*sc.sim, 10);
      const PropertyResult p = mu > 0.0 ? earthworm_friction_property(t, front)
                                        : earthworm_frictionless_property(t, front, stroke);
      c.checks.push_back({p.name + fmt(": net %.3e m", p.value) + (mu > 0.0 ? " > 0" : fmt(", bound %.1e", p.bound)),
                          p.passed});
    }
  });
  timed(c, "snake", kLimitLocomotion, [&] {
    for (bool iso : {false, true}) {
      const ScenarioFiles f = iso ? snake(0.1, 0.1) : snake(0.01, 0.1);
      const double period = 1.0 / f.config.get_double("actuation.wave.frequency", 1.0);
      Scenario sc = instantiate(f);
      const int head = sc.log.nodes.at(0);
      const Trajectory t = record(*sc.sim, 10);
      const PropertyResult p = iso ? snake_isotropic_property(t, head, 0.1) : snake_anisotropic_property(t, head, period);
      c.checks.push_back({p.name + fmt(": %.3e m", p.value) + (iso ? fmt(", bound %.1e", p.bound) : " > 0"), p.passed});
      const PropertyResult z = snake_planar_property(t);
      c.checks.push_back({z.name + fmt(": max |z| %.1e", z.value), z.passed});
    }
  });
  timed(c, "manta", kLimitLocomotion, [&] {
    Scenario sc = instantiate(manta());
    const int lead = sc.log.nodes.at(0);
    const Trajectory t = record(*sc.sim, 1);
    const PropertyResult p = manta_symmetry_property(t, lead);
    c.checks.push_back({p.name + fmt(": max drift %.2e m", p.value) + fmt(" < %.0e", p.bound), p.passed});
  });
  return c;
}

// ---------------------------------------------------------------- 6

SystemSpec two_node_rod(double l) {
  SystemSpec s;
  s.topology = build_topology({Vec3(0, 0, 0), Vec3(l, 0, 0)}, {{{0, 1}}}, {});
  s.material.E_rod = 1e7;
  s.material.rho_rod = 1200.0;
  s.material.r0 = 1e-3;
  return s;
}

// Node 1 slides along x on the axial spring of a rod clamped at node 0.
SystemSpec oscillator(Integrator integ, double& period) {
  const double l = 0.1;
  SystemSpec s = two_node_rod(l);
  s.boundary.fixed_nodes = {0};
  s.boundary.fixed_components = {{1, 1}, {1, 2}};
  s.boundary.fixed_theta = {0};
  const double A = M_PI * 1e-6, k = 1e7 * A / l, m = 0.5 * 1200.0 * A * l;
  period = 2.0 * M_PI * std::sqrt(m / k);
  s.solver.dt = period / 40.0;
  s.solver.tol = 1e-11;
  s.solver.integrator = integ;
  return s;
}

Criterion integrators() {
  Criterion c{6, "time integrators", {}};
  timed(c, "integrators", kLimitCantilever, [&] {
    {
      SystemSpec s = two_node_rod(0.1);
      const Vec3 g(0.0, 0.0, -9.8);
      s.environment.g = g;
      s.solver.dt = 1e-2;
      Simulation sim(std::move(s));
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const VecX u0 = sim.u();
        sim.step();
        for (int i = 0; i < 2; ++i)
          worst = std::max(worst, (sim.u().segment<3>(3 * i) - u0.segment<3>(3 * i) - 1e-2 * g).norm());
      }
      c.checks.push_back({fmt("backward Euler free fall |u1 - u0 - dt g| %.1e", worst) + fmt(" <= %.0e", kBeVelocityTol),
                          worst <= kBeVelocityTol});
    }
    {
      double period = 0.0;
      Simulation sim(oscillator(Integrator::ImplicitMidpoint, period));
      sim.set_velocity(1, Vec3(0.05, 0, 0));
      const double E0 = sim.kinetic_energy() + sim.elastic_energy();
      double drift = 0.0;
      for (int i = 0; i < 40 * kOscillatorPeriods; ++i) {
        sim.step();
        drift = std::max(drift, std::abs(sim.kinetic_energy() + sim.elastic_energy() - E0) / E0);
      }
      c.checks.push_back({fmt("implicit midpoint energy drift %.2e over 1000 periods", drift) + fmt(" < %.0e", kMidpointDrift),
                          drift < kMidpointDrift});
    }
    {
      double period = 0.0;
      Simulation sim(oscillator(Integrator::BackwardEuler, period));
      sim.set_velocity(1, Vec3(0.05, 0, 0));
      double prev = sim.kinetic_energy() + sim.elastic_energy();
      const double E0 = prev;
      bool monotone = true;
      for (int i = 0; i < 400; ++i) {
        sim.step();
        const double E = sim.kinetic_energy() + sim.elastic_energy();
        monotone = monotone && E < prev;
        prev = E;
      }
      c.checks.push_back({fmt("backward Euler energy decays monotonically (10 periods: E/E0 = %.3e)", prev / E0), monotone});
    }
    {
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
      auto momentum = [&] {
        Vec3 p = Vec3::Zero();
        for (int i = 0; i < 8; ++i) p += sim.mass()[3 * i] * sim.u().segment<3>(3 * i);
        return p;
      };
      double worst = 0.0;
      for (int k = 0; k < 200; ++k) {
        const Vec3 p0 = momentum();
        sim.step();
        worst = std::max(worst, (momentum() - p0).norm() / p0.norm());
      }
      c.checks.push_back({fmt("free rod momentum change per step %.1e", worst) + fmt(" < %.0e relative", kMomentumTol),
                          worst < kMomentumTol});
    }
  });
  return c;
}

// ---------------------------------------------------------------- 7

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void run_to(const ScenarioFiles& f, const fs::path& dir) {
  Scenario sc = instantiate(f);
  run_scenario(sc, dir.string());
}

Criterion determinism() {
  Criterion c{7, "bitwise-identical output", {}};
  timed(c, "determinism", kLimitContact, [&] {
    const fs::path root = fs::temp_directory_path() / "dismech_acceptance";
    fs::remove_all(root);
    std::vector<ScenarioFiles> cases{rod_drop(), gripper(true), snake(), earthworm()};
    for (ScenarioFiles& f : cases) f.config.set("solver.total_time", "0.2");
    for (const ScenarioFiles& f : cases) {
      const fs::path base = root / f.name;
      run_to(f, base / "a");
      run_to(f, base / "b");
      // Four simultaneous runs on separate threads.
      std::vector<std::thread> pool;
      for (int k = 0; k < 4; ++k) pool.emplace_back([&, k] { run_to(f, base / ("t" + std::to_string(k))); });
      for (auto& t : pool) t.join();
      bool same = true;
      for (const char* file : {"frames.csv", "tracked.csv"}) {
        const std::string ref = slurp(base / "a" / file);
        same = same && !ref.empty() && slurp(base / "b" / file) == ref;
        for (int k = 0; k < 4; ++k) same = same && slurp(base / ("t" + std::to_string(k)) / file) == ref;
      }
      c.checks.push_back({f.name + ": frames.csv and tracked.csv identical over 2 sequential and 4 concurrent runs", same});
    }
    fs::remove_all(root);
  });
  return c;
}

// ---------------------------------------------------------------- 8

Criterion conventions() {
  Criterion c{8, "contact and friction conventions", {}};
  timed(c, "conventions", kLimitFd, [&] {
    double jump = 0.0, bound = 0.0;
    const double r0 = 1e-3, d0 = 2.0 * r0;
    bound = kContinuityFactor * d0 * d0;
    for (double delta : {1e-5, 1e-4, 5e-4, 1e-3, 2e-3})
      for (double edge : {-delta, delta}) {
        const double below = contact_energy(d0 + edge - 1e-15, d0, delta).energy;
        const double above = contact_energy(d0 + edge + 1e-15, d0, delta).energy;
        jump = std::max(jump, std::abs(below - above));
      }
    c.checks.push_back({fmt("penalty branch jump at +-delta %.1e", jump) + fmt(" < 1e-6 (2 r0)^2 = %.1e", bound), jump < bound});

    bool zero = true, monotone = true;
    for (double nu : {1e-4, 1e-3, 1e-1}) {
      zero = zero && friction_scale(0.0, nu) == 0.0;
      double prev = 0.0;
      for (int i = 1; i <= 10000; ++i) {
        const double g = friction_scale(nu * 1e-3 * i, nu);
        monotone = monotone && g >= prev;
        prev = g;
      }
    }
    c.checks.push_back({"friction scale gamma(0) = 0", zero});
    c.checks.push_back({"friction scale monotone on [0, 10 nu]", monotone});

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1), u01(0, 1);
    auto rv = [&](double s) { return Vec3(s * u(rng), s * u(rng), s * u(rng)); };
    ContactParams cp;
    cp.delta = 1e-3;
    cp.k_c = 10.0;
    cp.mu = 0.4;
    cp.nu_slip = 1e-3;
    FloorParams fp;
    fp.enabled = true;
    fp.k_c = 20.0;
    fp.delta = 1e-3;
    fp.mu = 0.5;
    fp.nu_slip = 1e-3;
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < kDissipationSamples; ++k) {
      const double scale = 10.0 + 1e3 * u01(rng);
      const std::array<Vec3, 4> x{rv(0.01), Vec3(0.1, 0, 0) + rv(0.01), Vec3(0.05, -0.05, 0.0015) + rv(0.001),
                                  Vec3(0.05, 0.05, 0.0015) + rv(0.001)};
      std::array<Vec3, 4> xr, v;
      for (int i = 0; i < 4; ++i) {
        v[i] = rv(1.0);
        xr[i] = x[i] - v[i] / scale;
      }
      const PairForce fr = friction_force(x, xr, scale, 2e-3, cp);
      double p = 0.0;
      for (int i = 0; i < 4; ++i) p += fr.force.segment<3>(3 * i).dot(v[i]);
      worst = std::max(worst, p);
      worst = std::max(worst, floor_friction(x[0] - Vec3(0, 0, x[0].z() + 1e-3 * u01(rng)), v[0], scale, fp).dot(v[0]));
      worst = std::max(worst, viscous_force(v[0], u01(rng), u01(rng), scale).dot(v[0]));
      const auto rft = rft_edge_force(x[0], x[1], v[0], v[1], 0.1, 0.01 + u01(rng), 0.01 + u01(rng), scale);
      worst = std::max(worst, rft.segment<3>(0).dot(v[0]) + rft.segment<3>(3).dot(v[1]));
      const auto drag = drag_triangle_force({x[0], x[1], x[2]}, {v[0], v[1], v[2]}, 1e-3, 1000.0, 0.5 + u01(rng), scale);
      worst = std::max(worst, drag.segment<3>(0).dot(v[0]) + drag.segment<3>(3).dot(v[1]) + drag.segment<3>(6).dot(v[2]));
    }
    c.checks.push_back({fmt("dissipative forces: max u.F %.1e <= 0 over 10^4 samples", worst), worst <= 0.0});
  });
  return c;
}

}  // namespace

int main() {
  const std::vector<std::function<Criterion()>> runs{gradients, cantilevers, mesh_dependence, contact,
                                                     locomotion, integrators, determinism, conventions};
  bool all = true;
  for (const auto& run : runs) {
    const Criterion c = run();
    for (const Check& k : c.checks) std::printf("    [%s] %s\n", k.passed ? "ok" : "FAIL", k.what.c_str());
    std::printf("%s criterion %d: %s\n", c.passed() ? "PASS" : "FAIL", c.id, c.title.c_str());
    std::fflush(stdout);
    all = all && c.passed();
  }
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
