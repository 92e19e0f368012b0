// Command-line front end: simulate, check-gradients, validate-cantilever,
// mesh-study, export. Exit status 0 success, 1 solver or check failure,
// 2 usage or input error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "dismech/verification.hpp"

using namespace dismech;

namespace {

int simulate(const std::string& geometry, const std::string& config, const std::string& out, int log_every) {
  Config cfg = Config::read(config);
  if (log_every > 0) cfg.set("log.every", std::to_string(log_every));
  const Geometry geo = read_geometry(geometry);
  const std::string base = std::filesystem::path(config).parent_path().string();
  Scenario sc = build_scenario(geo, cfg, base.empty() ? "." : base);
  try {
    const StepReport r = run_scenario(sc, out);
    std::printf("finished: t = %s, %d steps, %d DOFs; logs in %s\n", format_double(sc.sim->time()).c_str(),
                sc.sim->step_count(), sc.sim->layout().size(), out.c_str());
    std::printf("last step: %s\n", describe(r).c_str());
    return 0;
  } catch (const SolverFailure& e) {
    std::filesystem::create_directories(out);
    FILE* f = std::fopen((std::filesystem::path(out) / "failure.txt").string().c_str(), "w");
    if (f) {
      std::fprintf(f, "%s\n%s\n", e.what(), describe(e.report()).c_str());
      std::fclose(f);
    }
    std::fprintf(stderr, "solver failure: %s\n%s\n", e.what(), describe(e.report()).c_str());
    return 1;
  }
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

int check(std::uint64_t seed, const std::string& module, int samples) {
  bool ok = true;
  std::printf("%-15s %8s %14s %14s %7s\n", "module", "samples", "max grad err", "max hess/jac", "status");
  for (const FdReport& r : check_gradients(seed, samples, module)) {
    const bool pass = r.passed();
    ok = ok && pass;
    std::printf("%-15s %8d %14s %14.3e %7s\n", r.name.c_str(), r.samples,
                r.has_gradient ? sci(r.gradient_error).c_str() : "-", r.hessian_error, pass ? "ok" : "FAIL");
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft-structure simulator built on discrete rods and shells"};
  app.require_subcommand(1);
  int log_every = 0;
  std::uint64_t seed = 1;
  app.add_option("--log-every", log_every, "Log every N steps (overrides log.every)")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for mesh generators and FD sampling");

  auto* sim = app.add_subcommand("simulate", "Run a scenario from a geometry and a config file");
  std::string geometry, config, out;
  sim->add_option("--geometry", geometry, "Geometry file")->required()->check(CLI::ExistingFile);
  sim->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "Output directory")->required();

  auto* grad = app.add_subcommand("check-gradients", "Finite-difference checks of energies and force Jacobians");
  std::string module;
  int samples = 100;
  grad->add_option("--module", module, "One module")->check(CLI::IsMember(fd_modules()));
  grad->add_option("--samples", samples, "Random stencils per module")->check(CLI::PositiveNumber);

  auto* cant = app.add_subcommand("validate-cantilever", "Static cantilever against Euler-Bernoulli");
  std::string model = "rod", family = "equilateral";
  double E = 0.0;
  cant->add_option("--model", model, "rod, hinge or midedge")->required()->check(CLI::IsMember({"rod", "hinge", "midedge"}));
  cant->add_option("--E", E, "Young's modulus (default 20 GPa rod, 2 GPa shell)");
  cant->add_option("--mesh", family, "Shell mesh family");
  double edge = 2.5e-3;
  cant->add_option("--edge", edge, "Target shell edge length")->check(CLI::PositiveNumber);

  auto* study = app.add_subcommand("mesh-study", "Normalized shell cantilever deflection per mesh family");
  study->add_option("--edge", edge, "Target shell edge length")->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("export", "Write the bundled showcase scenarios as files");
  std::string export_dir = "scenarios";
  exp->add_option("--out", export_dir, "Target directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*sim) return simulate(geometry, config, out, log_every);
    if (*grad) return check(seed, module, samples);
    if (*cant) {
      CantileverResult r;
      if (model == "rod") {
        r = validate_rod_cantilever(E > 0.0 ? E : 2e10);
      } else {
        r = validate_shell_cantilever(model == "hinge" ? ShellModel::Hinge : ShellModel::Midedge,
                                      parse_family(family), E > 0.0 ? E : 2e9, edge, seed);
      }
      std::printf("model %s: simulated %.6e m, Euler-Bernoulli %.6e m, relative error %.4f\n", model.c_str(),
                  r.simulated, r.theory, r.relative_error());
      return 0;
    }
    if (*study) {
      const auto rows = mesh_study(2e9, edge, seed);
      std::printf("%-20s %-8s %s\n", "family", "model", "deflection/EB");
      for (const auto& r : rows)
        std::printf("%-20s %-8s %.5f\n", family_name(r.family).c_str(), r.model == ShellModel::Hinge ? "hinge" : "midedge",
                    r.normalized);
      std::printf("spread: hinge %.5f, midedge %.5f\n", normalized_spread(rows, ShellModel::Hinge),
                  normalized_spread(rows, ShellModel::Midedge));
      return 0;
    }
    if (*exp) {
      for (const ScenarioFiles& f : showcase_scenarios()) {
        const std::string dir = (std::filesystem::path(export_dir) / f.name).string();
        export_scenario(f, dir);
        std::printf("wrote %s\n", dir.c_str());
      }
      return 0;
    }
  } catch (const SolverFailure& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
