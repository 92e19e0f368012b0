#pragma once

#include <cstdint>
#include <functional>

#include "dismech/scenarios.hpp"

namespace dismech {

// ---- finite differences

struct EnergyEval {
  double energy = 0.0;
  VecX gradient;
  MatX hessian;
};

struct VectorEval {
  VecX value;
  MatX jacobian;
};

// Relative error ||a - b|| / max(||a||, ||b||, floor).
double relative_error(const VecX& a, const VecX& b, double floor = 1e-300);
double relative_error(const MatX& a, const MatX& b, double floor = 1e-300);

// Central differences of the energy (against the gradient) and of the
// gradient (against the Hessian). Entries with frozen[i] set are not
// perturbed and are excluded from the comparison. h scales with |x_i|.
// hessian_from_energy takes the Hessian from second differences of the
// energy instead of differences of the gradient.
struct FdPoint {
  double gradient_error = 0.0;
  double hessian_error = 0.0;
};
FdPoint fd_check(const std::function<EnergyEval(const VecX&)>& f, const VecX& x, const std::vector<char>& frozen = {},
                 double h = 1e-6, bool hessian_from_energy = false);

// Central differences of value against jacobian.
double fd_jacobian_check(const std::function<VectorEval(const VecX&)>& f, const VecX& x, double h = 1e-6);

struct FdReport {
  std::string name;
  double gradient_error = 0.0;  // max over samples; 0 for force checks
  double hessian_error = 0.0;   // max Hessian or Jacobian error
  int worst_sample = -1;
  int samples = 0;
  bool has_gradient = true;
  bool passed(double grad_tol = 1e-5, double hess_tol = 1e-4) const {
    return gradient_error < grad_tol && hessian_error < hess_tol;
  }
};

// Names accepted by check_gradients.
const std::vector<std::string>& fd_modules();

// Runs `samples` random stencils for each named module (all when empty).
std::vector<FdReport> check_gradients(std::uint64_t seed, int samples = 100, const std::string& module = "");

// ---- cantilever oracles

// delta = w L^4 / (8 E I) for a uniform load w per unit length.
double euler_bernoulli_tip_deflection(double w, double L, double E, double I);
double eb_rod_deflection(double E, double r0, double rho, double g, double L);
double eb_strip_deflection(double E, double width, double h, double rho, double g, double L);

// Static solve of a cantilever scenario; returns the mean downward
// deflection of its logged nodes.
double cantilever_tip_deflection(const ScenarioFiles& files);

struct CantileverResult {
  double simulated = 0.0;
  double theory = 0.0;
  double relative_error() const { return std::abs(simulated - theory) / theory; }
};
CantileverResult validate_rod_cantilever(double E);
CantileverResult validate_shell_cantilever(ShellModel model, MeshFamily family, double E = 2e9, double edge = 2.5e-3,
                                           std::uint64_t seed = 1);

struct MeshStudyRow {
  MeshFamily family;
  ShellModel model;
  double normalized = 0.0;  // simulated / EB
};
std::vector<MeshStudyRow> mesh_study(double E = 2e9, double edge = 2.5e-3, std::uint64_t seed = 1);
double normalized_spread(const std::vector<MeshStudyRow>& rows, ShellModel model);

// ---- trajectories

// Positions of every node at each recorded time.
struct Trajectory {
  std::vector<double> time;
  std::vector<MatX> x;  // 3 x N
};

// Steps a scenario to its total time, recording every `every` steps plus
// the initial state. on_step may inspect each accepted step.
Trajectory record(Simulation& sim, int every = 1,
                  const std::function<void(const Simulation&)>& on_step = {});

MatX node_matrix(const VecX& q, int n_nodes);

// RMS distance between X and the best rigid motion of X0 (Kabsch).
double deviation_from_rigid(const MatX& X0, const MatX& X);

// ---- locomotion properties

struct PropertyResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

// Front-node net x displacement from the first to the last sample.
double net_displacement(const Trajectory& t, int node, int axis = 0);
// Mean over the last `window` seconds minus mean over the first `window`.
double windowed_progress(const Trajectory& t, int node, double window, int axis = 0);

PropertyResult earthworm_friction_property(const Trajectory& with_friction, int front);
PropertyResult earthworm_frictionless_property(const Trajectory& frictionless, int front, double stroke);
PropertyResult snake_anisotropic_property(const Trajectory& t, int head, double period);
PropertyResult snake_isotropic_property(const Trajectory& t, int head, double body_length);
PropertyResult snake_planar_property(const Trajectory& t);
PropertyResult manta_symmetry_property(const Trajectory& t, int lead);

}  // namespace dismech
