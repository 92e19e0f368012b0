#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "dismech/actuation.hpp"
#include "dismech/environment.hpp"
#include "dismech/frames.hpp"

namespace dismech {

enum class Integrator { BackwardEuler, ImplicitMidpoint, ForwardEuler };

Integrator parse_integrator(const std::string& name);

struct SolverSettings {
  double dt = 1e-3;
  double total_time = 1.0;
  double tol = 1e-8;           // on ||f_free||, in force units
  int max_iter = 30;
  bool line_search = true;
  Integrator integrator = Integrator::BackwardEuler;
  bool static_solve = false;
  bool planar = false;         // fixes every z coordinate and every theta
  bool predictor = false;      // Newton guess q_k + dt u_k instead of q_k
  bool adaptive_dt = false;    // halve dt on Newton failure
  double alpha_min = 1.0 / 1024.0;
};

struct StepReport {
  int step = 0;
  double time = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> alphas;
  bool converged = false;
  bool stalled = false;        // line search hit alpha_min without decrease
  std::string message;
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, StepReport report) : std::runtime_error(what), report_(std::move(report)) {}
  const StepReport& report() const { return report_; }

 private:
  StepReport report_;
};

// 0-based indices.
struct BoundarySpec {
  std::vector<int> fixed_nodes;
  std::vector<std::pair<int, int>> fixed_components;  // (node, axis)
  std::vector<int> fixed_theta;
  std::vector<int> fixed_xi;
};

void apply_boundary_conditions(DofLayout& layout, const BoundarySpec& bc, bool planar);

struct SystemSpec {
  MeshTopology topology;
  Material material;
  ShellModel model = ShellModel::Hinge;
  EnvironmentParams environment;
  bool self_contact = false;
  ContactParams contact;
  BoundarySpec boundary;
  std::vector<std::pair<int, double>> point_masses;
  SolverSettings solver;
};

// Newton-Raphson on f(q) = 0 over the free entries. eval fills f and, when
// J is non-null, the full Jacobian df/dq.
using ResidualFn = std::function<void(const VecX& q, VecX& f, SpMat* J)>;
StepReport newton_solve(const ResidualFn& eval, VecX& q, const std::vector<char>& fixed, const SolverSettings& s);

class Simulation {
 public:
  explicit Simulation(SystemSpec spec);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // State
  const VecX& q() const { return q_; }
  const VecX& u() const { return u_; }
  double time() const { return time_; }
  int step_count() const { return steps_; }
  void set_state(const VecX& q, const VecX& u);
  void set_velocity(int node, const Vec3& v);
  void set_theta(int frame_edge, double theta);
  void set_theta_rate(int frame_edge, double rate);
  // Sets each rod edge's theta so that m1 is the component of dir normal to the edge.
  void align_material_frames(const Vec3& dir);

  const MeshTopology& topology() const { return topo_; }
  const Material& material() const { return spec_.material; }
  const DofLayout& layout() const { return layout_; }
  const VecX& mass() const { return mass_; }
  const FrameSet& frames() const { return frames_; }
  const SpringSet& springs() const { return springs_; }
  SpringSet& springs() { return springs_; }
  const Environment& environment() const { return *env_; }
  Environment& environment() { return *env_; }
  const SelfContact* self_contact() const { return contact_.get(); }
  SolverSettings& settings() { return spec_.solver; }
  const SolverSettings& settings() const { return spec_.solver; }

  void set_actuator(Actuator a) { actuator_ = std::move(a); }
  const Actuator& actuator() const { return actuator_; }
  // Rebuilds natural curvatures and twists from the current configuration.
  void capture_natural_state();

  int register_custom_force(CustomForce f);

  // r(q) = grad E(q) - F_ext - F_contact with frames transported from `from`.
  // dr/dq is appended to J when non-null.
  void internal_residual(const VecX& q, const VecX& q_ref, double vel_scale, double t, double load_scale,
                         const FrameSet& from, VecX& r, std::vector<Triplet>* J, FrameSet* frames_out = nullptr) const;

  double elastic_energy(const VecX& q) const;
  double elastic_energy() const { return elastic_energy(q_); }
  double kinetic_energy() const;

  // Backward-Euler residual and Jacobian for a trial q against the current state.
  void backward_euler_residual(const VecX& q_trial, VecX& f, SpMat* J) const;

  StepReport step();
  StepReport solve_static();

  // Steps until total_time (or one static solve). on_step sees every accepted step.
  void run(const std::function<void(const Simulation&, const StepReport&)>& on_step = {});

 private:
  StepReport step_implicit(double dt, bool midpoint);
  StepReport step_forward_euler(double dt);
  StepReport advance(double dt, int depth);
  void accept(const VecX& q_new, const VecX& u_new, double dt);
  void elastic_terms(const VecX& q, const FrameSet& frames, VecX& grad, std::vector<Triplet>* H,
                     double* energy) const;

  SystemSpec spec_;
  MeshTopology& topo_;
  DofLayout layout_;
  SpringSet springs_;
  SpringSet springs_built_;
  VecX mass_;
  FrameSet frames_;
  VecX q_, u_;
  double time_ = 0.0;
  int steps_ = 0;
  std::unique_ptr<Environment> env_;
  std::unique_ptr<SelfContact> contact_;
  Actuator actuator_;
};

// Assembles a full sparse matrix from triplets.
SpMat to_sparse(int n, const std::vector<Triplet>& t);

}  // namespace dismech
