#include "dismech/simulation.hpp"

#include "dismech/rod_energy.hpp"
#include "dismech/shell_energy.hpp"

namespace dismech {

Integrator parse_integrator(const std::string& name) {
  if (name == "backward-euler") return Integrator::BackwardEuler;
  if (name == "implicit-midpoint") return Integrator::ImplicitMidpoint;
  if (name == "forward-euler") return Integrator::ForwardEuler;
  throw std::invalid_argument("unknown integrator '" + name + "'");
}

void apply_boundary_conditions(DofLayout& layout, const BoundarySpec& bc, bool planar) {
  auto fix = [&](int idx) {
    if (idx < 0 || idx >= layout.size()) throw std::invalid_argument("boundary condition index out of range");
    layout.fixed[idx] = 1;
  };
  for (int n : bc.fixed_nodes) {
    if (n < 0 || n >= layout.n_nodes) throw std::invalid_argument("fixed node out of range");
    for (int k = 0; k < 3; ++k) fix(layout.pos(n, k));
  }
  for (const auto& [n, k] : bc.fixed_components) {
    if (n < 0 || n >= layout.n_nodes || k < 0 || k > 2) throw std::invalid_argument("fixed component out of range");
    fix(layout.pos(n, k));
  }
  for (int e : bc.fixed_theta) {
    if (e < 0 || e >= layout.n_theta) throw std::invalid_argument("fixed theta out of range");
    fix(layout.theta(e));
  }
  for (int s : bc.fixed_xi) {
    if (s < 0 || s >= layout.n_xi) throw std::invalid_argument("fixed xi out of range");
    fix(layout.xi(s));
  }
  if (planar) {
    for (int n = 0; n < layout.n_nodes; ++n) fix(layout.pos(n, 2));
    for (int e = 0; e < layout.n_theta; ++e) fix(layout.theta(e));
  }
  if (layout.free_indices().empty()) throw std::invalid_argument("boundary conditions leave no free DOF");
}

SpMat to_sparse(int n, const std::vector<Triplet>& t) {
  SpMat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Simulation::Simulation(SystemSpec spec) : spec_(std::move(spec)), topo_(spec_.topology) {
  layout_ = make_layout(topo_, spec_.model);
  apply_boundary_conditions(layout_, spec_.boundary, spec_.solver.planar);
  if (!(spec_.solver.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(spec_.solver.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  springs_ = build_springs(topo_, spec_.material, spec_.model);
  mass_ = lumped_mass(topo_, spec_.material, layout_);
  for (const auto& [node, m] : spec_.point_masses) {
    if (node < 0 || node >= topo_.num_nodes() || !(m > 0.0)) throw std::invalid_argument("invalid point mass");
    add_point_mass(mass_, node, m);
  }
  q_ = VecX::Zero(layout_.size());
  for (int i = 0; i < topo_.num_nodes(); ++i) q_.segment<3>(3 * i) = topo_.nodes[i];
  u_ = VecX::Zero(layout_.size());
  frames_ = init_reference_frames(topo_, springs_.bendtwist, q_, layout_);
  capture_natural_rod_state(springs_.bendtwist, q_, frames_, layout_);
  springs_built_ = springs_;
  env_ = std::make_unique<Environment>(topo_, spec_.material, layout_, spec_.environment, spec_.point_masses);
  if (spec_.self_contact) {
    spec_.contact.r0 = spec_.material.r0;
    spec_.contact.h = spec_.material.h;
    contact_ = std::make_unique<SelfContact>(topo_, spec_.contact);
  }
}

void Simulation::set_state(const VecX& q, const VecX& u) {
  if (q.size() != layout_.size() || u.size() != layout_.size()) throw std::invalid_argument("state size mismatch");
  frames_ = time_update_frames(frames_, topo_, springs_.bendtwist, q, layout_);
  q_ = q;
  u_ = u;
  for (int i = 0; i < layout_.size(); ++i)
    if (layout_.fixed[i]) u_[i] = 0.0;
}

void Simulation::set_velocity(int node, const Vec3& v) {
  for (int k = 0; k < 3; ++k)
    if (!layout_.fixed[layout_.pos(node, k)]) u_[layout_.pos(node, k)] = v[k];
}

void Simulation::set_theta(int e, double theta) {
  q_[layout_.theta(e)] = theta;
  update_material_frames(frames_, q_, layout_);
}

void Simulation::set_theta_rate(int e, double rate) {
  if (!layout_.fixed[layout_.theta(e)]) u_[layout_.theta(e)] = rate;
}

void Simulation::align_material_frames(const Vec3& dir) {
  for (int e = 0; e < topo_.num_rod_edges(); ++e) {
    const Vec3& t = frames_.tangent[e];
    const Vec3 target = dir - dir.dot(t) * t;
    if (target.norm() < 1e-12) continue;
    q_[layout_.theta(e)] = signed_angle(frames_.d1[e], target.normalized(), t);
  }
  update_material_frames(frames_, q_, layout_);
  capture_natural_state();
}

void Simulation::capture_natural_state() {
  capture_natural_rod_state(springs_.bendtwist, q_, frames_, layout_);
  springs_built_ = springs_;
}

int Simulation::register_custom_force(CustomForce f) { return env_->register_custom_force(std::move(f), q_, u_); }

namespace {

template <int N>
void scatter(const LocalContribution<N>& c, VecX& grad, std::vector<Triplet>* H, double* energy) {
  if (energy) *energy += c.energy;
  for (int i = 0; i < N; ++i) {
    grad[c.dofs[i]] += c.sign[i] * c.gradient[i];
    if (!H) continue;
    for (int j = 0; j < N; ++j) {
      const double v = c.sign[i] * c.sign[j] * c.hessian(i, j);
      if (v != 0.0) H->emplace_back(c.dofs[i], c.dofs[j], v);
    }
  }
}

}  // namespace

void Simulation::elastic_terms(const VecX& q, const FrameSet& frames, VecX& grad, std::vector<Triplet>* H,
                               double* energy) const {
  for (const auto& s : springs_.stretch) scatter(stretch_contribution(s, q, layout_), grad, H, energy);
  for (int i = 0; i < static_cast<int>(springs_.bendtwist.size()); ++i) {
    const auto& s = springs_.bendtwist[i];
    scatter(bend_contribution(s, i, q, frames, layout_), grad, H, energy);
    scatter(twist_contribution(s, i, q, frames, layout_), grad, H, energy);
  }
  if (springs_.model == ShellModel::Hinge) {
    for (const auto& h : springs_.hinges) scatter(hinge_contribution(h, q, layout_), grad, H, energy);
  } else {
    for (const auto& el : springs_.midedge) scatter(midedge_contribution(el, q, frames, layout_), grad, H, energy);
  }
}

void Simulation::internal_residual(const VecX& q, const VecX& q_ref, double vel_scale, double t, double load_scale,
                                   const FrameSet& from, VecX& r, std::vector<Triplet>* J,
                                   FrameSet* frames_out) const {
  const int n = layout_.size();
  FrameSet frames = time_update_frames(from, topo_, springs_.bendtwist, q, layout_);
  r = VecX::Zero(n);
  elastic_terms(q, frames, r, J, nullptr);

  VecX F = VecX::Zero(n);
  std::vector<Triplet> dF;
  const ForceContext ctx{q, q_ref, vel_scale, t};
  env_->assemble(ctx, load_scale, F, J ? &dF : nullptr);
  if (contact_) contact_->assemble(q, q_ref, vel_scale, F, J ? &dF : nullptr);
  r -= F;
  if (J)
    for (const Triplet& tr : dF) J->emplace_back(tr.row(), tr.col(), -tr.value());
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(r[i])) throw std::runtime_error("non-finite residual at DOF " + std::to_string(i + 1));
  if (frames_out) *frames_out = std::move(frames);
}

double Simulation::elastic_energy(const VecX& q) const {
  const FrameSet frames = time_update_frames(frames_, topo_, springs_.bendtwist, q, layout_);
  VecX g = VecX::Zero(layout_.size());
  double e = 0.0;
  elastic_terms(q, frames, g, nullptr, &e);
  return e;
}

double Simulation::kinetic_energy() const { return 0.5 * u_.dot(mass_.cwiseProduct(u_)); }

void Simulation::backward_euler_residual(const VecX& q_trial, VecX& f, SpMat* J) const {
  const double dt = spec_.solver.dt;
  std::vector<Triplet> trip;
  VecX r;
  internal_residual(q_trial, q_, 1.0 / dt, time_ + dt, 1.0, frames_, r, J ? &trip : nullptr);
  f = mass_.cwiseProduct(q_trial - q_ - dt * u_) / (dt * dt) + r;
  if (J) {
    for (int i = 0; i < layout_.size(); ++i) trip.emplace_back(i, i, mass_[i] / (dt * dt));
    *J = to_sparse(layout_.size(), trip);
  }
}

}  // namespace dismech
