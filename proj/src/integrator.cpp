#include <Eigen/SparseLU>

#include "dismech/simulation.hpp"

namespace dismech {

namespace {

double free_norm(const VecX& f, const std::vector<int>& free) {
  double s = 0.0;
  for (int i : free) s += f[i] * f[i];
  return std::sqrt(s);
}

SpMat free_block(const SpMat& J, const std::vector<int>& map, int n_free) {
  std::vector<Triplet> t;
  t.reserve(J.nonZeros());
  for (int c = 0; c < J.outerSize(); ++c) {
    if (map[c] < 0) continue;
    for (SpMat::InnerIterator it(J, c); it; ++it)
      if (map[it.row()] >= 0) t.emplace_back(map[it.row()], map[c], it.value());
  }
  SpMat out(n_free, n_free);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

StepReport newton_solve(const ResidualFn& eval, VecX& q, const std::vector<char>& fixed, const SolverSettings& s) {
  std::vector<int> free, map(q.size(), -1);
  for (int i = 0; i < q.size(); ++i)
    if (!fixed[i]) {
      map[i] = static_cast<int>(free.size());
      free.push_back(i);
    }
  StepReport rep;
  VecX f;
  SpMat J;
  eval(q, f, &J);
  double res = free_norm(f, free);
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  for (int it = 0;; ++it) {
    rep.residual = res;
    rep.iterations = it;
    if (res <= s.tol) {
      rep.converged = true;
      break;
    }
    if (it >= s.max_iter) break;

    const SpMat Jf = free_block(J, map, static_cast<int>(free.size()));
    lu.compute(Jf);
    if (lu.info() != Eigen::Success) throw SolverFailure("singular Jacobian on the free DOFs", rep);
    VecX ff(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) ff[k] = f[free[k]];
    const VecX dq = lu.solve(ff);
    if (lu.info() != Eigen::Success || !dq.allFinite()) throw SolverFailure("linear solve failed", rep);

    double alpha = 1.0;
    VecX q_try, f_try;
    SpMat J_try;
    double r_try = 0.0;
    for (;;) {
      q_try = q;
      for (std::size_t k = 0; k < free.size(); ++k) q_try[free[k]] -= alpha * dq[k];
      bool ok = true;
      try {
        eval(q_try, f_try, &J_try);
        r_try = free_norm(f_try, free);
      } catch (const SingularConfiguration&) {
        ok = false;
      }
      if (ok && (!s.line_search || r_try < res)) break;
      if (alpha <= s.alpha_min) {
        if (!ok) throw SolverFailure("singular configuration in line search", rep);
        rep.stalled = true;
        break;
      }
      alpha = std::max(0.5 * alpha, s.alpha_min);
    }
    rep.alphas.push_back(alpha);
    q = std::move(q_try);
    f = std::move(f_try);
    J = std::move(J_try);
    res = r_try;
  }
  if (rep.stalled) rep.message = "line search reached alpha_min without decreasing the residual";
  return rep;
}

StepReport Simulation::step_implicit(double dt, bool midpoint) {
  const int n = layout_.size();
  const VecX q0 = q_, u0 = u_;
  const double t_eval = midpoint ? time_ + 0.5 * dt : time_ + dt;
  ResidualFn eval = [&](const VecX& q, VecX& f, SpMat* J) {
    std::vector<Triplet> trip;
    VecX r;
    const double c = midpoint ? 2.0 : 1.0;
    if (midpoint) {
      const VecX qm = 0.5 * (q0 + q);
      internal_residual(qm, q0, 2.0 / dt, t_eval, 1.0, frames_, r, J ? &trip : nullptr);
      for (auto& t : trip) t = Triplet(t.row(), t.col(), 0.5 * t.value());
    } else {
      internal_residual(q, q0, 1.0 / dt, t_eval, 1.0, frames_, r, J ? &trip : nullptr);
    }
    f = c * mass_.cwiseProduct(q - q0 - dt * u0) / (dt * dt) + r;
    if (J) {
      for (int i = 0; i < n; ++i) trip.emplace_back(i, i, c * mass_[i] / (dt * dt));
      *J = to_sparse(n, trip);
    }
  };
  VecX q = q0;
  if (spec_.solver.predictor)
    for (int i = 0; i < n; ++i)
      if (!layout_.fixed[i]) q[i] += dt * u0[i];
  StepReport rep = newton_solve(eval, q, layout_.fixed, spec_.solver);
  if (!rep.converged) return rep;
  VecX u = (q - q0) / dt;
  if (midpoint) u = 2.0 * u - u0;
  for (int i = 0; i < n; ++i)
    if (layout_.fixed[i]) u[i] = 0.0;
  accept(q, u, dt);
  return rep;
}

StepReport Simulation::step_forward_euler(double dt) {
  const int n = layout_.size();
  VecX r;
  const VecX q_ref = q_ - dt * u_;
  internal_residual(q_, q_ref, 1.0 / dt, time_, 1.0, frames_, r, nullptr);
  VecX q = q_, u = u_;
  for (int i = 0; i < n; ++i) {
    if (layout_.fixed[i]) continue;
    q[i] += dt * u_[i];
    u[i] -= dt * r[i] / mass_[i];
  }
  StepReport rep;
  rep.converged = true;
  if (!q.allFinite() || !u.allFinite() || q.cwiseAbs().maxCoeff() > 1e12 || u.cwiseAbs().maxCoeff() > 1e12) {
    rep.converged = false;
    rep.message = "forward Euler diverged";
    throw SolverFailure("forward Euler diverged at t = " + std::to_string(time_ + dt), rep);
  }
  accept(q, u, dt);
  return rep;
}

void Simulation::accept(const VecX& q_new, const VecX& u_new, double dt) {
  frames_ = time_update_frames(frames_, topo_, springs_.bendtwist, q_new, layout_);
  snapshot_tau0(frames_, topo_, q_new);
  q_ = q_new;
  u_ = u_new;
  time_ += dt;
}

StepReport Simulation::advance(double dt, int depth) {
  const Integrator integ = spec_.solver.integrator;
  const double t_act = integ == Integrator::ImplicitMidpoint ? time_ + 0.5 * dt
                       : integ == Integrator::ForwardEuler   ? time_
                                                             : time_ + dt;
  if (!actuator_.empty()) actuator_.apply(springs_, t_act);
  StepReport rep = integ == Integrator::ForwardEuler ? step_forward_euler(dt)
                                                     : step_implicit(dt, integ == Integrator::ImplicitMidpoint);
  if (rep.converged) return rep;
  if (spec_.solver.adaptive_dt && depth < 8) {
    StepReport a = advance(0.5 * dt, depth + 1);
    StepReport b = advance(0.5 * dt, depth + 1);
    b.iterations += a.iterations;
    b.alphas.insert(b.alphas.begin(), a.alphas.begin(), a.alphas.end());
    return b;
  }
  rep.time = time_ + dt;
  rep.step = steps_ + 1;
  throw SolverFailure("Newton did not converge in step " + std::to_string(steps_ + 1) + " (t = " +
                          std::to_string(time_ + dt) + ", residual " + std::to_string(rep.residual) + ")",
                      rep);
}

StepReport Simulation::step() {
  StepReport rep = advance(spec_.solver.dt, 0);
  ++steps_;
  rep.step = steps_;
  rep.time = time_;
  return rep;
}

namespace {

void lerp_natural(SpringSet& out, const SpringSet& a, const SpringSet& b, double w) {
  for (std::size_t i = 0; i < out.stretch.size(); ++i)
    out.stretch[i].rest_length = (1.0 - w) * a.stretch[i].rest_length + w * b.stretch[i].rest_length;
  for (std::size_t i = 0; i < out.bendtwist.size(); ++i) {
    out.bendtwist[i].kappa_bar = (1.0 - w) * a.bendtwist[i].kappa_bar + w * b.bendtwist[i].kappa_bar;
    out.bendtwist[i].twist_bar = (1.0 - w) * a.bendtwist[i].twist_bar + w * b.bendtwist[i].twist_bar;
  }
  for (std::size_t i = 0; i < out.hinges.size(); ++i)
    out.hinges[i].phi_bar = (1.0 - w) * a.hinges[i].phi_bar + w * b.hinges[i].phi_bar;
}

}  // namespace

StepReport Simulation::solve_static() {
  const SpringSet before = springs_;
  if (!actuator_.empty()) actuator_.apply(springs_, time_);
  const SpringSet target = springs_;

  FrameSet from = frames_;
  auto solve_at = [&](double load, VecX& q) {
    ResidualFn eval = [&](const VecX& qq, VecX& f, SpMat* J) {
      std::vector<Triplet> trip;
      internal_residual(qq, qq, 0.0, time_, load, from, f, J ? &trip : nullptr);
      if (J) *J = to_sparse(layout_.size(), trip);
    };
    try {
      return newton_solve(eval, q, layout_.fixed, spec_.solver);
    } catch (const SolverFailure& e) {
      StepReport r = e.report();
      r.converged = false;
      r.message = e.what();
      return r;
    }
  };

  VecX q = q_;
  StepReport rep = solve_at(1.0, q);
  if (!rep.converged) {
    // Load continuation: ramp loads and actuated natural values in 10
    // increments, bisecting an increment that fails.
    q = q_;
    from = frames_;
    StepReport total;
    double lambda = 0.0;
    double inc = 0.1;
    int bisections = 0;
    while (lambda < 1.0 - 1e-12) {
      const double next = std::min(1.0, lambda + inc);
      lerp_natural(springs_, before, target, next);
      VecX q_try = q;
      StepReport r = solve_at(next, q_try);
      total.iterations += r.iterations;
      total.alphas.insert(total.alphas.end(), r.alphas.begin(), r.alphas.end());
      total.residual = r.residual;
      if (r.converged) {
        q = q_try;
        from = time_update_frames(from, topo_, springs_.bendtwist, q, layout_);
        lambda = next;
      } else {
        if (++bisections > 12) {
          springs_ = before;
          total.message = "load continuation failed at load factor " + std::to_string(next);
          throw SolverFailure("static solve did not converge (" + total.message + ")", total);
        }
        inc *= 0.5;
      }
    }
    total.converged = true;
    total.message = "load continuation";
    rep = total;
  }
  springs_ = target;
  frames_ = time_update_frames(from, topo_, springs_.bendtwist, q, layout_);
  snapshot_tau0(frames_, topo_, q);
  q_ = q;
  u_.setZero();
  rep.time = time_;
  rep.step = steps_;
  return rep;
}

void Simulation::run(const std::function<void(const Simulation&, const StepReport&)>& on_step) {
  if (spec_.solver.static_solve) {
    const StepReport rep = solve_static();
    if (on_step) on_step(*this, rep);
    return;
  }
  const long long n = std::llround(spec_.solver.total_time / spec_.solver.dt);
  for (long long k = 0; k < n; ++k) {
    const StepReport rep = step();
    if (on_step) on_step(*this, rep);
  }
}

}  // namespace dismech
