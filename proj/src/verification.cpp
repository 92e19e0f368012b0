#include "dismech/verification.hpp"

#include <random>

#include "dismech/rod_energy.hpp"
#include "dismech/shell_energy.hpp"

namespace dismech {

// ---------------------------------------------------------------- FD core

double relative_error(const VecX& a, const VecX& b, double floor) {
  const double scale = std::max({a.norm(), b.norm(), floor});
  return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

double relative_error(const MatX& a, const MatX& b, double floor) {
  const double scale = std::max({a.norm(), b.norm(), floor});
  return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

FdPoint fd_check(const std::function<EnergyEval(const VecX&)>& f, const VecX& x, const std::vector<char>& frozen,
                 double h, bool hessian_from_energy) {
  const int n = static_cast<int>(x.size());
  const EnergyEval base = f(x);
  if (!std::isfinite(base.energy)) throw std::runtime_error("fd_check: non-finite energy");
  std::vector<int> act;
  for (int i = 0; i < n; ++i)
    if (frozen.empty() || !frozen[i]) act.push_back(i);
  const int m = static_cast<int>(act.size());
  auto energy = [&](const VecX& y) {
    const double e = f(y).energy;
    if (!std::isfinite(e)) throw std::runtime_error("fd_check: non-finite energy");
    return e;
  };
  auto step = [&](int i, double s) { return s * std::max(1.0, std::abs(x[i])); };
  VecX g_fd(m), g_an(m);
  MatX H_fd(m, m), H_an(m, m);
  for (int a = 0; a < m; ++a) {
    const int i = act[a];
    const double hi = step(i, h);
    VecX xp = x, xm = x;
    xp[i] += hi;
    xm[i] -= hi;
    const EnergyEval ep = f(xp), em = f(xm);
    if (!std::isfinite(ep.energy) || !std::isfinite(em.energy)) throw std::runtime_error("fd_check: non-finite energy");
    g_fd[a] = (ep.energy - em.energy) / (2.0 * hi);
    g_an[a] = base.gradient[i];
    for (int b = 0; b < m; ++b) {
      H_an(b, a) = base.hessian(act[b], i);
      if (!hessian_from_energy) H_fd(b, a) = (ep.gradient[act[b]] - em.gradient[act[b]]) / (2.0 * hi);
    }
  }
  if (hessian_from_energy) {
    // Second differences of the energy with a larger step to bound round-off.
    const double hh = std::sqrt(h) * 1e-1;
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) {
        const int i = act[a], j = act[b];
        const double hi = step(i, hh), hj = step(j, hh);
        auto shifted = [&](double si, double sj) {
          VecX y = x;
          y[i] += si * hi;
          y[j] += sj * hj;
          return energy(y);
        };
        const double v = (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * hi * hj);
        H_fd(a, b) = H_fd(b, a) = v;
      }
  }
  const double gs = std::max(1e-300, 1e-12 * (1.0 + std::abs(base.energy)));
  return {relative_error(g_an, g_fd, gs), relative_error(H_an, H_fd, gs)};
}

double fd_jacobian_check(const std::function<VectorEval(const VecX&)>& f, const VecX& x, double h) {
  const VectorEval base = f(x);
  const int n = static_cast<int>(x.size());
  MatX J_fd(base.value.size(), n);
  for (int i = 0; i < n; ++i) {
    const double hi = h * std::max(1.0, std::abs(x[i]));
    VecX xp = x, xm = x;
    xp[i] += hi;
    xm[i] -= hi;
    J_fd.col(i) = (f(xp).value - f(xm).value) / (2.0 * hi);
  }
  if (!J_fd.allFinite()) throw std::runtime_error("fd_jacobian_check: non-finite force");
  return relative_error(base.jacobian, J_fd, 1e-12);
}

// ---------------------------------------------------------------- random stencils

namespace {

using Rng = std::mt19937_64;

double uni(Rng& r, double a, double b) { return std::uniform_real_distribution<double>(a, b)(r); }
Vec3 rand_vec(Rng& r, double s = 1.0) { return Vec3(uni(r, -s, s), uni(r, -s, s), uni(r, -s, s)); }
Vec3 rand_unit(Rng& r) {
  for (;;) {
    const Vec3 v = rand_vec(r);
    if (v.norm() > 0.1 && v.norm() <= 1.0) return v.normalized();
  }
}

template <int N>
EnergyEval densify(const LocalContribution<N>& c, int n) {
  EnergyEval e;
  e.energy = c.energy;
  e.gradient = VecX::Zero(n);
  e.hessian = MatX::Zero(n, n);
  for (int i = 0; i < N; ++i) {
    e.gradient[c.dofs[i]] += c.sign[i] * c.gradient[i];
    for (int j = 0; j < N; ++j) e.hessian(c.dofs[i], c.dofs[j]) += c.sign[i] * c.sign[j] * c.hessian(i, j);
  }
  return e;
}

VecX stack(std::initializer_list<Vec3> v) {
  VecX x(3 * v.size());
  int k = 0;
  for (const Vec3& p : v) x.segment<3>(3 * k++) = p;
  return x;
}

Vec3 at(const VecX& x, int i) { return x.segment<3>(3 * i); }

// Keeps the worst sample of a check.
struct Tracker {
  FdReport r;
  explicit Tracker(std::string name, bool has_gradient = true) {
    r.name = std::move(name);
    r.has_gradient = has_gradient;
  }
  void add(int sample, double g, double h) {
    if (g > r.gradient_error || h > r.hessian_error) r.worst_sample = sample;
    r.gradient_error = std::max(r.gradient_error, g);
    r.hessian_error = std::max(r.hessian_error, h);
    ++r.samples;
  }
};

FdReport check_stretch(Rng& rng, int samples) {
  Tracker t("stretch");
  for (int s = 0; s < samples; ++s) {
    const Vec3 a = rand_vec(rng), b = a + rand_unit(rng) * uni(rng, 0.3, 1.5);
    const double rest = (b - a).norm() * uni(rng, 0.5, 1.5), ks = uni(rng, 0.5, 2.0);
    auto f = [&](const VecX& x) {
      Contribution6 c = stretch_local(at(x, 0), at(x, 1), rest, ks);
      for (int i = 0; i < 6; ++i) c.dofs[i] = i;
      return densify(c, 6);
    };
    const FdPoint p = fd_check(f, stack({a, b}));
    t.add(s, p.gradient_error, p.hessian_error);
  }
  return t.r;
}

// Three-node rod with random edge orientations. Rod derivatives are exact
// at the configuration the frames are transported from, so that is where
// they are checked.
struct RodStencil {
  MeshTopology topo;
  SpringSet springs;
  DofLayout layout;
  FrameSet frames0;
  VecX q;
};

RodStencil random_rod(Rng& rng) {
  for (;;) {
    std::vector<Vec3> nodes = {rand_vec(rng)};
    nodes.push_back(nodes[0] + rand_unit(rng) * uni(rng, 0.4, 1.2));
    const Vec3 t0 = (nodes[1] - nodes[0]).normalized();
    const Vec3 t1 = rand_unit(rng);
    if (t0.dot(t1) < -0.3) continue;
    nodes.push_back(nodes[1] + t1 * uni(rng, 0.4, 1.2));
    std::vector<std::array<int, 2>> edges = {{0, 1}, {1, 2}};
    if (rng() & 1) edges[0] = {1, 0};
    if (rng() & 1) edges[1] = {2, 1};
    RodStencil st;
    st.topo = build_topology(nodes, edges, {});
    Material mat;
    mat.E_rod = 1.0;
    mat.r0 = 1.0;
    st.springs = build_springs(st.topo, mat, ShellModel::Hinge);
    st.layout = make_layout(st.topo, ShellModel::Hinge);
    VecX q0 = VecX::Zero(st.layout.size());
    for (int i = 0; i < 3; ++i) q0.segment<3>(3 * i) = nodes[i];
    for (int e = 0; e < 2; ++e) q0[st.layout.theta(e)] = uni(rng, -1.0, 1.0);
    st.frames0 = init_reference_frames(st.topo, st.springs.bendtwist, q0, st.layout);
    auto& sp = st.springs.bendtwist[0];
    sp.kappa_bar = Eigen::Vector2d(uni(rng, -0.5, 0.5), uni(rng, -0.5, 0.5));
    sp.twist_bar = uni(rng, -0.5, 0.5);
    st.q = q0;
    return st;
  }
}

FdReport check_rod(Rng& rng, int samples, bool bend) {
  Tracker t(bend ? "bend" : "twist");
  for (int s = 0; s < samples; ++s) {
    const RodStencil st = random_rod(rng);
    auto f = [&](const VecX& q) {
      const FrameSet fr = time_update_frames(st.frames0, st.topo, st.springs.bendtwist, q, st.layout);
      const auto& sp = st.springs.bendtwist[0];
      return densify(bend ? bend_contribution(sp, 0, q, fr, st.layout) : twist_contribution(sp, 0, q, fr, st.layout),
                     st.layout.size());
    };
    const FdPoint p = fd_check(f, st.q, {}, 1e-6, true);
    t.add(s, p.gradient_error, p.hessian_error);
  }
  return t.r;
}

// Two triangles sharing edge (0, 1), random windings, away from flat.
std::pair<std::vector<Vec3>, std::vector<std::array<int, 3>>> random_patch(Rng& rng) {
  for (;;) {
    const Vec3 a = rand_vec(rng), b = a + rand_unit(rng) * uni(rng, 0.6, 1.2);
    const Vec3 e = (b - a).normalized();
    Vec3 n1 = rand_unit(rng);
    n1 -= n1.dot(e) * e;
    if (n1.norm() < 0.2) continue;
    n1.normalize();
    const double ang = uni(rng, -2.5, 2.5);
    const Vec3 n2 = rotate_about(n1, e, M_PI + ang);
    const Vec3 mid = a + (b - a) * uni(rng, 0.3, 0.7);
    const Vec3 c = mid + n1 * uni(rng, 0.4, 1.0);
    const Vec3 d = a + (b - a) * uni(rng, 0.3, 0.7) + n2 * uni(rng, 0.4, 1.0);
    std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {1, 0, 3}};
    if (rng() & 1) tris[0] = {1, 0, 2};
    if (rng() & 1) tris[1] = {0, 1, 3};
    if (rng() & 1) std::swap(tris[0], tris[1]);
    return {{a, b, c, d}, tris};
  }
}

FdReport check_hinge(Rng& rng, int samples) {
  Tracker t("hinge");
  for (int s = 0; s < samples; ++s) {
    auto [nodes, tris] = random_patch(rng);
    const MeshTopology topo = build_topology(nodes, {}, tris);
    Material mat;
    mat.E_shell = 1.0;
    mat.h = 1.0;
    SpringSet sp = build_springs(topo, mat, ShellModel::Hinge);
    const DofLayout layout = make_layout(topo, ShellModel::Hinge);
    HingeSpring h = sp.hinges.at(0);
    h.phi_bar = uni(rng, -1.0, 1.0);
    VecX q(layout.size());
    for (int i = 0; i < 4; ++i) q.segment<3>(3 * i) = nodes[i];
    auto f = [&](const VecX& x) { return densify(hinge_contribution(h, x, layout), layout.size()); };
    const FdPoint p = fd_check(f, q);
    t.add(s, p.gradient_error, p.hessian_error);
  }
  return t.r;
}

// Mid-edge element of a random patch with c and t frozen at the evaluation
// point; local variables [x0, x1, x2, xi0, xi1, xi2].
FdReport check_midedge(Rng& rng, int samples) {
  Tracker t("midedge");
  for (int s = 0; s < samples; ++s) {
    auto [nodes, tris] = random_patch(rng);
    const MeshTopology topo = build_topology(nodes, {}, tris);
    Material mat;
    mat.E_shell = 1.0;
    mat.h = 1.0;
    mat.nu_shell = uni(rng, 0.0, 0.5);
    const SpringSet sp = build_springs(topo, mat, ShellModel::Midedge);
    FrameSet frames;
    VecX q0(3 * topo.num_nodes());
    for (int i = 0; i < topo.num_nodes(); ++i) q0.segment<3>(3 * i) = nodes[i];
    snapshot_tau0(frames, topo, q0);
    const MidedgeElement& el = sp.midedge[rng() & 1];
    const std::array<Vec3, 3> tau = midedge_local_tau(el, frames);
    VecX x(12);
    for (int a = 0; a < 3; ++a) x.segment<3>(3 * a) = nodes[el.nodes[a]] + rand_vec(rng, 0.05);
    for (int k = 0; k < 3; ++k) x[9 + k] = uni(rng, -0.3, 0.3);
    auto unpack = [](const VecX& v, std::array<Vec3, 3>& p, std::array<double, 3>& xi) {
      for (int a = 0; a < 3; ++a) p[a] = v.segment<3>(3 * a);
      for (int k = 0; k < 3; ++k) xi[k] = v[9 + k];
    };
    std::array<Vec3, 3> p0;
    std::array<double, 3> xi0;
    unpack(x, p0, xi0);
    const MidedgeElementState frozen = midedge_state(el, p0, xi0, tau);
    auto f = [&](const VecX& v) {
      std::array<Vec3, 3> p;
      std::array<double, 3> xi;
      unpack(v, p, xi);
      Contribution12 c = midedge_local(el, p, xi, tau, &frozen);
      for (int i = 0; i < 12; ++i) c.dofs[i] = i;
      return densify(c, 12);
    };
    const FdPoint pt = fd_check(f, x);
    t.add(s, pt.gradient_error, pt.hessian_error);
  }
  return t.r;
}

bool clamp_state_stable(const std::array<Vec3, 4>& x) {
  auto state = [](const SegmentDistance& d) {
    return std::array<int, 2>{d.s <= 0.0 ? 0 : (d.s >= 1.0 ? 2 : 1), d.t <= 0.0 ? 0 : (d.t >= 1.0 ? 2 : 1)};
  };
  const auto ref = state(segment_distance(x[0], x[1], x[2], x[3]));
  for (int i = 0; i < 12; ++i)
    for (double sgn : {-1.0, 1.0}) {
      auto y = x;
      y[i / 3][i % 3] += sgn * 1e-4;
      if (state(segment_distance(y[0], y[1], y[2], y[3])) != ref) return false;
    }
  return true;
}

// Random edge pair with a gap in [-2 delta, 2 delta], away from the branch
// boundaries and from closest-point parameter switches.
std::array<Vec3, 4> random_pair(Rng& rng, double delta, double& d0) {
  for (;;) {
    std::array<Vec3, 4> x = {rand_vec(rng), Vec3::Zero(), rand_vec(rng), Vec3::Zero()};
    x[1] = x[0] + rand_unit(rng) * uni(rng, 0.5, 1.5);
    x[3] = x[2] + rand_unit(rng) * uni(rng, 0.5, 1.5);
    const Vec3 t0 = (x[1] - x[0]).normalized(), t1 = (x[3] - x[2]).normalized();
    if (std::abs(t0.dot(t1)) > 0.95) continue;
    const double dist = segment_distance(x[0], x[1], x[2], x[3]).distance;
    if (dist < 0.05) continue;
    const double g = uni(rng, -2.0 * delta, 2.0 * delta);
    if (std::abs(std::abs(g) - delta) < 0.02 * delta) continue;
    if (!clamp_state_stable(x)) continue;
    d0 = dist - g;
    if (d0 <= 0.0) continue;
    return x;
  }
}

FdReport check_contact(Rng& rng, int samples) {
  Tracker t("contact");
  for (int s = 0; s < samples; ++s) {
    ContactParams p;
    p.delta = 0.05;
    p.k_c = uni(rng, 0.5, 2.0);
    double d0 = 0.0;
    const auto x = random_pair(rng, p.delta, d0);
    auto f = [&](const VecX& v) {
      const PairForce pf = contact_force({at(v, 0), at(v, 1), at(v, 2), at(v, 3)}, d0, p);
      return EnergyEval{pf.energy, -VecX(pf.force), -MatX(pf.jacobian)};
    };
    const FdPoint pt = fd_check(f, stack({x[0], x[1], x[2], x[3]}));
    t.add(s, pt.gradient_error, pt.hessian_error);
  }
  return t.r;
}

FdReport check_friction(Rng& rng, int samples) {
  Tracker t("friction", false);
  for (int s = 0; s < samples; ++s) {
    ContactParams p;
    p.delta = 0.05;
    p.k_c = uni(rng, 0.5, 2.0);
    p.mu = uni(rng, 0.1, 1.0);
    p.nu_slip = 0.5;
    double d0 = 0.0;
    const auto x = random_pair(rng, p.delta, d0);
    const double vs = 10.0;
    std::array<Vec3, 4> ref;
    for (int i = 0; i < 4; ++i) ref[i] = x[i] - rand_vec(rng, 0.2) / vs * uni(rng, 0.1, 3.0);
    auto f = [&](const VecX& v) {
      const PairForce pf = friction_force({at(v, 0), at(v, 1), at(v, 2), at(v, 3)}, ref, vs, d0, p);
      return VectorEval{pf.force, pf.jacobian};
    };
    t.add(s, 0.0, fd_jacobian_check(f, stack({x[0], x[1], x[2], x[3]})));
  }
  return t.r;
}

FloorParams random_floor(Rng& rng) {
  FloorParams fp;
  fp.enabled = true;
  fp.k_c = uni(rng, 0.5, 2.0);
  fp.delta = 0.05;
  fp.mu = uni(rng, 0.1, 1.0);
  fp.nu_slip = 0.5;
  fp.normal = rand_unit(rng);
  fp.height = uni(rng, -0.5, 0.5);
  return fp;
}

Vec3 point_near_floor(Rng& rng, const FloorParams& fp) {
  const Vec3 p = rand_vec(rng);
  const double target = fp.height + uni(rng, -2.0 * fp.delta, 2.0 * fp.delta);
  return p + (target - fp.normal.dot(p)) * fp.normal;
}

FdReport check_floor(Rng& rng, int samples) {
  Tracker t("floor", false);
  for (int s = 0; s < samples; ++s) {
    const FloorParams fp = random_floor(rng);
    const Vec3 x = point_near_floor(rng, fp);
    auto f = [&](const VecX& v) {
      Mat3 J;
      const Vec3 F = floor_contact(v, fp, &J);
      return VectorEval{F, J};
    };
    t.add(s, 0.0, fd_jacobian_check(f, x));
  }
  return t.r;
}

FdReport check_floor_friction(Rng& rng, int samples) {
  Tracker t("floor-friction", false);
  for (int s = 0; s < samples; ++s) {
    const FloorParams fp = random_floor(rng);
    const Vec3 x = point_near_floor(rng, fp);
    const double vs = 10.0;
    const Vec3 ref = x - rand_vec(rng, 0.2) / vs * uni(rng, 0.1, 3.0);
    auto f = [&](const VecX& v) {
      Mat3 J;
      const Vec3 F = floor_friction(v, (Vec3(v) - ref) * vs, vs, fp, &J);
      return VectorEval{F, J};
    };
    t.add(s, 0.0, fd_jacobian_check(f, x));
  }
  return t.r;
}

FdReport check_viscous(Rng& rng, int samples) {
  Tracker t("viscous", false);
  for (int s = 0; s < samples; ++s) {
    const Vec3 x = rand_vec(rng), ref = x - rand_vec(rng, 0.1);
    const double eta = uni(rng, 0.1, 2.0), dl = uni(rng, 0.1, 1.0), vs = uni(rng, 1.0, 100.0);
    auto f = [&](const VecX& v) {
      Mat3 J;
      const Vec3 F = viscous_force((Vec3(v) - ref) * vs, eta, dl, vs, &J);
      return VectorEval{F, J};
    };
    t.add(s, 0.0, fd_jacobian_check(f, x));
  }
  return t.r;
}

FdReport check_rft(Rng& rng, int samples) {
  Tracker t("rft", false);
  for (int s = 0; s < samples; ++s) {
    const Vec3 a = rand_vec(rng), b = a + rand_unit(rng) * uni(rng, 0.3, 1.5);
    const double vs = uni(rng, 1.0, 100.0);
    const Vec3 ra = a - rand_vec(rng) / vs, rb = b - rand_vec(rng) / vs;
    const double l = uni(rng, 0.3, 1.5), Ct = uni(rng, 0.01, 1.0), Cn = uni(rng, 0.01, 1.0);
    auto f = [&](const VecX& v) {
      Eigen::Matrix<double, 6, 6> J;
      const auto F = rft_edge_force(at(v, 0), at(v, 1), (at(v, 0) - ra) * vs, (at(v, 1) - rb) * vs, l, Ct, Cn, vs, &J);
      return VectorEval{F, J};
    };
    t.add(s, 0.0, fd_jacobian_check(f, stack({a, b})));
  }
  return t.r;
}

FdReport check_drag(Rng& rng, int samples) {
  Tracker t("drag", false);
  for (int s = 0; s < samples; ++s) {
    std::array<Vec3, 3> x = {rand_vec(rng), rand_vec(rng), rand_vec(rng)};
    if ((x[1] - x[0]).cross(x[2] - x[0]).norm() < 0.1) {
      --s;
      continue;
    }
    const double vs = uni(rng, 1.0, 100.0);
    std::array<Vec3, 3> ref;
    for (int a = 0; a < 3; ++a) ref[a] = x[a] - rand_vec(rng) / vs;
    const double area = uni(rng, 0.1, 1.0), rho = uni(rng, 0.5, 2.0), CD = uni(rng, 0.1, 2.0);
    auto f = [&](const VecX& v) {
      Eigen::Matrix<double, 9, 9> J;
      std::array<Vec3, 3> p, u;
      for (int a = 0; a < 3; ++a) {
        p[a] = at(v, a);
        u[a] = (p[a] - ref[a]) * vs;
      }
      const auto F = drag_triangle_force(p, u, area, rho, CD, vs, &J);
      return VectorEval{F, J};
    };
    t.add(s, 0.0, fd_jacobian_check(f, stack({x[0], x[1], x[2]})));
  }
  return t.r;
}

FdReport check_sphere(Rng& rng, int samples) {
  Tracker t("sphere", false);
  for (int s = 0; s < samples; ++s) {
    SphereObstacle sp;
    sp.center = rand_vec(rng);
    sp.radius = uni(rng, 0.3, 1.0);
    sp.k_c = uni(rng, 0.5, 2.0);
    sp.delta = 0.05;
    sp.mu = uni(rng, 0.0, 1.0);
    sp.nu_slip = 0.5;
    const double r = 0.05;
    // Edge whose closest point sits at a gap in [-2 delta, 2 delta].
    const Vec3 dir = rand_unit(rng);
    const double gap = uni(rng, -2.0 * sp.delta, 2.0 * sp.delta);
    if (std::abs(std::abs(gap) - sp.delta) < 0.02 * sp.delta) {
      --s;
      continue;
    }
    Vec3 tang = rand_unit(rng);
    tang = (tang - tang.dot(dir) * dir).normalized();
    const Vec3 foot = sp.center + dir * (sp.radius + r + gap);
    const double along = uni(rng, 0.2, 0.8), len = uni(rng, 0.3, 1.0);
    const Vec3 a = foot - tang * along * len, b = foot + tang * (1.0 - along) * len;
    const double vs = 10.0;
    const Vec3 ra = a - rand_vec(rng, 0.2) / vs, rb = b - rand_vec(rng, 0.2) / vs;
    auto f = [&](const VecX& v) {
      Eigen::Matrix<double, 6, 6> J;
      const auto F = sphere_edge_force(at(v, 0), at(v, 1), ra, rb, vs, r, sp, &J);
      return VectorEval{F, J};
    };
    // The friction block is itself a difference quotient; compare loosely
    // through the same threshold with a larger step.
    t.add(s, 0.0, fd_jacobian_check(f, stack({a, b}), 1e-6));
  }
  return t.r;
}

}  // namespace

const std::vector<std::string>& fd_modules() {
  static const std::vector<std::string> m = {"stretch", "bend",           "twist",   "hinge", "midedge", "contact",
                                             "friction", "floor",         "floor-friction", "viscous", "rft", "drag",
                                             "sphere"};
  return m;
}

std::vector<FdReport> check_gradients(std::uint64_t seed, int samples, const std::string& module) {
  if (!module.empty() && std::find(fd_modules().begin(), fd_modules().end(), module) == fd_modules().end())
    throw std::invalid_argument("unknown module '" + module + "'");
  std::vector<FdReport> out;
  std::uint64_t k = 0;
  for (const std::string& name : fd_modules()) {
    ++k;
    if (!module.empty() && name != module) continue;
    // One stream per module so a module's result does not depend on the others.
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + k);
    if (name == "stretch") out.push_back(check_stretch(rng, samples));
    else if (name == "bend") out.push_back(check_rod(rng, samples, true));
    else if (name == "twist") out.push_back(check_rod(rng, samples, false));
    else if (name == "hinge") out.push_back(check_hinge(rng, samples));
    else if (name == "midedge") out.push_back(check_midedge(rng, samples));
    else if (name == "contact") out.push_back(check_contact(rng, samples));
    else if (name == "friction") out.push_back(check_friction(rng, samples));
    else if (name == "floor") out.push_back(check_floor(rng, samples));
    else if (name == "floor-friction") out.push_back(check_floor_friction(rng, samples));
    else if (name == "viscous") out.push_back(check_viscous(rng, samples));
    else if (name == "rft") out.push_back(check_rft(rng, samples));
    else if (name == "drag") out.push_back(check_drag(rng, samples));
    else if (name == "sphere") out.push_back(check_sphere(rng, samples));
  }
  return out;
}

// ---------------------------------------------------------------- cantilevers

double euler_bernoulli_tip_deflection(double w, double L, double E, double I) {
  return w * L * L * L * L / (8.0 * E * I);
}

double eb_rod_deflection(double E, double r0, double rho, double g, double L) {
  const double A = M_PI * r0 * r0;
  const double I = M_PI * r0 * r0 * r0 * r0 / 4.0;
  return euler_bernoulli_tip_deflection(rho * A * g, L, E, I);
}

double eb_strip_deflection(double E, double width, double h, double rho, double g, double L) {
  return euler_bernoulli_tip_deflection(rho * width * h * g, L, E, width * h * h * h / 12.0);
}

double cantilever_tip_deflection(const ScenarioFiles& files) {
  Scenario sc = instantiate(files);
  const VecX z0 = sc.sim->q();
  sc.sim->solve_static();
  double sum = 0.0;
  for (int n : sc.log.nodes) sum += z0[3 * n + 2] - sc.sim->q()[3 * n + 2];
  return sum / static_cast<double>(sc.log.nodes.size());
}

CantileverResult validate_rod_cantilever(double E) {
  const CantileverGeometry g;
  return {cantilever_tip_deflection(rod_cantilever(E, 41, g)), eb_rod_deflection(E, g.r0, g.rho, g.g, g.length)};
}

CantileverResult validate_shell_cantilever(ShellModel model, MeshFamily family, double E, double edge,
                                           std::uint64_t seed) {
  const CantileverGeometry g;
  return {cantilever_tip_deflection(shell_cantilever(family, model, E, edge, seed, g)),
          eb_strip_deflection(E, g.width, g.h, g.rho, g.g, g.length)};
}

std::vector<MeshStudyRow> mesh_study(double E, double edge, std::uint64_t seed) {
  std::vector<MeshStudyRow> rows;
  for (ShellModel model : {ShellModel::Hinge, ShellModel::Midedge})
    for (MeshFamily f : all_mesh_families()) {
      const CantileverResult r = validate_shell_cantilever(model, f, E, edge, seed);
      rows.push_back({f, model, r.simulated / r.theory});
    }
  return rows;
}

double normalized_spread(const std::vector<MeshStudyRow>& rows, ShellModel model) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : rows)
    if (r.model == model) {
      lo = std::min(lo, r.normalized);
      hi = std::max(hi, r.normalized);
    }
  return hi - lo;
}

// ---------------------------------------------------------------- trajectories

MatX node_matrix(const VecX& q, int n_nodes) {
  MatX X(3, n_nodes);
  for (int i = 0; i < n_nodes; ++i) X.col(i) = q.segment<3>(3 * i);
  return X;
}

Trajectory record(Simulation& sim, int every, const std::function<void(const Simulation&)>& on_step) {
  Trajectory t;
  const int n = sim.topology().num_nodes();
  t.time.push_back(sim.time());
  t.x.push_back(node_matrix(sim.q(), n));
  sim.run([&](const Simulation& s, const StepReport&) {
    if (on_step) on_step(s);
    if (s.step_count() % every == 0) {
      t.time.push_back(s.time());
      t.x.push_back(node_matrix(s.q(), n));
    }
  });
  return t;
}

double deviation_from_rigid(const MatX& X0, const MatX& X) {
  const Vec3 c0 = X0.rowwise().mean(), c = X.rowwise().mean();
  const MatX A = X0.colwise() - c0, B = X.colwise() - c;
  const Mat3 H = A * B.transpose();
  Eigen::JacobiSVD<Mat3> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) D(2, 2) = -1.0;
  const Mat3 R = svd.matrixV() * D * svd.matrixU().transpose();
  const MatX diff = R * A - B;
  return std::sqrt(diff.squaredNorm() / static_cast<double>(X.cols()));
}

// ---------------------------------------------------------------- locomotion

double net_displacement(const Trajectory& t, int node, int axis) {
  if (t.x.size() < 2) throw std::invalid_argument("trajectory needs at least two samples");
  return t.x.back()(axis, node) - t.x.front()(axis, node);
}

double windowed_progress(const Trajectory& t, int node, double window, int axis) {
  if (t.x.size() < 2) throw std::invalid_argument("trajectory needs at least two samples");
  const double t0 = t.time.front(), t1 = t.time.back();
  double a = 0.0, b = 0.0;
  int na = 0, nb = 0;
  for (std::size_t k = 0; k < t.time.size(); ++k) {
    if (t.time[k] <= t0 + window) {
      a += t.x[k](axis, node);
      ++na;
    }
    if (t.time[k] >= t1 - window) {
      b += t.x[k](axis, node);
      ++nb;
    }
  }
  return b / nb - a / na;
}

PropertyResult earthworm_friction_property(const Trajectory& t, int front) {
  const double net = net_displacement(t, front);
  return {"earthworm forward motion with friction", net > 0.0, net, 0.0, "net front dx > 0"};
}

PropertyResult earthworm_frictionless_property(const Trajectory& t, int front, double stroke) {
  const double net = net_displacement(t, front);
  return {"earthworm no net motion without friction", std::abs(net) < 0.1 * stroke, net, 0.1 * stroke,
          "|net front dx| < 10% stroke"};
}

PropertyResult snake_anisotropic_property(const Trajectory& t, int head, double period) {
  const double prog = windowed_progress(t, head, period);
  const double net = net_displacement(t, head);
  return {"snake forward progress with anisotropic drag", prog > 0.0 && net > 0.0, prog, 0.0,
          "period-averaged head x increases"};
}

PropertyResult snake_isotropic_property(const Trajectory& t, int head, double body_length) {
  const double net = net_displacement(t, head);
  return {"snake no net motion with isotropic drag", std::abs(net) < 0.05 * body_length, net, 0.05 * body_length,
          "|net head dx| < 5% body length"};
}

PropertyResult snake_planar_property(const Trajectory& t) {
  double worst = 0.0;
  for (const MatX& X : t.x) worst = std::max(worst, X.row(2).cwiseAbs().maxCoeff());
  return {"snake stays planar", worst == 0.0, worst, 0.0, "max |z| == 0"};
}

PropertyResult manta_symmetry_property(const Trajectory& t, int lead) {
  double worst = 0.0;
  for (const MatX& X : t.x) worst = std::max(worst, std::abs(X(0, lead) - t.x.front()(0, lead)));
  return {"manta leading-edge x constant", worst < 1e-6, worst, 1e-6, "max |x(t) - x(0)| < 1e-6 m"};
}

}  // namespace dismech
