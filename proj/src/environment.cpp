#include "dismech/environment.hpp"

#include <limits>
#include <set>

namespace dismech {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

Vec3 gravity_buoyancy(double mass, double rho, double rho_med, const Vec3& g) {
  if (!(rho > 0.0)) throw std::invalid_argument("density must be positive");
  return mass * g * (rho - rho_med) / rho;
}

VecX buoyant_mass(const MeshTopology& topo, const Material& mat, const DofLayout& layout, double rho_med,
                  const std::vector<std::pair<int, double>>& point_masses) {
  VecX m = VecX::Zero(3 * layout.n_nodes);
  const double rod_scale = (mat.rho_rod - rho_med) / mat.rho_rod;
  const double shell_scale = (mat.rho_shell - rho_med) / mat.rho_shell;
  const double line_density = mat.rho_rod * rod_area(mat.r0);
  for (const auto& e : topo.rod_edges) {
    const double half = 0.5 * line_density * (topo.nodes[e[1]] - topo.nodes[e[0]]).norm() * rod_scale;
    for (int k = 0; k < 3; ++k) {
      m[3 * e[0] + k] += half;
      m[3 * e[1] + k] += half;
    }
  }
  for (const auto& t : topo.triangles) {
    const double third =
        mat.rho_shell * mat.h * triangle_area(topo.nodes[t[0]], topo.nodes[t[1]], topo.nodes[t[2]]) / 3.0 * shell_scale;
    for (int v : t)
      for (int k = 0; k < 3; ++k) m[3 * v + k] += third;
  }
  for (const auto& [node, pm] : point_masses)
    for (int k = 0; k < 3; ++k) m[3 * node + k] += pm;
  return m;
}

Vec3 floor_contact(const Vec3& x, const FloorParams& p, Mat3* dFdx) {
  const Vec3 n = p.normal.normalized();
  const PenaltyValue pv = smooth_penalty(n.dot(x) - p.height, p.delta);
  if (dFdx) *dFdx = -p.k_c * pv.d2 * n * n.transpose();
  return -p.k_c * pv.d1 * n;
}

Vec3 floor_friction(const Vec3& x, const Vec3& v, double vel_scale, const FloorParams& p, Mat3* dFdx) {
  const Vec3 n = p.normal.normalized();
  const PenaltyValue pv = smooth_penalty(n.dot(x) - p.height, p.delta);
  const double mag = -p.k_c * pv.d1;
  const Mat3 P = Mat3::Identity() - n * n.transpose();
  Mat3 Jg;
  const Vec3 g = friction_direction(P * v, p.nu_slip, dFdx ? &Jg : nullptr);
  if (dFdx) *dFdx = -p.mu * (mag * vel_scale * Jg * P + g * (-p.k_c * pv.d2 * n.transpose()));
  return -p.mu * mag * g;
}

Vec3 viscous_force(const Vec3& v, double eta, double dl, double vel_scale, Mat3* dFdx) {
  if (dFdx) *dFdx = -eta * dl * vel_scale * Mat3::Identity();
  return -eta * dl * v;
}

Vec6 rft_edge_force(const Vec3& x0, const Vec3& x1, const Vec3& v0, const Vec3& v1, double rest_length, double C_t,
                    double C_n, double vel_scale, Mat6* dFdx) {
  const Vec3 e = x1 - x0;
  const double len = e.norm();
  if (!(len > 0.0)) throw SingularConfiguration("zero-length edge in resistive force");
  const Vec3 t = e / len;
  const Mat3 R = (C_t - C_n) * t * t.transpose() + C_n * Mat3::Identity();
  const double w = 0.5 * rest_length;
  Vec6 F;
  F << -w * R * v0, -w * R * v1;
  if (dFdx) {
    const Mat3 dt_dx1 = (Mat3::Identity() - t * t.transpose()) / len;  // = -dt/dx0
    const Vec3* vs[2] = {&v0, &v1};
    dFdx->setZero();
    for (int a = 0; a < 2; ++a) {
      const Vec3& v = *vs[a];
      const Mat3 dF_dt = -w * (C_t - C_n) * (t * v.transpose() + t.dot(v) * Mat3::Identity());
      dFdx->block<3, 3>(3 * a, 0) = -dF_dt * dt_dx1;
      dFdx->block<3, 3>(3 * a, 3) = dF_dt * dt_dx1;
      dFdx->block<3, 3>(3 * a, 3 * a) += -w * vel_scale * R;
    }
  }
  return F;
}

Vec9 drag_triangle_force(const std::array<Vec3, 3>& x, const std::array<Vec3, 3>& v, double rest_area,
                         double rho_med, double C_D, double vel_scale, Mat9* dFdx) {
  const Vec3 a = x[1] - x[0], b = x[2] - x[0];
  const Vec3 N = a.cross(b);
  const double nn = N.norm();
  if (!(nn > 0.0)) throw SingularConfiguration("degenerate triangle in drag");
  const Vec3 n = N / nn;
  const double c = 0.5 * rho_med * C_D * rest_area / 3.0;
  Vec9 F;
  std::array<double, 3> s;
  for (int i = 0; i < 3; ++i) {
    s[i] = v[i].dot(n);
    F.segment<3>(3 * i) = -c * s[i] * std::abs(s[i]) * n;
  }
  if (dFdx) {
    dFdx->setZero();
    const Mat3 Pn = (Mat3::Identity() - n * n.transpose()) / nn;
    const Mat3 dN[3] = {cross_matrix(b) - cross_matrix(a), -cross_matrix(b), cross_matrix(a)};
    for (int i = 0; i < 3; ++i) {
      const Mat3 dF_dn = -c * (2.0 * std::abs(s[i]) * n * v[i].transpose() + s[i] * std::abs(s[i]) * Mat3::Identity());
      for (int m = 0; m < 3; ++m) dFdx->block<3, 3>(3 * i, 3 * m) = dF_dn * Pn * dN[m];
      dFdx->block<3, 3>(3 * i, 3 * i) += -c * 2.0 * std::abs(s[i]) * vel_scale * n * n.transpose();
    }
  }
  return F;
}

double sphere_edge_gap(const Vec3& x0, const Vec3& x1, double radius, const SphereObstacle& s) {
  return point_segment_distance(x0, x1, s.center).distance - s.radius - radius;
}

namespace {

Vec6 sphere_penalty(const Vec3& x0, const Vec3& x1, double radius, const SphereObstacle& s, Mat6* dFdx,
                    SegmentDistance* sd_out = nullptr, Vec6* grad_out = nullptr, double* d1_out = nullptr) {
  const SegmentDistance sd = point_segment_distance(x0, x1, s.center);
  const PenaltyValue pv = gap_penalty(sd.distance - s.radius - radius, s.delta);
  if (sd_out) *sd_out = sd;
  if (d1_out) *d1_out = pv.d1;
  if (pv.d1 == 0.0 && pv.energy == 0.0) {
    if (dFdx) dFdx->setZero();
    if (grad_out) grad_out->setZero();
    return Vec6::Zero();
  }
  Vec6 g;
  Mat6 H;
  point_segment_distance_derivatives(x0, x1, s.center, sd, g, H);
  if (grad_out) *grad_out = g;
  if (dFdx) *dFdx = -s.k_c * (pv.d2 * g * g.transpose() + pv.d1 * H);
  return -s.k_c * pv.d1 * g;
}

Vec6 sphere_friction(const Vec3& x0, const Vec3& x1, const Vec3& r0, const Vec3& r1, double vel_scale, double radius,
                     const SphereObstacle& s) {
  SegmentDistance sd;
  double d1 = 0.0;
  sphere_penalty(x0, x1, radius, s, nullptr, &sd, nullptr, &d1);
  if (d1 == 0.0 || s.mu == 0.0) return Vec6::Zero();
  const Vec3 p = x0 + sd.s * (x1 - x0);
  const Vec3 n = (p - s.center).normalized();
  const Vec3 v = ((1.0 - sd.s) * (x0 - r0) + sd.s * (x1 - r1)) * vel_scale;
  const Vec3 g = friction_direction(v - n * n.dot(v), s.nu_slip);
  const double mag = -s.k_c * d1;
  Vec6 F;
  F << -s.mu * mag * (1.0 - sd.s) * g, -s.mu * mag * sd.s * g;
  return F;
}

}  // namespace

Vec6 sphere_edge_force(const Vec3& x0, const Vec3& x1, const Vec3& x0_ref, const Vec3& x1_ref, double vel_scale,
                       double radius, const SphereObstacle& s, Mat6* dFdx) {
  Vec6 F = sphere_penalty(x0, x1, radius, s, dFdx);
  if (s.mu == 0.0 || vel_scale == 0.0 || F.isZero(0.0)) return F;
  F += sphere_friction(x0, x1, x0_ref, x1_ref, vel_scale, radius, s);
  if (dFdx) {
    // Friction Jacobian by central differences over the six coordinates.
    const double eps = 1e-7 * std::max({x0.cwiseAbs().maxCoeff(), x1.cwiseAbs().maxCoeff(), 1e-3});
    for (int c = 0; c < 6; ++c) {
      Vec3 p0 = x0, p1 = x1, m0 = x0, m1 = x1;
      (c < 3 ? p0 : p1)[c % 3] += eps;
      (c < 3 ? m0 : m1)[c % 3] -= eps;
      dFdx->col(c) += (sphere_friction(p0, p1, x0_ref, x1_ref, vel_scale, radius, s) -
                       sphere_friction(m0, m1, x0_ref, x1_ref, vel_scale, radius, s)) /
                      (2.0 * eps);
    }
  }
  return F;
}

Environment::Environment(const MeshTopology& topo, const Material& mat, const DofLayout& layout,
                         EnvironmentParams params, const std::vector<std::pair<int, double>>& point_masses)
    : topo_(topo), dofs_(layout.size()), params_(std::move(params)) {
  const FloorParams& f = params_.floor;
  if (f.enabled && !(f.k_c > 0.0 && f.delta > 0.0)) throw std::invalid_argument("floor k_c and delta must be positive");
  if (f.enabled && f.mu > 0.0 && !(f.nu_slip > 0.0)) throw std::invalid_argument("floor slip tolerance must be positive");
  for (const auto& s : params_.obstacles)
    if (!(s.radius > 0.0 && s.k_c > 0.0 && s.delta > 0.0)) throw std::invalid_argument("invalid sphere obstacle");
  const VecX bm = buoyant_mass(topo, mat, layout, params_.rho_med, point_masses);
  gravity_ = VecX::Zero(3 * layout.n_nodes);
  for (int i = 0; i < layout.n_nodes; ++i)
    for (int k = 0; k < 3; ++k) gravity_[3 * i + k] = bm[3 * i + k] * params_.g[k];
  voronoi_ = voronoi_lengths(topo);
  for (const auto& e : topo.rod_edges) rod_rest_length_.push_back((topo.nodes[e[1]] - topo.nodes[e[0]]).norm());
  for (const auto& t : topo.triangles)
    tri_rest_area_.push_back(triangle_area(topo.nodes[t[0]], topo.nodes[t[1]], topo.nodes[t[2]]));
  ContactParams cp;
  cp.r0 = mat.r0;
  cp.h = mat.h;
  edges_ = contact_edges(topo, cp);
}

namespace {

template <int N>
void scatter(const Eigen::Matrix<double, 3 * N, 1>& f, const Eigen::Matrix<double, 3 * N, 3 * N>* J,
             const std::array<int, N>& nodes, VecX& F, std::vector<Triplet>* dF) {
  for (int a = 0; a < N; ++a) {
    F.segment<3>(3 * nodes[a]) += f.template segment<3>(3 * a);
    if (!dF || !J) continue;
    for (int b = 0; b < N; ++b)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          const double v = (*J)(3 * a + r, 3 * b + c);
          if (v != 0.0) dF->emplace_back(3 * nodes[a] + r, 3 * nodes[b] + c, v);
        }
  }
}

}  // namespace

void Environment::assemble(const ForceContext& ctx, double load_scale, VecX& F, std::vector<Triplet>* dF) const {
  const MeshTopology& topo = topo_;
  const int n = topo.num_nodes();
  F.head(3 * n) += load_scale * gravity_;
  const bool dissipative = ctx.vel_scale != 0.0;

  if (params_.floor.enabled) {
    for (int i = 0; i < n; ++i) {
      const Vec3 x = node_position(ctx.q, i);
      Mat3 J, Jf;
      Vec3 f = floor_contact(x, params_.floor, dF ? &J : nullptr);
      if (f.isZero(0.0)) continue;
      if (params_.floor.mu > 0.0 && dissipative) {
        f += floor_friction(x, ctx.velocity(i), ctx.vel_scale, params_.floor, dF ? &Jf : nullptr);
        if (dF) J += Jf;
      }
      scatter<1>(f, dF ? &J : nullptr, {i}, F, dF);
    }
  }

  if (params_.eta != 0.0 && dissipative) {
    for (int i = 0; i < n; ++i) {
      if (voronoi_[i] == 0.0) continue;
      Mat3 J;
      const Vec3 f = viscous_force(ctx.velocity(i), params_.eta, voronoi_[i], ctx.vel_scale, &J);
      scatter<1>(f, &J, {i}, F, dF);
    }
  }

  if ((params_.C_t != 0.0 || params_.C_n != 0.0) && dissipative) {
    for (int k = 0; k < topo.num_rod_edges(); ++k) {
      const auto& e = topo.rod_edges[k];
      Mat6 J;
      const Vec6 f = rft_edge_force(node_position(ctx.q, e[0]), node_position(ctx.q, e[1]), ctx.velocity(e[0]),
                                    ctx.velocity(e[1]), rod_rest_length_[k], params_.C_t, params_.C_n,
                                    ctx.vel_scale, dF ? &J : nullptr);
      scatter<2>(f, dF ? &J : nullptr, e, F, dF);
    }
  }

  if (params_.C_D != 0.0 && params_.rho_med != 0.0 && dissipative) {
    for (int k = 0; k < topo.num_triangles(); ++k) {
      const auto& t = topo.triangles[k];
      std::array<Vec3, 3> x, v;
      for (int a = 0; a < 3; ++a) {
        x[a] = node_position(ctx.q, t[a]);
        v[a] = ctx.velocity(t[a]);
      }
      Mat9 J;
      const Vec9 f =
          drag_triangle_force(x, v, tri_rest_area_[k], params_.rho_med, params_.C_D, ctx.vel_scale, dF ? &J : nullptr);
      scatter<3>(f, dF ? &J : nullptr, t, F, dF);
    }
  }

  for (const SphereObstacle& s : params_.obstacles) {
    for (const ContactEdge& e : edges_) {
      const Vec3 x0 = node_position(ctx.q, e.nodes[0]), x1 = node_position(ctx.q, e.nodes[1]);
      if (point_segment_distance(x0, x1, s.center).distance >= s.radius + e.radius + s.delta) continue;
      Mat6 J;
      const Vec6 f = sphere_edge_force(x0, x1, node_position(ctx.q_ref, e.nodes[0]),
                                       node_position(ctx.q_ref, e.nodes[1]), ctx.vel_scale, e.radius, s,
                                       dF ? &J : nullptr);
      scatter<2>(f, dF ? &J : nullptr, e.nodes, F, dF);
    }
  }

  if (!custom_.empty()) {
    const VecX u = (ctx.q - ctx.q_ref) * ctx.vel_scale;
    std::vector<Triplet> local;
    for (const CustomForce& cf : custom_) {
      local.clear();
      const VecX f = cf(ctx.q, u, ctx.time, dF ? &local : nullptr);
      if (f.size() != F.size()) throw std::runtime_error("custom force changed its output length");
      F += load_scale * f;
      if (dF)
        for (const Triplet& t : local) dF->emplace_back(t.row(), t.col(), load_scale * t.value());
    }
  }
}

int Environment::register_custom_force(CustomForce f, const VecX& q, const VecX& u) {
  if (!f) throw std::invalid_argument("empty custom force");
  const VecX probe = f(q, u, 0.0, nullptr);
  if (probe.size() != dofs_)
    throw std::invalid_argument("custom force returns " + std::to_string(probe.size()) + " entries, expected " +
                                std::to_string(dofs_));
  custom_.push_back(std::move(f));
  return static_cast<int>(custom_.size()) - 1;
}

double Environment::min_floor_gap(const VecX& q) const {
  double best = std::numeric_limits<double>::infinity();
  const Vec3 n = params_.floor.normal.normalized();
  for (int i = 0; i < topo_.num_nodes(); ++i) best = std::min(best, n.dot(node_position(q, i)) - params_.floor.height);
  return best;
}

double Environment::min_obstacle_gap(const VecX& q) const {
  double best = std::numeric_limits<double>::infinity();
  for (const SphereObstacle& s : params_.obstacles)
    for (const ContactEdge& e : edges_)
      best = std::min(best, sphere_edge_gap(node_position(q, e.nodes[0]), node_position(q, e.nodes[1]), e.radius, s));
  return best;
}

}  // namespace dismech
