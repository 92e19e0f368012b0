#include "dismech/rod_energy.hpp"

namespace dismech {

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

Contribution6 stretch_local(const Vec3& x0, const Vec3& x1, double rest_length, double ks) {
  Contribution6 c;
  const Vec3 e = x1 - x0;
  const double len = e.norm();
  if (!(len > 0.0)) throw SingularConfiguration("stretch spring with zero current length");
  const Vec3 t = e / len;
  const double eps = len / rest_length - 1.0;
  c.energy = 0.5 * ks * eps * eps * rest_length;
  const Vec3 g = ks * eps * t;
  c.gradient.segment<3>(0) = -g;
  c.gradient.segment<3>(3) = g;
  const Mat3 tt = t * t.transpose();
  const Mat3 h = ks * (tt / rest_length + eps * (Mat3::Identity() - tt) / len);
  c.hessian.block<3, 3>(0, 0) = h;
  c.hessian.block<3, 3>(3, 3) = h;
  c.hessian.block<3, 3>(0, 3) = -h;
  c.hessian.block<3, 3>(3, 0) = -h;
  return c;
}

Contribution6 stretch_contribution(const StretchSpring& s, const VecX& q, const DofLayout& layout) {
  Contribution6 c = stretch_local(node_position(q, s.nodes[0]), node_position(q, s.nodes[1]), s.rest_length, s.ks);
  for (int a = 0; a < 2; ++a)
    for (int k = 0; k < 3; ++k) c.dofs[3 * a + k] = layout.pos(s.nodes[a], k);
  return c;
}

Vec3 curvature_binormal(const Vec3& ei, const Vec3& ej) {
  const double denom = ei.norm() * ej.norm() + ei.dot(ej);
  if (!(denom > 1e-14 * ei.norm() * ej.norm()))
    throw SingularConfiguration("curvature binormal of antiparallel edges");
  return 2.0 * ei.cross(ej) / denom;
}

BendTwistStencil make_stencil(const BendTwistSpring& s, const VecX& q, const FrameSet& frames,
                              const DofLayout& layout, int spring_index) {
  BendTwistStencil st;
  st.x0 = node_position(q, s.nodes[0]);
  st.x1 = node_position(q, s.nodes[1]);
  st.x2 = node_position(q, s.nodes[2]);
  st.fe = oriented_frame(frames, s.edges[0], s.sign[0], q[layout.theta(s.edges[0])]);
  st.ff = oriented_frame(frames, s.edges[1], s.sign[1], q[layout.theta(s.edges[1])]);
  st.ref_twist = frames.ref_twist[spring_index];
  return st;
}

Eigen::Vector2d stencil_curvatures(const BendTwistStencil& st) {
  const Vec3 kb = curvature_binormal(st.x1 - st.x0, st.x2 - st.x1);
  return {0.5 * kb.dot(st.fe.m2 + st.ff.m2), -0.5 * kb.dot(st.fe.m1 + st.ff.m1)};
}

double stencil_twist(const BendTwistStencil& st) { return st.ff.theta - st.fe.theta + st.ref_twist; }

namespace {

// Maps edge-space derivatives over [e, f, theta_e, theta_f] to node space.
Contribution11 to_nodes(double energy, const Vec8& g, const Mat8& h) {
  Eigen::Matrix<double, 8, 11> P = Eigen::Matrix<double, 8, 11>::Zero();
  P.block<3, 3>(0, 0) = -Mat3::Identity();
  P.block<3, 3>(0, 3) = Mat3::Identity();
  P.block<3, 3>(3, 3) = -Mat3::Identity();
  P.block<3, 3>(3, 6) = Mat3::Identity();
  P(6, 9) = 1.0;
  P(7, 10) = 1.0;
  Contribution11 c;
  c.energy = energy;
  c.gradient = P.transpose() * g;
  c.hessian = P.transpose() * h * P;
  return c;
}

struct EdgeGeometry {
  Vec3 te, tf, tt, kb;
  double le, lf, chi;
};

EdgeGeometry edge_geometry(const BendTwistStencil& st) {
  EdgeGeometry g;
  const Vec3 e = st.x1 - st.x0, f = st.x2 - st.x1;
  g.le = e.norm();
  g.lf = f.norm();
  if (!(g.le > 0.0 && g.lf > 0.0)) throw SingularConfiguration("bend-twist stencil with zero-length edge");
  g.te = e / g.le;
  g.tf = f / g.lf;
  g.chi = 1.0 + g.te.dot(g.tf);
  if (!(g.chi > 1e-12)) throw SingularConfiguration("bend-twist stencil folded back on itself");
  g.tt = (g.te + g.tf) / g.chi;
  g.kb = 2.0 * g.te.cross(g.tf) / g.chi;
  return g;
}

void set_dofs(Contribution11& c, const BendTwistSpring& s, const DofLayout& layout) {
  for (int a = 0; a < 3; ++a)
    for (int k = 0; k < 3; ++k) c.dofs[3 * a + k] = layout.pos(s.nodes[a], k);
  c.dofs[9] = layout.theta(s.edges[0]);
  c.dofs[10] = layout.theta(s.edges[1]);
  c.sign[9] = s.sign[0];
  c.sign[10] = s.sign[1];
}

}  // namespace

Contribution11 bend_local(const BendTwistStencil& st, const Eigen::Vector2d& kappa_bar, double EI, double voronoi) {
  const EdgeGeometry g = edge_geometry(st);
  const Mat3 I = Mat3::Identity();
  // m[j][k]: director k (0 -> m1, 1 -> m2) of stencil edge j (0 -> e, 1 -> f)
  const Vec3* m[2][2] = {{&st.fe.m1, &st.fe.m2}, {&st.ff.m1, &st.ff.m2}};
  const Vec3* t[2] = {&g.te, &g.tf};

  // Per-corner curvatures: kappa_k = (kc[k][0] + kc[k][1]) / 2.
  double kc[2][2];
  for (int j = 0; j < 2; ++j) {
    kc[0][j] = g.kb.dot(*m[j][1]);
    kc[1][j] = -g.kb.dot(*m[j][0]);
  }
  Vec8 gc[2][2];
  for (int k = 0; k < 2; ++k) {
    const double sign = k == 0 ? 1.0 : -1.0;
    for (int j = 0; j < 2; ++j) {
      const Vec3& dother = *m[j][1 - k];
      gc[k][j].setZero();
      gc[k][j].segment<3>(0) = (2.0 * sign / g.chi * g.tf.cross(dother) - kc[k][j] * g.tt) / g.le;
      gc[k][j].segment<3>(3) = (-2.0 * sign / g.chi * g.te.cross(dother) - kc[k][j] * g.tt) / g.lf;
      gc[k][j][6 + j] = -g.kb.dot(*m[j][k]);
    }
  }

  const double stiff = EI / voronoi;
  double energy = 0.0;
  Vec8 grad = Vec8::Zero();
  Mat8 hess = Mat8::Zero();
  const Mat3 T2 = 2.0 * g.tt * g.tt.transpose();
  for (int k = 0; k < 2; ++k) {
    const double sign = k == 0 ? 1.0 : -1.0;
    const double kappa = 0.5 * (kc[k][0] + kc[k][1]);
    const double diff = kappa - kappa_bar[k];
    const Vec8 gk = 0.5 * (gc[k][0] + gc[k][1]);
    energy += 0.5 * stiff * diff * diff;
    grad += stiff * diff * gk;
    hess += stiff * gk * gk.transpose();

    const double dE_dkc = 0.5 * stiff * diff;
    for (int j = 0; j < 2; ++j) {
      const Vec3& dother = *m[j][1 - k];
      const Vec3& dk = *m[j][k];
      const double hk = 0.5 * kc[k][j];
      const double s2 = 2.0 * sign / g.chi;
      const Vec3 ce = s2 * g.tf.cross(dother);
      const Vec3 cf = s2 * g.te.cross(dother);
      const Mat3 Pe = I - g.te * g.te.transpose();
      const Mat3 Pf = I - g.tf * g.tf.transpose();
      Mat3 Aee = hk * T2 - ce * g.tt.transpose() - (hk / g.chi) * Pe;
      Mat3 Aff = hk * T2 + cf * g.tt.transpose() - (hk / g.chi) * Pf;
      Mat3 Aef = kc[k][j] * T2 - (ce * g.tt.transpose() - g.tt * cf.transpose()) -
                 (kc[k][j] / g.chi) * (I + g.te * g.tf.transpose()) - s2 * cross_matrix(dother);
      const Mat3 transport = sign * g.kb * dother.transpose() + 0.5 * g.kb.cross(*t[j]) * dk.transpose();
      if (j == 0)
        Aee += transport - hk * Pe;
      else
        Aff += transport - hk * Pf;

      Mat8 hc = Mat8::Zero();
      hc.block<3, 3>(0, 0) = (Aee + Aee.transpose()) / (g.le * g.le);
      hc.block<3, 3>(3, 3) = (Aff + Aff.transpose()) / (g.lf * g.lf);
      hc.block<3, 3>(0, 3) = Aef / (g.le * g.lf);
      hc.block<3, 3>(3, 0) = Aef.transpose() / (g.le * g.lf);
      hc(6 + j, 6 + j) = sign * gc[1 - k][j][6 + j];
      const Vec3 xe = (-(2.0 / g.chi) * g.tf.cross(dk) + g.kb.dot(dk) * g.tt) / g.le;
      const Vec3 xf = ((2.0 / g.chi) * g.te.cross(dk) + g.kb.dot(dk) * g.tt) / g.lf;
      hc.block<3, 1>(0, 6 + j) = xe;
      hc.block<3, 1>(3, 6 + j) = xf;
      hc.block<1, 3>(6 + j, 0) = xe.transpose();
      hc.block<1, 3>(6 + j, 3) = xf.transpose();
      hess += dE_dkc * hc;
    }
  }
  return to_nodes(energy, grad, hess);
}

Contribution11 twist_local(const BendTwistStencil& st, double twist_bar, double GJ, double voronoi) {
  const EdgeGeometry g = edge_geometry(st);
  const double stiff = GJ / voronoi;
  const double diff = stencil_twist(st) - twist_bar;
  Vec8 gt = Vec8::Zero();
  gt.segment<3>(0) = 0.5 * g.kb / g.le;
  gt.segment<3>(3) = 0.5 * g.kb / g.lf;
  gt[6] = -1.0;
  gt[7] = 1.0;
  Mat8 hm = Mat8::Zero();
  Mat3 tmp = g.kb * (g.tt + g.te).transpose();
  hm.block<3, 3>(0, 0) = -(0.25 / (g.le * g.le)) * (tmp + tmp.transpose());
  tmp = g.kb * (g.tt + g.tf).transpose();
  hm.block<3, 3>(3, 3) = -(0.25 / (g.lf * g.lf)) * (tmp + tmp.transpose());
  const Mat3 hef = (0.5 / (g.le * g.lf)) * ((2.0 / g.chi) * cross_matrix(g.te) - g.kb * g.tt.transpose());
  hm.block<3, 3>(0, 3) = hef;
  hm.block<3, 3>(3, 0) = hef.transpose();
  const Vec8 grad = stiff * diff * gt;
  const Mat8 hess = stiff * gt * gt.transpose() + stiff * diff * hm;
  return to_nodes(0.5 * stiff * diff * diff, grad, hess);
}

Contribution11 bend_contribution(const BendTwistSpring& s, int spring_index, const VecX& q,
                                 const FrameSet& frames, const DofLayout& layout) {
  Contribution11 c = bend_local(make_stencil(s, q, frames, layout, spring_index), s.kappa_bar, s.EI, s.voronoi);
  set_dofs(c, s, layout);
  return c;
}

Contribution11 twist_contribution(const BendTwistSpring& s, int spring_index, const VecX& q,
                                  const FrameSet& frames, const DofLayout& layout) {
  Contribution11 c = twist_local(make_stencil(s, q, frames, layout, spring_index), s.twist_bar, s.GJ, s.voronoi);
  set_dofs(c, s, layout);
  return c;
}

void capture_natural_rod_state(std::vector<BendTwistSpring>& springs, const VecX& q,
                               const FrameSet& frames, const DofLayout& layout) {
  for (std::size_t i = 0; i < springs.size(); ++i) {
    const BendTwistStencil st = make_stencil(springs[i], q, frames, layout, static_cast<int>(i));
    springs[i].kappa_bar = stencil_curvatures(st);
    springs[i].twist_bar = stencil_twist(st);
  }
}

}  // namespace dismech
