#include "dismech/shell_energy.hpp"

namespace dismech {

using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

double hinge_angle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 e = b - a;
  const Vec3 n1 = e.cross(c - a), n2 = (d - a).cross(e);
  const double l1 = n1.norm(), l2 = n2.norm();
  if (!(l1 > 0.0 && l2 > 0.0)) throw SingularConfiguration("hinge with degenerate triangle");
  const Vec3 u1 = n1 / l1, u2 = n2 / l2;
  return std::atan2(u1.cross(u2).dot(e.normalized()), u1.dot(u2));
}

namespace {

// One wing of the hinge: angle derivatives through the normal of triangle
// (a, b, w). Local order [a, b, w]. orient = +1 for N = e x (w-a), -1 for
// N = (w-a) x e.
void hinge_side(const Vec3& a, const Vec3& b, const Vec3& w, double orient, Vec9& g, Mat9& H) {
  const Vec3 e = b - a, v = w - a;
  const double L2 = e.squaredNorm(), L = std::sqrt(L2);
  const Vec3 N = orient * e.cross(v);
  const double N2 = N.squaredNorm();
  const Vec3 nh = N / std::sqrt(N2);
  const Mat3 dN[3] = {orient * (cross_matrix(v) - cross_matrix(e)), -orient * cross_matrix(v),
                      orient * cross_matrix(e)};
  const Vec3 gw = -L * N / N2;
  const double s1 = (w - b).dot(e), s2 = v.dot(e);
  const double ba = s1 / L2, bb = -s2 / L2;
  const Vec3 dL2[3] = {-2.0 * e, 2.0 * e, Vec3::Zero()};
  const Vec3 ds1[3] = {-(w - b), -e + (w - b), e};
  const Vec3 ds2[3] = {-e - v, v, e};
  const Mat3 M = (Mat3::Identity() - 2.0 * nh * nh.transpose()) / N2;
  g.segment<3>(0) = ba * gw;
  g.segment<3>(3) = bb * gw;
  g.segment<3>(6) = gw;
  for (int i = 0; i < 3; ++i) {
    const Vec3 dba = ds1[i] / L2 - ba * dL2[i] / L2;
    const Vec3 dbb = -ds2[i] / L2 - bb * dL2[i] / L2;
    const Mat3 dgw = -(N / N2 * dL2[i].transpose() / (2.0 * L) + L * M * dN[i]);
    H.block<3, 3>(0, 3 * i) = gw * dba.transpose() + ba * dgw;
    H.block<3, 3>(3, 3 * i) = gw * dbb.transpose() + bb * dgw;
    H.block<3, 3>(6, 3 * i) = dgw;
  }
}

}  // namespace

void hinge_angle_derivatives(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, Vec12& grad, Mat12& hess) {
  grad.setZero();
  hess.setZero();
  const Vec3* wings[2] = {&c, &d};
  const int slot[2] = {2, 3};
  const double orient[2] = {1.0, -1.0};
  for (int side = 0; side < 2; ++side) {
    Vec9 g;
    Mat9 H;
    hinge_side(a, b, *wings[side], orient[side], g, H);
    const int ids[3] = {0, 1, slot[side]};
    for (int i = 0; i < 3; ++i) {
      grad.segment<3>(3 * ids[i]) += g.segment<3>(3 * i);
      for (int j = 0; j < 3; ++j) hess.block<3, 3>(3 * ids[i], 3 * ids[j]) += H.block<3, 3>(3 * i, 3 * j);
    }
  }
}

Contribution12 hinge_local(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, double phi_bar, double kb) {
  Contribution12 out;
  const double diff = hinge_angle(a, b, c, d) - phi_bar;
  Vec12 g;
  Mat12 H;
  hinge_angle_derivatives(a, b, c, d, g, H);
  out.energy = 0.5 * kb * diff * diff;
  out.gradient = kb * diff * g;
  out.hessian = kb * (g * g.transpose() + diff * H);
  return out;
}

Contribution12 hinge_contribution(const HingeSpring& h, const VecX& q, const DofLayout& layout) {
  Contribution12 c = hinge_local(node_position(q, h.nodes[0]), node_position(q, h.nodes[1]),
                                 node_position(q, h.nodes[2]), node_position(q, h.nodes[3]), h.phi_bar, h.kb);
  for (int a = 0; a < 4; ++a)
    for (int k = 0; k < 3; ++k) c.dofs[3 * a + k] = layout.pos(h.nodes[a], k);
  return c;
}

MidedgeElementState midedge_state(const MidedgeElement& el, const std::array<Vec3, 3>& x,
                                  const std::array<double, 3>& xi, const std::array<Vec3, 3>& tau) {
  MidedgeElementState s;
  const Vec3 N = (x[1] - x[0]).cross(x[2] - x[0]);
  const double nn = N.norm();
  if (!(nn > 0.0)) throw SingularConfiguration("mid-edge element with degenerate triangle");
  s.n = N / nn;
  s.area = 0.5 * nn;
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = x[(k + 2) % 3] - x[(k + 1) % 3];
    s.t[k] = e.cross(s.n);
    s.length[k] = e.norm();
    const double proj = s.t[k].normalized().dot(tau[k]);
    if (!(std::abs(proj) > 1e-12)) throw SingularConfiguration("mid-edge edge normal orthogonal to tau0");
    s.c[k] = 1.0 / (el.area_bar * el.edge_length_bar[k] * proj);
    s.f[k] = s.n.dot(tau[k]);
    s.lambda += s.c[k] * (el.sign[k] * xi[k] - s.f[k]) * s.t[k] * s.t[k].transpose();
  }
  return s;
}

Mat3 midedge_shape_operator(const MidedgeElement& el, const std::array<Vec3, 3>& x,
                            const std::array<double, 3>& xi, const std::array<Vec3, 3>& tau) {
  return midedge_state(el, x, xi, tau).lambda;
}

void normal_projection_derivatives(const std::array<Vec3, 3>& x, const Vec3& tau, Vec9& grad, Mat9& hess) {
  const Vec3 N = (x[1] - x[0]).cross(x[2] - x[0]);
  const double nn = N.norm();
  const Vec3 n = N / nn;
  const double beta = 1.0 / nn;  // 1 / (2A)
  std::array<Vec3, 3> e, t;
  for (int k = 0; k < 3; ++k) {
    e[k] = x[(k + 2) % 3] - x[(k + 1) % 3];
    t[k] = e[k].cross(n);
  }
  const Vec3 w = n.cross(tau);
  const Mat3 nnT = n * n.transpose();
  for (int i = 0; i < 3; ++i) {
    const double alpha = tau.dot(t[i]);
    grad.segment<3>(3 * i) = alpha * beta * n;
    const Vec3 tau_x_e = tau.cross(e[i]);
    for (int j = 0; j < 3; ++j) {
      const double d = (j == (i + 2) % 3 ? 1.0 : 0.0) - (j == (i + 1) % 3 ? 1.0 : 0.0);
      hess.block<3, 3>(3 * i, 3 * j) = beta * d * n * w.transpose() + beta * beta * tau_x_e.dot(t[j]) * nnT +
                                       alpha * beta * beta * (t[j] * n.transpose() + n * t[j].transpose());
    }
  }
}

Contribution12 midedge_local(const MidedgeElement& el, const std::array<Vec3, 3>& x,
                             const std::array<double, 3>& xi, const std::array<Vec3, 3>& tau,
                             const MidedgeElementState* frozen) {
  const MidedgeElementState here = midedge_state(el, x, xi, tau);
  const MidedgeElementState& fz = frozen ? *frozen : here;

  // Lambda = sum_k a_k T_k with T_k = t_k t_k^T frozen and a_k = c_k (s_k xi_k - f_k(x)).
  Eigen::Vector3d a;
  Mat3 lambda = Mat3::Zero();
  for (int k = 0; k < 3; ++k) {
    a[k] = fz.c[k] * (el.sign[k] * xi[k] - here.f[k]);
    lambda += a[k] * fz.t[k] * fz.t[k].transpose();
  }
  const double w = el.kb * el.area_bar;
  const Mat3 D = lambda - el.lambda_bar;
  const double dtr = lambda.trace() - el.lambda_bar.trace();

  Contribution12 out;
  out.energy = w * ((1.0 - el.nu) * (D * D).trace() + el.nu * dtr * dtr);

  Eigen::Vector3d dE_da;
  Mat3 Q;
  for (int k = 0; k < 3; ++k) {
    const Mat3 Tk = fz.t[k] * fz.t[k].transpose();
    dE_da[k] = 2.0 * w * ((1.0 - el.nu) * (D * Tk).trace() + el.nu * dtr * Tk.trace());
    for (int l = 0; l < 3; ++l) {
      const double tt = fz.t[k].dot(fz.t[l]);
      Q(k, l) = 2.0 * w * ((1.0 - el.nu) * tt * tt + el.nu * fz.t[k].squaredNorm() * fz.t[l].squaredNorm());
    }
  }

  // da_k over [x (9), xi (3)]
  std::array<Vec12, 3> ga;
  std::array<Mat9, 3> hf;
  for (int k = 0; k < 3; ++k) {
    Vec9 gf;
    normal_projection_derivatives(x, tau[k], gf, hf[k]);
    ga[k].setZero();
    ga[k].head<9>() = -fz.c[k] * gf;
    ga[k][9 + k] = fz.c[k] * el.sign[k];
  }
  for (int k = 0; k < 3; ++k) {
    out.gradient += dE_da[k] * ga[k];
    for (int l = 0; l < 3; ++l) out.hessian += Q(k, l) * ga[k] * ga[l].transpose();
    out.hessian.topLeftCorner<9, 9>() -= dE_da[k] * fz.c[k] * hf[k];
  }
  return out;
}

std::array<Vec3, 3> midedge_local_tau(const MidedgeElement& el, const FrameSet& frames) {
  std::array<Vec3, 3> tau;
  for (int k = 0; k < 3; ++k) tau[k] = el.sign[k] * frames.tau0[el.shell_edges[k]];
  return tau;
}

Contribution12 midedge_contribution(const MidedgeElement& el, const VecX& q, const FrameSet& frames,
                                    const DofLayout& layout) {
  std::array<Vec3, 3> x;
  std::array<double, 3> xi;
  for (int k = 0; k < 3; ++k) {
    x[k] = node_position(q, el.nodes[k]);
    xi[k] = q[layout.xi(el.shell_edges[k])];
  }
  Contribution12 c = midedge_local(el, x, xi, midedge_local_tau(el, frames));
  for (int a = 0; a < 3; ++a) {
    for (int k = 0; k < 3; ++k) c.dofs[3 * a + k] = layout.pos(el.nodes[a], k);
    c.dofs[9 + a] = layout.xi(el.shell_edges[a]);
  }
  return c;
}

}  // namespace dismech
