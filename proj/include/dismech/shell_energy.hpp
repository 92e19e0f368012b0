#pragma once

#include "dismech/frames.hpp"

namespace dismech {

using Contribution12 = LocalContribution<12>;

// Dihedral angle across edge a -> b with wings c and d. Face normals are
// (b-a) x (c-a) and (d-a) x (b-a); the sign follows the right-hand rule
// about b - a. Zero for a flat pair, in (-pi, pi].
double hinge_angle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// Gradient (12) and Hessian (12x12) of hinge_angle over [a, b, c, d].
void hinge_angle_derivatives(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                             Eigen::Matrix<double, 12, 1>& grad, Eigen::Matrix<double, 12, 12>& hess);

// E = 1/2 kb (phi - phi_bar)^2
Contribution12 hinge_local(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, double phi_bar, double kb);
Contribution12 hinge_contribution(const HingeSpring& h, const VecX& q, const DofLayout& layout);

// Quantities of one mid-edge triangle. Edge k is opposite vertex k;
// t[k] = e^k x n is the outward in-plane edge normal with |t[k]| = |e^k|.
struct MidedgeElementState {
  Vec3 n = Vec3::Zero();
  double area = 0.0;
  std::array<Vec3, 3> t{};
  std::array<double, 3> c{};
  std::array<double, 3> f{};
  std::array<double, 3> length{};
  Mat3 lambda = Mat3::Zero();
};

// tau[k] is the edge frame vector seen from this triangle: sign[k] * tau0.
MidedgeElementState midedge_state(const MidedgeElement& el, const std::array<Vec3, 3>& x,
                                   const std::array<double, 3>& xi, const std::array<Vec3, 3>& tau);

Mat3 midedge_shape_operator(const MidedgeElement& el, const std::array<Vec3, 3>& x,
                            const std::array<double, 3>& xi, const std::array<Vec3, 3>& tau);

// E = kb A_bar [(1-nu) Tr((L - L_bar)^2) + nu (Tr L - Tr L_bar)^2].
// c^k, t^k and |t^k| are taken from `frozen` (or from x itself when null) and
// held fixed in the derivatives; f^k = n(x).tau^k is differentiated exactly.
// Local order [x0, x1, x2, xi0, xi1, xi2].
Contribution12 midedge_local(const MidedgeElement& el, const std::array<Vec3, 3>& x,
                             const std::array<double, 3>& xi, const std::array<Vec3, 3>& tau,
                             const MidedgeElementState* frozen = nullptr);

std::array<Vec3, 3> midedge_local_tau(const MidedgeElement& el, const FrameSet& frames);

Contribution12 midedge_contribution(const MidedgeElement& el, const VecX& q, const FrameSet& frames,
                                    const DofLayout& layout);

// Gradient (9) and Hessian (9x9) of n(x).tau over the three vertices.
void normal_projection_derivatives(const std::array<Vec3, 3>& x, const Vec3& tau,
                                   Eigen::Matrix<double, 9, 1>& grad, Eigen::Matrix<double, 9, 9>& hess);

}  // namespace dismech
