#pragma once

#include "dismech/frames.hpp"

namespace dismech {

using Contribution6 = LocalContribution<6>;
using Contribution11 = LocalContribution<11>;

// E = 1/2 ks eps^2 |e_bar|, eps = |e|/|e_bar| - 1. Local order [x0, x1].
Contribution6 stretch_local(const Vec3& x0, const Vec3& x1, double rest_length, double ks);
Contribution6 stretch_contribution(const StretchSpring& s, const VecX& q, const DofLayout& layout);

// 2 ei x ej / (|ei||ej| + ei.ej)
Vec3 curvature_binormal(const Vec3& ei, const Vec3& ej);

// Stencil geometry with edge flips already applied to both frames.
struct BendTwistStencil {
  Vec3 x0, x1, x2;
  OrientedFrame fe, ff;
  double ref_twist = 0.0;
};

BendTwistStencil make_stencil(const BendTwistSpring& s, const VecX& q, const FrameSet& frames,
                              const DofLayout& layout, int spring_index);

Eigen::Vector2d stencil_curvatures(const BendTwistStencil& st);
double stencil_twist(const BendTwistStencil& st);

// Local order [x0, x1, x2, theta_e, theta_f] in stencil orientation.
Contribution11 bend_local(const BendTwistStencil& st, const Eigen::Vector2d& kappa_bar, double EI, double voronoi);
Contribution11 twist_local(const BendTwistStencil& st, double twist_bar, double GJ, double voronoi);

// Same with global dofs and theta re-signing filled in.
Contribution11 bend_contribution(const BendTwistSpring& s, int spring_index, const VecX& q,
                                 const FrameSet& frames, const DofLayout& layout);
Contribution11 twist_contribution(const BendTwistSpring& s, int spring_index, const VecX& q,
                                  const FrameSet& frames, const DofLayout& layout);

// Sets kappa_bar and twist_bar of every spring to the values at (q, frames).
void capture_natural_rod_state(std::vector<BendTwistSpring>& springs, const VecX& q,
                               const FrameSet& frames, const DofLayout& layout);

}  // namespace dismech
