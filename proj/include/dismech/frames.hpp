#pragma once

#include "dismech/springs.hpp"

namespace dismech {

class AntiparallelTransport : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rotation about t_from x t_to taking t_from to t_to, applied to v.
// Throws AntiparallelTransport when t_from = -t_to.
Vec3 parallel_transport(const Vec3& v, const Vec3& t_from, const Vec3& t_to);

// As parallel_transport, but antiparallel tangents go through an intermediate
// tangent perpendicular to both.
Vec3 transport_robust(const Vec3& v, const Vec3& t_from, const Vec3& t_to);

// Deterministic unit vector perpendicular to t (smallest-component heuristic).
Vec3 perpendicular_seed(const Vec3& t);

// Angle from u to v measured about axis, in (-pi, pi].
double signed_angle(const Vec3& u, const Vec3& v, const Vec3& axis);

Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle);

struct FrameSet {
  // per frame edge
  std::vector<Vec3> tangent, d1, d2, m1, m2;
  // per bend-twist spring
  std::vector<double> ref_twist;
  // per shell edge
  std::vector<Vec3> n_avg, tau0;
};

// Frame of one stencil edge with the sign flip applied.
struct OrientedFrame {
  Vec3 t, d1, d2, m1, m2;
  double theta = 0.0;
};

OrientedFrame oriented_frame(const FrameSet& frames, int edge, int sign, double theta);

Vec3 edge_tangent(const MeshTopology& topo, const VecX& q, int frame_edge);

FrameSet init_reference_frames(const MeshTopology& topo, const std::vector<BendTwistSpring>& springs,
                               const VecX& q, const DofLayout& layout);

// Transports every d1 from the tangents of prev to those of q, recomputes the
// material frames from q's twist angles and updates reference twists
// incrementally. Shell-edge data is copied unchanged.
FrameSet time_update_frames(const FrameSet& prev, const MeshTopology& topo,
                            const std::vector<BendTwistSpring>& springs, const VecX& q,
                            const DofLayout& layout);

// Reference twist of a spring computed from scratch, in (-pi, pi].
double reference_twist(const FrameSet& frames, const BendTwistSpring& spring);

void update_material_frames(FrameSet& frames, const VecX& q, const DofLayout& layout);

// tau0 = n_avg x e_hat per shell edge, with e_hat along the owner's winding.
void snapshot_tau0(FrameSet& frames, const MeshTopology& topo, const VecX& q);

Vec3 triangle_unit_normal(const VecX& q, const std::array<int, 3>& tri);

}  // namespace dismech
