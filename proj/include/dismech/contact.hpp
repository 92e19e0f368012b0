#pragma once

#include "dismech/springs.hpp"

namespace dismech {

// Closest points p = a + s (b - a) and q = c + t (d - c).
struct SegmentDistance {
  double distance = 0.0;
  double s = 0.0;
  double t = 0.0;
};

// Global minimum distance between segments [a,b] and [c,d] (Lumelsky).
SegmentDistance segment_distance(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// Gradient (12) and Hessian (12x12) of the segment distance over [a,b,c,d],
// differentiating through free closest-point parameters; parameters at 0 or
// 1 are held fixed.
void segment_distance_derivatives(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                                  const SegmentDistance& sd, Eigen::Matrix<double, 12, 1>& grad,
                                  Eigen::Matrix<double, 12, 12>& hess);

// Distance from segment [a,b] to point c with derivatives over [a,b].
SegmentDistance point_segment_distance(const Vec3& a, const Vec3& b, const Vec3& c);
void point_segment_distance_derivatives(const Vec3& a, const Vec3& b, const Vec3& c, const SegmentDistance& sd,
                                        Eigen::Matrix<double, 6, 1>& grad, Eigen::Matrix<double, 6, 6>& hess);

// Smooth penalty on a gap g (g < 0 is penetration) with K1 = 15 / delta:
// g^2 for g <= -delta, 0 for g >= delta, ((1/K1) log(1 + e^{-K1 g}))^2 otherwise.
struct PenaltyValue {
  double energy = 0.0;
  double d1 = 0.0;  // dE/dg
  double d2 = 0.0;  // d2E/dg2
};
PenaltyValue gap_penalty(double gap, double delta);

// ((1/K1) log(1 + e^{-K1 g}))^2 for every g; the floor uses this form alone.
PenaltyValue smooth_penalty(double gap, double delta);

// Contact energy of a pair at distance Delta with contact distance d0 = 2 r0.
PenaltyValue contact_energy(double distance, double d0, double delta);

// 2 / (1 + e^{-K2 |u|}) - 1 with K2 = 15 / nu_slip.
double friction_scale(double speed, double nu_slip);
double friction_scale_derivative(double speed, double nu_slip);

// g(v) = gamma(|v|) v / |v| and its Jacobian.
Vec3 friction_direction(const Vec3& v, double nu_slip, Mat3* jac = nullptr);

struct ContactParams {
  double r0 = 1e-3;            // rod radius
  double h = 1e-3;             // shell thickness; shell edges use h in place of 2 r0
  double delta = 1e-4;
  double k_c = 1.0;
  double mu = 0.0;
  double nu_slip = 1e-3;
  bool friction_fd_jacobian = false;
};

struct ContactEdge {
  std::array<int, 2> nodes{};
  double radius = 0.0;
};

struct ContactPair {
  int i = -1, j = -1;           // indices into the contact-edge list
  std::array<int, 4> nodes{};   // a, b, c, d
  SegmentDistance closest;
};

std::vector<ContactEdge> contact_edges(const MeshTopology& topo, const ContactParams& params);

// Candidate pairs of non-adjacent edges whose padded boxes overlap; a
// superset of the pairs with distance < radius_i + radius_j + cutoff.
// Sorted by (i, j).
std::vector<ContactPair> broadphase(const std::vector<ContactEdge>& edges, const VecX& q, double cutoff);

struct PairForce {
  Eigen::Matrix<double, 12, 1> force = Eigen::Matrix<double, 12, 1>::Zero();
  Eigen::Matrix<double, 12, 12> jacobian = Eigen::Matrix<double, 12, 12>::Zero();  // dF/dx
  double energy = 0.0;
};

// Penalty force and its Jacobian for one pair at positions x[4].
PairForce contact_force(const std::array<Vec3, 4>& x, double d0, const ContactParams& params);

// Friction force on the pair. Velocities are (x - x_ref) * vel_scale.
PairForce friction_force(const std::array<Vec3, 4>& x, const std::array<Vec3, 4>& x_ref, double vel_scale,
                         double d0, const ContactParams& params);

class SelfContact {
 public:
  SelfContact(const MeshTopology& topo, ContactParams params);

  // Adds contact and friction forces to F and dF/dq triplets.
  void assemble(const VecX& q, const VecX& q_ref, double vel_scale, VecX& F, std::vector<Triplet>* dF) const;

  // Smallest gap Delta - d0 over all candidate pairs (infinity if none).
  double min_gap(const VecX& q) const;

  const ContactParams& params() const { return params_; }
  const std::vector<ContactEdge>& edges() const { return edges_; }

 private:
  ContactParams params_;
  std::vector<ContactEdge> edges_;
};

}  // namespace dismech
