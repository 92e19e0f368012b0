#pragma once

#include <functional>

#include "dismech/contact.hpp"

namespace dismech {

// Nodal velocities inside a solve are (q - q_ref) * vel_scale, so dissipative
// force Jacobians carry a factor vel_scale.
struct ForceContext {
  const VecX& q;
  const VecX& q_ref;
  double vel_scale = 0.0;
  double time = 0.0;

  Vec3 velocity(int node) const { return (node_position(q, node) - node_position(q_ref, node)) * vel_scale; }
};

struct FloorParams {
  bool enabled = false;
  double k_c = 1.0;
  double delta = 1e-4;
  double mu = 0.0;
  double nu_slip = 1e-3;
  Vec3 normal = Vec3::UnitZ();
  double height = 0.0;
};

struct SphereObstacle {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double k_c = 1.0;
  double delta = 1e-4;
  double mu = 0.0;
  double nu_slip = 1e-3;
};

struct EnvironmentParams {
  Vec3 g = Vec3::Zero();
  double rho_med = 0.0;
  FloorParams floor;
  double eta = 0.0;
  double C_t = 0.0, C_n = 0.0;
  double C_D = 0.0;
  std::vector<SphereObstacle> obstacles;
};

// F = m g (rho - rho_med) / rho
Vec3 gravity_buoyancy(double mass, double rho, double rho_med, const Vec3& g);

// Per-DOF buoyancy-corrected mass: rod and shell shares scaled by
// (rho - rho_med) / rho of their own density; point masses are not scaled.
VecX buoyant_mass(const MeshTopology& topo, const Material& mat, const DofLayout& layout, double rho_med,
                  const std::vector<std::pair<int, double>>& point_masses);

// Floor penalty on one node; dFdx = dF/dx.
Vec3 floor_contact(const Vec3& x, const FloorParams& p, Mat3* dFdx = nullptr);

// Regularized Coulomb friction on one node sliding on the floor with
// velocity v = (x - x_ref) * vel_scale.
Vec3 floor_friction(const Vec3& x, const Vec3& v, double vel_scale, const FloorParams& p, Mat3* dFdx = nullptr);

// F = -eta dl v
Vec3 viscous_force(const Vec3& v, double eta, double dl, double vel_scale, Mat3* dFdx = nullptr);

// Resistive force of one edge (rest length l) on both of its nodes.
// Local order [x0, x1].
Eigen::Matrix<double, 6, 1> rft_edge_force(const Vec3& x0, const Vec3& x1, const Vec3& v0, const Vec3& v1,
                                           double rest_length, double C_t, double C_n, double vel_scale,
                                           Eigen::Matrix<double, 6, 6>* dFdx = nullptr);

// Quadratic normal drag of one triangle (rest area A) on its three nodes.
Eigen::Matrix<double, 9, 1> drag_triangle_force(const std::array<Vec3, 3>& x, const std::array<Vec3, 3>& v,
                                                double rest_area, double rho_med, double C_D, double vel_scale,
                                                Eigen::Matrix<double, 9, 9>* dFdx = nullptr);

// Penalty and friction of an edge of radius r against a fixed sphere.
// x_ref gives the velocity as for the other dissipative forces.
Eigen::Matrix<double, 6, 1> sphere_edge_force(const Vec3& x0, const Vec3& x1, const Vec3& x0_ref,
                                              const Vec3& x1_ref, double vel_scale, double radius,
                                              const SphereObstacle& s, Eigen::Matrix<double, 6, 6>* dFdx = nullptr);

// Surface gap between an edge of radius r and the sphere.
double sphere_edge_gap(const Vec3& x0, const Vec3& x1, double radius, const SphereObstacle& s);

// Returns the force on every DOF; may append dF/dq entries when J is non-null.
using CustomForce = std::function<VecX(const VecX& q, const VecX& u, double t, std::vector<Triplet>* J)>;

class Environment {
 public:
  Environment(const MeshTopology& topo, const Material& mat, const DofLayout& layout, EnvironmentParams params,
              const std::vector<std::pair<int, double>>& point_masses = {});

  // Adds every external force at ctx to F and its dF/dq entries to dF.
  // Gravity and custom forces are multiplied by load_scale.
  void assemble(const ForceContext& ctx, double load_scale, VecX& F, std::vector<Triplet>* dF) const;

  // Rejects callbacks whose output length differs from the DOF count,
  // probing once at (q, u).
  int register_custom_force(CustomForce f, const VecX& q, const VecX& u);

  double min_floor_gap(const VecX& q) const;
  double min_obstacle_gap(const VecX& q) const;

  const EnvironmentParams& params() const { return params_; }
  const VecX& gravity_force() const { return gravity_; }

 private:
  MeshTopology topo_;
  int dofs_;
  EnvironmentParams params_;
  VecX gravity_;
  std::vector<double> voronoi_;
  std::vector<double> rod_rest_length_;
  std::vector<double> tri_rest_area_;
  std::vector<ContactEdge> edges_;
  std::vector<CustomForce> custom_;
};

}  // namespace dismech
