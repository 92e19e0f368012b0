#pragma once

#include "dismech/mesh.hpp"

namespace dismech {

enum class ShellModel { Hinge, Midedge };

struct Material {
  double rho_rod = 1200.0;
  double rho_shell = 1200.0;
  double E_rod = 1e7;
  double E_shell = 1e7;
  double nu_rod = 0.5;
  double nu_shell = 0.5;
  double r0 = 1e-3;
  double h = 1e-3;
};

struct StretchSpring {
  std::array<int, 2> nodes{};
  double rest_length = 0.0;
  double ks = 0.0;
  bool shell = false;
  int tag = 0;
};

// Stencil x0 -e-> x1 -f-> x2. sign[a] = -1 when the stored frame edge runs
// against the stencil direction; its d1, m1, t and theta are negated.
struct BendTwistSpring {
  std::array<int, 3> nodes{};
  std::array<int, 2> edges{};
  std::array<int, 2> sign{1, 1};
  double voronoi = 0.0;
  Eigen::Vector2d kappa_bar = Eigen::Vector2d::Zero();
  double twist_bar = 0.0;
  double EI = 0.0;
  double GJ = 0.0;
  int tag = 0;
};

// Shared edge nodes[0] -> nodes[1] (min -> max), wings nodes[2] and nodes[3].
struct HingeSpring {
  std::array<int, 4> nodes{};
  int shell_edge = -1;
  double phi_bar = 0.0;
  double kb = 0.0;
  int tag = 0;
};

struct MidedgeElement {
  int triangle = -1;
  std::array<int, 3> nodes{};
  std::array<int, 3> shell_edges{};
  std::array<int, 3> sign{};               // ownership: +1 owner, -1 otherwise
  double area_bar = 0.0;
  std::array<double, 3> edge_length_bar{};
  Mat3 lambda_bar = Mat3::Zero();
  double kb = 0.0;
  double nu = 0.0;
};

struct SpringSet {
  std::vector<StretchSpring> stretch;
  std::vector<BendTwistSpring> bendtwist;
  std::vector<HingeSpring> hinges;
  std::vector<MidedgeElement> midedge;
  ShellModel model = ShellModel::Hinge;
};

struct DofLayout {
  int n_nodes = 0;
  int n_theta = 0;
  int n_xi = 0;
  std::vector<char> fixed;

  int size() const { return 3 * n_nodes + n_theta + n_xi; }
  int pos(int node, int c = 0) const { return 3 * node + c; }
  int theta(int frame_edge) const { return 3 * n_nodes + frame_edge; }
  int xi(int shell_edge) const { return 3 * n_nodes + n_theta + shell_edge; }
  std::vector<int> free_indices() const;
};

DofLayout make_layout(const MeshTopology& topo, ShellModel model);

SpringSet build_springs(const MeshTopology& topo, const Material& mat, ShellModel model);

VecX lumped_mass(const MeshTopology& topo, const Material& mat, const DofLayout& layout);

void add_point_mass(VecX& mass, int node, double m);

// Section constants for a solid circular rod of radius r0.
inline double rod_area(double r0) { return M_PI * r0 * r0; }
inline double rod_inertia(double r0) { return M_PI * r0 * r0 * r0 * r0 / 4.0; }
inline double rod_polar_inertia(double r0) { return M_PI * r0 * r0 * r0 * r0 / 2.0; }
inline double shear_modulus(double E, double nu) { return E / (2.0 * (1.0 + nu)); }
inline double shell_stretch_stiffness(double E, double h, double rest_length) {
  return std::sqrt(3.0) / 4.0 * E * h * rest_length;
}
// Dihedral stiffness whose continuum limit on an equilateral lattice is the
// plate rigidity E h^3 / 12 under cylindrical bending.
inline double hinge_stiffness(double E, double h) { return 2.0 * E * h * h * h / (12.0 * std::sqrt(3.0)); }
inline double midedge_stiffness(double E, double h, double nu) {
  return E * h * h * h / (24.0 * (1.0 - nu * nu));
}

}  // namespace dismech
