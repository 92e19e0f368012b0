#include "dismech/springs.hpp"

#include <set>

#include "dismech/frames.hpp"
#include "dismech/shell_energy.hpp"

namespace dismech {

std::vector<int> DofLayout::free_indices() const {
  std::vector<int> idx;
  idx.reserve(fixed.size());
  for (int i = 0; i < static_cast<int>(fixed.size()); ++i)
    if (!fixed[i]) idx.push_back(i);
  return idx;
}

DofLayout make_layout(const MeshTopology& topo, ShellModel model) {
  DofLayout l;
  l.n_nodes = topo.num_nodes();
  l.n_theta = topo.num_frame_edges();
  l.n_xi = model == ShellModel::Midedge ? topo.num_shell_edges() : 0;
  l.fixed.assign(l.size(), 0);
  return l;
}

namespace {

VecX positions(const MeshTopology& topo) {
  VecX q(3 * topo.num_nodes());
  for (int i = 0; i < topo.num_nodes(); ++i) q.segment<3>(3 * i) = topo.nodes[i];
  return q;
}

double frame_edge_length(const MeshTopology& topo, int i) {
  const auto& e = topo.frame_edges[i];
  return (topo.nodes[e[1]] - topo.nodes[e[0]]).norm();
}

}  // namespace

SpringSet build_springs(const MeshTopology& topo, const Material& mat, ShellModel model) {
  if (mat.E_rod <= 0.0 || mat.E_shell <= 0.0) throw std::invalid_argument("moduli must be positive");
  SpringSet s;
  s.model = model;

  std::set<std::array<int, 2>> rod_keys;
  for (const auto& e : topo.rod_edges) {
    rod_keys.insert({std::min(e[0], e[1]), std::max(e[0], e[1])});
    StretchSpring sp;
    sp.nodes = e;
    sp.rest_length = (topo.nodes[e[1]] - topo.nodes[e[0]]).norm();
    sp.ks = mat.E_rod * rod_area(mat.r0);
    s.stretch.push_back(sp);
  }
  for (const auto& se : topo.shell_edges) {
    if (rod_keys.count(se.nodes)) continue;
    StretchSpring sp;
    sp.nodes = se.nodes;
    sp.rest_length = (topo.nodes[se.nodes[1]] - topo.nodes[se.nodes[0]]).norm();
    sp.ks = shell_stretch_stiffness(mat.E_shell, mat.h, sp.rest_length);
    sp.shell = true;
    s.stretch.push_back(sp);
  }

  std::vector<std::vector<int>> incident(topo.num_nodes());
  for (int i = 0; i < topo.num_frame_edges(); ++i) {
    incident[topo.frame_edges[i][0]].push_back(i);
    incident[topo.frame_edges[i][1]].push_back(i);
  }
  const double EI = mat.E_rod * rod_inertia(mat.r0);
  const double GJ = shear_modulus(mat.E_rod, mat.nu_rod) * rod_polar_inertia(mat.r0);
  for (int c = 0; c < topo.num_nodes(); ++c) {
    const auto& inc = incident[c];
    for (std::size_t i = 0; i < inc.size(); ++i) {
      for (std::size_t j = i + 1; j < inc.size(); ++j) {
        const auto& ea = topo.frame_edges[inc[i]];
        const auto& eb = topo.frame_edges[inc[j]];
        BendTwistSpring sp;
        sp.edges = {inc[i], inc[j]};
        sp.sign[0] = ea[1] == c ? 1 : -1;
        sp.sign[1] = eb[0] == c ? 1 : -1;
        sp.nodes = {ea[0] == c ? ea[1] : ea[0], c, eb[0] == c ? eb[1] : eb[0]};
        sp.voronoi = 0.5 * (frame_edge_length(topo, inc[i]) + frame_edge_length(topo, inc[j]));
        sp.EI = EI;
        sp.GJ = GJ;
        s.bendtwist.push_back(sp);
      }
    }
  }

  if (topo.num_triangles() == 0) return s;
  const VecX x0 = positions(topo);
  if (model == ShellModel::Hinge) {
    const double kb = hinge_stiffness(mat.E_shell, mat.h);
    for (int e = 0; e < topo.num_shell_edges(); ++e) {
      const ShellEdge& se = topo.shell_edges[e];
      if (!se.interior()) continue;
      // First wing belongs to the triangle whose winding runs min -> max.
      const int first = se.owner_forward ? 0 : 1;
      HingeSpring h;
      h.shell_edge = e;
      h.nodes = {se.nodes[0], se.nodes[1], topo.triangles[se.triangles[first]][se.local[first]],
                 topo.triangles[se.triangles[1 - first]][se.local[1 - first]]};
      h.kb = kb;
      h.phi_bar = hinge_angle(topo.nodes[h.nodes[0]], topo.nodes[h.nodes[1]], topo.nodes[h.nodes[2]],
                              topo.nodes[h.nodes[3]]);
      s.hinges.push_back(h);
    }
  } else {
    FrameSet natural;
    snapshot_tau0(natural, topo, x0);
    const double kb = midedge_stiffness(mat.E_shell, mat.h, mat.nu_shell);
    for (int f = 0; f < topo.num_triangles(); ++f) {
      MidedgeElement el;
      el.triangle = f;
      el.nodes = topo.triangles[f];
      el.shell_edges = topo.triangle_edges[f];
      std::array<Vec3, 3> x;
      for (int k = 0; k < 3; ++k) {
        el.sign[k] = topo.shell_edges[el.shell_edges[k]].triangles[0] == f ? 1 : -1;
        x[k] = topo.nodes[el.nodes[k]];
      }
      for (int k = 0; k < 3; ++k) el.edge_length_bar[k] = (x[(k + 2) % 3] - x[(k + 1) % 3]).norm();
      el.area_bar = triangle_area(x[0], x[1], x[2]);
      el.kb = kb;
      el.nu = mat.nu_shell;
      el.lambda_bar = midedge_shape_operator(el, x, {0.0, 0.0, 0.0}, midedge_local_tau(el, natural));
      s.midedge.push_back(el);
    }
  }
  return s;
}

VecX lumped_mass(const MeshTopology& topo, const Material& mat, const DofLayout& layout) {
  if (topo.num_rod_edges() == 0 && topo.num_triangles() == 0)
    throw std::invalid_argument("lumped mass of a topology without edges or triangles");
  if (mat.rho_rod <= 0.0 || mat.rho_shell <= 0.0 || mat.r0 <= 0.0 || mat.h <= 0.0)
    throw std::invalid_argument("densities, r0 and h must be positive");
  VecX m = VecX::Zero(layout.size());
  const double line_density = mat.rho_rod * rod_area(mat.r0);
  for (const auto& e : topo.rod_edges) {
    const double half = 0.5 * line_density * (topo.nodes[e[1]] - topo.nodes[e[0]]).norm();
    for (int k = 0; k < 3; ++k) {
      m[layout.pos(e[0], k)] += half;
      m[layout.pos(e[1], k)] += half;
    }
  }
  std::vector<double> tri_mass(topo.triangles.size());
  for (std::size_t f = 0; f < topo.triangles.size(); ++f) {
    const auto& t = topo.triangles[f];
    tri_mass[f] = mat.rho_shell * mat.h * triangle_area(topo.nodes[t[0]], topo.nodes[t[1]], topo.nodes[t[2]]);
    for (int v : t)
      for (int k = 0; k < 3; ++k) m[layout.pos(v, k)] += tri_mass[f] / 3.0;
  }
  for (int i = 0; i < topo.num_frame_edges(); ++i) {
    const auto& e = topo.frame_edges[i];
    const double edge_mass = line_density * (topo.nodes[e[1]] - topo.nodes[e[0]]).norm();
    m[layout.theta(i)] = edge_mass * mat.r0 * mat.r0 / 2.0;
  }
  for (int s = 0; s < layout.n_xi; ++s) {
    const ShellEdge& se = topo.shell_edges[s];
    const double avg = se.interior() ? 0.5 * (tri_mass[se.triangles[0]] + tri_mass[se.triangles[1]])
                                     : tri_mass[se.triangles[0]];
    m[layout.xi(s)] = avg * mat.h * mat.h / 12.0;
  }
  for (int i = 0; i < 3 * layout.n_nodes; ++i)
    if (!(m[i] > 0.0))
      throw std::invalid_argument("node " + std::to_string(i / 3 + 1) + " carries no mass (isolated node)");
  return m;
}

void add_point_mass(VecX& mass, int node, double m) {
  for (int k = 0; k < 3; ++k) mass[3 * node + k] += m;
}

}  // namespace dismech
