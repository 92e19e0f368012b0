#include "dismech/frames.hpp"

#include <deque>

namespace dismech {

Vec3 parallel_transport(const Vec3& v, const Vec3& t_from, const Vec3& t_to) {
  const double c = t_from.dot(t_to);
  if (1.0 + c < 1e-12) throw AntiparallelTransport("parallel transport between antiparallel tangents");
  const Vec3 b = t_from.cross(t_to);
  return c * v + b.cross(v) + (b.dot(v) / (1.0 + c)) * b;
}

Vec3 perpendicular_seed(const Vec3& t) {
  int axis = 0;
  t.cwiseAbs().minCoeff(&axis);
  Vec3 e = Vec3::Unit(axis);
  Vec3 p = e - e.dot(t) * t;
  return p.normalized();
}

Vec3 transport_robust(const Vec3& v, const Vec3& t_from, const Vec3& t_to) {
  if (1.0 + t_from.dot(t_to) >= 1e-6) return parallel_transport(v, t_from, t_to);
  Vec3 mid = perpendicular_seed(t_from);
  mid = (mid - mid.dot(t_to) * t_to).normalized();
  return parallel_transport(parallel_transport(v, t_from, mid), mid, t_to);
}

double signed_angle(const Vec3& u, const Vec3& v, const Vec3& axis) {
  return std::atan2(u.cross(v).dot(axis), u.dot(v));
}

Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return c * v + s * axis.cross(v) + (1.0 - c) * axis.dot(v) * axis;
}

OrientedFrame oriented_frame(const FrameSet& frames, int edge, int sign, double theta) {
  OrientedFrame f;
  const double s = sign;
  f.t = s * frames.tangent[edge];
  f.d1 = s * frames.d1[edge];
  f.d2 = frames.d2[edge];
  f.theta = s * theta;
  const double c = std::cos(f.theta), sn = std::sin(f.theta);
  f.m1 = c * f.d1 + sn * f.d2;
  f.m2 = -sn * f.d1 + c * f.d2;
  return f;
}

Vec3 edge_tangent(const MeshTopology& topo, const VecX& q, int frame_edge) {
  const auto& e = topo.frame_edges[frame_edge];
  const Vec3 d = node_position(q, e[1]) - node_position(q, e[0]);
  const double len = d.norm();
  if (!(len > 0.0)) throw SingularConfiguration("frame edge " + std::to_string(frame_edge + 1) + " has zero length");
  return d / len;
}

namespace {

void orthonormalize(FrameSet& f, int i) {
  Vec3 d1 = f.d1[i] - f.d1[i].dot(f.tangent[i]) * f.tangent[i];
  f.d1[i] = d1.normalized();
  f.d2[i] = f.tangent[i].cross(f.d1[i]);
}

}  // namespace

void update_material_frames(FrameSet& frames, const VecX& q, const DofLayout& layout) {
  const int ne = static_cast<int>(frames.tangent.size());
  frames.m1.resize(ne);
  frames.m2.resize(ne);
  for (int i = 0; i < ne; ++i) {
    const double th = q[layout.theta(i)];
    const double c = std::cos(th), s = std::sin(th);
    frames.m1[i] = c * frames.d1[i] + s * frames.d2[i];
    frames.m2[i] = -s * frames.d1[i] + c * frames.d2[i];
  }
}

double reference_twist(const FrameSet& frames, const BendTwistSpring& sp) {
  const Vec3 ta = sp.sign[0] * frames.tangent[sp.edges[0]];
  const Vec3 tb = sp.sign[1] * frames.tangent[sp.edges[1]];
  const Vec3 da = sp.sign[0] * frames.d1[sp.edges[0]];
  const Vec3 db = sp.sign[1] * frames.d1[sp.edges[1]];
  return signed_angle(transport_robust(da, ta, tb), db, tb);
}

FrameSet init_reference_frames(const MeshTopology& topo, const std::vector<BendTwistSpring>& springs,
                               const VecX& q, const DofLayout& layout) {
  const int ne = topo.num_frame_edges();
  FrameSet f;
  f.tangent.resize(ne);
  f.d1.resize(ne);
  f.d2.resize(ne);
  for (int i = 0; i < ne; ++i) f.tangent[i] = edge_tangent(topo, q, i);

  std::vector<std::vector<int>> incident(topo.num_nodes());
  for (int i = 0; i < ne; ++i) {
    incident[topo.frame_edges[i][0]].push_back(i);
    incident[topo.frame_edges[i][1]].push_back(i);
  }
  std::vector<char> done(ne, 0);
  for (int root = 0; root < ne; ++root) {
    if (done[root]) continue;
    f.d1[root] = perpendicular_seed(f.tangent[root]);
    orthonormalize(f, root);
    done[root] = 1;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      for (int node : topo.frame_edges[cur]) {
        for (int nb : incident[node]) {
          if (done[nb]) continue;
          f.d1[nb] = transport_robust(f.d1[cur], f.tangent[cur], f.tangent[nb]);
          orthonormalize(f, nb);
          done[nb] = 1;
          queue.push_back(nb);
        }
      }
    }
  }
  update_material_frames(f, q, layout);
  f.ref_twist.resize(springs.size());
  for (std::size_t s = 0; s < springs.size(); ++s) f.ref_twist[s] = reference_twist(f, springs[s]);
  snapshot_tau0(f, topo, q);
  return f;
}

FrameSet time_update_frames(const FrameSet& prev, const MeshTopology& topo,
                            const std::vector<BendTwistSpring>& springs, const VecX& q,
                            const DofLayout& layout) {
  FrameSet f = prev;
  const int ne = topo.num_frame_edges();
  for (int i = 0; i < ne; ++i) {
    f.tangent[i] = edge_tangent(topo, q, i);
    f.d1[i] = transport_robust(prev.d1[i], prev.tangent[i], f.tangent[i]);
    orthonormalize(f, i);
  }
  update_material_frames(f, q, layout);
  for (std::size_t s = 0; s < springs.size(); ++s) {
    const auto& sp = springs[s];
    const Vec3 ta = sp.sign[0] * f.tangent[sp.edges[0]];
    const Vec3 tb = sp.sign[1] * f.tangent[sp.edges[1]];
    const Vec3 da = sp.sign[0] * f.d1[sp.edges[0]];
    const Vec3 db = sp.sign[1] * f.d1[sp.edges[1]];
    Vec3 u = transport_robust(da, ta, tb);
    u = rotate_about(u, tb, prev.ref_twist[s]);
    f.ref_twist[s] = prev.ref_twist[s] + signed_angle(u, db, tb);
  }
  return f;
}

Vec3 triangle_unit_normal(const VecX& q, const std::array<int, 3>& tri) {
  const Vec3 a = node_position(q, tri[0]), b = node_position(q, tri[1]), c = node_position(q, tri[2]);
  const Vec3 n = (b - a).cross(c - a);
  const double len = n.norm();
  if (!(len > 0.0)) throw SingularConfiguration("degenerate triangle");
  return n / len;
}

void snapshot_tau0(FrameSet& frames, const MeshTopology& topo, const VecX& q) {
  const int ns = topo.num_shell_edges();
  frames.n_avg.resize(ns);
  frames.tau0.resize(ns);
  for (int s = 0; s < ns; ++s) {
    const ShellEdge& se = topo.shell_edges[s];
    Vec3 n = triangle_unit_normal(q, topo.triangles[se.triangles[0]]);
    if (se.interior()) n += triangle_unit_normal(q, topo.triangles[se.triangles[1]]);
    n.normalize();
    Vec3 e = node_position(q, se.nodes[1]) - node_position(q, se.nodes[0]);
    if (!se.owner_forward) e = -e;
    frames.n_avg[s] = n;
    frames.tau0[s] = n.cross(e.normalized()).normalized();
  }
}

}  // namespace dismech
