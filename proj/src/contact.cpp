#include "dismech/contact.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_map>

namespace dismech {

using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Row12 = Eigen::Matrix<double, 1, 12>;
using Mat3x12 = Eigen::Matrix<double, 3, 12>;

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

bool is_free(double p) { return p > 0.0 && p < 1.0; }

// w = a + s u - c - t v and the sensitivities ds/dx, dt/dx of the closest
// point parameters over [a, b, c, d].
struct ClosestPointJet {
  Vec3 u, v, w, n;
  double dist = 0.0;
  Mat3x12 W = Mat3x12::Zero();
  Row12 ds = Row12::Zero();
  Row12 dt = Row12::Zero();
};

ClosestPointJet closest_point_jet(const std::array<Vec3, 4>& x, const SegmentDistance& sd) {
  ClosestPointJet j;
  j.u = x[1] - x[0];
  j.v = x[3] - x[2];
  j.w = x[0] + sd.s * j.u - x[2] - sd.t * j.v;
  j.dist = j.w.norm();
  if (!(j.dist > 0.0)) throw SingularConfiguration("intersecting contact segments");
  j.n = j.w / j.dist;
  const double wts[4] = {1.0 - sd.s, sd.s, -(1.0 - sd.t), -sd.t};
  for (int k = 0; k < 4; ++k) j.W.block<3, 3>(0, 3 * k) = wts[k] * Mat3::Identity();

  const bool s_free = is_free(sd.s), t_free = is_free(sd.t);
  // Rows of d(w.u) and d(w.v) with respect to x (parameter terms excluded).
  Row12 ru = j.u.transpose() * j.W, rv = j.v.transpose() * j.W;
  ru.segment<3>(0) -= j.w.transpose();
  ru.segment<3>(3) += j.w.transpose();
  rv.segment<3>(6) -= j.w.transpose();
  rv.segment<3>(9) += j.w.transpose();
  const double uu = j.u.squaredNorm(), vv = j.v.squaredNorm(), uv = j.u.dot(j.v);
  const double det = uv * uv - uu * vv;
  if (s_free && t_free && std::abs(det) > 1e-10 * uu * vv) {
    // [uu -uv; uv -vv] [ds; dt] = -[ru; rv]
    j.ds = (vv * ru - uv * rv) / det;
    j.dt = (uv * ru - uu * rv) / det;
  } else if (t_free && vv > 0.0) {
    j.dt = rv / vv;
  } else if (s_free && uu > 0.0) {
    j.ds = -ru / uu;
  }
  return j;
}

}  // namespace

SegmentDistance segment_distance(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 d1 = b - a, d2 = d - c, r = a - c;
  const double A = d1.squaredNorm(), E = d2.squaredNorm(), F = d2.dot(r);
  const double eps = 1e-300;
  SegmentDistance out;
  if (A <= eps && E <= eps) {
    out.s = out.t = 0.0;
  } else if (A <= eps) {
    out.s = 0.0;
    out.t = clamp01(F / E);
  } else {
    const double C = d1.dot(r);
    if (E <= eps) {
      out.t = 0.0;
      out.s = clamp01(-C / A);
    } else {
      const double B = d1.dot(d2);
      const double denom = A * E - B * B;
      out.s = denom > 1e-12 * A * E ? clamp01((B * F - C * E) / denom) : 0.0;
      out.t = (B * out.s + F) / E;
      if (out.t < 0.0) {
        out.t = 0.0;
        out.s = clamp01(-C / A);
      } else if (out.t > 1.0) {
        out.t = 1.0;
        out.s = clamp01((B - C) / A);
      }
    }
  }
  out.distance = ((a + out.s * d1) - (c + out.t * d2)).norm();
  return out;
}

void segment_distance_derivatives(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                                  const SegmentDistance& sd, Vec12& grad, Mat12& hess) {
  const ClosestPointJet j = closest_point_jet({a, b, c, d}, sd);
  const Mat3 P = Mat3::Identity() - j.n * j.n.transpose();
  grad = j.W.transpose() * j.n;
  Vec12 Ss = Vec12::Zero(), St = Vec12::Zero();
  Ss.segment<3>(0) = -j.n;
  Ss.segment<3>(3) = j.n;
  St.segment<3>(6) = j.n;
  St.segment<3>(9) = -j.n;
  const Mat3x12 dw = j.W + j.u * j.ds - j.v * j.dt;
  hess = j.W.transpose() * P * dw / j.dist + Ss * j.ds + St * j.dt;
}

SegmentDistance point_segment_distance(const Vec3& a, const Vec3& b, const Vec3& c) {
  SegmentDistance out;
  const Vec3 u = b - a;
  const double uu = u.squaredNorm();
  out.s = uu > 0.0 ? clamp01((c - a).dot(u) / uu) : 0.0;
  out.distance = (a + out.s * u - c).norm();
  return out;
}

void point_segment_distance_derivatives(const Vec3& a, const Vec3& b, const Vec3& c, const SegmentDistance& sd,
                                        Eigen::Matrix<double, 6, 1>& grad, Eigen::Matrix<double, 6, 6>& hess) {
  const Vec3 u = b - a;
  const Vec3 w = a + sd.s * u - c;
  const double dist = w.norm();
  if (!(dist > 0.0)) throw SingularConfiguration("point on contact segment");
  const Vec3 n = w / dist;
  const Mat3 P = Mat3::Identity() - n * n.transpose();
  Eigen::Matrix<double, 3, 6> W;
  W << (1.0 - sd.s) * Mat3::Identity(), sd.s * Mat3::Identity();
  Eigen::Matrix<double, 1, 6> ds = Eigen::Matrix<double, 1, 6>::Zero();
  if (is_free(sd.s)) {
    Eigen::Matrix<double, 1, 6> r = u.transpose() * W;
    r.segment<3>(0) -= w.transpose();
    r.segment<3>(3) += w.transpose();
    ds = -r / u.squaredNorm();
  }
  Eigen::Matrix<double, 6, 1> Ss;
  Ss << -n, n;
  grad = W.transpose() * n;
  hess = W.transpose() * P * (W + u * ds) / dist + Ss * ds;
}

PenaltyValue smooth_penalty(double gap, double delta) {
  PenaltyValue p;
  const double K1 = 15.0 / delta;
  const double z = -K1 * gap;
  const double y = (z > 30.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) / K1;
  const double sig = 1.0 / (1.0 + std::exp(-z));  // -dy/dgap
  p.energy = y * y;
  p.d1 = -2.0 * y * sig;
  p.d2 = 2.0 * sig * sig + 2.0 * y * K1 * sig * (1.0 - sig);
  return p;
}

PenaltyValue gap_penalty(double gap, double delta) {
  PenaltyValue p;
  if (gap <= -delta) {
    p.energy = gap * gap;
    p.d1 = 2.0 * gap;
    p.d2 = 2.0;
  } else if (gap < delta) {
    p = smooth_penalty(gap, delta);
  }
  return p;
}

PenaltyValue contact_energy(double distance, double d0, double delta) { return gap_penalty(distance - d0, delta); }

double friction_scale(double speed, double nu_slip) {
  const double K2 = 15.0 / nu_slip;
  return 2.0 / (1.0 + std::exp(-K2 * std::abs(speed))) - 1.0;
}

double friction_scale_derivative(double speed, double nu_slip) {
  const double K2 = 15.0 / nu_slip;
  const double e = std::exp(-K2 * std::abs(speed));
  return 2.0 * K2 * e / ((1.0 + e) * (1.0 + e));
}

Vec3 friction_direction(const Vec3& v, double nu_slip, Mat3* jac) {
  const double speed = v.norm();
  if (speed < 1e-300) {
    // gamma ~ (K2/2)|v| near zero, so g ~ (K2/2) v.
    if (jac) *jac = 0.5 * (15.0 / nu_slip) * Mat3::Identity();
    return Vec3::Zero();
  }
  const Vec3 uh = v / speed;
  const double g = friction_scale(speed, nu_slip);
  if (jac) {
    *jac = friction_scale_derivative(speed, nu_slip) * uh * uh.transpose() +
           (g / speed) * (Mat3::Identity() - uh * uh.transpose());
  }
  return g * uh;
}

std::vector<ContactEdge> contact_edges(const MeshTopology& topo, const ContactParams& params) {
  std::vector<ContactEdge> out;
  std::set<std::array<int, 2>> rod_keys;
  for (const auto& e : topo.rod_edges) {
    rod_keys.insert({std::min(e[0], e[1]), std::max(e[0], e[1])});
    out.push_back({e, params.r0});
  }
  for (const auto& se : topo.shell_edges)
    if (!rod_keys.count(se.nodes)) out.push_back({se.nodes, 0.5 * params.h});
  return out;
}

std::vector<ContactPair> broadphase(const std::vector<ContactEdge>& edges, const VecX& q, double cutoff) {
  std::vector<ContactPair> out;
  if (edges.size() < 2) return out;
  const int n = static_cast<int>(edges.size());
  std::vector<Vec3> lo(n), hi(n);
  double cell = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 a = node_position(q, edges[i].nodes[0]), b = node_position(q, edges[i].nodes[1]);
    const double pad = edges[i].radius + 0.5 * cutoff;
    lo[i] = a.cwiseMin(b).array() - pad;
    hi[i] = a.cwiseMax(b).array() + pad;
    cell = std::max(cell, (hi[i] - lo[i]).maxCoeff());
  }
  if (!(cell > 0.0) || !std::isfinite(cell)) throw SingularConfiguration("non-finite contact geometry");

  auto key = [](long long ix, long long iy, long long iz) {
    return (ix * 73856093LL) ^ (iy * 19349663LL) ^ (iz * 83492791LL);
  };
  std::unordered_map<long long, std::vector<int>> grid;
  std::vector<std::array<long long, 6>> range(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) {
      range[i][k] = static_cast<long long>(std::floor(lo[i][k] / cell));
      range[i][k + 3] = static_cast<long long>(std::floor(hi[i][k] / cell));
    }
    for (long long x = range[i][0]; x <= range[i][3]; ++x)
      for (long long y = range[i][1]; y <= range[i][4]; ++y)
        for (long long z = range[i][2]; z <= range[i][5]; ++z) grid[key(x, y, z)].push_back(i);
  }

  std::vector<std::pair<int, int>> cand;
  for (const auto& [k, list] : grid) {
    for (std::size_t p = 0; p < list.size(); ++p) {
      for (std::size_t r = p + 1; r < list.size(); ++r) {
        const int i = std::min(list[p], list[r]), j = std::max(list[p], list[r]);
        if (i == j) continue;
        const auto& ei = edges[i].nodes;
        const auto& ej = edges[j].nodes;
        if (ei[0] == ej[0] || ei[0] == ej[1] || ei[1] == ej[0] || ei[1] == ej[1]) continue;
        if ((lo[i].array() > hi[j].array()).any() || (lo[j].array() > hi[i].array()).any()) continue;
        cand.emplace_back(i, j);
      }
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  out.reserve(cand.size());
  for (const auto& [i, j] : cand) {
    ContactPair p;
    p.i = i;
    p.j = j;
    p.nodes = {edges[i].nodes[0], edges[i].nodes[1], edges[j].nodes[0], edges[j].nodes[1]};
    p.closest = segment_distance(node_position(q, p.nodes[0]), node_position(q, p.nodes[1]),
                                 node_position(q, p.nodes[2]), node_position(q, p.nodes[3]));
    out.push_back(p);
  }
  return out;
}

PairForce contact_force(const std::array<Vec3, 4>& x, double d0, const ContactParams& params) {
  PairForce out;
  const SegmentDistance sd = segment_distance(x[0], x[1], x[2], x[3]);
  const PenaltyValue pv = contact_energy(sd.distance, d0, params.delta);
  if (pv.d1 == 0.0 && pv.energy == 0.0) return out;
  Vec12 g;
  Mat12 H;
  segment_distance_derivatives(x[0], x[1], x[2], x[3], sd, g, H);
  out.energy = params.k_c * pv.energy;
  out.force = -params.k_c * pv.d1 * g;
  out.jacobian = -params.k_c * (pv.d2 * g * g.transpose() + pv.d1 * H);
  return out;
}

namespace {

Vec12 friction_only(const std::array<Vec3, 4>& x, const std::array<Vec3, 4>& x_ref, double vel_scale, double d0,
                    const ContactParams& params, Mat12* jac) {
  Vec12 F = Vec12::Zero();
  if (jac) jac->setZero();
  const SegmentDistance sd = segment_distance(x[0], x[1], x[2], x[3]);
  const PenaltyValue pv = contact_energy(sd.distance, d0, params.delta);
  if (pv.d1 == 0.0 || params.mu == 0.0) return F;
  const ClosestPointJet j = closest_point_jet(x, sd);
  std::array<Vec3, 4> vel;
  for (int k = 0; k < 4; ++k) vel[k] = (x[k] - x_ref[k]) * vel_scale;
  const Vec3 vrel = j.W * (Vec12() << vel[0], vel[1], vel[2], vel[3]).finished();
  const Mat3 P = Mat3::Identity() - j.n * j.n.transpose();
  const Vec3 vt = P * vrel;
  Mat3 Jg;
  const Vec3 g = friction_direction(vt, params.nu_slip, &Jg);
  const double omega[4] = {1.0 - sd.s, sd.s, 1.0 - sd.t, sd.t};
  const double side[4] = {1.0, 1.0, -1.0, -1.0};
  for (int k = 0; k < 4; ++k) F.segment<3>(3 * k) = -params.mu * side[k] * g * (-params.k_c * pv.d1 * omega[k]);
  if (!jac) return F;

  const Mat3x12 Dn = P * (j.W + j.u * j.ds - j.v * j.dt) / j.dist;
  const Mat3x12 Dvrel = vel_scale * j.W + (vel[1] - vel[0]) * j.ds - (vel[3] - vel[2]) * j.dt;
  const Mat3x12 Dvt = P * Dvrel - j.n.dot(vrel) * Dn - j.n * (vrel.transpose() * Dn);
  const Row12 dDelta = (j.W.transpose() * j.n).transpose();
  const Row12 domega[4] = {-j.ds, j.ds, -j.dt, j.dt};
  const Mat3x12 Dg = Jg * Dvt;
  for (int k = 0; k < 4; ++k) {
    const double mag = -params.k_c * pv.d1 * omega[k];
    const Row12 dmag = -params.k_c * (pv.d2 * omega[k] * dDelta + pv.d1 * domega[k]);
    jac->block<3, 12>(3 * k, 0) = -params.mu * side[k] * (Dg * mag + g * dmag);
  }
  return F;
}

}  // namespace

PairForce friction_force(const std::array<Vec3, 4>& x, const std::array<Vec3, 4>& x_ref, double vel_scale,
                         double d0, const ContactParams& params) {
  PairForce out;
  if (!params.friction_fd_jacobian) {
    out.force = friction_only(x, x_ref, vel_scale, d0, params, &out.jacobian);
    return out;
  }
  out.force = friction_only(x, x_ref, vel_scale, d0, params, nullptr);
  double scale = 0.0;
  for (const auto& p : x) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = 1e-7 * std::max(scale, 1e-3);
  for (int c = 0; c < 12; ++c) {
    std::array<Vec3, 4> xp = x, xm = x;
    xp[c / 3][c % 3] += eps;
    xm[c / 3][c % 3] -= eps;
    out.jacobian.col(c) = (friction_only(xp, x_ref, vel_scale, d0, params, nullptr) -
                           friction_only(xm, x_ref, vel_scale, d0, params, nullptr)) /
                          (2.0 * eps);
  }
  return out;
}

SelfContact::SelfContact(const MeshTopology& topo, ContactParams params)
    : params_(params), edges_(contact_edges(topo, params)) {
  if (!(params_.delta > 0.0)) throw std::invalid_argument("contact delta must be positive");
  if (params_.mu > 0.0 && !(params_.nu_slip > 0.0)) throw std::invalid_argument("slip tolerance must be positive");
}

void SelfContact::assemble(const VecX& q, const VecX& q_ref, double vel_scale, VecX& F,
                           std::vector<Triplet>* dF) const {
  for (const ContactPair& p : broadphase(edges_, q, params_.delta)) {
    const double d0 = edges_[p.i].radius + edges_[p.j].radius;
    if (p.closest.distance >= d0 + params_.delta) continue;
    std::array<Vec3, 4> x, xr;
    for (int k = 0; k < 4; ++k) {
      x[k] = node_position(q, p.nodes[k]);
      xr[k] = node_position(q_ref, p.nodes[k]);
    }
    PairForce pf = contact_force(x, d0, params_);
    if (params_.mu > 0.0 && vel_scale > 0.0) {
      const PairForce fr = friction_force(x, xr, vel_scale, d0, params_);
      pf.force += fr.force;
      pf.jacobian += fr.jacobian;
    }
    for (int a = 0; a < 4; ++a) {
      F.segment<3>(3 * p.nodes[a]) += pf.force.segment<3>(3 * a);
      if (!dF) continue;
      for (int b = 0; b < 4; ++b)
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) {
            const double v = pf.jacobian(3 * a + r, 3 * b + c);
            if (v != 0.0) dF->emplace_back(3 * p.nodes[a] + r, 3 * p.nodes[b] + c, v);
          }
    }
  }
}

double SelfContact::min_gap(const VecX& q) const {
  double best = std::numeric_limits<double>::infinity();
  for (const ContactPair& p : broadphase(edges_, q, params_.delta))
    best = std::min(best, p.closest.distance - edges_[p.i].radius - edges_[p.j].radius);
  return best;
}

}  // namespace dismech
