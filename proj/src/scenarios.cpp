#include "dismech/scenarios.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <random>

namespace dismech {

Scenario instantiate(const ScenarioFiles& files) { return build_scenario(files.geometry, files.config); }

void export_scenario(const ScenarioFiles& files, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_geometry((std::filesystem::path(dir) / "geometry.txt").string(), files.geometry);
  std::ofstream out(std::filesystem::path(dir) / "config.txt");
  if (!out) throw std::runtime_error("cannot write into '" + dir + "'");
  out << "# " << files.name << '\n' << files.config.serialize();
}

// ---------------------------------------------------------------- meshes

const std::vector<MeshFamily>& all_mesh_families() {
  static const std::vector<MeshFamily> f = {MeshFamily::Equilateral, MeshFamily::Random, MeshFamily::RightIsosceles,
                                            MeshFamily::EquilateralAligned, MeshFamily::NonUniform};
  return f;
}

std::string family_name(MeshFamily f) {
  switch (f) {
    case MeshFamily::Equilateral: return "equilateral";
    case MeshFamily::Random: return "random";
    case MeshFamily::RightIsosceles: return "right-isosceles";
    case MeshFamily::EquilateralAligned: return "equilateral-aligned";
    case MeshFamily::NonUniform: return "non-uniform";
  }
  return "?";
}

MeshFamily parse_family(const std::string& name) {
  for (MeshFamily f : all_mesh_families())
    if (family_name(f) == name) return f;
  throw std::invalid_argument("unknown mesh family '" + name + "'");
}

void triangulate_band(const std::vector<int>& a, const std::vector<int>& b, const std::vector<double>& sa,
                      const std::vector<double>& sb, const std::vector<Vec3>& nodes,
                      std::vector<std::array<int, 3>>& out, const std::function<bool(int, int)>& advance_a_on_tie) {
  const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
  int i = 0, k = 0;
  while (i < na - 1 || k < nb - 1) {
    bool adv_a;
    if (k == nb - 1) adv_a = true;
    else if (i == na - 1) adv_a = false;
    else if (advance_a_on_tie) adv_a = advance_a_on_tie(i, k);
    else adv_a = sa[i + 1] <= sb[k + 1];
    std::array<int, 3> t = adv_a ? std::array<int, 3>{a[i], a[i + 1], b[k]} : std::array<int, 3>{a[i], b[k + 1], b[k]};
    if (adv_a) ++i;
    else ++k;
    const Vec3 p = nodes[t[1]] - nodes[t[0]], q = nodes[t[2]] - nodes[t[0]];
    if (p.x() * q.y() - p.y() * q.x() < 0.0) std::swap(t[1], t[2]);
    out.push_back(t);
  }
}

namespace {

// Row-wise strip: rows[j] holds the x coordinates of row j at height ys[j].
struct RowLayout {
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
};

StripMesh rows_to_mesh(const RowLayout& rl, double length, const std::vector<std::vector<double>>& jitter_y,
                       const std::function<bool(int, int, const std::vector<double>&, const std::vector<double>&)>& choose) {
  StripMesh m;
  std::vector<std::vector<int>> ids(rl.xs.size());
  for (std::size_t j = 0; j < rl.xs.size(); ++j)
    for (std::size_t i = 0; i < rl.xs[j].size(); ++i) {
      const double y = rl.ys[j] + (jitter_y.empty() ? 0.0 : jitter_y[j][i]);
      ids[j].push_back(static_cast<int>(m.geometry.nodes.size()));
      m.geometry.nodes.emplace_back(rl.xs[j][i], y, 0.0);
    }
  for (std::size_t j = 0; j + 1 < rl.xs.size(); ++j) {
    const auto& sa = rl.xs[j];
    const auto& sb = rl.xs[j + 1];
    std::function<bool(int, int)> pick;
    if (choose) pick = [&](int i, int k) { return choose(i, k, sa, sb); };
    triangulate_band(ids[j], ids[j + 1], sa, sb, m.geometry.nodes, m.geometry.triangles, pick);
  }
  for (int n = 0; n < static_cast<int>(m.geometry.nodes.size()); ++n) {
    const double x = m.geometry.nodes[n].x();
    if (x <= 1e-12) m.clamped.push_back(n);
    if (std::abs(x - length) <= 1e-12) m.tip.push_back(n);
  }
  return m;
}

int count_at_least(double v, int lo) { return std::max(lo, static_cast<int>(std::lround(v))); }

StripMesh equilateral_rows(double L, double b, double e) {
  const int ny = count_at_least(b / (e * std::sqrt(3.0) / 2.0), 2);
  const double dy = b / ny;
  const int n = count_at_least(L / (2.0 * dy / std::sqrt(3.0)), 2);
  const double sx = L / n;
  RowLayout rl;
  for (int j = 0; j <= ny; ++j) {
    rl.ys.push_back(-0.5 * b + j * dy);
    std::vector<double> xs;
    if (j % 2 == 0) {
      for (int i = -2; i <= n; ++i) xs.push_back(i * sx);
    } else {
      xs.push_back(-2.0 * sx);
      for (int i = -2; i < n; ++i) xs.push_back((i + 0.5) * sx);
      xs.push_back(L);
    }
    rl.xs.push_back(xs);
  }
  return rows_to_mesh(rl, L, {}, {});
}

StripMesh grid_rows(double L, double b, double e, bool random, std::uint64_t seed) {
  const int ny = count_at_least(b / e, 2);
  const double dy = b / ny;
  const int n = count_at_least(L / e, 2);
  const double sx = L / n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jit(-0.25, 0.25);
  RowLayout rl;
  std::vector<std::vector<double>> jy;
  for (int j = 0; j <= ny; ++j) {
    rl.ys.push_back(-0.5 * b + j * dy);
    std::vector<double> xs, ys;
    for (int i = -2; i <= n; ++i) {
      double x = i * sx;
      double y = 0.0;
      if (random) {
        // Clamp and tip columns keep their x; boundary rows keep their y.
        if (i > 0 && i < n) x += jit(rng) * sx;
        if (j > 0 && j < ny) y = jit(rng) * dy;
      }
      xs.push_back(x);
      ys.push_back(y);
    }
    rl.xs.push_back(xs);
    jy.push_back(ys);
  }
  if (!random) return rows_to_mesh(rl, L, {}, {});
  auto coin = std::make_shared<std::mt19937_64>(seed ^ 0x9e3779b97f4a7c15ULL);
  return rows_to_mesh(rl, L, jy, [coin, sx](int i, int k, const std::vector<double>& sa, const std::vector<double>& sb) {
    const double d = sa[i + 1] - sb[k + 1];
    if (std::abs(d) < 0.5 * sx) return ((*coin)() & 1ULL) != 0;
    return d < 0.0;
  });
}

StripMesh non_uniform_rows(double L, double b, double e) {
  const int ny = count_at_least(b / e, 2);
  const int n = count_at_least(L / e, 2);
  const double sx0 = L / n;
  std::vector<double> base;
  for (int i = 0; i <= n; ++i) base.push_back(L * std::pow(static_cast<double>(i) / n, 1.5));
  RowLayout rl;
  for (int j = 0; j <= ny; ++j) {
    const double t = static_cast<double>(j) / ny;
    rl.ys.push_back(-0.5 * b + b * (t < 0.5 ? 2.0 * t * t : 1.0 - 2.0 * (1.0 - t) * (1.0 - t)));
    std::vector<double> xs = {-2.0 * sx0, -sx0};
    for (int i = 0; i <= n; ++i) {
      double x = base[i];
      // Odd rows are sheared by 40% of the local spacing.
      if (j % 2 == 1 && i > 0 && i < n) x += 0.4 * (base[i + 1] - base[i]);
      xs.push_back(x);
    }
    rl.xs.push_back(xs);
  }
  return rows_to_mesh(rl, L, {}, {});
}

}  // namespace

// Columns along y at x positions xc; column c has evenly spaced nodes when
// offset[c] is false and half-shifted nodes plus both end points otherwise.
static void column_lattice(const std::vector<double>& xc, const std::vector<char>& offset, double y0, double y1,
                           int segments, Geometry& g, std::vector<std::vector<int>>& ids) {
  const double s = (y1 - y0) / segments;
  std::vector<std::vector<double>> ys(xc.size());
  ids.assign(xc.size(), {});
  for (std::size_t c = 0; c < xc.size(); ++c) {
    if (!offset[c]) {
      for (int j = 0; j <= segments; ++j) ys[c].push_back(y0 + j * s);
    } else {
      ys[c].push_back(y0);
      for (int j = 0; j < segments; ++j) ys[c].push_back(y0 + (j + 0.5) * s);
      ys[c].push_back(y1);
    }
    for (double y : ys[c]) {
      ids[c].push_back(static_cast<int>(g.nodes.size()));
      g.nodes.emplace_back(xc[c], y, 0.0);
    }
  }
  for (std::size_t c = 0; c + 1 < xc.size(); ++c)
    triangulate_band(ids[c], ids[c + 1], ys[c], ys[c + 1], g.nodes, g.triangles);
}

StripMesh strip_mesh(MeshFamily family, double L, double b, double e, std::uint64_t seed) {
  if (!(L > 0.0 && b > 0.0 && e > 0.0)) throw std::invalid_argument("strip dimensions must be positive");
  switch (family) {
    case MeshFamily::Equilateral: return equilateral_rows(L, b, e);
    case MeshFamily::RightIsosceles: return grid_rows(L, b, e, false, seed);
    case MeshFamily::Random: return grid_rows(L, b, e, true, seed);
    case MeshFamily::NonUniform: return non_uniform_rows(L, b, e);
    case MeshFamily::EquilateralAligned: {
      const int segments = count_at_least(b / e, 2);
      const int n = count_at_least(L / (b / segments * std::sqrt(3.0) / 2.0), 2);
      const double dx = L / n;
      std::vector<double> xc;
      std::vector<char> off;
      for (int c = -2; c <= n; ++c) {
        xc.push_back(c * dx);
        off.push_back(static_cast<char>(std::abs(c) % 2));
      }
      StripMesh m;
      std::vector<std::vector<int>> ids;
      column_lattice(xc, off, -0.5 * b, 0.5 * b, segments, m.geometry, ids);
      for (int k = 0; k < static_cast<int>(m.geometry.nodes.size()); ++k) {
        if (m.geometry.nodes[k].x() <= 1e-12) m.clamped.push_back(k);
        if (std::abs(m.geometry.nodes[k].x() - L) <= 1e-12) m.tip.push_back(k);
      }
      return m;
    }
  }
  throw std::invalid_argument("unknown mesh family");
}

// ---------------------------------------------------------------- helpers

namespace {

Geometry straight_rod(const Vec3& start, const Vec3& end, int nodes) {
  Geometry g;
  for (int i = 0; i < nodes; ++i) g.nodes.push_back(start + (end - start) * (static_cast<double>(i) / (nodes - 1)));
  for (int i = 0; i + 1 < nodes; ++i) g.edges.push_back({i, i + 1});
  return g;
}

std::vector<int> range(int first, int last) {
  std::vector<int> v;
  for (int i = first; i <= last; ++i) v.push_back(i);
  return v;
}

void set_rod_material(Config& c, double rho, double E, double nu, double r0) {
  c.set("material.rho_rod", rho);
  c.set("material.E_rod", E);
  c.set("material.nu_rod", nu);
  c.set("material.r0", r0);
}

void set_shell_material(Config& c, double rho, double E, double nu, double h) {
  c.set("material.rho_shell", rho);
  c.set("material.E_shell", E);
  c.set("material.nu_shell", nu);
  c.set("material.h", h);
}

void set_dynamic(Config& c, double dt, double total, double tol, int log_every) {
  c.set("solver.dt", dt);
  c.set("solver.total_time", total);
  c.set("solver.tol", tol);
  c.set("log.every", std::to_string(log_every));
}

}  // namespace

// ---------------------------------------------------------------- validation

ScenarioFiles rod_cantilever(double E, int nodes, const CantileverGeometry& cg) {
  if (nodes < 4) throw std::invalid_argument("rod cantilever needs at least 4 nodes");
  ScenarioFiles f;
  f.name = "rod-cantilever";
  // The clamped first edge straddles x = 0, so the Voronoi cell of node 2
  // starts at the wall: (nodes - 1) dx = length + dx / 2.
  const double dx = cg.length / (nodes - 1.5);
  f.geometry = straight_rod(Vec3(-0.5 * dx, 0, 0), Vec3(cg.length, 0, 0), nodes);
  Config& c = f.config;
  set_rod_material(c, cg.rho, E, cg.nu, cg.r0);
  c.set("solver.static", "true");
  c.set("solver.tol", 1e-8);
  c.set("solver.max_iter", "50");
  c.set("env.gravity", format_vec3(Vec3(0, 0, -cg.g)));
  c.set("bc.fixed_nodes", "1 2");
  c.set("bc.fixed_theta", "1");
  c.set("log.nodes", std::to_string(nodes));
  return f;
}

ScenarioFiles shell_cantilever(MeshFamily family, ShellModel model, double E, double edge, std::uint64_t seed,
                               const CantileverGeometry& cg) {
  const StripMesh m = strip_mesh(family, cg.length, cg.width, edge, seed);
  ScenarioFiles f;
  f.name = "shell-cantilever-" + family_name(family);
  f.geometry = m.geometry;
  Config& c = f.config;
  c.set("model", model == ShellModel::Hinge ? "hinge" : "midedge");
  set_shell_material(c, cg.rho, E, cg.nu, cg.h);
  c.set("solver.static", "true");
  c.set("solver.tol", 1e-8);
  c.set("solver.max_iter", "50");
  c.set("env.gravity", format_vec3(Vec3(0, 0, -cg.g)));
  c.set("bc.fixed_nodes", format_indices(m.clamped));
  if (model == ShellModel::Midedge) {
    const MeshTopology topo = build_topology(m.geometry.nodes, {}, m.geometry.triangles);
    std::vector<char> clamped(topo.num_nodes(), 0);
    for (int n : m.clamped) clamped[n] = 1;
    std::vector<int> xi;
    for (int e = 0; e < topo.num_shell_edges(); ++e)
      if (clamped[topo.shell_edges[e].nodes[0]] && clamped[topo.shell_edges[e].nodes[1]]) xi.push_back(e);
    c.set("bc.fixed_xi", format_indices(xi));
  }
  c.set("log.nodes", format_indices(m.tip));
  return f;
}

// ---------------------------------------------------------------- showcases

ScenarioFiles pneunet(double curvature_per_m) {
  const int N = 21;
  const double L = 0.1, dl = L / (N - 1);
  ScenarioFiles f;
  f.name = "pneunet";
  f.geometry = straight_rod(Vec3::Zero(), Vec3(L, 0, 0), N);
  Config& c = f.config;
  set_rod_material(c, 1200.0, 2e10, 0.5, 1e-3);
  c.set("solver.static", "true");
  c.set("solver.tol", 1e-8);
  c.set("solver.max_iter", "60");
  c.set("env.gravity", "0 0 -9.8");
  c.set("bc.fixed_nodes", "1 2");
  c.set("bc.fixed_theta", "1");
  c.set("init.frame_m1", "0 0 1");
  // Discrete curvature is the physical curvature times the Voronoi length.
  c.set("actuation.bend.quantity", "kappa1");
  c.set("actuation.bend.nodes", format_indices(range(1, N - 2)));
  c.set("actuation.bend.samples", "0:" + format_double(curvature_per_m * dl));
  c.set("load.nodes", std::to_string(N));
  c.set("load.force", "175 0 7");
  c.set("log.nodes", std::to_string(N));
  return f;
}

ScenarioFiles earthworm(double mu) {
  ScenarioFiles f;
  f.name = "earthworm";
  f.geometry = straight_rod(Vec3::Zero(), Vec3(0.1, 0, 0), 3);
  Config& c = f.config;
  set_rod_material(c, 1200.0, 2e8, 0.5, 1e-3);
  set_dynamic(c, 1e-3, 2.0, 1e-10, 10);
  c.set("env.gravity", "0 0 -9.8");
  c.set("env.floor.enabled", "true");
  c.set("env.floor.k_c", 1000.0);
  c.set("env.floor.mu", mu);
  c.set("env.floor.delta", 1e-4);
  c.set("env.floor.nu_slip", 1e-4);
  // Each edge contracts for half a period. The front edge starts a quarter
  // period after the rear one; a half-period offset is mirror symmetric and
  // yields no net drift under isotropic friction.
  for (int e = 0; e < 2; ++e) {
    const std::string p = "actuation.edge" + std::to_string(e + 1) + ".";
    c.set(p + "quantity", "length");
    c.set(p + "springs", std::to_string(e + 1));
    c.set(p + "wave", "halfsine");
    c.set(p + "amplitude", -1e-3);
    c.set(p + "frequency", 1.0);
    c.set(p + "phase_start", e == 0 ? 0.0 : 1.5 * M_PI);
  }
  c.set("log.nodes", "1 3");
  return f;
}

// Appends the mirror image x -> -x of a mesh lying in x <= 0; nodes on
// x = 0 are shared. Mirrored triangles keep counter-clockwise winding.
static void mirror_about_x0(Geometry& g) {
  const int n = static_cast<int>(g.nodes.size());
  std::vector<int> image(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 p = g.nodes[i];
    if (p.x() == 0.0) {
      image[i] = i;
    } else {
      image[i] = static_cast<int>(g.nodes.size());
      g.nodes.emplace_back(-p.x(), p.y(), p.z());
    }
  }
  const std::size_t nt = g.triangles.size();
  for (std::size_t t = 0; t < nt; ++t) {
    const auto tri = g.triangles[t];
    g.triangles.push_back({image[tri[0]], image[tri[2]], image[tri[1]]});
  }
}

ScenarioFiles manta() {
  const int K = 4, segments = 7;
  const double half = 0.5;
  ScenarioFiles f;
  f.name = "manta";
  std::vector<double> xc;
  std::vector<char> off;
  for (int k = -K; k <= 0; ++k) {
    xc.push_back(half * k / K);
    off.push_back(static_cast<char>(std::abs(k) % 2));
  }
  std::vector<std::vector<int>> ids;
  column_lattice(xc, off, 0.0, 1.0, segments, f.geometry, ids);
  mirror_about_x0(f.geometry);
  const MeshTopology topo = build_topology(f.geometry.nodes, {}, f.geometry.triangles);
  const SpringSet springs = build_springs(topo, Material{}, ShellModel::Hinge);
  // Centerline hinges ordered from the leading edge (y = 1) to the trailing edge.
  std::vector<std::pair<double, int>> center;
  for (int i = 0; i < static_cast<int>(springs.hinges.size()); ++i) {
    const Vec3& a = topo.nodes[springs.hinges[i].nodes[0]];
    const Vec3& b = topo.nodes[springs.hinges[i].nodes[1]];
    if (a.x() == 0.0 && b.x() == 0.0) center.emplace_back(-(a.y() + b.y()), i);
  }
  std::sort(center.begin(), center.end());
  std::vector<int> hinge_ids;
  for (const auto& [key, i] : center) hinge_ids.push_back(i);
  const int lead = ids[K].back();

  Config& c = f.config;
  set_shell_material(c, 1057.0, 6e9, 0.3, 1e-3);
  set_dynamic(c, 1e-3, 1.0, 1e-8, 10);
  c.set("env.gravity", "0 0 -9.8");
  c.set("env.rho_med", 1000.0);
  c.set("env.drag.CD", 0.5);
  std::string list;
  for (int i : hinge_ids) list += (list.empty() ? "" : " ") + std::to_string(i + 1);
  c.set("actuation.flap.quantity", "hinge");
  c.set("actuation.flap.springs", list);
  c.set("actuation.flap.wave", "sine");
  c.set("actuation.flap.amplitude", 2.0 * M_PI / 3.0);
  c.set("actuation.flap.frequency", 3.4);
  c.set("actuation.flap.phase_start", 0.0);
  c.set("actuation.flap.phase_end", -M_PI);
  c.set("log.nodes", std::to_string(lead + 1));
  return f;
}

ScenarioFiles snake(double C_t, double C_n) {
  const int N = 21;
  ScenarioFiles f;
  f.name = "snake";
  f.geometry = straight_rod(Vec3::Zero(), Vec3(0.1, 0, 0), N);
  Config& c = f.config;
  set_rod_material(c, 1200.0, 2e6, 0.5, 1e-3);
  set_dynamic(c, 1e-3, 2.0, 1e-10, 10);
  c.set("solver.planar", "true");
  c.set("env.rft.Ct", C_t);
  c.set("env.rft.Cn", C_n);
  c.set("init.frame_m1", "0 1 0");
  // sin(2 pi f t + k x) travels toward -x, so the body swims toward +x.
  c.set("actuation.wave.quantity", "kappa1");
  c.set("actuation.wave.nodes", format_indices(range(1, N - 2)));
  c.set("actuation.wave.wave", "sine");
  c.set("actuation.wave.amplitude", 0.05);
  c.set("actuation.wave.frequency", 1.0);
  c.set("actuation.wave.phase_start", 0.0);
  c.set("actuation.wave.phase_end", 2.0 * M_PI);
  c.set("log.nodes", std::to_string(N) + " 1");
  return f;
}

ScenarioFiles parachute() {
  const int n = 4, rope_edges = 3;
  const double drop = 1.0;
  ScenarioFiles f;
  f.name = "parachute";
  Geometry& g = f.geometry;
  const Vec3 u(1.0 / n, 0, 0), v(0.5 / n, std::sqrt(3.0) / (2.0 * n), 0);
  std::map<std::pair<int, int>, int> id;
  auto inside = [&](int a, int b) { return std::abs(a) <= n && std::abs(b) <= n && std::abs(a + b) <= n; };
  for (int b = -n; b <= n; ++b)
    for (int a = -n; a <= n; ++a)
      if (inside(a, b)) {
        id[{a, b}] = static_cast<int>(g.nodes.size());
        g.nodes.push_back(a * u + b * v);
      }
  for (int b = -n; b <= n; ++b)
    for (int a = -n; a <= n; ++a) {
      if (inside(a, b) && inside(a + 1, b) && inside(a, b + 1)) g.triangles.push_back({id[{a, b}], id[{a + 1, b}], id[{a, b + 1}]});
      if (inside(a + 1, b) && inside(a + 1, b + 1) && inside(a, b + 1))
        g.triangles.push_back({id[{a + 1, b}], id[{a + 1, b + 1}], id[{a, b + 1}]});
    }
  const int payload = static_cast<int>(g.nodes.size());
  g.nodes.emplace_back(0.0, 0.0, -drop);
  const std::array<std::pair<int, int>, 6> corners = {{{n, 0}, {0, n}, {-n, n}, {-n, 0}, {0, -n}, {n, -n}}};
  for (const auto& cr : corners) {
    const int top = id[cr];
    int prev = top;
    for (int k = 1; k < rope_edges; ++k) {
      const double s = static_cast<double>(k) / rope_edges;
      const int nid = static_cast<int>(g.nodes.size());
      g.nodes.push_back((1.0 - s) * g.nodes[top] + s * g.nodes[payload]);
      g.edges.push_back({prev, nid});
      prev = nid;
    }
    g.edges.push_back({prev, payload});
  }
  Config& c = f.config;
  set_rod_material(c, 1500.0, 1e7, 0.5, 1e-3);
  set_shell_material(c, 1500.0, 1e9, 0.3, 1e-3);
  set_dynamic(c, 1e-3, 1.0, 1e-8, 10);
  c.set("env.gravity", "0 0 -9.8");
  c.set("env.rho_med", 1.0);
  c.set("env.drag.CD", 10.0);
  c.set("mass.nodes", std::to_string(payload + 1));
  c.set("mass.value", 0.13);
  c.set("log.nodes", std::to_string(id[{0, 0}] + 1) + " " + std::to_string(payload + 1));
  return f;
}

ScenarioFiles rod_drop(double E) {
  const int N = 21;
  const double L = 0.1, tilt = 15.0 * M_PI / 180.0;
  ScenarioFiles f;
  f.name = "rod-drop";
  f.geometry = straight_rod(Vec3(0, 0, 0.05), Vec3(L * std::cos(tilt), 0, 0.05 + L * std::sin(tilt)), N);
  Config& c = f.config;
  set_rod_material(c, 1500.0, E, 0.3, 1e-3);
  set_dynamic(c, 5e-4, 0.4, 1e-10, 1);
  c.set("env.gravity", "0 0 -9.8");
  c.set("env.floor.enabled", "true");
  c.set("env.floor.k_c", 20.0);
  c.set("env.floor.mu", 0.25);
  c.set("env.floor.delta", 5e-3);
  c.set("env.floor.nu_slip", 1e-3);
  c.set("log.nodes", "1 " + std::to_string(N));
  return f;
}

ScenarioFiles gripper(bool contact) {
  const int N = 11;
  ScenarioFiles f;
  f.name = "gripper";
  f.geometry = straight_rod(Vec3::Zero(), Vec3(0.1, 0, 0), N);
  Config& c = f.config;
  set_rod_material(c, 1200.0, 2e8, 0.5, 1e-3);
  set_dynamic(c, 1e-3, 1.5, 1e-10, 10);
  c.set("bc.fixed_nodes", "1 2");
  c.set("bc.fixed_theta", "1");
  c.set("init.frame_m1", "0 0 1");
  c.set("env.sphere.center", "0.1 0 0.05");
  c.set("env.sphere.radius", 0.03);
  c.set("env.sphere.k_c", 20.0);
  c.set("env.sphere.mu", 0.25);
  c.set("env.sphere.delta", 5e-3);
  c.set("env.sphere.nu_slip", 1e-3);
  c.set("env.sphere.enabled", contact ? "true" : "false");
  // Springs centered at x > 0.025 (the final three quarters).
  c.set("actuation.grip.quantity", "kappa1");
  c.set("actuation.grip.nodes", "4-10");
  c.set("actuation.grip.samples", "0:0 1:0.1886");
  c.set("log.nodes", std::to_string(N));
  return f;
}

std::vector<ScenarioFiles> showcase_scenarios() {
  return {pneunet(), earthworm(), manta(), snake(), parachute(), rod_drop(), gripper()};
}

}  // namespace dismech
