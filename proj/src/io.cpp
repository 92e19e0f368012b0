#include "dismech/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dismech {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  const auto p = s.find('#');
  return p == std::string::npos ? s : s.substr(0, p);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& tok, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(where + ": '" + tok + "' is not a number");
  }
  if (used != tok.size() || !std::isfinite(v)) throw ParseError(where + ": '" + tok + "' is not a finite number");
  return v;
}

long to_long(const std::string& tok, const std::string& where) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(where + ": '" + tok + "' is not an integer");
  }
  if (used != tok.size()) throw ParseError(where + ": '" + tok + "' is not an integer");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// ---------------------------------------------------------------- geometry

Geometry parse_geometry(std::istream& in, const std::string& source) {
  enum class Section { None, Nodes, Edges, Triangles } sec = Section::None;
  Geometry g;
  std::vector<std::pair<int, std::array<long, 3>>> tri_lines;
  std::vector<std::pair<int, std::array<long, 2>>> edge_lines;
  bool saw_nodes = false;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const std::string where = source + ":" + std::to_string(ln);
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s[0] == '*') {
      std::string name = s.substr(1);
      for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (name == "nodes") {
        sec = Section::Nodes;
        saw_nodes = true;
      } else if (name == "edges") {
        sec = Section::Edges;
      } else if (name == "triangles") {
        sec = Section::Triangles;
      } else {
        throw ParseError(where + ": unknown section '" + s + "'");
      }
      continue;
    }
    // Commas are accepted as separators.
    std::string t = s;
    for (auto& c : t)
      if (c == ',') c = ' ';
    const auto tok = split_ws(t);
    switch (sec) {
      case Section::None:
        throw ParseError(where + ": data before the first section header");
      case Section::Nodes:
        if (tok.size() != 3) throw ParseError(where + ": a node needs 3 coordinates");
        g.nodes.emplace_back(to_double(tok[0], where), to_double(tok[1], where), to_double(tok[2], where));
        break;
      case Section::Edges:
        if (tok.size() != 2) throw ParseError(where + ": an edge needs 2 node indices");
        edge_lines.push_back({ln, {to_long(tok[0], where), to_long(tok[1], where)}});
        break;
      case Section::Triangles:
        if (tok.size() != 3) throw ParseError(where + ": a triangle needs 3 node indices");
        tri_lines.push_back({ln, {to_long(tok[0], where), to_long(tok[1], where), to_long(tok[2], where)}});
        break;
    }
  }
  if (!saw_nodes || g.nodes.empty()) throw ParseError(source + ": no *Nodes section with at least one node");
  const long n = static_cast<long>(g.nodes.size());
  auto check = [&](long idx, int line_no) {
    if (idx < 1 || idx > n)
      throw ParseError(source + ":" + std::to_string(line_no) + ": node index " + std::to_string(idx) +
                       " out of range 1.." + std::to_string(n));
    return static_cast<int>(idx - 1);
  };
  for (const auto& [l, e] : edge_lines) g.edges.push_back({check(e[0], l), check(e[1], l)});
  for (const auto& [l, t] : tri_lines) g.triangles.push_back({check(t[0], l), check(t[1], l), check(t[2], l)});
  return g;
}

Geometry read_geometry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open geometry file '" + path + "'");
  return parse_geometry(in, path);
}

std::string serialize_geometry(const Geometry& g) {
  std::ostringstream os;
  os << "*Nodes\n";
  for (const auto& x : g.nodes) os << format_double(x.x()) << ' ' << format_double(x.y()) << ' ' << format_double(x.z()) << '\n';
  if (!g.edges.empty()) {
    os << "*Edges\n";
    for (const auto& e : g.edges) os << e[0] + 1 << ' ' << e[1] + 1 << '\n';
  }
  if (!g.triangles.empty()) {
    os << "*Triangles\n";
    for (const auto& t : g.triangles) os << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  return os.str();
}

void write_geometry(const std::string& path, const Geometry& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << serialize_geometry(g);
}

// ---------------------------------------------------------------- config

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  c.source_ = source;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    const std::string where = source + ":" + std::to_string(ln);
    if (eq == std::string::npos) throw ParseError(where + ": expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || key.find_first_of(" \t") != std::string::npos) throw ParseError(where + ": bad key '" + key + "'");
    if (c.values_.count(key)) throw ParseError(where + ": duplicate key '" + key + "'");
    c.values_[key] = value;
  }
  return c;
}

Config Config::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  return parse(in, path);
}

std::string Config::raw(const std::string& key) const {
  used_.insert(key);
  return values_.at(key);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

std::string Config::require_string(const std::string& key) const {
  if (!has(key)) throw ParseError(source_ + ": missing key '" + key + "'");
  return raw(key);
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? to_double(raw(key), source_ + ": " + key) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
  return has(key) ? static_cast<int>(to_long(raw(key), source_ + ": " + key)) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = raw(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParseError(source_ + ": " + key + ": '" + v + "' is not a boolean");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  if (!has(key)) return out;
  for (const auto& t : split_ws(raw(key))) out.push_back(to_double(t, source_ + ": " + key));
  return out;
}

Vec3 Config::get_vec3(const std::string& key, const Vec3& fallback) const {
  if (!has(key)) return fallback;
  const auto v = get_doubles(key);
  if (v.size() != 3) throw ParseError(source_ + ": " + key + " needs 3 numbers");
  return {v[0], v[1], v[2]};
}

std::vector<int> Config::get_indices(const std::string& key) const {
  std::vector<int> out;
  if (!has(key)) return out;
  const std::string where = source_ + ": " + key;
  for (const auto& t : split_ws(raw(key))) {
    const auto dash = t.find('-', 1);
    if (dash == std::string::npos) {
      const long i = to_long(t, where);
      if (i < 1) throw ParseError(where + ": indices are 1-based");
      out.push_back(static_cast<int>(i - 1));
    } else {
      const long a = to_long(t.substr(0, dash), where), b = to_long(t.substr(dash + 1), where);
      if (a < 1 || b < a) throw ParseError(where + ": bad range '" + t + "'");
      for (long i = a; i <= b; ++i) out.push_back(static_cast<int>(i - 1));
    }
  }
  return out;
}

std::vector<std::string> Config::tags(const std::string& section) const {
  std::vector<std::string> out;
  const std::string prefix = section + ".";
  for (const auto& [k, v] : values_) {
    if (k.rfind(prefix, 0) != 0) continue;
    const std::string rest = k.substr(prefix.size());
    const auto dot = rest.find('.');
    if (dot == std::string::npos) continue;
    const std::string tag = rest.substr(0, dot);
    if (out.empty() || out.back() != tag) out.push_back(tag);
  }
  return out;
}

void Config::check_all_used() const {
  std::string unknown;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  if (!unknown.empty()) throw ParseError(source_ + ": unknown keys: " + unknown);
}

std::string Config::serialize() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
  return os.str();
}

std::string format_indices(const std::vector<int>& zero_based) {
  std::string out;
  std::size_t i = 0;
  while (i < zero_based.size()) {
    std::size_t j = i;
    while (j + 1 < zero_based.size() && zero_based[j + 1] == zero_based[j] + 1) ++j;
    if (!out.empty()) out += ' ';
    out += std::to_string(zero_based[i] + 1);
    if (j > i + 1) {
      out += '-' + std::to_string(zero_based[j] + 1);
      i = j + 1;
    } else {
      i = i + 1;
    }
  }
  return out;
}

std::string format_vec3(const Vec3& v) {
  return format_double(v.x()) + ' ' + format_double(v.y()) + ' ' + format_double(v.z());
}

// ---------------------------------------------------------------- scenario

namespace {

std::vector<std::pair<int, int>> components(const std::vector<int>& nodes, int axis) {
  std::vector<std::pair<int, int>> out;
  for (int n : nodes) out.emplace_back(n, axis);
  return out;
}

ActuationTarget read_target(const Config& c, const std::string& p, const SpringSet& springs) {
  ActuationTarget t;
  t.quantity = parse_quantity(c.require_string(p + "quantity"));
  t.springs = c.get_indices(p + "springs");
  if (c.has(p + "nodes")) {
    if (t.quantity != ActuatedQuantity::Kappa1 && t.quantity != ActuatedQuantity::Kappa2 &&
        t.quantity != ActuatedQuantity::Twist)
      throw ParseError(p + "nodes selects bend-twist springs only");
    for (int n : c.get_indices(p + "nodes"))
      for (int i = 0; i < static_cast<int>(springs.bendtwist.size()); ++i)
        if (springs.bendtwist[i].nodes[1] == n) t.springs.push_back(i);
  }
  if (t.springs.empty()) throw ParseError(p + " selects no springs");
  return t;
}

}  // namespace

Scenario build_scenario(const Geometry& geometry, const Config& c, const std::string& base_dir) {
  SystemSpec spec;
  spec.topology = build_topology(geometry.nodes, geometry.edges, geometry.triangles);

  const std::string model = c.get_string("model", "hinge");
  if (model == "hinge") spec.model = ShellModel::Hinge;
  else if (model == "midedge") spec.model = ShellModel::Midedge;
  else throw ParseError("model must be hinge or midedge, got '" + model + "'");

  Material& m = spec.material;
  m.rho_rod = c.get_double("material.rho_rod", m.rho_rod);
  m.rho_shell = c.get_double("material.rho_shell", m.rho_shell);
  m.E_rod = c.get_double("material.E_rod", m.E_rod);
  m.E_shell = c.get_double("material.E_shell", m.E_shell);
  m.nu_rod = c.get_double("material.nu_rod", m.nu_rod);
  m.nu_shell = c.get_double("material.nu_shell", m.nu_shell);
  m.r0 = c.get_double("material.r0", m.r0);
  m.h = c.get_double("material.h", m.h);
  if (!(m.E_rod > 0.0 && m.E_shell > 0.0)) throw ParseError("Young's moduli must be positive");
  if (!(m.rho_rod > 0.0 && m.rho_shell > 0.0 && m.r0 > 0.0 && m.h > 0.0))
    throw ParseError("densities, r0 and h must be positive");

  SolverSettings& s = spec.solver;
  s.dt = c.get_double("solver.dt", s.dt);
  s.total_time = c.get_double("solver.total_time", s.total_time);
  s.tol = c.get_double("solver.tol", s.tol);
  s.max_iter = c.get_int("solver.max_iter", s.max_iter);
  s.line_search = c.get_bool("solver.line_search", s.line_search);
  s.integrator = parse_integrator(c.get_string("solver.integrator", "backward-euler"));
  s.static_solve = c.get_bool("solver.static", false);
  s.planar = c.get_bool("solver.planar", false);
  s.predictor = c.get_bool("solver.predictor", false);
  s.adaptive_dt = c.get_bool("solver.adaptive_dt", false);

  BoundarySpec& bc = spec.boundary;
  bc.fixed_nodes = c.get_indices("bc.fixed_nodes");
  bc.fixed_theta = c.get_indices("bc.fixed_theta");
  bc.fixed_xi = c.get_indices("bc.fixed_xi");
  for (int axis = 0; axis < 3; ++axis) {
    const auto comp = components(c.get_indices(std::string("bc.fixed_") + "xyz"[axis]), axis);
    bc.fixed_components.insert(bc.fixed_components.end(), comp.begin(), comp.end());
  }

  EnvironmentParams& env = spec.environment;
  env.g = c.get_vec3("env.gravity", Vec3::Zero());
  env.rho_med = c.get_double("env.rho_med", 0.0);
  env.eta = c.get_double("env.viscosity", 0.0);
  env.C_t = c.get_double("env.rft.Ct", 0.0);
  env.C_n = c.get_double("env.rft.Cn", 0.0);
  env.C_D = c.get_double("env.drag.CD", 0.0);
  FloorParams& fl = env.floor;
  fl.enabled = c.get_bool("env.floor.enabled", false);
  fl.k_c = c.get_double("env.floor.k_c", fl.k_c);
  fl.delta = c.get_double("env.floor.delta", fl.delta);
  fl.mu = c.get_double("env.floor.mu", fl.mu);
  fl.nu_slip = c.get_double("env.floor.nu_slip", fl.nu_slip);
  fl.normal = c.get_vec3("env.floor.normal", fl.normal).normalized();
  fl.height = c.get_double("env.floor.height", fl.height);
  if (c.has("env.sphere.radius")) {
    SphereObstacle sp;
    sp.radius = c.get_double("env.sphere.radius", 0.0);
    sp.center = c.get_vec3("env.sphere.center", sp.center);
    sp.k_c = c.get_double("env.sphere.k_c", sp.k_c);
    sp.delta = c.get_double("env.sphere.delta", sp.delta);
    sp.mu = c.get_double("env.sphere.mu", sp.mu);
    sp.nu_slip = c.get_double("env.sphere.nu_slip", sp.nu_slip);
    if (!(sp.radius > 0.0)) throw ParseError("env.sphere.radius must be positive");
    if (c.get_bool("env.sphere.enabled", true)) env.obstacles.push_back(sp);
  }

  spec.self_contact = c.get_bool("contact.enabled", false);
  spec.contact.k_c = c.get_double("contact.k_c", spec.contact.k_c);
  spec.contact.delta = c.get_double("contact.delta", spec.contact.delta);
  spec.contact.mu = c.get_double("contact.mu", spec.contact.mu);
  spec.contact.nu_slip = c.get_double("contact.nu_slip", spec.contact.nu_slip);

  const auto mass_nodes = c.get_indices("mass.nodes");
  const double mass_value = c.get_double("mass.value", 0.0);
  for (int n : mass_nodes) spec.point_masses.emplace_back(n, mass_value);

  Scenario sc;
  sc.sim = std::make_unique<Simulation>(std::move(spec));
  Simulation& sim = *sc.sim;

  if (c.has("init.frame_m1")) sim.align_material_frames(c.get_vec3("init.frame_m1", Vec3::UnitZ()));
  const Vec3 v0 = c.get_vec3("init.velocity", Vec3::Zero());
  if (v0.squaredNorm() > 0.0)
    for (int n = 0; n < sim.topology().num_nodes(); ++n) sim.set_velocity(n, v0);

  const auto load_nodes = c.get_indices("load.nodes");
  const Vec3 load = c.get_vec3("load.force", Vec3::Zero());
  if (!load_nodes.empty()) {
    const int ndof = sim.layout().size();
    for (int n : load_nodes)
      if (n >= sim.topology().num_nodes()) throw ParseError("load.nodes index out of range");
    sim.register_custom_force([load_nodes, load, ndof](const VecX&, const VecX&, double, std::vector<Triplet>*) {
      VecX f = VecX::Zero(ndof);
      for (int n : load_nodes) f.segment<3>(3 * n) += load;
      return f;
    });
  }

  // Actuation, built after frame alignment so wave bases are the final
  // natural values.
  std::vector<ActuationSchedule> schedules;
  std::vector<WaveActuation> waves;
  std::vector<std::pair<std::string, ActuationTarget>> csv_targets;
  for (const auto& tag : c.tags("actuation")) {
    const std::string p = "actuation." + tag + ".";
    const ActuationTarget target = read_target(c, p, sim.springs());
    if (c.has(p + "wave")) {
      WaveActuation w;
      w.target = target;
      const std::string kind = c.get_string(p + "wave", "sine");
      if (kind == "sine") w.waveform = Waveform::Sine;
      else if (kind == "halfsine") w.waveform = Waveform::HalfSine;
      else throw ParseError(p + "wave must be sine or halfsine");
      w.amplitude = c.get_double(p + "amplitude", 0.0);
      w.frequency = c.get_double(p + "frequency", 0.0);
      w.offset = c.get_double(p + "offset", 0.0);
      w.phase_start = c.get_double(p + "phase_start", 0.0);
      w.phase_end = c.get_double(p + "phase_end", w.phase_start);
      waves.push_back(w);
    } else if (c.has(p + "samples")) {
      ActuationSchedule sch;
      sch.target = target;
      for (const auto& tok : split_ws(c.get_string(p + "samples", ""))) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) throw ParseError(p + "samples entries are time:value");
        sch.times.push_back(to_double(tok.substr(0, colon), p + "samples"));
        sch.values.push_back(to_double(tok.substr(colon + 1), p + "samples"));
      }
      validate_schedule(sch);
      schedules.push_back(sch);
    } else {
      csv_targets.emplace_back(tag, target);
    }
  }
  if (c.has("actuation.csv")) {
    std::filesystem::path path = c.get_string("actuation.csv", "");
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    auto loaded = load_schedule_csv(path.string(), csv_targets);
    schedules.insert(schedules.end(), loaded.begin(), loaded.end());
  } else if (!csv_targets.empty()) {
    throw ParseError("actuation." + csv_targets.front().first + " has no wave, samples or actuation.csv column");
  }
  if (!schedules.empty() || !waves.empty()) sim.set_actuator(Actuator(sim.springs(), schedules, waves));

  sc.log.every = c.get_int("log.every", 1);
  if (sc.log.every < 1) throw ParseError("log.every must be at least 1");
  sc.log.nodes = c.get_indices("log.nodes");
  for (int n : sc.log.nodes)
    if (n >= sim.topology().num_nodes()) throw ParseError("log.nodes index out of range");

  c.check_all_used();
  return sc;
}

// ---------------------------------------------------------------- logging

struct TrajectoryWriter::Impl {
  std::ofstream frames, tracked;
  LogSettings log;
  int width = 0;
  std::string row;

  void put(double v) {
    row += ',';
    row += format_double(v);
  }
};

TrajectoryWriter::TrajectoryWriter(const std::string& dir, const Simulation& sim, const LogSettings& log)
    : impl_(std::make_unique<Impl>()) {
  std::filesystem::create_directories(dir);
  impl_->log = log;
  impl_->width = sim.layout().size();
  impl_->frames.open(std::filesystem::path(dir) / "frames.csv");
  impl_->tracked.open(std::filesystem::path(dir) / "tracked.csv");
  if (!impl_->frames || !impl_->tracked) throw std::runtime_error("cannot write logs into '" + dir + "'");
  impl_->frames << "time";
  for (int i = 0; i < impl_->width; ++i) impl_->frames << ",q" << i + 1;
  for (int i = 0; i < impl_->width; ++i) impl_->frames << ",u" << i + 1;
  impl_->frames << '\n';
  impl_->tracked << "time";
  for (int n : log.nodes) impl_->tracked << ",x" << n + 1 << ",y" << n + 1 << ",z" << n + 1;
  impl_->tracked << '\n';
}

TrajectoryWriter::~TrajectoryWriter() = default;

void TrajectoryWriter::write(const Simulation& sim) {
  Impl& w = *impl_;
  if (sim.q().size() != w.width) throw std::logic_error("logged state width changed");
  w.row = format_double(sim.time());
  for (int i = 0; i < w.width; ++i) w.put(sim.q()[i]);
  for (int i = 0; i < w.width; ++i) w.put(sim.u()[i]);
  w.frames << w.row << '\n';
  w.row = format_double(sim.time());
  for (int n : w.log.nodes)
    for (int k = 0; k < 3; ++k) w.put(sim.q()[3 * n + k]);
  w.tracked << w.row << '\n';
  w.frames.flush();
  w.tracked.flush();
}

void TrajectoryWriter::maybe_write(const Simulation& sim) {
  if (sim.step_count() % impl_->log.every == 0) write(sim);
}

std::string describe(const StepReport& r) {
  std::ostringstream os;
  os << "step " << r.step << " t=" << format_double(r.time) << " iterations=" << r.iterations
     << " residual=" << format_double(r.residual) << " converged=" << (r.converged ? "yes" : "no")
     << " stalled=" << (r.stalled ? "yes" : "no");
  if (!r.alphas.empty()) {
    os << " alphas=";
    for (std::size_t i = 0; i < r.alphas.size(); ++i) os << (i ? " " : "") << format_double(r.alphas[i]);
  }
  if (!r.message.empty()) os << " (" << r.message << ")";
  return os.str();
}

StepReport run_scenario(Scenario& sc, const std::string& dir) {
  Simulation& sim = *sc.sim;
  TrajectoryWriter writer(dir, sim, sc.log);
  StepReport last;
  if (sim.settings().static_solve) {
    last = sim.solve_static();
    writer.write(sim);
    return last;
  }
  writer.write(sim);
  sim.run([&](const Simulation& s, const StepReport& r) {
    last = r;
    writer.maybe_write(s);
  });
  return last;
}

}  // namespace dismech
