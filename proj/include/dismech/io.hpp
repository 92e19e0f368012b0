#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <set>

#include "dismech/simulation.hpp"

namespace dismech {

// In-memory arrays of a geometry file, 0-based.
struct Geometry {
  std::vector<Vec3> nodes;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangles;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// *Nodes / *Edges / *Triangles sections, 1-based indices, '#' comments.
// Errors name the source and line.
Geometry parse_geometry(std::istream& in, const std::string& source = "<geometry>");
Geometry read_geometry(const std::string& path);
std::string serialize_geometry(const Geometry& g);
void write_geometry(const std::string& path, const Geometry& g);

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

// Flat "key = value" file. Keys are kept sorted; every key must be read by
// the consumer or check_all_used() reports it.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config read(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void set(const std::string& key, double value) { values_[key] = format_double(value); }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  Vec3 get_vec3(const std::string& key, const Vec3& fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  // 1-based entries and ranges ("1-4 7"), returned 0-based in listed order.
  std::vector<int> get_indices(const std::string& key) const;
  // Distinct prefixes "a.<tag>." for keys under a.
  std::vector<std::string> tags(const std::string& section) const;

  void check_all_used() const;
  std::string serialize() const;

 private:
  std::string raw(const std::string& key) const;
  std::map<std::string, std::string> values_;
  std::string source_;
  mutable std::set<std::string> used_;
};

std::string format_indices(const std::vector<int>& zero_based);
std::string format_vec3(const Vec3& v);

struct LogSettings {
  int every = 1;
  std::vector<int> nodes;  // 0-based
};

// A ready-to-run system assembled from a geometry and a config.
struct Scenario {
  std::unique_ptr<Simulation> sim;
  LogSettings log;
};

// Relative paths in the config (actuation.csv) resolve against base_dir.
Scenario build_scenario(const Geometry& geometry, const Config& config, const std::string& base_dir = ".");

// Writes frames.csv (time, q, u) and tracked.csv (time, x y z of each
// tracked node) into a directory.
class TrajectoryWriter {
 public:
  TrajectoryWriter(const std::string& dir, const Simulation& sim, const LogSettings& log);
  ~TrajectoryWriter();
  void write(const Simulation& sim);
  // Writes unconditionally when the step is a multiple of log.every.
  void maybe_write(const Simulation& sim);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Runs a scenario and logs into dir. Returns the final report.
StepReport run_scenario(Scenario& sc, const std::string& dir);

std::string describe(const StepReport& r);

}  // namespace dismech
