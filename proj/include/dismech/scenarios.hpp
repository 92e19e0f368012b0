#pragma once

#include <cstdint>

#include "dismech/io.hpp"

namespace dismech {

// Geometry plus config: everything a bundled scenario needs, in file form.
struct ScenarioFiles {
  std::string name;
  Geometry geometry;
  Config config;
};

Scenario instantiate(const ScenarioFiles& files);
// Writes <dir>/geometry.txt and <dir>/config.txt.
void export_scenario(const ScenarioFiles& files, const std::string& dir);

// ---- meshes

enum class MeshFamily { Equilateral, Random, RightIsosceles, EquilateralAligned, NonUniform };

const std::vector<MeshFamily>& all_mesh_families();
std::string family_name(MeshFamily f);
MeshFamily parse_family(const std::string& name);

// Rectangular strip x in [-clamp_length, length], y in [-width/2, width/2].
// clamped lists nodes with x <= 0, tip lists nodes with x = length.
struct StripMesh {
  Geometry geometry;
  std::vector<int> clamped;
  std::vector<int> tip;
};

StripMesh strip_mesh(MeshFamily family, double length, double width, double edge, std::uint64_t seed);

// Triangulates the band between two polylines that are monotone along a
// common axis; coordinates along that axis are given per point. Triangles are
// wound counter-clockwise in the xy-plane.
void triangulate_band(const std::vector<int>& a, const std::vector<int>& b, const std::vector<double>& sa,
                      const std::vector<double>& sb, const std::vector<Vec3>& nodes,
                      std::vector<std::array<int, 3>>& out, const std::function<bool(int, int)>& advance_a_on_tie = {});

// ---- validation set-ups (gravity -z, rho 1200, nu 0.5)

struct CantileverGeometry {
  double length = 0.1;
  double r0 = 1e-3;     // rod
  double width = 0.02;  // shell strip
  double h = 1e-3;
  double rho = 1200.0;
  double nu = 0.5;
  double g = 9.8;
};

// Static rod cantilever clamped at x = 0; log.nodes is the tip.
ScenarioFiles rod_cantilever(double E, int nodes = 41, const CantileverGeometry& c = {});

// Static shell strip cantilever; log.nodes lists the tip nodes.
ScenarioFiles shell_cantilever(MeshFamily family, ShellModel model, double E, double edge = 2.5e-3,
                               std::uint64_t seed = 1, const CantileverGeometry& c = {});

// ---- showcases

ScenarioFiles pneunet(double curvature_per_m = 31.45);
ScenarioFiles earthworm(double mu = 0.25);
ScenarioFiles manta();
ScenarioFiles snake(double C_t = 0.01, double C_n = 0.1);
ScenarioFiles parachute();
ScenarioFiles rod_drop(double E = 2e6);
ScenarioFiles gripper(bool contact = true);

std::vector<ScenarioFiles> showcase_scenarios();

}  // namespace dismech
