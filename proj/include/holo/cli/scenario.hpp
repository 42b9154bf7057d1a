#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace holo::cli {

constexpr int kSchemaVersion = 1;

// Raised for malformed or inconsistent scenario files.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a scenario or output file cannot be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SetupSpec {
  std::string preset;  // trivial, flat-angle, monopole, random-polynomial
  std::string group = "SU2";
  std::string atlas = "plane";
  std::vector<double> xi;
  int charge = 1;
  // Defaults to the scenario seed + 1.
  std::optional<std::uint64_t> seed;
  int degree = 2;
  double scale = 0.5;
};

struct FormSpec {
  std::string preset;  // zero, constant, angle, x-dy, random-polynomial
  std::vector<std::vector<double>> coefficients;
  std::vector<double> eta;
  // Defaults to the scenario seed + 2.
  std::optional<std::uint64_t> seed;
  int degree = 2;
  double scale = 0.5;
  // Rescale so that the integral of |B| along the first loop equals this value (0 keeps the form).
  double norm = 0.0;
};

struct LoopSpec {
  int id = 0;
  std::string preset;  // circle, ellipse, arc, polygon, latitude, tilted, circle-angle
  std::vector<double> centre{0.0, 0.0};
  double radius = 1.0;
  double a = 1.0;
  double b = 1.0;
  double from = 0.0;
  double to = 1.0;
  double theta = 1.0;
  double tilt = 0.0;
  double phase = 0.0;
  int winding = 1;
  std::vector<std::vector<double>> points;
};

struct FamilySpec {
  int id = 0;
  std::string preset;  // radial, wobble, crossing, latitude
  double r0 = 0.5;
  double r1 = 1.5;
  double theta0 = 0.5;
  double theta1 = 1.0;
  int winding = 1;
  std::string mode = "moving";
};

struct CurvaturePoint {
  int chart = 0;
  std::vector<double> x;
};

struct GroupoidSpec {
  std::string fixture;  // random, cyclic, s3, transitive
  // Defaults to the scenario seed + 3.
  std::optional<std::uint64_t> seed;
  int order = 3;
  int objects = 2;
};

struct IntegratorSpec {
  double step = 1e-3;
  int panel_nodes = 16;
  int panels_per_unit = 64;
  int simplex_nodes = 24;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  std::uint64_t seed = 0;
  SetupSpec setup;
  std::string representation = "fundamental";
  std::optional<FormSpec> form;
  std::vector<LoopSpec> loops;
  std::vector<FamilySpec> families;
  std::vector<CurvaturePoint> curvature_points;
  double curvature_eps = 0.05;
  std::optional<GroupoidSpec> groupoid;
  IntegratorSpec integrator;
  int order = 6;
  int samples = 10;
  // Check name to tolerance; empty means every check that the scenario's data supports.
  std::map<std::string, double> checks;
};

// Names of the checks each command runs.
const std::vector<std::string>& check_names();
double default_tolerance(const std::string& check);

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace holo::cli
