#pragma once

// Line-oriented run configuration:
//
//   # comment
//   section.key = value
//
// Matrices are comma-separated, row-major. Unknown or repeated keys are
// rejected with the line number.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gyrospec/errors.hpp"
#include "gyrospec/rotor_model.hpp"
#include "gyrospec/stability_atlas.hpp"
#include "gyrospec/tolerances.hpp"

namespace gyrospec::cli
{

enum class Command
{
  spectrum,
  mesh,
  report,
  sweep,
  boundary,
  ep,
  floquet,
  fig1,
  fig2,
  fig3
};

const char *to_string(Command c);

class ConfigError : public Error
{
public:
  ConfigError(const std::string &what, int line) : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line(line) {}
  int line;
};

struct RunConfig
{
  Command command = Command::spectrum;
  std::string preset;  // "", "string" or "fig1"
  Eigen::VectorXd omegas = Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd N = rotation_generator();
  Gains gains;
  std::optional<Axis> x;
  std::optional<Axis> y;
  Tolerances tol;
  std::string output_dir = ".";
  std::string prefix = "gyrospec";
  int floquet_steps = 4096;
  std::vector<double> fig3_deltas{0.05, 0.1, 0.2};
  SearchBox ep_box;

  int doublets() const { return static_cast<int>(omegas.size()); }
  RotorModel model() const { return RotorModel(omegas); }
  PerturbationSet perturbation() const { return PerturbationSet(D, K, N, gains, tol); }

  friend bool operator==(const RunConfig &a, const RunConfig &b);
};

RunConfig parse_config(const std::string &text);

// Text that parse_config maps back to an equal RunConfig.
std::string emit_config(const RunConfig &config);

// Sets one tolerance by name (the key after "tol."); ConfigError on unknown names.
void set_tolerance(Tolerances &tol, const std::string &name, const std::string &value, int line = 0);

// Every accepted key, for diagnostics.
const std::vector<std::string> &known_keys();

}  // namespace gyrospec::cli
