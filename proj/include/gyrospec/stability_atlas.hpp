#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gyrospec/qep_solver.hpp"
#include "gyrospec/rotor_model.hpp"
#include "gyrospec/tolerances.hpp"

namespace gyrospec
{

enum class StabilityClass
{
  asymptotically_stable,
  marginal,
  flutter,
  divergence
};

const char *to_string(StabilityClass cls);

struct StabilityVerdict
{
  StabilityClass cls = StabilityClass::marginal;
  double max_re = 0;
  Complex critical_eigenvalue;  // argmax Re z, upper half plane on ties
};

// Thresholds are tol.marginal * max(1, |critical eigenvalue|).
StabilityVerdict classify(const Spectrum &spectrum, const Tolerances &tol = {});
StabilityVerdict classify(const RotorModel &model, const PerturbationSet &pert, const Tolerances &tol = {});

enum class Param
{
  Omega,
  kappa,
  delta,
  nu
};

const char *to_string(Param p);
std::optional<Param> param_from_string(const std::string &name);

double get(const Gains &g, Param p);
Gains with_param(Gains g, Param p, double value);

// count equally spaced nodes from min to max inclusive.
struct Axis
{
  Param param = Param::Omega;
  double min = 0;
  double max = 1;
  int count = 2;

  double value(int i) const;
  double step() const { return (max - min) / (count - 1); }
};

struct Grid
{
  Axis x;
  Axis y;
};

struct CellResult
{
  StabilityVerdict verdict;
  std::optional<std::string> error;  // solver failure; the verdict is meaningless then
};

// Level-set polyline of max Re = 0 in (x, y) parameter coordinates, oriented
// so the unstable side (max Re > 0) lies to the left of the direction of travel.
struct Polyline
{
  std::vector<Eigen::Vector2d> points;
  std::vector<double> residuals;  // max Re re-evaluated at each vertex
  bool closed = false;
};

enum class SingularKind
{
  diabolical,
  exceptional
};

const char *to_string(SingularKind kind);

struct SingularPointRecord
{
  SingularKind kind = SingularKind::exceptional;
  Gains location;
  Complex eigenvalue;
  double discriminant = 0;       // relative discriminant of det L at the point
  double poly_residual = 0;      // scaled |p(eigenvalue)|
  int eigenvector_count = 0;     // rank deficiency of L(eigenvalue)
  Eigen::VectorXd singular_values;  // of L(eigenvalue), descending
  int newton_iterations = 0;
};

struct StabilityChart
{
  RotorModel model;
  PerturbationSet pert;  // template; its gains hold the fixed parameters
  Grid grid;
  Tolerances tol;
  std::vector<CellResult> cells;  // row-major: y index outer, x index inner
  std::vector<Polyline> boundaries;
  int flagged_edges = 0;  // edges whose bisection did not reach tol.boundary
  std::vector<SingularPointRecord> singular_points;

  const CellResult &cell(int ix, int iy) const { return cells[static_cast<std::size_t>(iy) * grid.x.count + ix]; }
  Gains gains_at(double x, double y) const;
  int failed_cells() const;
};

// Classifies every grid node. Cells are split across `threads` workers
// (0: hardware concurrency); the chart does not depend on the worker count.
StabilityChart sweep2d(const RotorModel &model, const PerturbationSet &pert, const Grid &grid, int threads = 0,
                       const Tolerances &tol = {});

// Marching squares on max Re with per-edge bisection to |max Re| < tol.boundary.
// Edges that fail to converge are counted in chart.flagged_edges and split the
// polyline. Open polylines start and end on the chart frame.
std::vector<Polyline> trace_boundary(StabilityChart &chart);

bool on_frame(const Eigen::Vector2d &point, const Grid &grid);

// Through-origin least-squares slopes Omega = beta * delta of the boundary
// branches that leave the bottom of an (Omega, delta) chart, using vertices in
// the lowest `fraction` of the delta range. Returns (larger, smaller).
// Throws ResolutionError with fewer than two branches or fewer than three
// vertices on a branch.
std::pair<double, double> boundary_slope_at_origin(const StabilityChart &chart, double fraction = 0.25);

struct SearchBox
{
  double Omega_min = -0.1, Omega_max = 0.1;
  double kappa_min = -0.1, kappa_max = 0.1;
  int coarse = 21;
};

struct NearMiss
{
  Gains location;
  Complex eigenvalue;
  double discriminant = 0;
  std::string reason;
};

struct ExceptionalPointSearch
{
  std::vector<SingularPointRecord> points;
  std::vector<NearMiss> near_misses;
};

// Double eigenvalues in an (Omega, kappa) box at delta = 0 and the template's nu.
ExceptionalPointSearch find_exceptional_points(const RotorModel &model, const PerturbationSet &pert,
                                               const SearchBox &box, const Tolerances &tol = {});

}  // namespace gyrospec
