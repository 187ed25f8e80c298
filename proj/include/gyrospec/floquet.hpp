#pragma once

// Rotating-frame picture of a single doublet: x = exp(-Omega G t) z turns the
// autonomous pencil into a system with coefficients of period pi/Omega,
//   z'' + delta D(t) z' + (P - delta Omega D(t) G + kappa K(t) + nu N) z = 0,
// whose Floquet multipliers are -exp(lambda T) for the autonomous eigenvalues.

#include <array>

#include <Eigen/Dense>

#include "gyrospec/rotor_model.hpp"
#include "gyrospec/tolerances.hpp"

namespace gyrospec
{

class PeriodicSystem
{
public:
  // n = 1 only (NotImplemented otherwise); Omega = 0 throws InfinitePeriodError.
  PeriodicSystem(const RotorModel &base, const PerturbationSet &pert);

  const RotorModel &base() const { return base_; }
  const PerturbationSet &pert() const { return pert_; }
  double period() const { return period_; }

private:
  RotorModel base_;
  PerturbationSet pert_;
  double period_;
};

struct PeriodicMatrices
{
  Eigen::Matrix2d D;
  Eigen::Matrix2d K;
  Eigen::Matrix2d N;
  Eigen::Matrix2d coupling;  // -delta Omega D(t) G
};

PeriodicMatrices periodic_matrices(const PeriodicSystem &ps, double t);

struct FloquetResult
{
  Eigen::Matrix4d monodromy;
  std::array<Complex, 4> multipliers;
  std::array<Complex, 4> predicted_multipliers;  // -exp(lambda T)
  double match_error = 0;        // optimal-pairing distance between the two sets
  double resolution_estimate = 0;  // ||M(steps) - M(steps/2)|| / (15 max(1, ||M||))
  double liouville_error = 0;    // | |det M| / exp(-delta trD T) - 1 |
  int steps = 0;
};

// Classical RK4 with `steps` fixed steps over one period (steps >= 256, even).
// Throws ResolutionError when the step-halving estimate exceeds tol.floquet_resolution.
FloquetResult monodromy(const PeriodicSystem &ps, int steps = 4096, const Tolerances &tol = {});

}  // namespace gyrospec
