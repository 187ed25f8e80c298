#pragma once

namespace gyrospec
{

// Numerical thresholds shared by the solvers. Every field can be overridden
// from the command line (`--tol key=value`) or a config `tol.` section.
struct Tolerances
{
  double symmetry = 1e-12;       // relative correction allowed when symmetrizing D, K, N
  double cluster = 1e-6;         // roots closer than cluster*(1+|z|) share a cluster
  double poly_residual = 1e-12;  // scaled |p(z)| accepted from the root finder
  double eig_residual = 1e-8;    // ||L(z)u|| relative to (1+|z|^2)*||S||
  double marginal = 1e-8;        // stability margin relative to max(1,|z|)
  double boundary = 1e-9;        // |max Re| at a refined boundary vertex
  double rank = 1e-7;            // numerical rank cut for L(z) at a double root
  double discriminant = 1e-10;   // relative discriminant for a certified double root
  double floquet_resolution = 1e-5;  // Richardson estimate of the monodromy error
  int max_iterations = 500;      // root-finder sweeps

  friend bool operator==(const Tolerances &, const Tolerances &) = default;
};

}  // namespace gyrospec
