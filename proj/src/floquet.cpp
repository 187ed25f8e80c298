#include "gyrospec/floquet.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gyrospec/errors.hpp"
#include "gyrospec/matching.hpp"
#include "gyrospec/qep_solver.hpp"

namespace gyrospec
{

namespace
{

using State = Eigen::Matrix4d;

Eigen::Matrix4d system_matrix(const PeriodicSystem &ps, double t)
{
  const PeriodicMatrices m = periodic_matrices(ps, t);
  const double w = ps.base().frequency(1);
  const Gains &g = ps.pert().gains();
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  A.topRightCorner<2, 2>().setIdentity();
  A.bottomLeftCorner<2, 2>() = -(w * w * Eigen::Matrix2d::Identity() + m.coupling + g.kappa * m.K + g.nu * m.N);
  A.bottomRightCorner<2, 2>() = -g.delta * m.D;
  return A;
}

Eigen::Matrix4d integrate(const PeriodicSystem &ps, int steps)
{
  const double h = ps.period() / steps;
  State Y = State::Identity();
  for (int k = 0; k < steps; ++k)
  {
    const double t = k * h;
    const Eigen::Matrix4d A0 = system_matrix(ps, t);
    const Eigen::Matrix4d Ah = system_matrix(ps, t + 0.5 * h);
    const Eigen::Matrix4d A1 = system_matrix(ps, t + h);
    const State k1 = A0 * Y;
    const State k2 = Ah * (Y + 0.5 * h * k1);
    const State k3 = Ah * (Y + 0.5 * h * k2);
    const State k4 = A1 * (Y + h * k3);
    Y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return Y;
}

}  // namespace

PeriodicSystem::PeriodicSystem(const RotorModel &base, const PerturbationSet &pert)
  : base_(base), pert_(pert), period_(0.0)
{
  if (base_.doublets() != 1 || pert_.dimension() != 2)
    throw NotImplemented("periodic coefficients are available only for a single doublet (n = 1)");
  if (pert_.Omega() == 0.0)
    throw InfinitePeriodError("Omega = 0 gives an infinite period; use the autonomous solver instead");
  period_ = std::numbers::pi / std::abs(pert_.Omega());
}

PeriodicMatrices periodic_matrices(const PeriodicSystem &ps, double t)
{
  const Eigen::Matrix2d J = rotation_generator();
  const double Omega = ps.pert().Omega();
  const double c = std::cos(2.0 * Omega * t), s = std::sin(2.0 * Omega * t);
  const auto rotate = [&](const Eigen::Matrix2d &M) -> Eigen::Matrix2d {
    return 0.5 * (M.trace() * Eigen::Matrix2d::Identity() + (M + J * M * J) * c + (J * M - M * J) * s);
  };
  PeriodicMatrices m;
  m.D = rotate(ps.pert().damping());
  m.K = rotate(ps.pert().stiffness());
  m.N = ps.pert().circulatory();
  m.coupling = -ps.pert().delta() * Omega * m.D * J;
  return m;
}

FloquetResult monodromy(const PeriodicSystem &ps, int steps, const Tolerances &tol)
{
  if (steps < 256 || steps % 2 != 0)
    throw DomainError("monodromy needs an even step count >= 256, got " + std::to_string(steps));
  FloquetResult r;
  r.steps = steps;
  r.monodromy = integrate(ps, steps);
  const Eigen::Matrix4d coarse = integrate(ps, steps / 2);
  r.resolution_estimate = (r.monodromy - coarse).norm() / (15.0 * std::max(1.0, r.monodromy.norm()));
  if (!(r.resolution_estimate <= tol.floquet_resolution))
    throw ResolutionError("monodromy step-halving estimate " + std::to_string(r.resolution_estimate) +
                              " exceeds tolerance; increase the step count",
                          r.resolution_estimate);

  Eigen::EigenSolver<Eigen::Matrix4d> es(r.monodromy, false);
  for (int k = 0; k < 4; ++k)
    r.multipliers[k] = es.eigenvalues()(k);

  const Spectrum spectrum = solve_qep(build_pencil(ps.base(), ps.pert()), tol);
  for (int k = 0; k < 4; ++k)
    r.predicted_multipliers[k] = -std::exp(spectrum.eigenvalues(k) * ps.period());
  r.match_error = pairing_distance({r.multipliers.begin(), r.multipliers.end()},
                                   {r.predicted_multipliers.begin(), r.predicted_multipliers.end()});

  const double expected = std::exp(-ps.pert().delta() * ps.pert().damping().trace() * ps.period());
  r.liouville_error = std::abs(std::abs(r.monodromy.determinant()) / expected - 1.0);
  return r;
}

}  // namespace gyrospec
