#include "gyrospec/rotor_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gyrospec/errors.hpp"

namespace gyrospec
{

namespace
{

std::string shape_string(const Eigen::MatrixXd &m)
{
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Returns (M + sign*M^T)/2, rejecting inputs whose correction is not negligible.
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd &m, double sign, const char *name,
                            double tol)
{
  if (m.rows() != m.cols())
    throw ShapeError(std::string(name) + " must be square, got " + shape_string(m));
  Eigen::MatrixXd out = 0.5 * (m + sign * m.transpose());
  const double correction = (m - out).norm();
  const double scale = m.norm();
  if (correction > tol * scale)
    throw SymmetryError(std::string(name) + (sign > 0 ? " is not symmetric" : " is not skew-symmetric") +
                        " (relative correction " + std::to_string(correction / scale) + ")");
  return out;
}

}  // namespace

RotorModel::RotorModel(Eigen::VectorXd omegas) : omegas_(std::move(omegas))
{
  if (omegas_.size() == 0)
    throw DomainError("rotor model needs at least one doublet");
  for (Eigen::Index s = 0; s < omegas_.size(); ++s)
  {
    if (!std::isfinite(omegas_(s)) || omegas_(s) <= 0.0)
      throw DomainError("doublet frequencies must be positive and finite");
    if (s > 0 && omegas_(s) <= omegas_(s - 1))
      throw DomainError("doublet frequencies must be strictly increasing");
  }
}

RotorModel RotorModel::string_preset(int n)
{
  if (n < 1)
    throw DomainError("string preset needs n >= 1");
  return RotorModel(Eigen::VectorXd::LinSpaced(n, 1.0, static_cast<double>(n)));
}

Eigen::MatrixXd RotorModel::potential() const
{
  Eigen::VectorXd diag(dimension());
  for (Eigen::Index s = 0; s < omegas_.size(); ++s)
    diag.segment<2>(2 * s).setConstant(omegas_(s) * omegas_(s));
  return diag.asDiagonal();
}

Eigen::MatrixXd RotorModel::gyroscopic() const
{
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dimension(), dimension());
  for (Eigen::Index s = 0; s < omegas_.size(); ++s)
    G.block<2, 2>(2 * s, 2 * s) = static_cast<double>(s + 1) * rotation_generator();
  return G;
}

PerturbationSet::PerturbationSet(const Eigen::MatrixXd &D, const Eigen::MatrixXd &K,
                                 const Eigen::MatrixXd &N, Gains gains, const Tolerances &tol)
  : gains_(gains)
{
  if (D.rows() != K.rows() || D.rows() != N.rows() || D.cols() != K.cols() ||
      D.cols() != N.cols())
    throw ShapeError("D, K, N must share one shape: got " + shape_string(D) + ", " +
                     shape_string(K) + ", " + shape_string(N));
  if (D.rows() % 2 != 0 || D.rows() == 0)
    throw ShapeError("perturbation matrices must be 2n x 2n, got " + shape_string(D));
  D_ = symmetrized(D, 1.0, "D", tol.symmetry);
  K_ = symmetrized(K, 1.0, "K", tol.symmetry);
  N_ = symmetrized(N, -1.0, "N", tol.symmetry);
}

PerturbationSet::PerturbationSet(const Eigen::Matrix2d &D, const Eigen::Matrix2d &K, Gains gains,
                                 const Tolerances &tol)
  : PerturbationSet(Eigen::MatrixXd(D), Eigen::MatrixXd(K), Eigen::MatrixXd(rotation_generator()),
                    gains, tol)
{
}

PerturbationSet PerturbationSet::unperturbed(Eigen::Index dim, double Omega)
{
  PerturbationSet p;
  p.D_ = Eigen::MatrixXd::Zero(dim, dim);
  p.K_ = p.D_;
  p.N_ = p.D_;
  p.gains_.Omega = Omega;
  return p;
}

PerturbationSet PerturbationSet::with_gains(const Gains &gains) const
{
  PerturbationSet p = *this;
  p.gains_ = gains;
  return p;
}

Eigen::MatrixXcd QuadraticPencil::evaluate(Complex z) const
{
  Eigen::MatrixXcd L = z * damping_total.cast<Complex>() + stiffness_total.cast<Complex>();
  L.diagonal().array() += z * z;
  return L;
}

Eigen::MatrixXcd QuadraticPencil::derivative(Complex z) const
{
  Eigen::MatrixXcd dL = damping_total.cast<Complex>();
  dL.diagonal().array() += 2.0 * z;
  return dL;
}

Eigen::MatrixXd QuadraticPencil::companion() const
{
  const Eigen::Index m = dimension();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  A.topRightCorner(m, m).setIdentity();
  A.bottomLeftCorner(m, m) = -stiffness_total;
  A.bottomRightCorner(m, m) = -damping_total;
  return A;
}

QuadraticPencil build_pencil(const RotorModel &model, const PerturbationSet &pert)
{
  if (pert.dimension() != model.dimension())
    throw ShapeError("perturbation is " + shape_string(pert.damping()) + " but the rotor has " +
                     std::to_string(model.doublets()) + " doublets");
  const Eigen::MatrixXd G = model.gyroscopic();
  const double Omega = pert.Omega();
  QuadraticPencil pencil;
  pencil.damping_total = 2.0 * Omega * G + pert.delta() * pert.damping();
  pencil.stiffness_total = model.potential() + Omega * Omega * (G * G) +
                           pert.kappa() * pert.stiffness() + pert.nu() * pert.circulatory();
  return pencil;
}

std::vector<MeshEigenvalue> mesh_spectrum(const RotorModel &model, double Omega)
{
  std::vector<MeshEigenvalue> mesh;
  mesh.reserve(4 * model.doublets());
  for (int s = 1; s <= model.doublets(); ++s)
  {
    const double w = model.frequency(s);
    for (Branch b : {Branch::plus, Branch::minus})
    {
      const double im = b == Branch::plus ? w + s * Omega : w - s * Omega;
      mesh.push_back({s, b, false, Complex(0.0, im)});
      mesh.push_back({s, b, true, Complex(0.0, -im)});
    }
  }
  return mesh;
}

double critical_speed(const RotorModel &model)
{
  double speed = std::numeric_limits<double>::infinity();
  for (int s = 1; s <= model.doublets(); ++s)
    speed = std::min(speed, model.frequency(s) / s);
  return speed;
}

WaveKind classify_wave(int s, Branch branch, double Omega, const RotorModel &model)
{
  if (s < 1 || s > model.doublets())
    throw DomainError("doublet index " + std::to_string(s) + " outside 1.." +
                      std::to_string(model.doublets()));
  if (branch == Branch::plus)
    return WaveKind::forward;
  const double apparent = model.frequency(s) - s * Omega;
  if (apparent > 0.0)
    return WaveKind::backward;
  if (apparent < 0.0)
    return WaveKind::reflected;
  return WaveKind::stationary;
}

const char *to_string(WaveKind kind)
{
  switch (kind)
  {
    case WaveKind::forward:
      return "forward";
    case WaveKind::backward:
      return "backward";
    case WaveKind::reflected:
      return "reflected";
    case WaveKind::stationary:
      return "stationary";
  }
  return "?";
}

const char *to_string(Branch branch)
{
  return branch == Branch::plus ? "+" : "-";
}

}  // namespace gyrospec
