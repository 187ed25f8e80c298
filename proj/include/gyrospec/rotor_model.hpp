#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "gyrospec/tolerances.hpp"

namespace gyrospec
{

using Complex = std::complex<double>;

// Generator of rotations in a doublet plane, J = [[0,-1],[1,0]].
template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 2> rotation_generator()
{
  Eigen::Matrix<Scalar, 2, 2> J;
  J << Scalar(0), Scalar(-1), Scalar(1), Scalar(0);
  return J;
}

// Unperturbed rotor: n doublets with frequencies 0 < w_1 < ... < w_n.
class RotorModel
{
public:
  explicit RotorModel(Eigen::VectorXd omegas);

  // Circular string, w_s = s.
  static RotorModel string_preset(int n);

  int doublets() const { return static_cast<int>(omegas_.size()); }
  Eigen::Index dimension() const { return 2 * omegas_.size(); }
  const Eigen::VectorXd &frequencies() const { return omegas_; }
  double frequency(int s) const { return omegas_(s - 1); }

  // P = diag(w_1^2, w_1^2, ..., w_n^2, w_n^2)
  Eigen::MatrixXd potential() const;
  // G = blockdiag(J, 2J, ..., nJ)
  Eigen::MatrixXd gyroscopic() const;

  friend bool operator==(const RotorModel &a, const RotorModel &b)
  {
    return a.omegas_ == b.omegas_;
  }

private:
  Eigen::VectorXd omegas_;
};

struct Gains
{
  double delta = 0.0;  // damping
  double kappa = 0.0;  // stiffness
  double nu = 0.0;     // circulatory
  double Omega = 0.0;  // spin speed

  friend bool operator==(const Gains &, const Gains &) = default;
};

// Operating point: perturbation shapes D (symmetric), K (symmetric),
// N (skew-symmetric) with their gains and the spin speed.
//
// Inputs are symmetrized on construction; a correction larger than
// tol.symmetry relative to the matrix norm is rejected with SymmetryError.
// The stored matrices satisfy D == D^T, K == K^T, N == -N^T exactly.
class PerturbationSet
{
public:
  PerturbationSet(const Eigen::MatrixXd &D, const Eigen::MatrixXd &K, const Eigen::MatrixXd &N,
                  Gains gains, const Tolerances &tol = {});

  // n = 1 convenience: N defaults to J.
  PerturbationSet(const Eigen::Matrix2d &D, const Eigen::Matrix2d &K, Gains gains,
                  const Tolerances &tol = {});

  // All shapes zero.
  static PerturbationSet unperturbed(Eigen::Index dim, double Omega);

  const Eigen::MatrixXd &damping() const { return D_; }
  const Eigen::MatrixXd &stiffness() const { return K_; }
  const Eigen::MatrixXd &circulatory() const { return N_; }
  const Gains &gains() const { return gains_; }
  double delta() const { return gains_.delta; }
  double kappa() const { return gains_.kappa; }
  double nu() const { return gains_.nu; }
  double Omega() const { return gains_.Omega; }
  Eigen::Index dimension() const { return D_.rows(); }

  // Same shapes at another operating point.
  PerturbationSet with_gains(const Gains &gains) const;

  friend bool operator==(const PerturbationSet &a, const PerturbationSet &b)
  {
    return a.D_ == b.D_ && a.K_ == b.K_ && a.N_ == b.N_ && a.gains_ == b.gains_;
  }

private:
  PerturbationSet() = default;

  Eigen::MatrixXd D_, K_, N_;
  Gains gains_;
};

// L(z) = I z^2 + C z + S, C = 2*Omega*G + delta*D, S = P + Omega^2 G^2 + kappa*K + nu*N.
struct QuadraticPencil
{
  Eigen::MatrixXd damping_total;
  Eigen::MatrixXd stiffness_total;

  Eigen::Index dimension() const { return stiffness_total.rows(); }
  Eigen::MatrixXd mass() const
  {
    return Eigen::MatrixXd::Identity(dimension(), dimension());
  }

  Eigen::MatrixXcd evaluate(Complex z) const;
  // dL/dz = 2 z I + C
  Eigen::MatrixXcd derivative(Complex z) const;

  // First-order companion form [[0, I], [-S, -C]] whose spectrum is det L(z) = 0.
  Eigen::MatrixXd companion() const;
};

QuadraticPencil build_pencil(const RotorModel &model, const PerturbationSet &pert);

enum class Branch
{
  plus,
  minus
};

struct MeshEigenvalue
{
  int s = 1;
  Branch branch = Branch::plus;
  bool conj = false;
  Complex value;
};

// The 4n eigenvalues i(w_s +- s*Omega) and their conjugates of the
// unperturbed pencil, ordered by s, then branch, then conjugation.
std::vector<MeshEigenvalue> mesh_spectrum(const RotorModel &model, double Omega);

// min_s w_s / s
double critical_speed(const RotorModel &model);

enum class WaveKind
{
  forward,
  backward,
  reflected,
  stationary  // w_s - s*Omega == 0 exactly
};

WaveKind classify_wave(int s, Branch branch, double Omega, const RotorModel &model);

const char *to_string(WaveKind kind);
const char *to_string(Branch branch);

}  // namespace gyrospec
