#pragma once

// Closed-form first-order theory for a single doublet (n = 1) near the
// spectral-mesh node (Omega = 0, z = i*w_1): eigenvalue splitting, the
// stability cone, the nu-unfolded criterion, exceptional points and the
// Whitney-umbrella local forms of the flutter boundary.
//
// Ordering convention: rho1 >= rho2 and mu1 >= mu2, so that
// kappa0 = 2 nu / (rho1 - rho2) carries the sign of nu.

#include <array>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "gyrospec/rotor_model.hpp"

namespace gyrospec
{

struct ModalData
{
  double mu1 = 0, mu2 = 0;    // eigenvalues of D, mu1 >= mu2
  double rho1 = 0, rho2 = 0;  // eigenvalues of K, rho1 >= rho2
  double trD = 0, trK = 0, detD = 0, detK = 0, trKD = 0;
  double omega1 = 1;

  // 2 tr(KD) - trK trD, the damping/stiffness misalignment.
  double misalignment() const { return 2.0 * trKD - trK * trD; }
  double rho_gap() const { return rho1 - rho2; }
};

ModalData modal_data(const Eigen::Matrix2d &D, const Eigen::Matrix2d &K, double omega1);

// Splitting coefficient c of the double eigenvalue i*w_1.
Complex coupling_c(const ModalData &md, double Omega, double delta, double kappa, double nu);

// First-order eigenvalues center +- sqrt(c) near i*w_1, followed by their
// conjugates near -i*w_1.
std::array<Complex, 4> approx_eigenvalues(const ModalData &md, double Omega, double delta,
                                          double kappa, double nu);

// Im z of the two veering branches (delta = nu = 0), upper first.
std::pair<double, double> veering_hyperbola(const ModalData &md, double kappa, double Omega);

// Cone invariant A. Evaluated from the matrix entries and cross-checked
// against the beta0 form; throws ConsistencyError if they disagree.
double invariant_A(const Eigen::Matrix2d &D, const Eigen::Matrix2d &K);

// beta0 = (2 tr KD - trK trD) / (4 (rho1 - rho2)); SingularConfiguration if rho1 == rho2.
double beta0(const Eigen::Matrix2d &D, const Eigen::Matrix2d &K);

// First-order asymptotic stability at nu = 0.
bool cone_criterion(const ModalData &md, double A, double Omega, double kappa, double delta);

// Stability polynomial B for nu != 0; stable iff delta trD > 0 and B > 0.
double criterion_B(const ModalData &md, const Eigen::Matrix2d &D, const Eigen::Matrix2d &K,
                   double Omega, double kappa, double delta, double nu);

// Boundary speed on the kappa = 0 axis. Absent (with a diagnostic) when the
// radicand is negative or the expression has a pole.
struct CriticalSpeed
{
  std::optional<double> value;
  std::string diagnostic;
};

CriticalSpeed omega_cr_nu(const Eigen::Matrix2d &D, double omega1, double delta, double nu);

// Exceptional points of the undamped, non-rotating pencil at kappa = +-kappa0.
// The double eigenvalues are +-i*omega0 at +kappa0 and +-i*omega0_mirror at
// -kappa0 (omega0_mirror is absent if its square is not positive).
struct ExceptionalPointLocation
{
  double kappa0 = 0;
  double omega0 = 0;
  std::optional<double> omega0_mirror;
};

ExceptionalPointLocation ep_location(const Eigen::Matrix2d &K, double nu, double omega1);

enum class EpBranch
{
  upper,  // kappa = +kappa0
  lower   // kappa = -kappa0
};

// Eigenvector u0 and associated vector u1 at the exceptional point, scaled as
// u0 = (k11-k22, 2 k12 + rho1 - rho2), u1 = -2 i omega0 (rho1 - rho2) / nu (1, 0)
// (with K -> -K on the lower branch). Residuals are taken on the full pencil
// L(z) = I z^2 + P + kappa K + nu N:
//   residual0 = ||L(z0) u0||,  residual1 = min_sigma ||L(z0) u1 + sigma L'(z0) u0||.
struct JordanChain
{
  Complex lambda0;
  Eigen::Vector2cd u0;
  Eigen::Vector2cd u1;
  double residual0 = 0;
  double residual1 = 0;
  double sigma = 1;           // sign normalization of u0 chosen for residual1
  double residual0_nu_free = 0;  // ||(-omega0^2 + P + kappa0 K) u0||, the operator without nu N
  double scale = 1;           // residuals are judged against 1e-8 * scale
  bool formula_degenerate = false;  // printed u0 vanished; numerical null vector used
};

JordanChain jordan_chain(const Eigen::Matrix2d &K, double omega1, double nu,
                         EpBranch branch = EpBranch::upper);

// First-order flutter-boundary lines Omega(delta) near the exceptional point at
// fixed kappa. Absent when |kappa| < kappa0 (no real boundary).
std::optional<std::pair<double, double>> umbrella_omega(const ModalData &md, const Eigen::Matrix2d &D,
                                                        const Eigen::Matrix2d &K, double kappa,
                                                        double delta, double nu);

struct UmbrellaKappa
{
  double exact_plus = 0;   // kappa with the + sign of the square root
  double exact_minus = 0;  // kappa with the - sign
  double local_upper = 0;  // +kappa0 [1 + 8((beta - beta0)/trD)^2]
  double local_lower = 0;  // -kappa0 [1 + 8((beta + beta0)/trD)^2]
};

// Boundary kappa at slope beta = Omega/delta, exact inversion of the
// umbrella lines together with its quadratic local form.
UmbrellaKappa umbrella_kappa(const ModalData &md, const Eigen::Matrix2d &D, const Eigen::Matrix2d &K,
                             double beta, double nu);

// Frobenius norm of delta*z*D + kappa*K + nu*N at z = i*w_1.
double perturbation_size(const Eigen::Matrix2d &D, const Eigen::Matrix2d &K, const Eigen::Matrix2d &N,
                         double omega1, double delta, double kappa, double nu);

// Every closed-form quantity at one operating point. Quantities that are
// undefined for the given data (rho1 == rho2, poles) are left empty.
struct PerturbationReport
{
  ModalData modal;
  Complex c;
  std::array<Complex, 4> lambda_approx;
  double A = 0;
  std::optional<double> beta0;
  std::optional<double> kappa0;
  std::optional<double> omega0;
  CriticalSpeed Omega_cr_nu;
  double B = 0;
  double epsilon = 0;
  bool predicted_stable = false;  // delta trD > 0 and B > 0
};

// n = 1 only; throws NotImplemented otherwise.
PerturbationReport perturbation_report(const RotorModel &model, const PerturbationSet &pert);

}  // namespace gyrospec
