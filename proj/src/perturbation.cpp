#include "gyrospec/perturbation.hpp"

#include <cmath>
#include <string>

#include "gyrospec/errors.hpp"

namespace gyrospec
{

namespace
{

using namespace std::complex_literals;

// (rho1 - rho2)^2 of a symmetric 2x2 matrix, free of cancellation.
double gap_squared(const Eigen::Matrix2d &M)
{
  const double d = M(0, 0) - M(1, 1);
  return d * d + 4.0 * M(0, 1) * M(0, 1);
}

double rho_gap(const Eigen::Matrix2d &K)
{
  const double gap = std::sqrt(gap_squared(K));
  const double scale = K.cwiseAbs().maxCoeff();
  if (!(gap > 1e-14 * scale))
    throw SingularConfiguration("K has a double eigenvalue (rho1 == rho2); the closed form is undefined");
  return gap;
}

// Square of the entry-wise coupling term of A.
double cross_term_squared(const Eigen::Matrix2d &D, const Eigen::Matrix2d &K)
{
  const double t = K(0, 1) * (D(1, 1) - D(0, 0)) - D(0, 1) * (K(1, 1) - K(0, 0));
  return t * t;
}

}  // namespace

ModalData modal_data(const Eigen::Matrix2d &D, const Eigen::Matrix2d &K, double omega1)
{
  ModalData md;
  md.trD = D.trace();
  md.trK = K.trace();
  md.detD = D.determinant();
  md.detK = K.determinant();
  md.trKD = (K * D).trace();
  md.omega1 = omega1;
  const double hd = 0.5 * std::sqrt(gap_squared(D));
  const double hk = 0.5 * std::sqrt(gap_squared(K));
  md.mu1 = 0.5 * md.trD + hd;
  md.mu2 = 0.5 * md.trD - hd;
  md.rho1 = 0.5 * md.trK + hk;
  md.rho2 = 0.5 * md.trK - hk;
  return md;
}

Complex coupling_c(const ModalData &md, double Omega, double delta, double kappa, double nu)
{
  const double w = md.omega1;
  const double dmu = (md.mu1 - md.mu2) / 4.0;
  const double drho = (md.rho1 - md.rho2) / (4.0 * w);
  const double re = dmu * dmu * delta * delta - drho * drho * kappa * kappa - Omega * Omega +
                    nu * nu / (4.0 * w * w);
  const double im = Omega * nu / w - delta * kappa * md.misalignment() / (8.0 * w);
  return {re, im};
}

std::array<Complex, 4> approx_eigenvalues(const ModalData &md, double Omega, double delta,
                                          double kappa, double nu)
{
  const double w = md.omega1;
  const Complex center(-(md.mu1 + md.mu2) * delta / 4.0, w + (md.rho1 + md.rho2) * kappa / (4.0 * w));
  const Complex root = std::sqrt(coupling_c(md, Omega, delta, kappa, nu));
  const Complex a = center + root, b = center - root;
  return {a, b, std::conj(a), std::conj(b)};
}

std::pair<double, double> veering_hyperbola(const ModalData &md, double kappa, double Omega)
{
  const double w = md.omega1;
  const double mid = w + (md.rho1 + md.rho2) * kappa / (4.0 * w);
  const double half = std::hypot(Omega, (md.rho1 - md.rho2) * kappa / (4.0 * w));
  return {mid + half, mid - half};
}

double invariant_A(const Eigen::Matrix2d &D, const Eigen::Matrix2d &K)
{
  const double g2 = gap_squared(K);
  const double detD = D.determinant();
  const double cross = cross_term_squared(D, K);
  const double A = detD * g2 + cross;

  // ((trD)^2 - 16 beta0^2)(rho1 - rho2)^2 / 4 with 16 beta0^2 (rho1-rho2)^2 = misalignment^2
  const double trD = D.trace();
  const double mis = 2.0 * (K * D).trace() - K.trace() * trD;
  const double A_beta = (trD * trD * g2 - mis * mis) / 4.0;

  const double scale = std::abs(detD) * g2 + cross + (trD * trD * g2 + mis * mis) / 4.0;
  if (std::abs(A - A_beta) > 1e-10 * scale)
    throw ConsistencyError("the two forms of A disagree: " + std::to_string(A) + " vs " +
                           std::to_string(A_beta));
  return A;
}

double beta0(const Eigen::Matrix2d &D, const Eigen::Matrix2d &K)
{
  const double gap = rho_gap(K);
  return (2.0 * (K * D).trace() - K.trace() * D.trace()) / (4.0 * gap);
}

bool cone_criterion(const ModalData &md, double A, double Omega, double kappa, double delta)
{
  const double w = md.omega1;
  if (!(delta * md.trD > 0.0))
    return false;
  const double lhs = kappa * kappa * A + Omega * Omega * std::pow(2.0 * w * md.trD, 2);
  const double rhs = -md.detD * std::pow(w * md.trD, 2) * delta * delta;
  return lhs > rhs;
}

double criterion_B(const ModalData &md, const Eigen::Matrix2d &D, const Eigen::Matrix2d &K,
                   double Omega, double kappa, double delta, double nu)
{
  const double w = md.omega1;
  const double T2 = md.trD * md.trD;
  const double A = invariant_A(D, K);
  const double g2 = gap_squared(K);
  const double X = delta * delta * w * w * T2 - 4.0 * nu * nu;
  const double first = std::pow(2.0 * Omega * X + delta * md.misalignment() * kappa * nu, 2);
  const double second = delta * delta * T2 * (A * delta * delta * w * w - nu * nu * g2) * kappa * kappa;
  const double third = delta * delta * T2 * X * (nu * nu - delta * delta * w * w * md.detD);
  return first + second - third;
}

CriticalSpeed omega_cr_nu(const Eigen::Matrix2d &D, double omega1, double delta, double nu)
{
  const double trD = D.trace();
  const double wd2 = omega1 * omega1 * delta * delta;
  const double num = nu * nu - wd2 * D.determinant();
  const double den = nu * nu - wd2 * trD * trD / 4.0;
  CriticalSpeed out;
  if (den == 0.0)
  {
    out.diagnostic = "pole: nu^2 = w1^2 delta^2 (trD/2)^2";
    return out;
  }
  const double radicand = -num / den;
  if (radicand < 0.0)
  {
    out.diagnostic = "negative radicand " + std::to_string(radicand) + ": no real boundary on kappa = 0";
    return out;
  }
  const double value = delta * trD / 4.0 * std::sqrt(radicand);
  if (!std::isfinite(value))
  {
    out.diagnostic = "non-finite value near the pole";
    return out;
  }
  out.value = value;
  return out;
}

ExceptionalPointLocation ep_location(const Eigen::Matrix2d &K, double nu, double omega1)
{
  const double gap = rho_gap(K);
  ExceptionalPointLocation ep;
  ep.kappa0 = 2.0 * nu / gap;
  const double shift = nu * K.trace() / gap;
  const double w2 = omega1 * omega1;
  if (!(w2 + shift > 0.0))
    throw DomainError("omega0^2 = " + std::to_string(w2 + shift) +
                      " is not positive; the exceptional point leaves the oscillatory regime");
  ep.omega0 = std::sqrt(w2 + shift);
  if (w2 - shift > 0.0)
    ep.omega0_mirror = std::sqrt(w2 - shift);
  return ep;
}

JordanChain jordan_chain(const Eigen::Matrix2d &K, double omega1, double nu, EpBranch branch)
{
  if (nu == 0.0)
    throw SingularConfiguration(
        "nu = 0: the exceptional points merge into the diabolical point and the associated "
        "vector diverges as 1/nu");
  // kappa = -kappa0 with K is kappa = +kappa0 with -K
  const Eigen::Matrix2d Ks = branch == EpBranch::upper ? K : Eigen::Matrix2d(-K);
  const ExceptionalPointLocation ep = ep_location(Ks, nu, omega1);
  const double gap = rho_gap(Ks);
  const double w0 = ep.omega0;

  JordanChain chain;
  chain.lambda0 = Complex(0.0, w0);
  const Eigen::Matrix2d M0 = omega1 * omega1 * Eigen::Matrix2d::Identity() + ep.kappa0 * Ks +
                             nu * rotation_generator();
  const Eigen::Matrix2cd L = (M0 - w0 * w0 * Eigen::Matrix2d::Identity()).cast<Complex>();
  const Complex dL = 2.0 * chain.lambda0;  // L'(z0) = 2 z0 I at delta = Omega = 0

  chain.u0 = Eigen::Vector2d(Ks(0, 0) - Ks(1, 1), 2.0 * Ks(0, 1) + gap).cast<Complex>();
  chain.u1 = Eigen::Vector2cd(-2.0 * 1i * w0 * gap / nu, 0.0);

  const double op_scale = w0 * w0 + M0.norm();
  if (chain.u0.norm() <= 1e-12 * op_scale)
  {
    // k11 == k22 with k12 < 0: the printed direction vanishes.
    chain.formula_degenerate = true;
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(L, Eigen::ComputeFullU | Eigen::ComputeFullV);
    chain.u0 = svd.matrixV().col(1);
    chain.u1 = L.completeOrthogonalDecomposition().solve(Eigen::Vector2cd(-dL * chain.u0));
  }

  chain.residual0 = (L * chain.u0).norm();
  const double plus = (L * chain.u1 + dL * chain.u0).norm();
  const double minus = (L * chain.u1 - dL * chain.u0).norm();
  chain.sigma = plus <= minus ? 1.0 : -1.0;
  chain.residual1 = std::min(plus, minus);
  const Eigen::Matrix2d nu_free = (omega1 * omega1 - w0 * w0) * Eigen::Matrix2d::Identity() + ep.kappa0 * Ks;
  chain.residual0_nu_free = (nu_free.cast<Complex>() * chain.u0).norm();
  chain.scale = op_scale * (chain.u0.norm() + chain.u1.norm());

  if (!(chain.residual0 < 1e-8 * chain.scale) || !(chain.residual1 < 1e-8 * chain.scale))
    throw DefectError("Jordan chain residuals exceed tolerance", chain.residual0, chain.residual1);
  return chain;
}

std::optional<std::pair<double, double>> umbrella_omega(const ModalData &md, const Eigen::Matrix2d &D,
                                                        const Eigen::Matrix2d &K, double kappa,
                                                        double delta, double nu)
{
  const double kappa0 = ep_location(K, nu, md.omega1).kappa0;
  if (kappa0 == 0.0)
    throw SingularConfiguration("nu = 0: no exceptional point to expand around");
  if (std::abs(kappa) < std::abs(kappa0))
    return std::nullopt;
  const double b0 = beta0(D, K);
  const double root = md.trD * std::sqrt(kappa * kappa - kappa0 * kappa0);
  const double factor = delta / (4.0 * kappa0);
  return std::make_pair((4.0 * b0 * kappa + root) * factor, (4.0 * b0 * kappa - root) * factor);
}

UmbrellaKappa umbrella_kappa(const ModalData &md, const Eigen::Matrix2d &D, const Eigen::Matrix2d &K,
                             double beta, double nu)
{
  const double kappa0 = ep_location(K, nu, md.omega1).kappa0;
  const double b0 = beta0(D, K);
  const double T = md.trD;
  const double radicand = beta * beta - b0 * b0 + T * T / 16.0;
  if (radicand < 0.0)
    throw DomainError("no real boundary at this slope (negative radicand)");
  const double den = 4.0 * b0 * b0 - T * T / 4.0;
  if (std::abs(den) <= 1e-14 * (4.0 * b0 * b0 + T * T / 4.0))
    throw SingularConfiguration("degenerate orientation: 4 beta0^2 = (trD/2)^2");
  if (T == 0.0)
    throw SingularConfiguration("trD = 0: the umbrella local form is undefined");
  const double root = T * std::sqrt(radicand);
  UmbrellaKappa out;
  out.exact_plus = kappa0 * (4.0 * beta * b0 + root) / den;
  out.exact_minus = kappa0 * (4.0 * beta * b0 - root) / den;
  out.local_upper = kappa0 * (1.0 + 8.0 * std::pow((beta - b0) / T, 2));
  out.local_lower = -kappa0 * (1.0 + 8.0 * std::pow((beta + b0) / T, 2));
  return out;
}

double perturbation_size(const Eigen::Matrix2d &D, const Eigen::Matrix2d &K, const Eigen::Matrix2d &N,
                         double omega1, double delta, double kappa, double nu)
{
  const Eigen::Matrix2cd dL = (1i * omega1 * delta) * D.cast<Complex>() + (kappa * K + nu * N).cast<Complex>();
  return dL.norm();
}

PerturbationReport perturbation_report(const RotorModel &model, const PerturbationSet &pert)
{
  if (model.doublets() != 1 || pert.dimension() != 2)
    throw NotImplemented("closed-form perturbation results exist only for a single doublet (n = 1)");
  const Eigen::Matrix2d D = pert.damping();
  const Eigen::Matrix2d K = pert.stiffness();
  const Eigen::Matrix2d N = pert.circulatory();
  const double w = model.frequency(1);
  const Gains g = pert.gains();
  // nu N = (nu n21) J for any skew 2x2 N.
  const double nu = g.nu * N(1, 0);

  PerturbationReport r;
  r.modal = modal_data(D, K, w);
  r.c = coupling_c(r.modal, g.Omega, g.delta, g.kappa, nu);
  r.lambda_approx = approx_eigenvalues(r.modal, g.Omega, g.delta, g.kappa, nu);
  r.A = invariant_A(D, K);
  r.B = criterion_B(r.modal, D, K, g.Omega, g.kappa, g.delta, nu);
  r.Omega_cr_nu = omega_cr_nu(D, w, g.delta, nu);
  r.epsilon = perturbation_size(D, K, N, w, g.delta, g.kappa, g.nu);
  r.predicted_stable = g.delta * r.modal.trD > 0.0 && r.B > 0.0;
  try
  {
    r.beta0 = beta0(D, K);
    const auto ep = ep_location(K, nu, w);
    r.kappa0 = ep.kappa0;
    r.omega0 = ep.omega0;
  }
  catch (const DomainError &)
  {
    // rho1 == rho2 or omega0^2 <= 0: leave the affected fields empty
  }
  return r;
}

}  // namespace gyrospec
