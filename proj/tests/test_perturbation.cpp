#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gyrospec/errors.hpp"
#include "gyrospec/matching.hpp"
#include "gyrospec/perturbation.hpp"
#include "gyrospec/qep_solver.hpp"
#include "oracles.hpp"

using namespace gyrospec;

namespace
{

const Eigen::Matrix2d K1 = (Eigen::Matrix2d() << 1, 1, 1, 2).finished();
const Eigen::Matrix2d D1 = (Eigen::Matrix2d() << -1, 0, 0, 2).finished();
const double sqrt5 = std::sqrt(5.0);

RotorModel rotor(double w)
{
  return RotorModel((Eigen::VectorXd(1) << w).finished());
}

std::vector<Complex> exact_spectrum(double w, const Eigen::Matrix2d &D, const Eigen::Matrix2d &K, Gains g)
{
  return oracle::to_vector(solve_qep(build_pencil(rotor(w), PerturbationSet(D, K, g))).eigenvalues);
}

// Exact eigenvalues in the upper half plane near i*w.
std::vector<Complex> upper_pair(const std::vector<Complex> &all)
{
  std::vector<Complex> out;
  for (const auto &z : all)
    if (z.imag() > 0)
      out.push_back(z);
  return out;
}

Eigen::Matrix2d swap_rows(const Eigen::Matrix2d &M)
{
  const Eigen::Matrix2d P = (Eigen::Matrix2d() << 0, 1, 1, 0).finished();
  return P * M * P;
}

}  // namespace

TEST_CASE("modal_data examples")
{
  const ModalData k = modal_data(D1, K1, 1.0);
  CHECK(k.rho1 == doctest::Approx((3 + sqrt5) / 2).epsilon(1e-14));
  CHECK(k.rho2 == doctest::Approx((3 - sqrt5) / 2).epsilon(1e-14));
  CHECK(k.mu1 == 2.0);
  CHECK(k.mu2 == -1.0);
  CHECK(k.detD == -2.0);
  const ModalData iso = modal_data(D1, Eigen::Matrix2d::Identity(), 1.0);
  CHECK(iso.rho1 == 1.0);
  CHECK(iso.rho2 == 1.0);
}

TEST_CASE("modal_data invariants on random matrices")
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial)
  {
    const Eigen::Matrix2d D = oracle::random_symmetric(rng, 2, 3.0);
    const Eigen::Matrix2d K = oracle::random_symmetric(rng, 2, 3.0);
    const ModalData md = modal_data(D, K, 1.0);
    CHECK(md.mu1 >= md.mu2);
    CHECK(md.rho1 >= md.rho2);
    CHECK(std::abs(md.mu1 + md.mu2 - md.trD) < 1e-12 * (1 + std::abs(md.trD) + md.mu1 - md.mu2));
    CHECK(std::abs(md.mu1 * md.mu2 - md.detD) < 1e-12 * (1 + md.mu1 * md.mu1 + md.mu2 * md.mu2));
    CHECK(std::abs(md.rho1 * md.rho2 - md.detK) < 1e-12 * (1 + md.rho1 * md.rho1 + md.rho2 * md.rho2));
  }
}

TEST_CASE("coupling_c examples")
{
  const ModalData md = modal_data(D1, K1, 1.0);
  const Complex c = coupling_c(md, 0.0, 0.3, 0.2, 0.0);
  CHECK(c.real() == doctest::Approx(0.038125).epsilon(1e-12));
  CHECK(c.imag() == doctest::Approx(-0.0225).epsilon(1e-12));
  const Complex avoided = coupling_c(md, 0.4, 0.0, 0.0, 0.0);
  CHECK(avoided.real() == doctest::Approx(-0.16));
  CHECK(avoided.imag() == 0.0);
  const Complex circ = coupling_c(md, 0.0, 0.0, 0.0, 0.2);
  CHECK(circ.real() == doctest::Approx(0.01));
  CHECK(circ.imag() == 0.0);
}

TEST_CASE("approx_eigenvalues examples")
{
  const ModalData md = modal_data(D1, K1, 1.0);
  SUBCASE("undamped vertex")
  {
    const auto l = approx_eigenvalues(md, 0.0, 0.0, 0.2, 0.0);
    std::vector<double> im;
    for (const auto &z : l)
    {
      CHECK(z.real() == doctest::Approx(0.0));
      if (z.imag() > 0)
        im.push_back(z.imag());
    }
    std::sort(im.begin(), im.end());
    CHECK(im[0] == doctest::Approx(1.0 + 0.15 - 0.2 * sqrt5 / 4).epsilon(1e-14));
    CHECK(im[1] == doctest::Approx(1.0 + 0.15 + 0.2 * sqrt5 / 4).epsilon(1e-14));
  }
  SUBCASE("flutter example growth rate")
  {
    const auto l = approx_eigenvalues(md, 0.0, 0.3, 0.2, 0.0);
    double max_re = -1e300;
    for (const auto &z : l)
      max_re = std::max(max_re, z.real());
    CHECK(max_re == doctest::Approx(0.12797).epsilon(1e-4));
    CHECK(l[0] - l[1] != Complex(0));
    CHECK(l[2] == std::conj(l[0]));
    CHECK(l[3] == std::conj(l[1]));
  }
  SUBCASE("reduces to the mesh")
  {
    const auto l = approx_eigenvalues(md, 0.3, 0.0, 0.0, 0.0);
    const std::vector<Complex> mesh{{0, 1.3}, {0, 0.7}, {0, -1.3}, {0, -0.7}};
    CHECK(pairing_distance({l.begin(), l.end()}, mesh) < 1e-15);
  }
}

TEST_CASE("veering_hyperbola examples")
{
  const ModalData md = modal_data(D1, K1, 1.0);
  const auto [up, lo] = veering_hyperbola(md, 0.2, 0.0);
  CHECK(up == doctest::Approx(1.15 + 0.1118).epsilon(1e-4));
  CHECK(lo == doctest::Approx(1.15 - 0.1118).epsilon(1e-4));
  const auto [u0, l0] = veering_hyperbola(md, 0.0, -0.25);
  CHECK(u0 == doctest::Approx(1.25));
  CHECK(l0 == doctest::Approx(0.75));
  const auto [ub, lb] = veering_hyperbola(md, 0.2, 50.0);
  CHECK(ub - (1.15 + 50.0) == doctest::Approx(0.0).epsilon(1e-3).scale(1));
  CHECK(lb - (1.15 - 50.0) == doctest::Approx(0.0).epsilon(1e-3).scale(1));
}

TEST_CASE("invariant_A examples and identity")
{
  CHECK(invariant_A(D1, K1) == -1.0);
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  CHECK(invariant_A(I, K1) == doctest::Approx(5.0));
  const ModalData md = modal_data(K1, K1, 1.0);
  CHECK(invariant_A(K1, K1) == doctest::Approx(md.detD * 5.0));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10000; ++trial)
    CHECK_NOTHROW(invariant_A(oracle::random_symmetric(rng, 2, 2.0), oracle::random_symmetric(rng, 2, 2.0)));
}

TEST_CASE("beta0 examples")
{
  CHECK(beta0(D1, K1) == doctest::Approx(3.0 / (4.0 * sqrt5)).epsilon(1e-14));
  CHECK(beta0(0.7 * Eigen::Matrix2d::Identity(), K1) == doctest::Approx(0.0).scale(1));
  const Eigen::Matrix2d Kd = Eigen::Vector2d(1.0, 3.0).asDiagonal();
  CHECK(beta0(Eigen::Vector2d(2.0, 2.0).asDiagonal(), Kd) == doctest::Approx(0.0).scale(1));
  CHECK_THROWS_AS(beta0(D1, Eigen::Matrix2d::Identity()), SingularConfiguration);
}

TEST_CASE("cone_criterion examples")
{
  const ModalData md = modal_data(D1, K1, 1.0);
  CHECK_FALSE(cone_criterion(md, -1.0, 0.0, 0.2, 0.3));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial)
  {
    const Eigen::Matrix2d D = oracle::random_spd(rng, 2, 0.1, 2.0);
    const Eigen::Matrix2d K = oracle::random_symmetric(rng, 2);
    const ModalData m = modal_data(D, K, 1.0);
    CHECK(cone_criterion(m, invariant_A(D, K), u(rng), u(rng), 0.5 * (u(rng) + 1.0) + 1e-3));
  }
  const Eigen::Matrix2d Dp = Eigen::Vector2d(1.0, 2.0).asDiagonal();
  CHECK_FALSE(cone_criterion(modal_data(Dp, K1, 1.0), invariant_A(Dp, K1), 0.0, 0.0, -0.1));
}

TEST_CASE("criterion_B reduces to the cone inequality at nu = 0")
{
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int compared = 0;
  for (int trial = 0; trial < 10000; ++trial)
  {
    const Eigen::Matrix2d D = oracle::random_symmetric(rng, 2);
    const Eigen::Matrix2d K = oracle::random_symmetric(rng, 2);
    const double w = 0.5 + std::abs(u(rng));
    const double Omega = u(rng), kappa = u(rng), delta = u(rng);
    const ModalData md = modal_data(D, K, w);
    const double B = criterion_B(md, D, K, Omega, kappa, delta, 0.0);
    const double q = kappa * kappa * invariant_A(D, K) + Omega * Omega * std::pow(2 * w * md.trD, 2) +
                     md.detD * std::pow(w * md.trD, 2) * delta * delta;
    if (std::abs(q) < 1e-12)
      continue;
    ++compared;
    CHECK((B > 0) == (q > 0));
  }
  CHECK(compared > 9900);
}

TEST_CASE("criterion_B changes sign at Omega_cr on kappa = 0")
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 2000 && checked < 200; ++trial)
  {
    const Eigen::Matrix2d D = oracle::random_symmetric(rng, 2);
    const double delta = 0.3 * u(rng), nu = 0.3 * u(rng), w = 1.0;
    const CriticalSpeed cr = omega_cr_nu(D, w, delta, nu);
    if (!cr.value || std::abs(*cr.value) < 1e-3 || std::abs(*cr.value) > 10.0)
      continue;
    const ModalData md = modal_data(D, K1, w);
    const auto B = [&](double Om) { return criterion_B(md, D, K1, Om, 0.0, delta, nu); };
    double lo = 0.0, hi = 2.0 * std::abs(*cr.value);
    REQUIRE((B(lo) > 0) != (B(hi) > 0));
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it)
    {
      const double mid = 0.5 * (lo + hi);
      ((B(mid) > 0) == (B(lo) > 0) ? lo : hi) = mid;
    }
    CHECK(std::abs(0.5 * (lo + hi) - std::abs(*cr.value)) < 1e-8 * std::abs(*cr.value));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("criterion_B at kappa = 0 agrees with the exact spectrum")
{
  // B = 4 X^2 (Omega^2 - Omega_cr^2) at kappa = 0: stable beyond Omega_cr.
  const double delta = 0.03, nu = 0.01;
  const double cr = *omega_cr_nu(D1, 1.0, delta, nu).value;
  const ModalData md = modal_data(D1, K1, 1.0);
  for (double f : {0.2, 0.8, 1.2, 3.0})
  {
    const double Omega = f * cr;
    const double B = criterion_B(md, D1, K1, Omega, 0.0, delta, nu);
    const double growth = max_growth_rate(solve_qep(build_pencil(rotor(1.0), PerturbationSet(D1, K1, Gains{delta, 0.0, nu, Omega}))));
    CHECK((B > 0) == (growth < 0));
  }
}

TEST_CASE("criterion_B vanishes at the exceptional point as delta -> 0")
{
  const double nu = 0.2;
  const double k0 = ep_location(K1, nu, 1.0).kappa0;
  const ModalData md = modal_data(D1, K1, 1.0);
  double previous = std::abs(criterion_B(md, D1, K1, 0.0, k0, 1e-1, nu));
  for (double delta : {1e-2, 1e-3, 1e-4})
  {
    const double b = std::abs(criterion_B(md, D1, K1, 0.0, k0, delta, nu));
    CHECK(b < previous);
    previous = b;
  }
  CHECK(criterion_B(md, D1, K1, 0.0, k0, 0.0, nu) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("omega_cr_nu examples")
{
  const Eigen::Matrix2d Dp = Eigen::Vector2d(1.0, 2.0).asDiagonal();
  // nu = 0: real only for indefinite damping, Omega_cr = (delta trD / 4) sqrt(-4 detD) / |trD|
  const auto a = omega_cr_nu(D1, 1.0, 0.3, 0.0);
  REQUIRE(a.value);
  CHECK(*a.value == doctest::Approx(0.3 / 4.0 * std::sqrt(8.0)));
  CHECK_FALSE(omega_cr_nu(Dp, 1.0, 0.3, 0.0).value);
  const double nu0 = std::sqrt(0.09 * 2.0);
  const auto b = omega_cr_nu(Dp, 1.0, 0.3, nu0);
  REQUIRE(b.value);
  CHECK(*b.value == doctest::Approx(0.0).scale(1));
  const auto pole = omega_cr_nu(Eigen::Matrix2d::Identity() * 2.0, 1.0, 0.5, 1.0);
  CHECK_FALSE(pole.value);
  CHECK_FALSE(pole.diagnostic.empty());
  const auto beyond = omega_cr_nu(Dp, 1.0, 0.3, 0.5);
  CHECK_FALSE(beyond.value);
}

TEST_CASE("ep_location examples")
{
  const auto ep = ep_location(K1, 0.2, 1.0);
  CHECK(ep.kappa0 == doctest::Approx(0.4 / sqrt5).epsilon(1e-14));
  CHECK(ep.omega0 == doctest::Approx(1.126201).epsilon(1e-6));
  const auto collapsed = ep_location(K1, 0.0, 1.0);
  CHECK(collapsed.kappa0 == 0.0);
  CHECK(collapsed.omega0 == 1.0);
  const auto shapiro = ep_location(Eigen::Vector2d(-1.0, 1.0).asDiagonal(), 0.37, 1.0);
  CHECK(shapiro.kappa0 == doctest::Approx(0.37));
  CHECK_THROWS_AS(ep_location(Eigen::Matrix2d::Identity(), 0.2, 1.0), SingularConfiguration);
  CHECK_THROWS_AS(ep_location(K1, -2.0, 1.0), DomainError);
}

TEST_CASE("exceptional points are certified double roots")
{
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial)
  {
    const Eigen::Matrix2d K = oracle::random_symmetric(rng, 2);
    const double nu = 0.2 * u(rng), w = 0.8 + 0.4 * std::abs(u(rng));
    const auto ep = ep_location(K, nu, w);
    for (double sign : {1.0, -1.0})
    {
      const double omega = sign > 0 ? ep.omega0 : *ep.omega0_mirror;
      const auto pencil = build_pencil(rotor(w), PerturbationSet(Eigen::Matrix2d::Zero(), K, Gains{0, sign * ep.kappa0, nu, 0}));
      const auto coeffs = char_poly_extended(pencil);
      CHECK(discriminant_measure(coeffs) < 1e-10);
      const auto clusters = cluster_roots(coeffs, poly_roots(coeffs), 1e-6);
      for (const auto &cl : clusters)
      {
        CHECK(cl.multiplicity() == 2);
        CHECK(std::abs(std::abs(cl.center.imag()) - omega) < 1e-10);
        CHECK(std::abs(cl.center.real()) < 1e-10);
      }
    }
  }
}

TEST_CASE("jordan_chain at the reference exceptional point")
{
  const JordanChain chain = jordan_chain(K1, 1.0, 0.2);
  CHECK(chain.lambda0.imag() == doctest::Approx(1.126201).epsilon(1e-6));
  const Eigen::Vector2cd v = chain.u0 / chain.u0(1);
  CHECK(std::abs(v(0) - (-1.0 / (2.0 + sqrt5))) < 1e-12);
  CHECK(std::abs(v(0) - (-0.236068)) < 1e-6);
  CHECK(chain.residual0 < 1e-8 * chain.scale);
  CHECK(chain.residual1 < 1e-8 * chain.scale);
  CHECK(chain.sigma == 1.0);
  CHECK_FALSE(chain.formula_degenerate);
  // without nu N the printed vector is not a null vector
  CHECK(chain.residual0_nu_free > 1e-3);

  const auto ep = ep_location(K1, 0.2, 1.0);
  const Eigen::Matrix2d M = -ep.omega0 * ep.omega0 * Eigen::Matrix2d::Identity() + Eigen::Matrix2d::Identity() +
                            ep.kappa0 * K1 + 0.2 * rotation_generator();
  const Eigen::Matrix2d expected = (Eigen::Matrix2d() << -0.089443, -0.021115, 0.378885, 0.089443).finished();
  CHECK((M - expected).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(std::abs(M.determinant()) < 1e-10);
}

TEST_CASE("jordan_chain examples")
{
  const Eigen::Matrix2d Kd = Eigen::Vector2d(0.5, 2.0).asDiagonal();
  const JordanChain chain = jordan_chain(Kd, 1.0, 0.1);
  CHECK(chain.u0(0).real() == doctest::Approx(-1.5));
  CHECK(chain.u0(1).real() == doctest::Approx(1.5));
  CHECK_THROWS_AS(jordan_chain(K1, 1.0, 0.0), SingularConfiguration);
  CHECK(jordan_chain(K1, 1.0, 1e-3).u1.norm() > 50.0 * jordan_chain(K1, 1.0, 1e-1).u1.norm());

  // k11 == k22 with k12 < 0: printed direction vanishes
  const Eigen::Matrix2d Kn = (Eigen::Matrix2d() << 1, -0.5, -0.5, 1).finished();
  const JordanChain fallback = jordan_chain(Kn, 1.0, 0.1);
  CHECK(fallback.formula_degenerate);
  CHECK(fallback.residual1 < 1e-8 * fallback.scale);
}

TEST_CASE("jordan_chain residuals at both exceptional points")
{
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int admissible = 0;
  for (int trial = 0; trial < 500; ++trial)
  {
    const Eigen::Matrix2d K = oracle::random_symmetric(rng, 2);
    double nu = 0.3 * u(rng);
    if (std::abs(nu) < 1e-3)
      nu = 1e-3;
    const double shift = std::abs(nu * K.trace()) / std::sqrt(std::pow(K(0, 0) - K(1, 1), 2) + 4 * K(0, 1) * K(0, 1));
    if (shift > 0.99)
      continue;
    const auto ep = ep_location(K, nu, 1.0);
    if (ep.omega0 < 0.1 || !ep.omega0_mirror || *ep.omega0_mirror < 0.1)
      continue;
    ++admissible;
    for (EpBranch branch : {EpBranch::upper, EpBranch::lower})
    {
      const JordanChain chain = jordan_chain(K, 1.0, nu, branch);
      CHECK(chain.residual0 < 1e-8 * chain.scale);
      CHECK(chain.residual1 < 1e-8 * chain.scale);

      // independent check on the assembled pencil
      const double kappa0 = ep_location(K, nu, 1.0).kappa0;
      const double kappa = branch == EpBranch::upper ? kappa0 : -kappa0;
      const auto pencil = build_pencil(rotor(1.0), PerturbationSet(Eigen::Matrix2d::Zero(), K, Gains{0, kappa, nu, 0}));
      const Eigen::MatrixXcd L = pencil.evaluate(chain.lambda0);
      const Eigen::MatrixXcd dL = pencil.derivative(chain.lambda0);
      CHECK((L * chain.u0).norm() < 1e-8 * chain.scale);
      CHECK((L * chain.u1 + chain.sigma * dL * chain.u0).norm() < 1e-8 * chain.scale);
    }
  }
  CHECK(admissible > 300);
}

TEST_CASE("umbrella_omega examples")
{
  const double nu = 0.2;
  const ModalData md = modal_data(D1, K1, 1.0);
  const double k0 = ep_location(K1, nu, 1.0).kappa0;
  const double b0 = beta0(D1, K1);
  const auto at_ep = umbrella_omega(md, D1, K1, k0, 1.0, nu);
  REQUIRE(at_ep);
  CHECK(at_ep->first == doctest::Approx(b0));
  CHECK(at_ep->second == doctest::Approx(b0));
  const auto twice = umbrella_omega(md, D1, K1, 2 * k0, 1.0, nu);
  REQUIRE(twice);
  CHECK(twice->first == doctest::Approx(2 * b0 + std::sqrt(3.0) / 4));
  CHECK(twice->second == doctest::Approx(2 * b0 - std::sqrt(3.0) / 4));
  CHECK_FALSE(umbrella_omega(md, D1, K1, 0.5 * k0, 1.0, nu));

  const Eigen::Matrix2d D0 = (Eigen::Matrix2d() << -1, 0.3, 0.3, 1).finished();
  const ModalData m0 = modal_data(D0, K1, 1.0);
  const auto flat = umbrella_omega(m0, D0, K1, 1.7 * k0, 0.01, nu);
  REQUIRE(flat);
  CHECK(flat->first == doctest::Approx(beta0(D0, K1) * 1.7 * 0.01));
  CHECK(flat->first == flat->second);
}

TEST_CASE("umbrella_kappa examples and consistency")
{
  const double nu = 0.2;
  const ModalData md = modal_data(D1, K1, 1.0);
  const double k0 = ep_location(K1, nu, 1.0).kappa0;
  const double b0 = beta0(D1, K1);
  const double T = md.trD;

  const auto at = umbrella_kappa(md, D1, K1, b0, nu);
  CHECK(at.local_upper == doctest::Approx(k0));
  CHECK(umbrella_kappa(md, D1, K1, b0 + T / std::sqrt(8.0), nu).local_upper == doctest::Approx(2 * k0));
  CHECK(umbrella_kappa(md, D1, K1, -b0, nu).local_lower == doctest::Approx(-k0));

  // exact forms invert umbrella_omega
  for (double beta : {b0 + 0.05, b0 - 0.03, b0 + 0.4})
  {
    const auto k = umbrella_kappa(md, D1, K1, beta, nu);
    for (double kappa : {k.exact_plus, k.exact_minus})
    {
      const auto lines = umbrella_omega(md, D1, K1, kappa, 1.0, nu);
      REQUIRE(lines);
      CHECK(std::min(std::abs(lines->first - beta), std::abs(lines->second - beta)) < 1e-12);
    }
  }

  // numerical inversion of umbrella_omega near beta0 agrees with the local form to o(h^2)
  double previous = 1e300;
  for (double h : {0.04, 0.02, 0.01, 0.005})
  {
    const double beta = b0 + h;
    // bisection on kappa in [k0, 2 k0] for the line through slope beta
    double lo = k0, hi = 2.0 * k0;
    const auto f = [&](double kappa) { return umbrella_omega(md, D1, K1, kappa, 1.0, nu)->first - beta; };
    REQUIRE((f(lo) > 0) != (f(hi) > 0));
    for (int it = 0; it < 200; ++it)
    {
      const double mid = 0.5 * (lo + hi);
      ((f(mid) > 0) == (f(lo) > 0) ? lo : hi) = mid;
    }
    const double ratio = std::abs(0.5 * (lo + hi) - umbrella_kappa(md, D1, K1, beta, nu).local_upper) / (h * h);
    CHECK(ratio < previous);
    previous = ratio;
  }
  CHECK(previous < 0.1 * k0 * 8.0 / (T * T));

  const Eigen::Matrix2d Dd = Eigen::Vector2d(1.0, 0.0).asDiagonal();
  const ModalData mdd = modal_data(Dd, Eigen::Vector2d(1.0, 2.0).asDiagonal(), 1.0);
  CHECK_THROWS_AS(umbrella_kappa(mdd, Dd, Eigen::Vector2d(1.0, 2.0).asDiagonal(), 0.0, nu), SingularConfiguration);
}

TEST_CASE("first-order eigenvalues converge at second order")
{
  const ModalData md = modal_data(D1, K1, 1.0);
  std::vector<double> lt, le;
  for (double t : {1.0, 0.5, 0.25, 0.125})
  {
    const double delta = 0.3 * t, kappa = 0.2 * t, Omega = 0.1 * t, nu = 0.05 * t;
    const auto approx = approx_eigenvalues(md, Omega, delta, kappa, nu);
    const auto exact = exact_spectrum(1.0, D1, K1, Gains{delta, kappa, nu, Omega});
    const double err = pairing_distance({approx.begin(), approx.end()}, exact);
    lt.push_back(std::log(t));
    le.push_back(std::log(err));
  }
  const double mt = std::accumulate(lt.begin(), lt.end(), 0.0) / 4, me = std::accumulate(le.begin(), le.end(), 0.0) / 4;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 4; ++i)
  {
    sxy += (lt[i] - mt) * (le[i] - me);
    sxx += (lt[i] - mt) * (lt[i] - mt);
  }
  CHECK(sxy / sxx >= 1.9);
  CHECK(upper_pair(exact_spectrum(1.0, D1, K1, Gains{})).size() == 2);
}

TEST_CASE("relabeling the coordinates leaves the report invariant")
{
  // swapping x1, x2 maps G -> -G and J -> -J, so (Omega, nu) -> (-Omega, -nu)
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial)
  {
    const Eigen::Matrix2d D = oracle::random_symmetric(rng, 2);
    const Eigen::Matrix2d K = oracle::random_symmetric(rng, 2);
    const Gains g{0.3 * u(rng), 0.3 * u(rng), 0.1 * u(rng), 0.3 * u(rng)};
    const Gains gs{g.delta, g.kappa, -g.nu, -g.Omega};
    const auto a = perturbation_report(rotor(1.0), PerturbationSet(D, K, g));
    const auto b = perturbation_report(rotor(1.0), PerturbationSet(swap_rows(D), swap_rows(K), gs));
    CHECK(a.A == doctest::Approx(b.A).epsilon(1e-12));
    CHECK(a.B == doctest::Approx(b.B).epsilon(1e-10).scale(1e-12));
    CHECK(a.predicted_stable == b.predicted_stable);
    REQUIRE(a.kappa0);
    REQUIRE(b.kappa0);
    CHECK(*a.kappa0 == doctest::Approx(-*b.kappa0));
    if (a.omega0 && b.omega0)
      CHECK(*a.omega0 != doctest::Approx(0.0));
    CHECK(*a.beta0 == doctest::Approx(*b.beta0).epsilon(1e-12));
    const auto ea = a.lambda_approx, eb = b.lambda_approx;
    CHECK(pairing_distance({ea.begin(), ea.end()}, {eb.begin(), eb.end()}) < 1e-12);
  }
}

TEST_CASE("perturbation_report")
{
  const auto r = perturbation_report(rotor(1.0), PerturbationSet(D1, K1, Gains{0.3, 0.2, 0.0, 0.0}));
  CHECK(r.A == -1.0);
  CHECK(r.c.real() == doctest::Approx(0.038125));
  CHECK(*r.beta0 == doctest::Approx(3.0 / (4.0 * sqrt5)));
  CHECK(*r.kappa0 == 0.0);
  CHECK_FALSE(r.predicted_stable);
  const Eigen::Matrix2cd dL = Complex(0, 0.3) * D1.cast<Complex>() + 0.2 * K1.cast<Complex>();
  CHECK(r.epsilon == doctest::Approx(dL.norm()));
  for (int k = 0; k < 2; ++k)
    CHECK(r.lambda_approx[k + 2] == std::conj(r.lambda_approx[k]));

  const auto no_gap = perturbation_report(rotor(1.0), PerturbationSet(D1, Eigen::Matrix2d::Identity(), Gains{}));
  CHECK_FALSE(no_gap.beta0);
  CHECK_FALSE(no_gap.kappa0);

  const RotorModel two = RotorModel::string_preset(2);
  CHECK_THROWS_AS(perturbation_report(two, PerturbationSet::unperturbed(4, 0.1)), NotImplemented);
}
