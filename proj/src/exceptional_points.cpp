#include <algorithm>
#include <cmath>

#include "gyrospec/errors.hpp"
#include "gyrospec/stability_atlas.hpp"

namespace gyrospec
{

namespace
{

using Vector4 = Eigen::Vector4d;

class DoubleRootSystem
{
public:
  DoubleRootSystem(const RotorModel &model, const PerturbationSet &pert) : model_(model), pert_(pert) {}

  Gains gains(double Omega, double kappa) const
  {
    Gains g = pert_.gains();
    g.delta = 0.0;
    g.Omega = Omega;
    g.kappa = kappa;
    return g;
  }

  QuadraticPencil pencil(double Omega, double kappa) const
  {
    return build_pencil(model_, pert_.with_gains(gains(Omega, kappa)));
  }

  Coefficients<long double> coefficients(double Omega, double kappa) const
  {
    return char_poly_extended(pencil(Omega, kappa));
  }

  // (p, p') at z for the coefficients c.
  static std::pair<std::complex<long double>, std::complex<long double>> values(const Coefficients<long double> &c,
                                                                              Complex z)
  {
    const auto h = horner(c, std::complex<long double>(z));
    return {h.value, h.derivative};
  }

  // F = (Re p, Im p, Re p', Im p') in unknowns s = (Omega, kappa, Re z, Im z).
  Vector4 residual(const Vector4 &s) const
  {
    const auto [p, dp] = values(coefficients(s(0), s(1)), Complex(s(2), s(3)));
    return Vector4(double(p.real()), double(p.imag()), double(dp.real()), double(dp.imag()));
  }

  Eigen::Matrix4d jacobian(const Vector4 &s) const
  {
    Eigen::Matrix4d J;
    const Complex z(s(2), s(3));
    for (int k = 0; k < 2; ++k)
    {
      const double h = 1e-6 * std::max(1.0, std::abs(s(k)));
      Vector4 plus = s, minus = s;
      plus(k) += h;
      minus(k) -= h;
      J.col(k) = (residual(plus) - residual(minus)) / (2.0 * h);
    }
    const auto c = coefficients(s(0), s(1));
    const auto [dp, ddp] = values(derivative_coefficients(c), z);
    const Complex d1(double(dp.real()), double(dp.imag())), d2(double(ddp.real()), double(ddp.imag()));
    J.col(2) << d1.real(), d1.imag(), d2.real(), d2.imag();
    J.col(3) << -d1.imag(), d1.real(), -d2.imag(), d2.real();
    return J;
  }

private:
  const RotorModel &model_;
  const PerturbationSet &pert_;
};

double min_gap(const std::vector<Complex> &roots, Complex *midpoint)
{
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
    {
      const Complex mid = 0.5 * (roots[i] + roots[j]);
      if (mid.imag() < 0.0)
        continue;
      const double gap = std::abs(roots[i] - roots[j]) / (1.0 + std::abs(mid));
      if (gap < best)
      {
        best = gap;
        if (midpoint)
          *midpoint = mid;
      }
    }
  return best;
}

}  // namespace

ExceptionalPointSearch find_exceptional_points(const RotorModel &model, const PerturbationSet &pert,
                                               const SearchBox &box, const Tolerances &tol)
{
  if (!(box.Omega_max > box.Omega_min) || !(box.kappa_max > box.kappa_min) || box.coarse < 3)
    throw DomainError("search box must be non-empty with at least 3 coarse nodes per axis");
  const DoubleRootSystem system(model, pert);
  const int m = box.coarse;
  const auto Om = [&](int i) { return box.Omega_min + (box.Omega_max - box.Omega_min) * i / (m - 1); };
  const auto ka = [&](int j) { return box.kappa_min + (box.kappa_max - box.kappa_min) * j / (m - 1); };

  Eigen::MatrixXd gap(m, m);
  std::vector<Complex> guess(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
    {
      try
      {
        gap(i, j) = min_gap(poly_roots(system.coefficients(Om(i), ka(j)), tol), &guess[i * m + j]);
      }
      catch (const Error &)
      {
        gap(i, j) = std::numeric_limits<double>::quiet_NaN();
      }
    }

  ExceptionalPointSearch out;
  for (int i = 1; i + 1 < m; ++i)
    for (int j = 1; j + 1 < m; ++j)
    {
      bool minimum = std::isfinite(gap(i, j));
      for (int di = -1; di <= 1 && minimum; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          if ((di || dj) && !(gap(i, j) <= gap(i + di, j + dj)))
            minimum = false;
      if (!minimum)
        continue;

      Vector4 s(Om(i), ka(j), guess[i * m + j].real(), guess[i * m + j].imag());
      Vector4 F = system.residual(s);
      int it = 0;
      bool converged = F.norm() == 0.0;
      for (; it < 100 && !converged; ++it)
      {
        const Vector4 step = system.jacobian(s).completeOrthogonalDecomposition().solve(-F);
        double t = 1.0;
        Vector4 trial = s + step;
        Vector4 Ft = system.residual(trial);
        for (int halve = 0; halve < 30 && Ft.norm() > F.norm(); ++halve)
        {
          t *= 0.5;
          trial = s + t * step;
          Ft = system.residual(trial);
        }
        const bool stalled = (trial - s).norm() <= 1e-15 * (1.0 + s.norm());
        s = trial;
        F = Ft;
        converged = stalled || F.norm() == 0.0;
      }

      const Gains where = system.gains(s(0), s(1));
      Complex z(s(2), std::abs(s(3)));
      const auto coeffs = system.coefficients(s(0), s(1));
      const double disc = discriminant_measure(coeffs);
      NearMiss miss{where, z, disc, {}};
      const double slack = 1e-9;
      if (s(0) < box.Omega_min - slack || s(0) > box.Omega_max + slack || s(1) < box.kappa_min - slack ||
          s(1) > box.kappa_max + slack)
      {
        miss.reason = "converged outside the search box";
        out.near_misses.push_back(miss);
        continue;
      }
      if (!converged || !(disc < tol.discriminant))
      {
        miss.reason = converged ? "discriminant above tolerance" : "Newton iteration did not converge";
        out.near_misses.push_back(miss);
        continue;
      }

      // polish the eigenvalue on the double-root cluster of the final polynomial
      const auto roots = poly_roots(coeffs, tol);
      for (const auto &cl : cluster_roots(coeffs, roots, tol.cluster))
        if (cl.multiplicity() >= 2 && std::abs(cl.center - z) < 1e-6 * (1.0 + std::abs(z)))
          z = cl.center;

      const QuadraticPencil pencil = system.pencil(s(0), s(1));
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil.evaluate(z));
      const double scale = std::norm(z) + pencil.damping_total.norm() * std::abs(z) + pencil.stiffness_total.norm();
      const Eigen::VectorXd sv = svd.singularValues();
      const int deficiency = static_cast<int>((sv.array() < tol.rank * scale).count());
      if (deficiency == 0)
      {
        miss.reason = "L(z) has full numerical rank";
        out.near_misses.push_back(miss);
        continue;
      }

      SingularPointRecord rec;
      rec.kind = deficiency >= 2 ? SingularKind::diabolical : SingularKind::exceptional;
      rec.location = where;
      rec.eigenvalue = z;
      rec.discriminant = disc;
      rec.poly_residual = double(scaled_residual(coeffs, std::complex<long double>(z)));
      rec.eigenvector_count = deficiency;
      rec.singular_values = sv;
      rec.newton_iterations = it;

      const bool duplicate = std::any_of(out.points.begin(), out.points.end(), [&](const SingularPointRecord &r) {
        return std::abs(r.location.Omega - where.Omega) < 1e-8 && std::abs(r.location.kappa - where.kappa) < 1e-8 &&
               std::abs(r.eigenvalue - z) < 1e-6;
      });
      if (!duplicate)
        out.points.push_back(rec);
    }
  return out;
}

}  // namespace gyrospec
