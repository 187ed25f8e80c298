#include "gyrospec/qep_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gyrospec/errors.hpp"
#include "gyrospec/polynomial.hpp"

namespace gyrospec
{

namespace
{

using Extended = long double;
using ExtendedComplex = std::complex<Extended>;

// Real coefficients give a conjugate-symmetric root set; restore it exactly
// where the iteration left the pairs slightly apart.
void symmetrize_conjugates(const Coefficients<Extended> &c, std::vector<ExtendedComplex> &roots,
                           const Tolerances &tol)
{
  const std::size_t m = roots.size();
  std::vector<bool> used(m, false);
  auto accept = [&](ExtendedComplex z) {
    return scaled_residual(c, z) < static_cast<Extended>(tol.poly_residual);
  };

  for (std::size_t i = 0; i < m; ++i)
  {
    if (used[i] || roots[i].imag() <= 0)
      continue;
    std::size_t best = m;
    Extended best_dist = 0;
    for (std::size_t j = 0; j < m; ++j)
    {
      if (j == i || used[j] || roots[j].imag() > 0)
        continue;
      const Extended d = std::abs(roots[i] - std::conj(roots[j]));
      if (best == m || d < best_dist)
      {
        best = j;
        best_dist = d;
      }
    }
    if (best == m || best_dist > tol.cluster * (1 + std::abs(roots[i])))
      continue;
    const ExtendedComplex mid = (roots[i] + std::conj(roots[best])) / Extended(2);
    if (accept(mid))
    {
      roots[i] = mid;
      roots[best] = std::conj(mid);
    }
    used[i] = used[best] = true;
  }

  for (std::size_t i = 0; i < m; ++i)
  {
    if (used[i] || roots[i].imag() == 0)
      continue;
    if (std::abs(roots[i].imag()) <= tol.cluster * (1 + std::abs(roots[i])))
    {
      const ExtendedComplex real_root(roots[i].real(), 0);
      if (accept(real_root))
        roots[i] = real_root;
    }
  }
}

}  // namespace

Complex CharPoly::operator()(Complex z) const
{
  return evaluate_polynomial(Coefficients<double>(coefficients), z);
}

Coefficients<long double> char_poly_extended(const QuadraticPencil &pencil)
{
  const Eigen::Matrix<Extended, Eigen::Dynamic, Eigen::Dynamic> A =
      pencil.companion().cast<Extended>();
  Coefficients<Extended> c = characteristic_coefficients(A);
  for (Eigen::Index k = 0; k < c.size(); ++k)
  {
    const double v = static_cast<double>(c(k));
    if (!std::isfinite(v))
      throw OverflowError("characteristic polynomial overflowed at coefficient " +
                          std::to_string(k) + "; rescale the pencil (e.g. nondimensionalize by w_1)");
  }
  return c;
}

CharPoly char_poly(const QuadraticPencil &pencil)
{
  return CharPoly{char_poly_extended(pencil).cast<double>()};
}

std::vector<Complex> poly_roots(const Coefficients<long double> &coefficients, const Tolerances &tol)
{
  if (coefficients.size() < 2)
    throw DomainError("root finding needs degree >= 1");
  if (coefficients(0) == 0)
    throw DomainError("leading coefficient is zero");
  if (!coefficients.allFinite())
    throw DomainError("coefficients must be finite");

  auto result = aberth_roots<Extended>(coefficients, tol.max_iterations);
  const auto worst = std::max_element(result.residuals.begin(), result.residuals.end());
  if (*worst >= static_cast<Extended>(tol.poly_residual))
  {
    const auto k = std::distance(result.residuals.begin(), worst);
    const ExtendedComplex z = result.roots[k];
    throw RootFindingError("root finder did not reach the residual target after " +
                               std::to_string(result.iterations) + " sweeps",
                           Complex(static_cast<double>(z.real()), static_cast<double>(z.imag())),
                           static_cast<double>(*worst));
  }
  const Coefficients<Extended> monic = coefficients / coefficients(0);
  symmetrize_conjugates(monic, result.roots, tol);

  std::vector<Complex> roots;
  roots.reserve(result.roots.size());
  for (const auto &z : result.roots)
    roots.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  std::sort(roots.begin(), roots.end(), [](const Complex &a, const Complex &b) {
    if (a.imag() != b.imag())
      return a.imag() > b.imag();
    return a.real() > b.real();
  });
  return roots;
}

std::vector<Complex> poly_roots(const CharPoly &poly, const Tolerances &tol)
{
  return poly_roots(Coefficients<Extended>(poly.coefficients.cast<Extended>()), tol);
}

double discriminant_measure(const Coefficients<long double> &coefficients)
{
  return static_cast<double>(relative_discriminant(coefficients));
}

std::vector<RootCluster> cluster_roots(const std::vector<Complex> &roots, double rel)
{
  const int m = static_cast<int>(roots.size());
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i)
      i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(roots[i] - roots[j]) < rel * (1.0 + std::max(std::abs(roots[i]), std::abs(roots[j]))))
        parent[find(j)] = find(i);

  std::vector<RootCluster> clusters;
  std::vector<int> slot(m, -1);
  for (int i = 0; i < m; ++i)
  {
    const int r = find(i);
    if (slot[r] < 0)
    {
      slot[r] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[slot[r]].members.push_back(i);
  }
  for (auto &c : clusters)
  {
    Complex sum(0.0);
    for (int i : c.members)
      sum += roots[i];
    c.center = sum / static_cast<double>(c.members.size());
  }
  return clusters;
}

std::vector<RootCluster> cluster_roots(const Coefficients<long double> &coefficients,
                                       const std::vector<Complex> &roots, double rel)
{
  auto clusters = cluster_roots(roots, rel);
  for (auto &cluster : clusters)
  {
    const int k = cluster.multiplicity();
    if (k < 2)
      continue;
    Coefficients<Extended> d = coefficients;
    for (int order = 1; order < k; ++order)
      d = derivative_coefficients(d);
    double radius = 0.0;
    for (int i : cluster.members)
      radius = std::max(radius, std::abs(roots[i] - cluster.center));
    ExtendedComplex z(cluster.center.real(), cluster.center.imag());
    const ExtendedComplex start = z;
    for (int it = 0; it < 20; ++it)
    {
      const auto h = horner(d, z);
      if (h.derivative == ExtendedComplex(0))
        break;
      const ExtendedComplex step = h.value / h.derivative;
      z -= step;
      if (std::abs(step) <= std::numeric_limits<Extended>::epsilon() * (1 + std::abs(z)))
        break;
    }
    if (std::abs(z - start) <= 2.0L * radius + std::numeric_limits<Extended>::epsilon())
      cluster.center = Complex(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return clusters;
}

Spectrum solve_qep(const QuadraticPencil &pencil, const Tolerances &tol)
{
  const Coefficients<Extended> coeffs = char_poly_extended(pencil);
  const std::vector<Complex> roots = poly_roots(coeffs, tol);
  const Eigen::Index count = static_cast<Eigen::Index>(roots.size());
  const Eigen::Index dim = pencil.dimension();
  const double stiffness_scale = std::max(1.0, pencil.stiffness_total.norm());

  Spectrum sp;
  sp.eigenvalues.resize(count);
  sp.eigenvectors = Eigen::MatrixXcd::Zero(dim, count);
  sp.residuals.resize(count);
  sp.poly_residuals.resize(count);
  sp.multiplicity.assign(count, 1);
  sp.vector_available.assign(count, false);
  sp.flagged.assign(count, false);

  for (const auto &cluster : cluster_roots(coeffs, roots, tol.cluster))
    for (int i : cluster.members)
      sp.multiplicity[i] = cluster.multiplicity();

  for (Eigen::Index k = 0; k < count; ++k)
  {
    const Complex z = roots[k];
    sp.eigenvalues(k) = z;
    sp.poly_residuals(k) = static_cast<double>(
        scaled_residual(coeffs, ExtendedComplex(z.real(), z.imag())));

    const Eigen::MatrixXcd L = pencil.evaluate(z);
    const double scale = (1.0 + std::norm(z)) * stiffness_scale;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(L, Eigen::ComputeFullV);
    const double sigma_min = svd.singularValues()(dim - 1);
    // L(z) far from singular: z is not an eigenvalue to working accuracy.
    if (sigma_min > std::sqrt(tol.eig_residual) * scale)
    {
      sp.residuals(k) = Spectrum::unavailable;
      sp.flagged[k] = true;
      continue;
    }
    Eigen::VectorXcd u = svd.matrixV().col(dim - 1);
    u.normalize();
    sp.eigenvectors.col(k) = u;
    sp.vector_available[k] = true;
    sp.residuals(k) = (L * u).norm();
    sp.flagged[k] = !(sp.residuals(k) < tol.eig_residual * scale);
  }
  return sp;
}

double max_growth_rate(const Spectrum &spectrum)
{
  return spectrum.eigenvalues.real().maxCoeff();
}

}  // namespace gyrospec
