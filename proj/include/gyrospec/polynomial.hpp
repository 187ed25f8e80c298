#pragma once

// Dense polynomial kernels templated on the working scalar. Coefficients are
// stored highest degree first: c(0) z^m + c(1) z^(m-1) + ... + c(m).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace gyrospec
{

template <typename Scalar>
using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Characteristic polynomial det(zI - A) by the Faddeev-LeVerrier trace
// recursion. Returns m+1 monic coefficients.
template <typename Derived>
Coefficients<typename Derived::Scalar> characteristic_coefficients(
    const Eigen::MatrixBase<Derived> &A)
{
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index m = A.rows();
  Coefficients<Scalar> c(m + 1);
  c(0) = Scalar(1);
  Matrix M = Matrix::Zero(m, m);
  Matrix AM(m, m);
  for (Eigen::Index k = 1; k <= m; ++k)
  {
    M = A * M;
    M.diagonal().array() += c(k - 1);
    AM.noalias() = A * M;
    c(k) = -AM.trace() / Scalar(k);
  }
  return c;
}

template <typename Scalar>
struct HornerValue
{
  std::complex<Scalar> value;
  std::complex<Scalar> derivative;
  Scalar magnitude;  // sum |c_k| |z|^k, the rounding-error scale of `value`
};

template <typename Scalar>
HornerValue<Scalar> horner(const Coefficients<Scalar> &c, std::complex<Scalar> z)
{
  std::complex<Scalar> p = c(0);
  std::complex<Scalar> dp(0);
  Scalar mag = std::abs(c(0));
  const Scalar az = std::abs(z);
  for (Eigen::Index k = 1; k < c.size(); ++k)
  {
    dp = dp * z + p;
    p = p * z + c(k);
    mag = mag * az + std::abs(c(k));
  }
  return {p, dp, mag};
}

template <typename Scalar>
std::complex<Scalar> evaluate_polynomial(const Coefficients<Scalar> &c, std::complex<Scalar> z)
{
  return horner(c, z).value;
}

template <typename Scalar>
Coefficients<Scalar> derivative_coefficients(const Coefficients<Scalar> &c)
{
  const Eigen::Index m = c.size() - 1;
  Coefficients<Scalar> d(std::max<Eigen::Index>(m, 1));
  if (m == 0)
  {
    d(0) = Scalar(0);
    return d;
  }
  for (Eigen::Index k = 0; k < m; ++k)
    d(k) = c(k) * Scalar(m - k);
  return d;
}

// Polynomial with the given roots, highest degree first (complex coefficients).
template <typename Scalar>
Coefficients<std::complex<Scalar>> coefficients_from_roots(
    const std::vector<std::complex<Scalar>> &roots)
{
  Coefficients<std::complex<Scalar>> c = Coefficients<std::complex<Scalar>>::Zero(roots.size() + 1);
  c(0) = 1;
  for (std::size_t j = 0; j < roots.size(); ++j)
    for (Eigen::Index k = static_cast<Eigen::Index>(j) + 1; k >= 1; --k)
      c(k) -= roots[j] * c(k - 1);
  return c;
}

// |p(z)| / (max|c_k| (1+|z|)^m): the scale-free residual used to accept a root.
template <typename Scalar>
Scalar scaled_residual(const Coefficients<Scalar> &c, std::complex<Scalar> z)
{
  const Scalar cmax = c.cwiseAbs().maxCoeff();
  const Scalar m = Scalar(c.size() - 1);
  return std::abs(evaluate_polynomial(c, z)) / (cmax * std::pow(Scalar(1) + std::abs(z), m));
}

template <typename Scalar>
struct AberthResult
{
  std::vector<std::complex<Scalar>> roots;
  std::vector<Scalar> residuals;  // scaled_residual per root
  int iterations = 0;
  bool converged = false;
};

// Simultaneous Aberth-Ehrlich iteration followed by residual-guarded Newton
// polish. Initial guesses are deterministic: points on a circle whose radius
// is the coefficient bound max |c_k/c_0|^(1/k), rotated off the real axis.
template <typename Scalar>
AberthResult<Scalar> aberth_roots(const Coefficients<Scalar> &coeffs, int max_iterations)
{
  using C = std::complex<Scalar>;
  const Eigen::Index m = coeffs.size() - 1;
  const Coefficients<Scalar> a = coeffs / coeffs(0);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  AberthResult<Scalar> out;
  Scalar radius = 0;
  for (Eigen::Index k = 1; k <= m; ++k)
    radius = std::max(radius, std::pow(std::abs(a(k)), Scalar(1) / Scalar(k)));
  if (radius == Scalar(0))
  {
    out.roots.assign(m, C(0));
    out.residuals.assign(m, Scalar(0));
    out.converged = true;
    return out;
  }

  std::vector<C> z(m);
  for (Eigen::Index k = 0; k < m; ++k)
  {
    const Scalar theta = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(m) + Scalar(0.4);
    z[k] = std::polar(radius, theta);
  }

  std::vector<bool> done(m, false);
  int it = 0;
  for (; it < max_iterations; ++it)
  {
    bool moved = false;
    for (Eigen::Index k = 0; k < m; ++k)
    {
      if (done[k])
        continue;
      const auto h = horner(a, z[k]);
      if (std::abs(h.value) <= Scalar(4) * Scalar(m) * eps * h.magnitude)
      {
        done[k] = true;
        continue;
      }
      C ratio;
      if (h.derivative == C(0))
        ratio = C(radius * eps * Scalar(16), 0);
      else
        ratio = h.value / h.derivative;
      C repulsion(0);
      for (Eigen::Index j = 0; j < m; ++j)
        if (j != k && z[k] != z[j])
          repulsion += Scalar(1) / (z[k] - z[j]);
      const C step = ratio / (Scalar(1) - ratio * repulsion);
      z[k] -= step;
      moved = true;
      if (std::abs(step) <= eps * std::abs(z[k]))
        done[k] = true;
    }
    if (!moved)
      break;
  }
  out.iterations = it;
  out.converged = std::all_of(done.begin(), done.end(), [](bool d) { return d; });

  for (auto &root : z)
  {
    for (int polish = 0; polish < 3; ++polish)
    {
      const auto h = horner(a, root);
      if (h.derivative == C(0))
        break;
      const C candidate = root - h.value / h.derivative;
      if (std::abs(evaluate_polynomial(a, candidate)) < std::abs(h.value))
        root = candidate;
      else
        break;
    }
  }

  out.roots = std::move(z);
  out.residuals.reserve(m);
  for (const auto &root : out.roots)
    out.residuals.push_back(scaled_residual(a, root));
  return out;
}

// Resultant of p and q as the determinant of their Sylvester matrix.
template <typename Scalar>
Scalar sylvester_resultant(const Coefficients<Scalar> &p, const Coefficients<Scalar> &q)
{
  const Eigen::Index dp = p.size() - 1, dq = q.size() - 1;
  const Eigen::Index n = dp + dq;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> S =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (Eigen::Index r = 0; r < dq; ++r)
    S.row(r).segment(r, dp + 1) = p.transpose();
  for (Eigen::Index r = 0; r < dp; ++r)
    S.row(dq + r).segment(r, dq + 1) = q.transpose();
  return S.partialPivLu().determinant();
}

// Discriminant-type measure Res(p, p') / (||p||^(m-1) ||p'||^m), bounded by 1
// in magnitude (Hadamard) and zero exactly when p has a repeated root.
template <typename Scalar>
Scalar relative_discriminant(const Coefficients<Scalar> &p)
{
  const Coefficients<Scalar> dp = derivative_coefficients(p);
  const Scalar res = sylvester_resultant(p, dp);
  const Eigen::Index m = p.size() - 1;
  const Scalar scale = std::pow(p.norm(), Scalar(m - 1)) * std::pow(dp.norm(), Scalar(m));
  return std::abs(res) / scale;
}

}  // namespace gyrospec
