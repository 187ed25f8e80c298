#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "gyrospec/polynomial.hpp"
#include "gyrospec/rotor_model.hpp"
#include "gyrospec/tolerances.hpp"

namespace gyrospec
{

// Monic real polynomial, highest degree first.
struct CharPoly
{
  Eigen::VectorXd coefficients;

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  Complex operator()(Complex z) const;
};

// det L(z) as a monic polynomial of degree 4n: Faddeev-LeVerrier on the
// companion matrix, accumulated in long double. Throws OverflowError when a
// coefficient is not finite.
CharPoly char_poly(const QuadraticPencil &pencil);

// Long-double coefficients of det L(z); the working precision of the solver.
Coefficients<long double> char_poly_extended(const QuadraticPencil &pencil);

// All roots of `poly`. Each returned root satisfies
// |p(z)| / (max|c| (1+|z|)^deg) < tol.poly_residual; repeated roots come back
// as nearby simple roots. For real coefficients the result is closed under
// conjugation. Throws RootFindingError when the iteration cap is hit.
std::vector<Complex> poly_roots(const CharPoly &poly, const Tolerances &tol = {});
std::vector<Complex> poly_roots(const Coefficients<long double> &coefficients,
                                const Tolerances &tol = {});

// Relative discriminant of a char poly, see relative_discriminant().
double discriminant_measure(const Coefficients<long double> &coefficients);

struct RootCluster
{
  Complex center;            // mean of the members
  std::vector<int> members;  // indices into the root list
  int multiplicity() const { return static_cast<int>(members.size()); }
};

// Single-linkage clusters of roots closer than rel*(1+|z|).
std::vector<RootCluster> cluster_roots(const std::vector<Complex> &roots, double rel);

// As above, then each cluster of multiplicity k > 1 has its center polished
// by Newton on the (k-1)-th derivative of the polynomial, where the multiple
// root is simple.
std::vector<RootCluster> cluster_roots(const Coefficients<long double> &coefficients,
                                       const std::vector<Complex> &roots, double rel);

struct Spectrum
{
  static constexpr double unavailable = std::numeric_limits<double>::infinity();

  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // unit columns; zero column when unavailable
  Eigen::VectorXd residuals;      // ||L(z)u||, `unavailable` when no vector was recovered
  Eigen::VectorXd poly_residuals;
  std::vector<int> multiplicity;  // size of the cluster each eigenvalue belongs to
  std::vector<bool> vector_available;
  std::vector<bool> flagged;      // residual above tol.eig_residual * (1+|z|^2) * max(1,||S||)

  Eigen::Index size() const { return eigenvalues.size(); }
};

Spectrum solve_qep(const QuadraticPencil &pencil, const Tolerances &tol = {});

// max Re z over the spectrum.
double max_growth_rate(const Spectrum &spectrum);

}  // namespace gyrospec
