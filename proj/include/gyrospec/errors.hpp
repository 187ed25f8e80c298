#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace gyrospec
{

// Base for every error raised by the numerical library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error
{
public:
  using Error::Error;
};

class SymmetryError : public Error
{
public:
  using Error::Error;
};

// Input outside the regime where a formula or operation is defined.
class DomainError : public Error
{
public:
  using Error::Error;
};

// Degenerate data that makes a closed form undefined (e.g. rho1 == rho2).
class SingularConfiguration : public DomainError
{
public:
  using DomainError::DomainError;
};

class InfinitePeriodError : public DomainError
{
public:
  using DomainError::DomainError;
};

class NotImplemented : public Error
{
public:
  using Error::Error;
};

// Two algebraically equivalent routes disagree.
class ConsistencyError : public Error
{
public:
  using Error::Error;
};

class ResolutionError : public Error
{
public:
  ResolutionError(const std::string &what, double estimate) : Error(what), estimate(estimate) {}
  double estimate;
};

class OverflowError : public Error
{
public:
  using Error::Error;
};

class RootFindingError : public Error
{
public:
  RootFindingError(const std::string &what, std::complex<double> best, double residual)
    : Error(what), best_iterate(best), residual(residual)
  {
  }
  std::complex<double> best_iterate;
  double residual;
};

// Jordan chain or eigenvector certification failed.
class DefectError : public Error
{
public:
  DefectError(const std::string &what, double residual0, double residual1)
    : Error(what), residual0(residual0), residual1(residual1)
  {
  }
  double residual0;
  double residual1;
};

}  // namespace gyrospec
