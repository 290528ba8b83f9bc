#pragma once

#include <stdexcept>
#include <string>

namespace ghostfringe {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A constructor or operation received an argument outside its domain.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Two objects that must share a sampling grid (or accumulator
/// configuration) do not.
class GridMismatch : public Error {
public:
  using Error::Error;
};

/// Sampling is too coarse (or too fine) for the requested numerical method.
class SamplingBoundError : public Error {
public:
  SamplingBoundError(const std::string &what, double bound)
      : Error(what), bound_(bound) {}
  double bound() const noexcept { return bound_; }

private:
  double bound_;
};

/// A closed form was requested outside the regime where it holds
/// (finite coherence length, asymmetric arms); use the quadrature variant.
class RegimeError : public Error {
public:
  using Error::Error;
};

/// Normalized correlation requested where a mean intensity vanishes.
class UndefinedCorrelation : public Error {
public:
  using Error::Error;
};

/// Normal equations of a fit are singular; names the degenerate parameter.
class RankDeficiency : public Error {
public:
  RankDeficiency(const std::string &what, std::string parameter)
      : Error(what), parameter_(std::move(parameter)) {}
  const std::string &parameter() const noexcept { return parameter_; }

private:
  std::string parameter_;
};

} // namespace ghostfringe
