#pragma once

#include <stdexcept>
#include <string>

namespace torusflow {

/// Base class of every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two operands live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// sup|u| exceeded the blow-up threshold or a value became non-finite.
class BlowUp : public Error {
 public:
  BlowUp(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// det(grad phi) dropped below the orientation floor.
class OrientationLoss : public Error {
 public:
  using Error::Error;
};

/// Fixed-point inversion of a diffeomorphism did not converge.
class InversionFailure : public Error {
 public:
  using Error::Error;
};

/// An inertia-operator descriptor outside the admitted multiplier family.
class UnsupportedOperator : public Error {
 public:
  using Error::Error;
};

}  // namespace torusflow
