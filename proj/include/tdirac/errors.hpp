#pragma once

#include <stdexcept>
#include <string>

namespace tdirac {

// Root of every error the library throws. Callers that only care about
// "the computation was refused" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument had the wrong grade (e.g. Com on a non-bivector).
class GradeError : public Error {
 public:
  using Error::Error;
};

class SingularMultivector : public Error {
 public:
  using Error::Error;
};

// det >= 0 or signature != -2 at some point.
class MetricAxiomViolation : public Error {
 public:
  using Error::Error;
};

// A finite-difference stencil left the chart box.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

class UnknownMetric : public Error {
 public:
  using Error::Error;
};

class NotSpin : public Error {
 public:
  using Error::Error;
};

class OffShellMomentum : public Error {
 public:
  using Error::Error;
};

class NoSolution : public Error {
 public:
  using Error::Error;
};

class JacobianError : public Error {
 public:
  using Error::Error;
};

class IncompatibleContorsion : public Error {
 public:
  using Error::Error;
};

// Generic precondition failure not covered by a more specific type.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tdirac
