#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace spectral_lab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation needs a polynomial of positive degree (or of a specific degree).
class DegreeError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: bad coefficients, non-monic record, out-of-range parameter.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Tuples or polynomials of incompatible sizes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Floating Sturm signs were too close to zero and exact mode was disabled,
/// or the recovered roots failed the reconstruction check.
class CertificationAmbiguous : public Error {
 public:
  using Error::Error;
};

class RootFindingFailed : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class DegeneratePencil : public Error {
 public:
  using Error::Error;
};

class NotHyperbolicError : public Error {
 public:
  explicit NotHyperbolicError(const std::string& what,
                              std::optional<double> lambda = std::nullopt)
      : Error(what), lambda_(lambda) {}

  /// Pencil parameter at which hyperbolicity was lost, when known.
  std::optional<double> lambda() const { return lambda_; }

 private:
  std::optional<double> lambda_;
};

/// Closed-form root derivatives requested at a multiple root or at a zero of Q.
class GenericityError : public Error {
 public:
  using Error::Error;
};

class SegmentNotHyperbolic : public Error {
 public:
  using Error::Error;
};

class WindowError : public Error {
 public:
  using Error::Error;
};

class LabelingAmbiguous : public Error {
 public:
  using Error::Error;
};

/// The expected asymptotic regime was not reached; retry with a smaller parameter.
class InconclusiveAtScale : public Error {
 public:
  using Error::Error;
};

}  // namespace spectral_lab
