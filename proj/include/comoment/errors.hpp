#pragma once

#include <stdexcept>
#include <string>

namespace comoment {

// Error taxonomy shared by the library and the CLI. Categories map to
// process exit codes: ParseError -> 2, DomainError -> 3, ComputeError -> 4.
enum class ErrorCategory { Parse = 2, Domain = 3, Compute = 4 };

class Error : public std::runtime_error {
public:
  Error(ErrorCategory cat, const std::string& what)
      : std::runtime_error(what), cat_(cat) {}
  ErrorCategory category() const noexcept { return cat_; }
  int exit_code() const noexcept { return static_cast<int>(cat_); }

private:
  ErrorCategory cat_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(ErrorCategory::Parse, w) {}
};

// Reproduction target identifier that names no known table or figure.
struct UnknownTarget : ParseError {
  explicit UnknownTarget(const std::string& w) : ParseError(w) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorCategory::Domain, w) {}
protected:
  DomainError(ErrorCategory c, const std::string& w) : Error(c, w) {}
};

// Requested value lies outside the representable range of the model.
struct OutOfRange : DomainError {
  explicit OutOfRange(const std::string& w) : DomainError(w) {}
};

// A sample column is constant where variation is required.
struct DegenerateSample : DomainError {
  explicit DegenerateSample(const std::string& w) : DomainError(w) {}
};

// A marginal has zero standard deviation where standardization is required.
struct DegenerateMarginal : DomainError {
  explicit DegenerateMarginal(const std::string& w) : DomainError(w) {}
};

struct InsufficientSample : DomainError {
  explicit InsufficientSample(const std::string& w) : DomainError(w) {}
};

// Operation not defined for the given marginal class (e.g. two-sided branch
// construction over a discrete marginal).
struct UnsupportedCase : DomainError {
  explicit UnsupportedCase(const std::string& w) : DomainError(w) {}
};

// Streaming accumulators of different orders cannot be merged.
struct OrderMismatch : DomainError {
  explicit OrderMismatch(const std::string& w) : DomainError(w) {}
};

struct ComputeError : Error {
  explicit ComputeError(const std::string& w) : Error(ErrorCategory::Compute, w) {}
protected:
  ComputeError(ErrorCategory c, const std::string& w) : Error(c, w) {}
};

// The requested absolute moment is infinite or numerically non-finite.
struct DivergentMoment : ComputeError {
  explicit DivergentMoment(const std::string& w) : ComputeError(w) {}
};

struct QuadratureFailure : ComputeError {
  explicit QuadratureFailure(const std::string& w) : ComputeError(w) {}
};

}  // namespace comoment
