#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace pacurves {

enum class ErrorCode {
  Usage,            // bad configuration or malformed input file
  Input,            // value-level precondition violated by the caller
  Size,             // series too short for a stencil
  Domain,           // point outside the model or anchor outside the grid
  Unsupported,      // operation not defined for this model kind
  Blowup,           // integrator produced a non-finite state
  Regularity,       // vanishing raw speed
  DegenerateCurve,  // Gram-Schmidt pivot below tolerance
  DegenerateFit,    // rank-deficient least squares
  NearOrthogonal,   // |cos theta| too small for division
  TorsionVanishing,
  ParallelCase,     // potential function vanishes identically
  Infeasible,       // prescribed data produce no admissible curve
  Integration,      // embedded constraint drift during synthesis
};

const char* to_string(ErrorCode code);

/// Library-wide exception. Numerical failures carry the arc-length parameter
/// at which they were detected when one is meaningful.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<double> where = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<double> where() const noexcept { return where_; }

  /// True for failures of the numerics rather than of the request itself.
  bool numerical() const noexcept;

 private:
  ErrorCode code_;
  std::optional<double> where_;
};

}  // namespace pacurves
