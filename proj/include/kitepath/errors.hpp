#pragma once

#include <stdexcept>
#include <string>

namespace kitepath {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Path tangent vanished (both angular derivatives ~0); only possible for
/// degenerate parameter sets with zero ranges.
class DegeneratePath : public Error {
  public:
    using Error::Error;
};

class InvalidRadius : public Error {
  public:
    using Error::Error;
};

/// Requested turn is tighter than the wing can fly: m*kappa exceeds the
/// available turning lift.
class CurvatureInfeasible : public Error {
  public:
    using Error::Error;
};

/// Radial apparent wind is non-positive (kite reeling out as fast as the
/// radial wind component).
class RadialOverrun : public Error {
  public:
    using Error::Error;
};

/// No nonnegative tangential speed ratio exists at this state.
class PositionInfeasible : public Error {
  public:
    using Error::Error;
};

/// Minimum altitude is unreachable for the given tether length.
class NoFeasibleElevation : public Error {
  public:
    using Error::Error;
};

class InconsistentBounds : public Error {
  public:
    using Error::Error;
};

/// All multi-start seeds failed to produce a converged solution.
class NoConvergedSolution : public Error {
  public:
    using Error::Error;
};

class TooFewKnots : public Error {
  public:
    using Error::Error;
};

class OutOfDomain : public Error {
  public:
    using Error::Error;
};

/// Malformed input document (not valid JSON, wrong type, unknown key).
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Structurally valid input violating a domain invariant; carries the
/// offending field path.
class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string& field, const std::string& detail = "")
        : Error("invalid value for '" + field + "'" + (detail.empty() ? "" : ": " + detail)),
          field_(field) {}

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

}  // namespace kitepath
