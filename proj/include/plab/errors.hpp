#pragma once

#include <stdexcept>
#include <string>

namespace plab {

/// Base for every error raised by the library. The CLI maps these to
/// non-zero exit codes; callers that want finer control catch the subtypes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct GradeMismatch : Error {
  using Error::Error;
};
struct RankDeficient : Error {
  using Error::Error;
};
struct NonUnitBlade : Error {
  using Error::Error;
};
struct InvalidParameter : Error {
  using Error::Error;
};

struct NotOnSurface : Error {
  using Error::Error;
};
struct DegenerateTangent : Error {
  using Error::Error;
};
struct IllConditionedStencil : Error {
  using Error::Error;
};
struct NonFlatPoint : Error {
  using Error::Error;
};
struct NotSpecial : Error {
  using Error::Error;
};
struct UnclassifiableRecord : Error {
  using Error::Error;
};

struct UnstableComponents : Error {
  using Error::Error;
};
struct NotHyperbolic : Error {
  using Error::Error;
};
struct DegenerateNu : Error {
  using Error::Error;
};

struct ImmersionLost : Error {
  using Error::Error;
};
struct BoundaryClampViolated : Error {
  using Error::Error;
};
struct MissingBoundary : Error {
  using Error::Error;
};

struct CurveNotClosed : Error {
  using Error::Error;
};
struct VanishingDenominator : Error {
  using Error::Error;
};
struct GridTooSmall : Error {
  using Error::Error;
};

}  // namespace plab
