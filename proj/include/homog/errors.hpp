#pragma once

#include <stdexcept>
#include <string>

namespace homog {

// Base for every failure raised by the library. The what() string always
// starts with "module/guard:" so CLI exit paths can name the failing guard.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PointNotOnBoundary : Error {
  using Error::Error;
};
struct PointNotInterior : Error {
  using Error::Error;
};
struct UnsupportedDimension : Error {
  using Error::Error;
};
struct UnsupportedDomain : Error {
  using Error::Error;
};
struct QuadratureUnderResolved : Error {
  using Error::Error;
};
struct PointTooCloseToBoundary : Error {
  using Error::Error;
};
struct MeshUnderResolved : Error {
  using Error::Error;
};
struct DegenerateFit : Error {
  using Error::Error;
};
struct IllConditioned : Error {
  using Error::Error;
};
struct SingularMatrix : Error {
  using Error::Error;
};
struct ConditionViolated : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace homog
