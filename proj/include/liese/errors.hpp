/**
 * @file  errors.hpp
 * @brief Exception types raised by the navigation library and the CLI.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace liese {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LIESE_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

LIESE_DEFINE_ERROR(PatternViolation);
LIESE_DEFINE_ERROR(NearPiRotation);
LIESE_DEFINE_ERROR(NotPSD);
LIESE_DEFINE_ERROR(PoleSingularity);
LIESE_DEFINE_ERROR(NonMonotoneTime);
LIESE_DEFINE_ERROR(UnsupportedVariant);
LIESE_DEFINE_ERROR(IncompatibleMode);
LIESE_DEFINE_ERROR(InnovationGateExceeded);
LIESE_DEFINE_ERROR(SingularPredCov);
LIESE_DEFINE_ERROR(ConfigError);
LIESE_DEFINE_ERROR(IoError);

#undef LIESE_DEFINE_ERROR

}  // namespace liese
