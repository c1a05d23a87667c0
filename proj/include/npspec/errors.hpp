#pragma once

#include <stdexcept>
#include <string>

namespace npspec {

/// Base of every domain error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define NPSPEC_DEFINE_ERROR(Name)        \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

NPSPEC_DEFINE_ERROR(InvalidDomain);
NPSPEC_DEFINE_ERROR(DegenerateParametrization);
NPSPEC_DEFINE_ERROR(OutOfRange);
NPSPEC_DEFINE_ERROR(CurveOverlap);
NPSPEC_DEFINE_ERROR(GramNotPositive);
NPSPEC_DEFINE_ERROR(NearSingular);
NPSPEC_DEFINE_ERROR(ExactPole);
NPSPEC_DEFINE_ERROR(SeriesPole);
NPSPEC_DEFINE_ERROR(NoContrast);
NPSPEC_DEFINE_ERROR(NoPeaks);
NPSPEC_DEFINE_ERROR(Inconsistent);
NPSPEC_DEFINE_ERROR(IllConditioned);
NPSPEC_DEFINE_ERROR(FormatError);

#undef NPSPEC_DEFINE_ERROR

}  // namespace npspec
