#pragma once

#include <stdexcept>
#include <string>

namespace ncdirac {

// Base class of everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define NCDIRAC_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

NCDIRAC_DEFINE_ERROR(DegreeError);
NCDIRAC_DEFINE_ERROR(UnitModeError);
NCDIRAC_DEFINE_ERROR(ParameterError);
NCDIRAC_DEFINE_ERROR(GridError);
NCDIRAC_DEFINE_ERROR(SingularParameterError);
NCDIRAC_DEFINE_ERROR(DivisionError);
NCDIRAC_DEFINE_ERROR(StepError);
NCDIRAC_DEFINE_ERROR(CoverageError);
NCDIRAC_DEFINE_ERROR(SizeError);
NCDIRAC_DEFINE_ERROR(DimError);
NCDIRAC_DEFINE_ERROR(ConsistencyError);

#undef NCDIRAC_DEFINE_ERROR

}  // namespace ncdirac
