#pragma once

#include <stdexcept>
#include <string>

namespace piolafe
{

/// Base class of all errors raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

#define PIOLAFE_ERROR(Name)                                                    \
  class Name : public Error                                                    \
  {                                                                            \
  public:                                                                      \
    using Error::Error;                                                        \
  }

PIOLAFE_ERROR(DegenerateTriangle);
PIOLAFE_ERROR(DegenerateJacobian);
PIOLAFE_ERROR(UnsupportedDegree);
PIOLAFE_ERROR(RankDeficiency);
PIOLAFE_ERROR(SingularVandermonde);
PIOLAFE_ERROR(DegenerateResult);
PIOLAFE_ERROR(InconsistentBoundaryTags);
PIOLAFE_ERROR(SingularSystem);
PIOLAFE_ERROR(SingularPatch);
PIOLAFE_ERROR(MeshFormatError);

#undef PIOLAFE_ERROR

} // namespace piolafe
