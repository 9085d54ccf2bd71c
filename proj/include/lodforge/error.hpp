#pragma once

#include <stdexcept>
#include <string>

namespace lodforge {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LODFORGE_DEFINE_ERROR(Name)   \
  class Name : public Error {         \
   public:                            \
    using Error::Error;               \
  }

LODFORGE_DEFINE_ERROR(ParseError);
LODFORGE_DEFINE_ERROR(MissingNormals);
LODFORGE_DEFINE_ERROR(NoPrimitives);
LODFORGE_DEFINE_ERROR(CollinearInput);
LODFORGE_DEFINE_ERROR(DegenerateProjection);
LODFORGE_DEFINE_ERROR(NotCoplanar);
LODFORGE_DEFINE_ERROR(NoInterior);
LODFORGE_DEFINE_ERROR(EmptyModel);
LODFORGE_DEFINE_ERROR(UndefinedForPointCloud);
LODFORGE_DEFINE_ERROR(CheckpointError);

#undef LODFORGE_DEFINE_ERROR

}  // namespace lodforge
