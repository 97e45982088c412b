#pragma once

#include <stdexcept>
#include <string>

namespace fouriernet {

// Base class for all library errors. Each subclass names one failure mode so
// callers (and tests) can catch precisely.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FOURIERNET_DEFINE_ERROR(Name)                   \
  class Name : public Error {                           \
   public:                                              \
    explicit Name(const std::string& what) : Error(what) {} \
  }

FOURIERNET_DEFINE_ERROR(DegenerateRegion);
FOURIERNET_DEFINE_ERROR(InvalidHarmonic);
FOURIERNET_DEFINE_ERROR(TooFewSamples);
FOURIERNET_DEFINE_ERROR(ShapeMismatch);
FOURIERNET_DEFINE_ERROR(OddSpatialDim);
FOURIERNET_DEFINE_ERROR(ConfigError);
FOURIERNET_DEFINE_ERROR(EmptyDataset);
FOURIERNET_DEFINE_ERROR(InvalidDims);
FOURIERNET_DEFINE_ERROR(FormatError);

#undef FOURIERNET_DEFINE_ERROR

}  // namespace fouriernet
