#pragma once

#include <stdexcept>
#include <string>

namespace pupilload {

/// Base class for all pupilload runtime failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A CSV row could not be parsed; the message names the file and line.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A recording ended up with no usable samples (or zero time span).
class EmptyRecordingError : public Error {
 public:
  using Error::Error;
};

/// A temporal segment holds fewer samples than the configured minimum.
class SparseSegmentError : public Error {
 public:
  using Error::Error;
};

/// All values in a segment are identical; a Beta fit is undefined.
class DegenerateSegmentError : public Error {
 public:
  using Error::Error;
};

}  // namespace pupilload
