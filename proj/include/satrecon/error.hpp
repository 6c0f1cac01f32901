// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace satrecon {

/// Base of every domain error raised by the library. The CLI maps these to
/// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A matrix or evaluation is numerically singular.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// Malformed, truncated or inconsistent file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// An operation that must produce a non-empty result produced nothing
/// (AOI outside the image, no overlap during alignment, ...).
class EmptyResult : public Error {
 public:
  using Error::Error;
};

}  // namespace satrecon
