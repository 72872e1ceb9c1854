// Copyright 2026 The isomedia Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace isomedia {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or intrinsics; exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad input values (non-finite positions, mismatched shapes).
class InputError : public Error {
 public:
  using Error::Error;
};

// File missing, unreadable, or malformed; exit code 3.
class IoError : public Error {
 public:
  using Error::Error;
};

// Divergence or non-finite gradients; exit code 4.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A caller violated an operation precondition that is not about input data
// (e.g. volume estimation with a perspective camera).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Inverting the matting model where the transmittance is too small.
class IllConditionedError : public NumericError {
 public:
  IllConditionedError(const std::string& what, int channel)
      : NumericError(what), channel_(channel) {}
  int channel() const noexcept { return channel_; }

 private:
  int channel_;
};

}  // namespace isomedia
